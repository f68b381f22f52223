//! JSON system descriptions.
//!
//! ```json
//! {
//!   "name": "oscillator",
//!   "coordinates": ["q"],
//!   "metric": ["1"],
//!   "potential": "q^2/2",
//!   "G": "q",
//!   "constants": {"c": 0, "c0": 0.5, "c1": 0, "C": 1, "Omega": 0, "k": "1/1"},
//!   "domain": {"q": [-2, 2]}
//! }
//! ```
//!
//! `metric` is row-major, either flat (`N*N` strings) or nested. Momenta are
//! named `p_<coordinate>` and default to `[-2, 2]`; `u` and `p_u` default to
//! `[0.3, 2.5]` and `[-2, 2]`. `hbar` and `omega` are optional and enable the
//! quantum parameters.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classical::{parse_ratio, ExtensionParams, NaturalHamiltonian};
use crate::expr::sample::SampleDomain;
use crate::expr::{parse_with, ParseError, SymbolTable};
use crate::expr::{Expr, Symbol, SymbolKind};
use crate::geometry::Metric;
use crate::quantum::{radial_coordinate, QuantumParams};
use crate::systems::{aux_boxes, momentum, GCandidate, SystemDef};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("in `{field}`: {source}")]
    Parse {
        field: String,
        #[source]
        source: ParseError,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricEntries {
    Flat(Vec<String>),
    Nested(Vec<Vec<String>>),
}

fn default_k() -> String {
    "1/1".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub c: f64,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(rename = "C", default)]
    pub big_c: f64,
    #[serde(rename = "Omega", default)]
    pub big_omega: f64,
    #[serde(default = "default_k")]
    pub k: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub coordinates: Vec<String>,
    pub metric: MetricEntries,
    pub potential: String,
    #[serde(rename = "G")]
    pub g: String,
    pub constants: Constants,
    pub domain: BTreeMap<String, [f64; 2]>,
}

fn parse_field(field: &str, text: &str, table: &SymbolTable) -> Result<Expr, ConfigError> {
    parse_with(text, table).map_err(|source| ConfigError::Parse {
        field: field.to_string(),
        source,
    })
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn metric_rows(&self) -> Result<Vec<Vec<String>>, ConfigError> {
        let n = self.coordinates.len();
        let rows = match &self.metric {
            MetricEntries::Flat(v) => {
                if v.len() != n * n {
                    return Err(ConfigError::Invalid(format!(
                        "metric has {} entries, expected {}",
                        v.len(),
                        n * n
                    )));
                }
                v.chunks(n).map(|r| r.to_vec()).collect()
            }
            MetricEntries::Nested(rows) => rows.clone(),
        };
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(ConfigError::Invalid(format!("metric must be {n}x{n}")));
        }
        Ok(rows)
    }

    /// Builds an unvalidated catalog entry.
    pub fn into_system(&self) -> Result<SystemDef, ConfigError> {
        if self.coordinates.is_empty() {
            return Err(ConfigError::Invalid("no coordinates".into()));
        }
        let coords: Vec<Symbol> = self.coordinates.iter().map(|n| Symbol::coordinate(n)).collect();
        let table: SymbolTable = coords.iter().cloned().collect();
        let mut g = Vec::new();
        for (i, row) in self.metric_rows()?.iter().enumerate() {
            let mut out = Vec::new();
            for (j, e) in row.iter().enumerate() {
                out.push(parse_field(&format!("metric[{i}][{j}]"), e, &table)?);
            }
            g.push(out);
        }
        let metric = Metric::new(coords.clone(), g).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let v = parse_field("potential", &self.potential, &table)?;
        let gfun = parse_field("G", &self.g, &table)?;
        let base = NaturalHamiltonian::new(metric, v);

        let k = &self.constants;
        let (m, n) = parse_ratio(&k.k).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let preset = ExtensionParams::new(k.c, k.c0, k.big_c, m, n)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?
            .with_c1(k.c1)
            .with_omega_cap(k.big_omega);

        let mut domain = SampleDomain::new();
        for q in &coords {
            domain.set_box(&momentum(q), -2.0, 2.0);
        }
        domain = aux_boxes(domain);
        for (name, [lo, hi]) in &self.domain {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(ConfigError::Invalid(format!("empty box for `{name}`")));
            }
            let sym = if let Some(q) = coords.iter().find(|q| q.name() == name) {
                q.clone()
            } else if coords.iter().any(|q| format!("p_{}", q.name()) == *name) {
                Symbol::momentum(name)
            } else if name == "u" {
                radial_coordinate()
            } else if name == "p_u" {
                Symbol::new("p_u", SymbolKind::AuxMomentum)
            } else {
                return Err(ConfigError::Invalid(format!("domain names unknown symbol `{name}`")));
            };
            domain.set_box(&sym, *lo, *hi);
        }
        for q in &coords {
            if !self.domain.contains_key(q.name()) {
                return Err(ConfigError::Invalid(format!(
                    "no sampling box for coordinate `{}`",
                    q.name()
                )));
            }
        }

        let quantum = k.hbar.map(|hbar| {
            QuantumParams::new(hbar, k.c, coords.len())
                .with_c0(k.c0)
                .with_c1(k.c1)
                .with_big_c(k.big_c)
                .with_omega(k.omega.unwrap_or(0.0))
        });
        Ok(SystemDef {
            name: self.name.clone().unwrap_or_else(|| "config".into()),
            summary: "loaded from a config file".into(),
            base: Some(base),
            candidates: vec![GCandidate::new("G", gfun, k.c, k.c0, k.c1)],
            ladder: None,
            planted_negatives: Vec::new(),
            presets: vec![preset],
            domain,
            classical_only: quantum.is_none(),
            quantum,
            eigen: None,
        })
    }

    /// Config form of a catalog entry: first candidate, first preset.
    pub fn from_system(sys: &SystemDef) -> Result<Self, ConfigError> {
        let base = sys
            .base
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid(format!("`{}` has no base Hamiltonian", sys.name)))?;
        let cand = sys
            .candidates
            .first()
            .ok_or_else(|| ConfigError::Invalid(format!("`{}` has no G", sys.name)))?;
        let metric = base.metric();
        let flat = metric.g().iter().flatten().map(|e| e.to_string()).collect();
        let preset = sys.presets.first();
        let constants = Constants {
            c: cand.c,
            c0: cand.c0,
            c1: cand.c1,
            big_c: preset.map_or(0.0, |p| p.big_c),
            big_omega: preset.map_or(0.0, |p| p.big_omega),
            k: preset.map_or_else(default_k, |p| format!("{}/{}", p.m(), p.n())),
            hbar: sys.quantum.as_ref().map(|q| q.hbar),
            omega: sys.quantum.as_ref().map(|q| q.omega),
        };
        let domain = sys
            .domain
            .boxes()
            .iter()
            .map(|(s, lo, hi)| (s.name().to_string(), [*lo, *hi]))
            .collect();
        Ok(SystemConfig {
            name: Some(sys.name.clone()),
            coordinates: metric.coords().iter().map(|s| s.name().to_string()).collect(),
            metric: MetricEntries::Flat(flat),
            potential: base.potential().to_string(),
            g: cand.g.to_string(),
            constants,
            domain,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    const OSC: &str = r#"{
        "name": "osc",
        "coordinates": ["q"],
        "metric": ["1"],
        "potential": "q^2/2",
        "G": "q",
        "constants": {"c": 0, "c0": 0.5, "C": 1, "k": "2/1"},
        "domain": {"q": [-2, 2]}
    }"#;

    #[test]
    fn parses_and_validates() {
        let sys = SystemConfig::from_json(OSC).unwrap().into_system().unwrap();
        assert_eq!(sys.name, "osc");
        assert_eq!(sys.presets[0].m(), 2);
        sys.validate().unwrap();
    }

    #[test]
    fn nested_metric_is_accepted() {
        let text = OSC.replace(r#"["1"]"#, r#"[["1"]]"#);
        SystemConfig::from_json(&text).unwrap().into_system().unwrap();
    }

    #[test]
    fn bad_expressions_and_boxes_are_rejected() {
        let text = OSC.replace("q^2/2", "w^2");
        assert!(matches!(
            SystemConfig::from_json(&text).unwrap().into_system(),
            Err(ConfigError::Parse { .. })
        ));
        let text = OSC.replace(r#""q": [-2, 2]"#, r#""x": [-2, 2]"#);
        assert!(SystemConfig::from_json(&text).unwrap().into_system().is_err());
        assert!(SystemConfig::from_json("{").is_err());
        let text = OSC.replace(r#"["1"]"#, r#"["1", "0"]"#);
        assert!(SystemConfig::from_json(&text).unwrap().into_system().is_err());
    }

    #[test]
    fn catalog_entries_round_trip() {
        for sys in systems::catalog().into_iter().filter(|s| s.base.is_some()) {
            let cfg = SystemConfig::from_system(&sys).unwrap();
            let back = SystemConfig::from_json(&cfg.to_json()).unwrap();
            assert_eq!(cfg, back);
            let rebuilt = back.into_system().unwrap();
            let out = rebuilt.validate();
            assert!(out.is_ok(), "{}: {out:?}", sys.name);
        }
    }
}
