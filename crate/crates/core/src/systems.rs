//! Built-in systems with their ladder data, extension presets, sampling boxes
//! and eigenfunctions.

use crate::classical::{fundamental_comparison, ExtensionParams, NaturalHamiltonian};
use crate::expr::sample::{CheckOutcome, Comparison, SampleDomain, SampleError};
use crate::expr::{Expr, Symbol, SymbolKind};
use crate::geometry::Metric;
use crate::ladder::{ladder_factor, potential_condition, LadderPair};
use crate::quantum::{self, radial_coordinate, EigenPair, QuantumError, QuantumParams};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SystemError {
    #[error("unknown system `{0}`")]
    Unknown(String),
    #[error("{system}: `{check}` failed at load (max relative residual {residual:e})")]
    Validation {
        system: String,
        check: String,
        residual: f64,
    },
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// A coordinate solution `G` of the Hessian equation with its constants.
#[derive(Debug, Clone)]
pub struct GCandidate {
    pub label: String,
    pub g: Expr,
    pub c: f64,
    pub c0: f64,
    pub c1: f64,
}

impl GCandidate {
    pub fn new(label: &str, g: Expr, c: f64, c0: f64, c1: f64) -> Self {
        GCandidate {
            label: label.to_string(),
            g,
            c,
            c0,
            c1,
        }
    }

    /// `G - c1 / (2(cL + c0))`, which solves `X_L^2 G = -2(cL + c0) G`
    /// also when `c1 != 0`.
    pub fn fundamental_g(&self, base: &NaturalHamiltonian) -> Expr {
        if self.c1 == 0.0 {
            return self.g.clone();
        }
        let denom = Expr::int(2) * (Expr::real(self.c) * base.l() + Expr::real(self.c0));
        &self.g - Expr::real(self.c1) / denom
    }
}

/// Eigenfunctions stored with a catalog entry.
#[derive(Debug, Clone)]
pub enum EigenFamily {
    /// Eigenfunctions of `-hbar^2/2 Delta + V` written in the quantum numbers
    /// `numbers`; `samples` are the labels validated at load.
    Symbolic {
        numbers: Vec<Symbol>,
        psi: Expr,
        eigenvalue: Expr,
        samples: Vec<Vec<f64>>,
    },
    /// `u^p exp(-(c omega/2 hbar) u^2)` eigenfunctions of `H^M`, one per `M`.
    Radial { samples: Vec<f64> },
}

impl EigenFamily {
    /// Instance of a symbolic family at the given quantum numbers.
    pub fn instance(&self, values: &[f64]) -> Option<EigenPair> {
        match self {
            EigenFamily::Symbolic {
                numbers,
                psi,
                eigenvalue,
                ..
            } => {
                let mut psi = psi.clone();
                let mut lam = eigenvalue.clone();
                for (s, v) in numbers.iter().zip(values) {
                    psi = psi.subs(s, &Expr::real(*v));
                    lam = lam.subs(s, &Expr::real(*v));
                }
                let z = lam.eval(&Default::default()).ok()?;
                Some(EigenPair {
                    psi,
                    eigenvalue: z,
                    operator: "L0".into(),
                })
            }
            EigenFamily::Radial { .. } => None,
        }
    }
}

/// Harmonic-type line potential `(c1 + c2 cos q)/sin^2 q` with `G = cos q`,
/// `c = 1`; its potential condition holds with constant `-c2`.
pub fn ttw_like_line(c1: f64, c2: f64) -> (NaturalHamiltonian, Expr, SampleDomain) {
    let q = Symbol::coordinate("q");
    let p = momentum(&q);
    let v = (Expr::real(c1) + Expr::real(c2) * q.expr().cos()) * q.expr().sin().powi(-2);
    let base = NaturalHamiltonian::new(Metric::euclidean(vec![q.clone()]), v);
    let d = SampleDomain::new().with_box(&q, 0.3, 2.8).with_box(&p, -2.0, 2.0);
    (base, q.expr().cos(), d)
}

/// One catalog entry.
#[derive(Debug, Clone)]
pub struct SystemDef {
    pub name: String,
    pub summary: String,
    /// `None` for purely radial systems.
    pub base: Option<NaturalHamiltonian>,
    pub candidates: Vec<GCandidate>,
    /// Ladder functions stored verbatim, in the normalization they are usually quoted in.
    pub ladder: Option<LadderPair>,
    /// Functions that must fail the fundamental equation, as `(G, c, c0)`.
    pub planted_negatives: Vec<GCandidate>,
    pub presets: Vec<ExtensionParams>,
    pub domain: SampleDomain,
    pub quantum: Option<QuantumParams>,
    pub eigen: Option<EigenFamily>,
    pub classical_only: bool,
}

/// Adds the boxes of the extension variables `u` and `p_u`.
pub fn aux_boxes(d: SampleDomain) -> SampleDomain {
    d.with_box(&radial_coordinate(), 0.3, 2.5)
        .with_box(&Symbol::new("p_u", SymbolKind::AuxMomentum), -2.0, 2.0)
}

/// Momentum `p_<name>` conjugate to a coordinate.
pub fn momentum(coord: &Symbol) -> Symbol {
    Symbol::momentum(&format!("p_{}", coord.name()))
}

pub const TTW_ALPHA: f64 = 1.0;
pub const TTW_BETA: f64 = 2.0;

/// `L = p^2 + alpha^2/cos^2 + beta^2/sin^2` on the angle `theta`.
pub fn ttw_angular() -> SystemDef {
    let t = Symbol::coordinate("theta");
    let p = momentum(&t);
    let (a2, b2) = (TTW_ALPHA * TTW_ALPHA, TTW_BETA * TTW_BETA);
    let v = Expr::real(a2) * t.expr().cos().powi(-2) + Expr::real(b2) * t.expr().sin().powi(-2);
    // g_thth = 1/2 so that the kinetic term is p^2
    let metric = Metric::diagonal(vec![t.clone()], vec![Expr::frac(1, 2)]).expect("diagonal metric");
    let base = NaturalHamiltonian::new(metric, v);
    let c = 8.0;
    let c1 = 16.0 * (a2 - b2);
    let two_t = Expr::int(2) * t.expr();
    let root = base.l().sqrt();
    let common = &root * two_t.cos() + Expr::real(b2 - a2) / &root;
    let mom = Expr::i() * p.expr() * two_t.sin();
    let ladder = LadderPair::from_functions(&mom + &common, -&mom + &common, ladder_factor(&base, c, 0.0));
    let mut presets = Vec::new();
    for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        let pr = ExtensionParams::new(c, 0.0, 0.0, m, n)
            .expect("valid index")
            .with_c1(c1);
        presets.push(pr.clone());
        presets.push(pr.with_omega_cap(0.5));
    }
    SystemDef {
        name: "ttw_angular".into(),
        summary: "angular part of the TTW system, alpha=1, beta=2; ladder Xi^± with f = 4i sqrt(H)".into(),
        base: Some(base),
        candidates: vec![GCandidate::new("cos 2theta", two_t.cos(), c, 0.0, c1)],
        ladder: Some(ladder),
        planted_negatives: Vec::new(),
        presets,
        domain: aux_boxes(SampleDomain::new().with_box(&t, 0.2, 1.3).with_box(&p, -2.0, 2.0)),
        quantum: None,
        eigen: None,
        classical_only: true,
    }
}

fn s3_chart() -> (Metric, Vec<Symbol>) {
    let eta = Symbol::coordinate("eta");
    let x1 = Symbol::coordinate("xi1");
    let x2 = Symbol::coordinate("xi2");
    let m = Metric::diagonal(
        vec![eta.clone(), x1.clone(), x2.clone()],
        vec![Expr::one(), eta.expr().sin().powi(2), eta.expr().cos().powi(2)],
    )
    .expect("diagonal metric");
    (m, vec![eta, x1, x2])
}

/// `G = sin(xi2) cos(eta)` on S^3, the `a1 = 1` member of its Hessian family.
pub fn s3_g(coords: &[Symbol]) -> Expr {
    coords[2].expr().sin() * coords[0].expr().cos()
}

/// General four-parameter Hessian solution on S^3 in Hopf coordinates.
pub fn s3_g_family(coords: &[Symbol], a: [f64; 4]) -> Expr {
    let (eta, x1, x2) = (coords[0].expr(), coords[1].expr(), coords[2].expr());
    (Expr::real(a[2]) * x1.sin() + Expr::real(a[3]) * x1.cos()) * eta.sin()
        + (Expr::real(a[0]) * x2.sin() + Expr::real(a[1]) * x2.cos()) * eta.cos()
}

fn s3_system(name: &str, c1: f64) -> SystemDef {
    let (metric, x) = s3_chart();
    let g = s3_g(&x);
    // F(xi1, t) = t^2 with t = tan(eta)/cos(xi2)
    let t = x[0].expr().tan() / x[2].expr().cos();
    let mut v = x[0].expr().sin().powi(-2) * t.powi(2);
    if c1 != 0.0 {
        v = v - Expr::real(c1) * &g / (Expr::one() - g.powi(2));
    }
    let base = NaturalHamiltonian::new(metric, v);
    let mut d = SampleDomain::new()
        .with_box(&x[0], 0.2, 1.3)
        .with_box(&x[1], 0.1, 6.0)
        .with_box(&x[2], 0.2, 1.3);
    for xi in &x {
        d.set_box(&momentum(xi), -2.0, 2.0);
    }
    let presets = vec![ExtensionParams::new(1.0, 0.0, 0.0, 1, 1)
        .expect("valid index")
        .with_c1(c1)];
    SystemDef {
        name: name.into(),
        summary: format!("S^3 in Hopf coordinates, G = sin(xi2) cos(eta), c = 1, c1 = {c1}"),
        base: Some(base),
        candidates: vec![GCandidate::new("sin xi2 cos eta", g, 1.0, 0.0, c1)],
        ladder: None,
        planted_negatives: Vec::new(),
        presets,
        domain: aux_boxes(d),
        quantum: None,
        eigen: None,
        classical_only: true,
    }
}

pub fn s3_hopf() -> SystemDef {
    s3_system("s3_hopf", 0.0)
}

/// The same sphere with the particular potential that gives `c1 = 1`.
pub fn s3_hopf_c1() -> SystemDef {
    s3_system("s3_hopf_c1", 1.0)
}

/// Free particle on a circle, `hbar^2 = 2`, eigenfunctions `e^{i eps theta}`.
pub fn circle_free() -> SystemDef {
    let t = Symbol::coordinate("theta");
    let p = momentum(&t);
    let base = NaturalHamiltonian::new(Metric::euclidean(vec![t.clone()]), Expr::zero());
    let eps = Symbol::parameter("eps");
    let psi = (Expr::i() * eps.expr() * t.expr()).exp();
    let g = (Expr::int(2) * t.expr()).cos();
    let qp = QuantumParams::new(std::f64::consts::SQRT_2, 4.0, 1).with_omega(0.6);
    let mut presets = Vec::new();
    for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        let pr = ExtensionParams::new(4.0, 0.0, 0.0, m, n).expect("valid index");
        presets.push(pr.clone());
        presets.push(pr.with_omega_cap(0.5));
    }
    SystemDef {
        name: "circle_free".into(),
        summary: "free motion on a circle, G = cos 2theta, c = 4, hbar^2 = 2".into(),
        base: Some(base),
        candidates: vec![GCandidate::new("cos 2theta", g, 4.0, 0.0, 0.0)],
        ladder: None,
        planted_negatives: Vec::new(),
        presets,
        domain: aux_boxes(SampleDomain::new().with_box(&t, 0.0, 6.2).with_box(&p, -2.0, 2.0)),
        quantum: Some(qp),
        eigen: Some(EigenFamily::Symbolic {
            numbers: vec![eps.clone()],
            psi,
            eigenvalue: eps.expr().powi(2),
            samples: vec![vec![1.0], vec![2.5], vec![7.0]],
        }),
        classical_only: false,
    }
}

/// `L = (p^2 + q^2)/2` with the linear ladder function `G = q`.
pub fn flat_harmonic() -> SystemDef {
    let q = Symbol::coordinate("q");
    let p = momentum(&q);
    let base = NaturalHamiltonian::new(Metric::euclidean(vec![q.clone()]), Expr::frac(1, 2) * q.expr().powi(2));
    let mut presets = Vec::new();
    for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
        // c = 0 needs C != 0 for a non-constant gamma
        let pr = ExtensionParams::new(0.0, 0.5, 1.0, m, n).expect("valid index");
        presets.push(pr.clone());
        presets.push(pr.with_omega_cap(0.5));
    }
    SystemDef {
        name: "flat_harmonic".into(),
        summary: "one-dimensional harmonic oscillator, G = q, c = 0, c0 = 1/2".into(),
        base: Some(base),
        candidates: vec![GCandidate::new("q", q.expr(), 0.0, 0.5, 0.0)],
        ladder: None,
        planted_negatives: vec![GCandidate::new("q^2", q.expr().powi(2), 0.0, 0.5, 0.0)],
        presets,
        domain: aux_boxes(SampleDomain::new().with_box(&q, -2.0, 2.0).with_box(&p, -2.0, 2.0)),
        quantum: None,
        eigen: None,
        classical_only: true,
    }
}

/// Radial operator `H^M` with its monomial-Gaussian eigenfunctions; the
/// constants match `circle_free` so the two combine into a separable system.
pub fn radial_oscillator() -> SystemDef {
    let qp = QuantumParams::new(std::f64::consts::SQRT_2, 4.0, 1).with_omega(0.6);
    SystemDef {
        name: "radial_oscillator".into(),
        summary: "radial operator H^M, eigenfunctions u^p exp(-(c omega/2 hbar) u^2)".into(),
        base: None,
        candidates: Vec::new(),
        ladder: None,
        planted_negatives: Vec::new(),
        presets: Vec::new(),
        domain: SampleDomain::new().with_box(&radial_coordinate(), 0.3, 2.5),
        quantum: Some(qp),
        eigen: Some(EigenFamily::Radial {
            samples: vec![1.0, 2.25, 6.25],
        }),
        classical_only: false,
    }
}

/// Every built-in system, unvalidated.
pub fn catalog() -> Vec<SystemDef> {
    vec![
        ttw_angular(),
        s3_hopf(),
        s3_hopf_c1(),
        circle_free(),
        flat_harmonic(),
        radial_oscillator(),
    ]
}

pub fn names() -> Vec<String> {
    catalog().into_iter().map(|s| s.name).collect()
}

pub fn find(name: &str) -> Result<SystemDef, SystemError> {
    catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| SystemError::Unknown(name.to_string()))
}

pub const LOAD_POINTS: usize = 24;
pub const LOAD_TOL: f64 = 1e-8;

impl SystemDef {
    /// Extension parameters for `k = m/n` built from the first preset.
    /// Distinct `(m, n)` of the presets, in order.
    pub fn preset_indices(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for p in &self.presets {
            if !out.contains(&(p.m(), p.n())) {
                out.push((p.m(), p.n()));
            }
        }
        out
    }

    pub fn extension_params(&self, m: u32, n: u32, big_omega: f64) -> Option<ExtensionParams> {
        let first = self.presets.first()?;
        let p = ExtensionParams::new(first.c, first.c0, first.big_c, m, n).ok()?;
        Some(p.with_c1(first.c1).with_omega_cap(big_omega))
    }

    /// Named identities that must hold for the entry to be usable.
    pub fn load_checks(&self) -> Result<Vec<(String, Comparison)>, SystemError> {
        let mut out = Vec::new();
        if let Some(base) = &self.base {
            for cand in &self.candidates {
                let metric = base.metric();
                let n = metric.dim();
                let mut hess = Comparison::new();
                let h = metric.covariant_hessian(&cand.g);
                for i in 0..n {
                    for j in i..n {
                        hess = hess.pair(h[i][j].clone(), -(Expr::real(cand.c) * &cand.g * &metric.g()[i][j]));
                    }
                }
                out.push((format!("hessian[{}]", cand.label), hess));
                let cond = potential_condition(base, &cand.g, cand.c, cand.c0);
                out.push((
                    format!("potential[{}]", cand.label),
                    Comparison::new().pair(cond, Expr::real(-cand.c1)),
                ));
                out.push((
                    format!("fundamental[{}]", cand.label),
                    fundamental_comparison(base, &cand.fundamental_g(base), cand.c, cand.c0),
                ));
            }
            if let Some(lp) = &self.ladder {
                for sign in [crate::ladder::Sign::Plus, crate::ladder::Sign::Minus] {
                    out.push((format!("ladder[{sign:?}]"), lp.relation(base, sign)));
                }
            }
        }
        if let (Some(qp), Some(fam)) = (&self.quantum, &self.eigen) {
            match fam {
                EigenFamily::Symbolic { samples, .. } => {
                    let base = self.base.as_ref().expect("symbolic eigenfunctions need a base");
                    let l0 = quantum::schrodinger(base, qp.hbar);
                    for v in samples {
                        let pair = fam.instance(v).expect("symbolic instance");
                        out.push((format!("eigen{v:?}"), pair.comparison(&l0)));
                    }
                }
                EigenFamily::Radial { samples } => {
                    for &m in samples {
                        let pair = quantum::radial_eigenfunction(qp, m, crate::ladder::Sign::Plus)?;
                        out.push((format!("eigen[M={m}]"), pair.comparison(&quantum::h_m(qp, m)?)));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Runs the load checks and the planted negatives.
    pub fn validate(&self) -> Result<Vec<(String, CheckOutcome)>, SystemError> {
        let mut report = Vec::new();
        for (name, cmp) in self.load_checks()? {
            let out = cmp.run(&self.domain, LOAD_POINTS, LOAD_TOL)?;
            if !out.passed {
                return Err(SystemError::Validation {
                    system: self.name.clone(),
                    check: name,
                    residual: out.max_rel_residual,
                });
            }
            report.push((name, out));
        }
        if let Some(base) = &self.base {
            for neg in &self.planted_negatives {
                let out =
                    fundamental_comparison(base, &neg.g, neg.c, neg.c0).run(&self.domain, LOAD_POINTS, LOAD_TOL)?;
                if out.passed {
                    return Err(SystemError::Validation {
                        system: self.name.clone(),
                        check: format!("planted negative {} unexpectedly passes", neg.label),
                        residual: out.max_rel_residual,
                    });
                }
            }
        }
        Ok(report)
    }

    /// Eigenpairs at every stored sample.
    pub fn eigenpairs(&self) -> Result<Vec<EigenPair>, SystemError> {
        let (Some(qp), Some(fam)) = (&self.quantum, &self.eigen) else {
            return Ok(Vec::new());
        };
        match fam {
            EigenFamily::Symbolic { samples, .. } => Ok(samples.iter().filter_map(|v| fam.instance(v)).collect()),
            EigenFamily::Radial { samples } => samples
                .iter()
                .map(|&m| Ok(quantum::radial_eigenfunction(qp, m, crate::ladder::Sign::Plus)?))
                .collect(),
        }
    }
}

/// The validated catalog; the first failing entry aborts.
pub fn load_catalog() -> Result<Vec<SystemDef>, SystemError> {
    let all = catalog();
    for s in &all {
        s.validate()?;
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_validates() {
        for s in catalog() {
            let rep = s.validate().unwrap_or_else(|e| panic!("{e}"));
            assert!(rep.iter().all(|(_, o)| o.passed));
        }
    }

    #[test]
    fn unknown_name() {
        assert_eq!(find("nosuch").unwrap_err(), SystemError::Unknown("nosuch".into()));
        assert!(names().contains(&"ttw_angular".to_string()));
    }

    #[test]
    fn ttw_ladder_is_rescaled_general_ladder() {
        let s = ttw_angular();
        let base = s.base.as_ref().unwrap();
        let cand = &s.candidates[0];
        let general = crate::ladder::build_ladder(base, &cand.g, cand.c, cand.c0, cand.c1);
        let stored = s.ladder.as_ref().unwrap();
        let four_i = Expr::complex(0.0, 4.0);
        let out = crate::numerically_equal(&general.gplus, &(&four_i * &stored.gplus), &s.domain, 30, 1e-10).unwrap();
        assert!(out.passed);
    }

    #[test]
    fn s3_family_members_solve_hessian() {
        let (m, x) = s3_chart();
        let g = s3_g_family(&x, [0.3, -1.1, 0.7, 2.0]);
        let d = s3_hopf().domain;
        assert!(m.check_hessian_equation(&g, 1.0, &d, 20, 1e-9).unwrap().passed);
    }

    #[test]
    fn broken_entry_is_reported() {
        let mut s = flat_harmonic();
        s.candidates[0].c0 = 0.7;
        assert!(matches!(s.validate(), Err(SystemError::Validation { .. })));
    }
}
