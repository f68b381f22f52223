//! Verification engine: named sampled checks, suites built from catalog
//! entries, and the report they produce.

pub mod config;
mod suites;

use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::expr::sample::{CheckOutcome, Comparison, SampleDomain, SampleError, DEFAULT_SEED};
use crate::expr::{Expr, Symbol};

pub use suites::{build_suite, verify, SuiteKind, SuiteOptions, DEFAULT_MN};

pub const REPORT_SCHEMA: &str = "hamext-report/1";
pub const CATALOG_VERSION: &str = "1";
pub const SEED_ENV: &str = "HAMEXT_SEED";

/// Seed from `HAMEXT_SEED`, else 42.
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// Relative tolerances by identity depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    /// Brackets, ladder relations, Hessian and potential conditions.
    pub first_order: f64,
    /// Characteristic integrals, factorizations and radial operator identities.
    pub integral: f64,
    /// Long compositions: `X^±`, the warped symmetry operators.
    pub deep: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            first_order: 1e-9,
            integral: 1e-8,
            deep: 1e-7,
        }
    }
}

impl ToleranceProfile {
    pub fn uniform(tol: f64) -> Self {
        ToleranceProfile {
            first_order: tol,
            integral: tol,
            deep: tol,
        }
    }

    pub fn get(&self, tier: Tier) -> f64 {
        match tier {
            Tier::FirstOrder => self.first_order,
            Tier::Integral => self.integral,
            Tier::Deep => self.deep,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    FirstOrder,
    Integral,
    Deep,
}

pub type CheckBody = Arc<dyn Fn(&SampleDomain, usize, f64) -> Result<CheckOutcome, String> + Send + Sync>;

/// A named identity sampled on a domain. The seed is the domain's.
#[derive(Clone)]
pub struct IdentityCheck {
    pub name: String,
    pub domain: SampleDomain,
    pub tolerance: f64,
    pub points: usize,
    /// The identity is a planted negative: it passes when the residual exceeds the tolerance.
    pub expect_fail: bool,
    body: CheckBody,
}

impl std::fmt::Debug for IdentityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityCheck")
            .field("name", &self.name)
            .field("tolerance", &self.tolerance)
            .field("points", &self.points)
            .field("expect_fail", &self.expect_fail)
            .finish()
    }
}

impl IdentityCheck {
    /// Wraps an already built comparison.
    pub fn comparison(name: &str, cmp: Comparison, domain: SampleDomain, points: usize, tol: f64) -> Self {
        Self::custom(name, domain, points, tol, move |d, n, t| {
            cmp.run(d, n, t).map_err(|e| e.to_string())
        })
    }

    /// Builds the comparisons when the check runs; several are merged into
    /// their worst residual.
    pub fn deferred<F>(name: &str, domain: SampleDomain, points: usize, tol: f64, build: F) -> Self
    where
        F: Fn() -> Result<Vec<Comparison>, String> + Send + Sync + 'static,
    {
        Self::custom(name, domain, points, tol, move |d, n, t| {
            let outs = build()?
                .iter()
                .map(|c| c.run(d, n, t))
                .collect::<Result<Vec<_>, SampleError>>()
                .map_err(|e| e.to_string())?;
            Ok(CheckOutcome::merge(&outs, t))
        })
    }

    pub fn custom<F>(name: &str, domain: SampleDomain, points: usize, tol: f64, body: F) -> Self
    where
        F: Fn(&SampleDomain, usize, f64) -> Result<CheckOutcome, String> + Send + Sync + 'static,
    {
        IdentityCheck {
            name: name.to_string(),
            domain,
            tolerance: tol,
            points,
            expect_fail: false,
            body: Arc::new(body),
        }
    }

    pub fn expecting_failure(mut self) -> Self {
        self.expect_fail = true;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.domain.seed = seed;
        self
    }

    pub fn seed(&self) -> u64 {
        self.domain.seed
    }

    pub fn run(&self, timings: bool) -> CheckRecord {
        let start = Instant::now();
        let result = (self.body)(&self.domain, self.points, self.tolerance);
        let wall = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
        let mut rec = CheckRecord {
            name: self.name.clone(),
            status: Status::Error,
            max_abs_residual: None,
            max_rel_residual: None,
            tolerance: self.tolerance,
            points: 0,
            rejected: 0,
            expect_fail: self.expect_fail,
            error: None,
            wall_time_ms: wall,
        };
        match result {
            Ok(out) => {
                let ok = out.max_rel_residual < self.tolerance;
                rec.status = if ok != self.expect_fail {
                    Status::Pass
                } else {
                    Status::Fail
                };
                rec.max_abs_residual = Some(out.max_abs_residual);
                rec.max_rel_residual = Some(out.max_rel_residual);
                rec.points = out.points;
                rec.rejected = out.rejected;
            }
            Err(e) => rec.error = Some(e),
        }
        rec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub max_abs_residual: Option<f64>,
    pub max_rel_residual: Option<f64>,
    pub tolerance: f64,
    pub points: usize,
    pub rejected: usize,
    pub expect_fail: bool,
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub seed: u64,
    pub tolerance_profile: ToleranceProfile,
    pub catalog_version: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn from_records(mut checks: Vec<CheckRecord>, seed: u64, profile: ToleranceProfile) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        Report {
            schema: REPORT_SCHEMA.into(),
            seed,
            tolerance_profile: profile,
            catalog_version: CATALOG_VERSION.into(),
            total: checks.len(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            errored: count(Status::Error),
            checks,
        }
    }

    /// True iff nothing failed or errored.
    pub fn success(&self) -> bool {
        self.failed == 0 && self.errored == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Fixed-width table, one line per check plus a summary line.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = format!(
            "{:<width$}  {:<6}  {:>10}  {:>10}  {:>8}  {:>6}\n",
            "check", "status", "max_abs", "max_rel", "tol", "points"
        );
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            out.push_str(&format!(
                "{:<width$}  {:<6}  {:>10}  {:>10}  {:>8.0e}  {:>6}",
                c.name,
                status,
                fmt(c.max_abs_residual),
                fmt(c.max_rel_residual),
                c.tolerance,
                c.points
            ));
            if c.expect_fail {
                out.push_str("  (expected to fail)");
            }
            if let Some(e) = &c.error {
                out.push_str(&format!("  {e}"));
            }
            if let Some(ms) = c.wall_time_ms {
                out.push_str(&format!("  {ms:.1} ms"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "{} checks: {} passed, {} failed, {} errored (seed {})\n",
            self.total, self.passed, self.failed, self.errored, self.seed
        ));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    pub profile: ToleranceProfile,
    /// Record wall time per check. Off by default so reports are reproducible byte for byte.
    pub timings: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            seed: DEFAULT_SEED,
            profile: ToleranceProfile::default(),
            timings: false,
        }
    }
}

/// Runs every check in parallel. Errors are recorded per check.
pub fn run_suite(checks: &[IdentityCheck], opts: &RunOptions) -> Report {
    let records: Vec<CheckRecord> = checks.par_iter().map(|c| c.run(opts.timings)).collect();
    Report::from_records(records, opts.seed, opts.profile)
}

/// Numerical rank of the Jacobian of `functions` with respect to `chart`,
/// maximised over `points` sample points. Singular values at or below
/// `1e-8` times the largest are treated as zero.
pub fn independence_rank(
    functions: &[Expr],
    chart: &[Symbol],
    domain: &SampleDomain,
    points: usize,
) -> Result<usize, SampleError> {
    if functions.is_empty() || chart.is_empty() {
        return Ok(0);
    }
    let partials: Vec<Expr> = functions
        .iter()
        .flat_map(|f| chart.iter().map(move |x| f.diff(x)))
        .collect();
    let samples = domain.evaluate(&partials, points)?;
    let (rows, cols) = (functions.len(), chart.len());
    let mut best = 0;
    for row in &samples.values {
        let jac = DMatrix::<Complex<f64>>::from_row_slice(rows, cols, row);
        let sv = jac.singular_values();
        let top = sv.iter().cloned().fold(0f64, f64::max);
        if top == 0.0 {
            continue;
        }
        let rank = sv.iter().filter(|&&s| s > 1e-8 * top).count();
        best = best.max(rank);
    }
    Ok(best)
}
