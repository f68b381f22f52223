//! Seeded sampling and the numerical equality oracle.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CompiledExpr, EvalError, EvalOptions, Expr, Symbol};

pub const DEFAULT_SEED: u64 = 42;

/// Per-symbol sampling boxes plus fixed values and the singularity guard.
#[derive(Debug, Clone)]
pub struct SampleDomain {
    boxes: Vec<(Symbol, f64, f64)>,
    fixed: Vec<(Symbol, Complex<f64>)>,
    /// Sample points where a denominator falls below this magnitude are redrawn.
    pub min_denominator: f64,
    pub seed: u64,
}

impl Default for SampleDomain {
    fn default() -> Self {
        SampleDomain {
            boxes: Vec::new(),
            fixed: Vec::new(),
            min_denominator: 1e-6,
            seed: DEFAULT_SEED,
        }
    }
}

impl SampleDomain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_box(mut self, s: &Symbol, lo: f64, hi: f64) -> Self {
        self.set_box(s, lo, hi);
        self
    }

    pub fn set_box(&mut self, s: &Symbol, lo: f64, hi: f64) {
        assert!(lo <= hi, "empty sampling box for {s}");
        self.fixed.retain(|(t, _)| t != s);
        match self.boxes.iter_mut().find(|(t, _, _)| t == s) {
            Some(entry) => *entry = (s.clone(), lo, hi),
            None => self.boxes.push((s.clone(), lo, hi)),
        }
    }

    pub fn with_fixed(mut self, s: &Symbol, value: Complex<f64>) -> Self {
        self.set_fixed(s, value);
        self
    }

    pub fn set_fixed(&mut self, s: &Symbol, value: Complex<f64>) {
        self.boxes.retain(|(t, _, _)| t != s);
        match self.fixed.iter_mut().find(|(t, _)| t == s) {
            Some(entry) => entry.1 = value,
            None => self.fixed.push((s.clone(), value)),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_min_denominator(mut self, v: f64) -> Self {
        self.min_denominator = v;
        self
    }

    pub fn boxes(&self) -> &[(Symbol, f64, f64)] {
        &self.boxes
    }

    pub fn fixed(&self) -> &[(Symbol, Complex<f64>)] {
        &self.fixed
    }

    /// Merges `other` into `self`; entries of `other` win.
    pub fn merged(&self, other: &SampleDomain) -> SampleDomain {
        let mut out = self.clone();
        for (s, lo, hi) in &other.boxes {
            out.set_box(s, *lo, *hi);
        }
        for (s, v) in &other.fixed {
            out.set_fixed(s, *v);
        }
        out
    }

    fn covers(&self, s: &Symbol) -> bool {
        self.boxes.iter().any(|(t, _, _)| t == s) || self.fixed.iter().any(|(t, _)| t == s)
    }

    /// Draws one candidate point for `vars` in the given order.
    fn draw(&self, vars: &[Symbol], rng: &mut ChaCha8Rng) -> Vec<Complex<f64>> {
        // one draw per box in declaration order keeps streams independent of the expression
        let mut drawn: Vec<f64> = Vec::with_capacity(self.boxes.len());
        for (_, lo, hi) in &self.boxes {
            drawn.push(if lo == hi { *lo } else { rng.random_range(*lo..*hi) });
        }
        vars.iter()
            .map(|v| {
                if let Some(i) = self.boxes.iter().position(|(t, _, _)| t == v) {
                    Complex::new(drawn[i], 0.0)
                } else {
                    self.fixed
                        .iter()
                        .find(|(t, _)| t == v)
                        .map(|(_, z)| *z)
                        .expect("covered symbol")
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("no sampling range for symbol `{0}`")]
    MissingSymbol(String),
    #[error("domain unsatisfiable: {accepted} of {wanted} points accepted after {draws} draws")]
    Unsatisfiable {
        wanted: usize,
        accepted: usize,
        draws: usize,
    },
}

/// Verdict of a sampled comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub points: usize,
    pub rejected: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    /// Worst case over several outcomes judged at `tol`; empty input passes.
    pub fn merge(outcomes: &[CheckOutcome], tol: f64) -> CheckOutcome {
        let mut out = CheckOutcome {
            max_abs_residual: 0.0,
            max_rel_residual: 0.0,
            points: 0,
            rejected: 0,
            tolerance: tol,
            passed: true,
        };
        for o in outcomes {
            out.max_abs_residual = out.max_abs_residual.max(o.max_abs_residual);
            out.max_rel_residual = out.max_rel_residual.max(o.max_rel_residual);
            out.points += o.points;
            out.rejected += o.rejected;
        }
        out.passed = out.max_rel_residual < tol;
        out
    }
}

/// A set of `lhs == rhs` component identities checked on the same points.
///
/// Relative residuals divide by `max(1, |lhs|, |rhs|, sum |scale_k|)`; the scale
/// terms let an identity whose two sides vanish be judged against the size of
/// what cancelled.
#[derive(Debug, Clone, Default)]
pub struct Comparison {
    pub pairs: Vec<(Expr, Expr)>,
    pub scale: Vec<Expr>,
}

impl Comparison {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pair(mut self, lhs: Expr, rhs: Expr) -> Self {
        self.pairs.push((lhs, rhs));
        self
    }

    pub fn zero(self, e: Expr) -> Self {
        self.pair(e, Expr::zero())
    }

    pub fn scaled_by<I: IntoIterator<Item = Expr>>(mut self, terms: I) -> Self {
        self.scale.extend(terms);
        self
    }

    pub fn run(&self, domain: &SampleDomain, n: usize, tol: f64) -> Result<CheckOutcome, SampleError> {
        let mut exprs = Vec::with_capacity(self.pairs.len() * 2 + self.scale.len());
        for (a, b) in &self.pairs {
            exprs.push(a.clone());
            exprs.push(b.clone());
        }
        exprs.extend(self.scale.iter().cloned());
        let samples = domain.evaluate(&exprs, n)?;
        let npairs = self.pairs.len();
        let mut max_abs = 0.0f64;
        let mut max_rel = 0.0f64;
        for row in &samples.values {
            let (a, r) = residuals(row, npairs);
            max_abs = max_abs.max(a);
            max_rel = max_rel.max(r);
        }
        Ok(CheckOutcome {
            max_abs_residual: max_abs,
            max_rel_residual: max_rel,
            points: samples.values.len(),
            rejected: samples.rejected,
            tolerance: tol,
            passed: max_rel < tol,
        })
    }
}

/// Values of several expressions on accepted sample points.
#[derive(Debug, Clone)]
pub struct Samples {
    /// Symbol values of each accepted point, ordered as `variables`.
    pub points: Vec<Vec<Complex<f64>>>,
    pub variables: Vec<Symbol>,
    /// One row per accepted point, one column per expression.
    pub values: Vec<Vec<Complex<f64>>>,
    pub rejected: usize,
}

impl SampleDomain {
    /// Evaluates `exprs` on `n` seeded points, redrawing points where any of
    /// them is singular. Evaluation runs in parallel; acceptance order is the
    /// draw order, so results do not depend on scheduling.
    pub fn evaluate(&self, exprs: &[Expr], n: usize) -> Result<Samples, SampleError> {
        let tape = CompiledExpr::new(exprs);
        for v in tape.variables() {
            if !self.covers(v) {
                return Err(SampleError::MissingSymbol(v.name().to_string()));
            }
        }
        let opts = EvalOptions {
            min_denominator: self.min_denominator,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let max_draws = 100 * n.max(1);
        let mut draws = 0usize;
        let mut points = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        while values.len() < n {
            if draws >= max_draws {
                return Err(SampleError::Unsatisfiable {
                    wanted: n,
                    accepted: values.len(),
                    draws,
                });
            }
            let batch = (n - values.len()).max(8).min(max_draws - draws);
            let candidates: Vec<Vec<Complex<f64>>> =
                (0..batch).map(|_| self.draw(tape.variables(), &mut rng)).collect();
            draws += batch;
            let results: Vec<Option<Vec<Complex<f64>>>> = candidates
                .par_iter()
                .map(|pt| match tape.eval(pt, &opts) {
                    Ok(vals) => Some(vals),
                    Err(EvalError::Unbound(_)) => unreachable!("all variables covered"),
                    Err(_) => None,
                })
                .collect();
            for (pt, r) in candidates.into_iter().zip(results) {
                if let Some(vals) = r {
                    if values.len() < n {
                        points.push(pt);
                        values.push(vals);
                    }
                }
            }
        }
        let accepted = values.len();
        Ok(Samples {
            points,
            variables: tape.variables().to_vec(),
            values,
            rejected: draws - accepted,
        })
    }
}

fn residuals(vals: &[Complex<f64>], npairs: usize) -> (f64, f64) {
    let scale: f64 = vals[2 * npairs..].iter().map(|z| z.norm()).sum();
    let mut worst_abs = 0.0f64;
    let mut worst_rel = 0.0f64;
    for k in 0..npairs {
        let a = vals[2 * k];
        let b = vals[2 * k + 1];
        let abs = (a - b).norm();
        let denom = 1f64.max(a.norm()).max(b.norm()).max(scale);
        worst_abs = worst_abs.max(abs);
        worst_rel = worst_rel.max(abs / denom);
    }
    (worst_abs, worst_rel)
}

/// Compares two expressions on `n` seeded points of `domain`.
pub fn numerically_equal(
    e1: &Expr,
    e2: &Expr,
    domain: &SampleDomain,
    n: usize,
    tol: f64,
) -> Result<CheckOutcome, SampleError> {
    Comparison::new().pair(e1.clone(), e2.clone()).run(domain, n, tol)
}
