//! Check lists generated from a catalog entry.

use std::str::FromStr;

use super::{independence_rank, run_suite, IdentityCheck, Report, RunOptions, Tier, ToleranceProfile};
use crate::classical::{extend, fundamental_comparison, kbar_indices, ExtendedSystem, NaturalHamiltonian};
use crate::expr::sample::{CheckOutcome, Comparison, SampleDomain, DEFAULT_SEED};
use crate::expr::Expr;
use crate::ladder::{
    build_ladder, factorized_k, factorized_kbar, kuru_negro, m_identity, potential_condition, shift_relation, solve_c1,
    LadderPair, Sign,
};
use crate::quantum::{
    self, a_hat_identity, d_hat_shift, excited_separable_eigenfunction, extended_quantum_h, folded_shift_identity,
    g_hat, g_hat_coefficients, radial_eigenfunction, random_test_functions, schrodinger, warped_symmetry_x, EigenPair,
    Normalization, QuantumParams, XSigns,
};
use crate::systems::{ttw_like_line, EigenFamily, GCandidate, SystemDef};

pub const DEFAULT_MN: [(u32, u32); 4] = [(1, 1), (2, 1), (1, 2), (3, 2)];

const OMEGA_CAP: f64 = 0.5;
const FIRST_POINTS: usize = 40;
const ANCHOR_POINTS: usize = 100;
const DEEP_POINTS: usize = 20;
const TEST_FUNCTIONS: usize = 20;
const RADIAL_MU: f64 = 1.9;
const FOLD_NU: f64 = 2.0;
const FOLD_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteKind {
    Classical,
    Ladder,
    Quantum,
    All,
}

impl SuiteKind {
    fn includes(self, part: SuiteKind) -> bool {
        self == SuiteKind::All || self == part
    }
}

impl FromStr for SuiteKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "classical" => Ok(SuiteKind::Classical),
            "ladder" => Ok(SuiteKind::Ladder),
            "quantum" => Ok(SuiteKind::Quantum),
            "all" => Ok(SuiteKind::All),
            _ => Err(format!(
                "unknown suite `{s}` (expected classical, ladder, quantum or all)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    /// Extension indices; `None` takes those of the system's presets.
    pub mn: Option<Vec<(u32, u32)>>,
    /// Overrides every tier of the profile except planted negatives.
    pub tol: Option<f64>,
    pub seed: u64,
    /// Overrides every per-check sample count.
    pub points: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            mn: None,
            tol: None,
            seed: DEFAULT_SEED,
            points: None,
        }
    }
}

impl SuiteOptions {
    pub fn profile(&self) -> ToleranceProfile {
        self.tol.map(ToleranceProfile::uniform).unwrap_or_default()
    }
}

struct Builder<'a> {
    sys: &'a SystemDef,
    opts: &'a SuiteOptions,
    profile: ToleranceProfile,
    domain: SampleDomain,
    checks: Vec<IdentityCheck>,
}

impl<'a> Builder<'a> {
    fn new(sys: &'a SystemDef, opts: &'a SuiteOptions) -> Self {
        Builder {
            sys,
            opts,
            profile: opts.profile(),
            domain: sys.domain.clone().with_seed(opts.seed),
            checks: Vec::new(),
        }
    }

    fn name(&self, part: &str, rest: &str) -> String {
        format!("{}/{part}/{rest}", self.sys.name)
    }

    fn mn(&self) -> Vec<(u32, u32)> {
        if let Some(mn) = &self.opts.mn {
            return mn.clone();
        }
        let own = self.sys.preset_indices();
        if own.is_empty() {
            DEFAULT_MN.to_vec()
        } else {
            own
        }
    }

    fn points(&self, default: usize) -> usize {
        self.opts.points.unwrap_or(default)
    }

    fn add<F>(&mut self, part: &str, rest: &str, tier: Tier, points: usize, build: F)
    where
        F: Fn() -> Result<Vec<Comparison>, String> + Send + Sync + 'static,
    {
        let name = self.name(part, rest);
        let check = IdentityCheck::deferred(
            &name,
            self.domain.clone(),
            self.points(points),
            self.profile.get(tier),
            build,
        );
        self.checks.push(check);
    }

    fn add_custom<F>(&mut self, part: &str, rest: &str, tier: Tier, points: usize, body: F)
    where
        F: Fn(&SampleDomain, usize, f64) -> Result<CheckOutcome, String> + Send + Sync + 'static,
    {
        let name = self.name(part, rest);
        let check = IdentityCheck::custom(
            &name,
            self.domain.clone(),
            self.points(points),
            self.profile.get(tier),
            body,
        );
        self.checks.push(check);
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// A scalar verdict `|got - want| / max(1, |want|)` shaped like a sampled outcome.
fn scalar_outcome(got: f64, want: f64, points: usize, tol: f64) -> CheckOutcome {
    let abs = (got - want).abs();
    let rel = abs / want.abs().max(1.0);
    CheckOutcome {
        max_abs_residual: abs,
        max_rel_residual: rel,
        points,
        rejected: 0,
        tolerance: tol,
        passed: rel < tol,
    }
}

fn sign_tag(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+",
        Sign::Minus => "-",
    }
}

const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

/// Generic smooth test function on a chart, used where an identity holds for every `psi`.
fn probe(base: &NaturalHamiltonian) -> Expr {
    let x: Vec<Expr> = base.metric().coords().iter().map(|s| s.expr()).collect();
    let n = x.len();
    let mut terms = vec![x[0].cos()];
    for i in 0..n {
        terms.push(Expr::int(i as i64 + 1) * x[i].powi(2) * x[(i + 1) % n].sin());
    }
    Expr::sum(terms)
}

fn classical(b: &mut Builder) {
    let Some(base) = b.sys.base.clone() else { return };
    for cand in b.sys.candidates.clone() {
        let label = cand.label.clone();
        {
            let (base, g, c) = (base.clone(), cand.g.clone(), cand.c);
            b.add_custom(
                "classical",
                &format!("hessian/{label}"),
                Tier::FirstOrder,
                FIRST_POINTS,
                move |d, n, t| base.metric().check_hessian_equation(&g, c, d, n, t).map_err(err),
            );
        }
        {
            let (base, g, c) = (base.clone(), cand.g.clone(), cand.c);
            b.add_custom(
                "classical",
                &format!("ricci-lemma/{label}"),
                Tier::FirstOrder,
                FIRST_POINTS,
                move |d, n, t| base.metric().check_ricci_ladder_lemma(&g, c, d, n, t).map_err(err),
            );
        }
        {
            let (base, cand) = (base.clone(), cand.clone());
            b.add(
                "classical",
                &format!("potential/{label}"),
                Tier::FirstOrder,
                FIRST_POINTS,
                move || {
                    let cond = potential_condition(&base, &cand.g, cand.c, cand.c0);
                    Ok(vec![Comparison::new().pair(cond, Expr::real(-cand.c1))])
                },
            );
        }
        {
            let (base, cand) = (base.clone(), cand.clone());
            b.add(
                "classical",
                &format!("fundamental/{label}"),
                Tier::FirstOrder,
                FIRST_POINTS,
                move || {
                    Ok(vec![fundamental_comparison(
                        &base,
                        &cand.fundamental_g(&base),
                        cand.c,
                        cand.c0,
                    )])
                },
            );
        }
    }
    for neg in b.sys.planted_negatives.clone() {
        let base = base.clone();
        let name = b.name("classical", &format!("fundamental/{}/planted-negative", neg.label));
        let cmp = fundamental_comparison(&base, &neg.g, neg.c, neg.c0);
        let tol = b.profile.first_order;
        let check =
            IdentityCheck::comparison(&name, cmp, b.domain.clone(), b.points(FIRST_POINTS), tol).expecting_failure();
        b.checks.push(check);
    }
    {
        let base = base.clone();
        b.add_custom(
            "classical",
            "third-derivative-commutator",
            Tier::FirstOrder,
            FIRST_POINTS,
            move |d, n, t| {
                base.metric()
                    .check_third_derivative_commutator(&probe(&base), d, n, t)
                    .map_err(err)
            },
        );
    }
    if let Some(lp) = b.sys.ladder.clone() {
        for sign in SIGNS {
            let (base, lp) = (base.clone(), lp.clone());
            b.add(
                "classical",
                &format!("stored-ladder/{}", sign_tag(sign)),
                Tier::FirstOrder,
                ANCHOR_POINTS,
                move || Ok(vec![lp.relation(&base, sign)]),
            );
        }
    }
    let Some(cand) = b.sys.candidates.first().cloned() else {
        return;
    };
    if b.sys.presets.is_empty() {
        return;
    }
    for (m, n) in b.mn() {
        let (s, r) = kbar_indices(m, n);
        for omega in [0.0, OMEGA_CAP] {
            let Some(p) = b.sys.extension_params(m, n, omega) else {
                continue;
            };
            let ext = extend(&base, &p);
            if omega == 0.0 {
                let (ext, g) = (ext.clone(), cand.fundamental_g(&base));
                b.add(
                    "classical",
                    &format!("K/{m}-{n}"),
                    Tier::Integral,
                    FIRST_POINTS,
                    move || Ok(vec![ext.conservation(&ext.k_integral(&g))]),
                );
            }
            let g = cand.fundamental_g(&base);
            b.add(
                "classical",
                &format!("Kbar/{}-{r}/{m}-{n}/Omega={omega}", 2 * s),
                Tier::Integral,
                FIRST_POINTS,
                move || Ok(vec![ext.conservation(&ext.kbar_integral(&g, s, r))]),
            );
        }
    }
    if let Some(p) = b.sys.extension_params(1, 1, 0.0) {
        let ext = extend(&base, &p);
        let g = cand.fundamental_g(&base);
        b.add_custom(
            "classical",
            "independence/H-L-K1,1",
            Tier::FirstOrder,
            DEEP_POINTS,
            move |d, n, t| {
                let funcs = [ext.h().clone(), ext.base().l().clone(), ext.k_integral(&g)];
                let mut chart = ext.chart().coordinates();
                chart.extend(ext.chart().momenta());
                let rank = independence_rank(&funcs, &chart, d, n).map_err(err)?;
                Ok(scalar_outcome(rank as f64, 3.0, n, t))
            },
        );
    }
}

fn ladder_for(sys: &SystemDef, base: &NaturalHamiltonian, cand: &GCandidate) -> LadderPair {
    sys.ladder
        .clone()
        .unwrap_or_else(|| build_ladder(base, &cand.g, cand.c, cand.c0, cand.c1))
}

fn kn_checks(b: &mut Builder, base: &NaturalHamiltonian, lp: &LadderPair) {
    for (m, n) in b.mn() {
        let Some(p) = b.sys.extension_params(m, n, OMEGA_CAP) else {
            continue;
        };
        let ext = extend(base, &p);
        let kn = |ext: &ExtendedSystem, lp: &LadderPair| kuru_negro(ext, lp).map_err(err);
        for sign in SIGNS {
            let tag = sign_tag(sign);
            for what in ["G", "A", "D", "X"] {
                let (ext, lp) = (ext.clone(), lp.clone());
                let tier = if what == "X" { Tier::Deep } else { Tier::FirstOrder };
                let pts = if what == "X" { DEEP_POINTS } else { FIRST_POINTS };
                b.add(
                    "ladder",
                    &format!("kuru-negro/{m}-{n}/{what}{tag}"),
                    tier,
                    pts,
                    move || {
                        let f = kn(&ext, &lp)?;
                        Ok(vec![match what {
                            "G" => f.relation_g(&ext, sign),
                            "A" => f.relation_a(&ext, sign),
                            "D" => f.relation_d(&ext, sign),
                            _ => f.conservation(&ext, sign),
                        }])
                    },
                );
            }
        }
        let (e2, lp2) = (ext.clone(), lp.clone());
        b.add(
            "ladder",
            &format!("kuru-negro/{m}-{n}/H=A+A-+omegaM"),
            Tier::FirstOrder,
            FIRST_POINTS,
            move || Ok(vec![kn(&e2, &lp2)?.h_factorization(&e2)]),
        );
        let (e2, lp2) = (ext.clone(), lp.clone());
        b.add(
            "ladder",
            &format!("kuru-negro/{m}-{n}/D+D-"),
            Tier::FirstOrder,
            FIRST_POINTS,
            move || Ok(vec![kn(&e2, &lp2)?.d_factorization(&e2)]),
        );
        let lp2 = lp.clone();
        b.add(
            "ladder",
            &format!("kuru-negro/{m}-{n}/M^2+k^2f^2"),
            Tier::FirstOrder,
            FIRST_POINTS,
            move || {
                let f = kn(&ext, &lp2)?;
                Ok(vec![m_identity(&ext, &f, &lp2)])
            },
        );
    }
}

fn ladder(b: &mut Builder) {
    let Some(base) = b.sys.base.clone() else { return };
    for cand in b.sys.candidates.clone() {
        let label = cand.label.clone();
        for sign in SIGNS {
            let (base, cand) = (base.clone(), cand.clone());
            b.add(
                "ladder",
                &format!("relation/{label}/{}", sign_tag(sign)),
                Tier::FirstOrder,
                FIRST_POINTS,
                move || {
                    Ok(vec![
                        build_ladder(&base, &cand.g, cand.c, cand.c0, cand.c1).relation(&base, sign)
                    ])
                },
            );
        }
        let base = base.clone();
        b.add_custom(
            "ladder",
            &format!("solve-c1/{label}"),
            Tier::FirstOrder,
            FIRST_POINTS,
            move |d, n, t| {
                let got = solve_c1(&base, &cand.g, cand.c, cand.c0, d, n, t).map_err(err)?;
                Ok(scalar_outcome(got, cand.c1, n, t))
            },
        );
    }
    if b.sys.name == "ttw_angular" {
        let (c1, c2) = (0.7, 1.3);
        b.add_custom(
            "ladder",
            "solve-c1/ttw-like-line",
            Tier::FirstOrder,
            FIRST_POINTS,
            move |_, n, t| {
                let (line, g, d) = ttw_like_line(c1, c2);
                let got = solve_c1(&line, &g, 1.0, 0.0, &d, n, t).map_err(err)?;
                Ok(scalar_outcome(got, -c2, n, t))
            },
        );
    }
    let Some(cand) = b.sys.candidates.first().cloned() else {
        return;
    };
    let lp = ladder_for(b.sys, &base, &cand);
    for (m, n) in b.mn() {
        let (s, r) = kbar_indices(m, n);
        if let Some(p) = b.sys.extension_params(m, n, 0.0) {
            let ext = extend(&base, &p);
            let (e2, lp2) = (ext.clone(), lp.clone());
            b.add(
                "ladder",
                &format!("factorization/K/{m}-{n}"),
                Tier::Integral,
                FIRST_POINTS,
                move || {
                    let fz = factorized_k(&e2, &lp2);
                    Ok(vec![Comparison::new().pair(e2.k_integral(&lp2.gplus), fz.product())])
                },
            );
            let lp2 = lp.clone();
            b.add(
                "ladder",
                &format!("shift/K/{m}-{n}"),
                Tier::Integral,
                FIRST_POINTS,
                move || Ok(vec![shift_relation(&ext, &lp2, &factorized_k(&ext, &lp2))]),
            );
        }
        if let Some(p) = b.sys.extension_params(m, n, OMEGA_CAP) {
            let ext = extend(&base, &p);
            let tag = format!("{}-{r}/{m}-{n}/Omega={OMEGA_CAP}", 2 * s);
            let (e2, lp2) = (ext.clone(), lp.clone());
            b.add(
                "ladder",
                &format!("factorization/Kbar/{tag}"),
                Tier::Integral,
                FIRST_POINTS,
                move || {
                    let fz = factorized_kbar(&e2, &lp2, s, r);
                    let split = fz.shift_split.clone().expect("Kbar has a split form");
                    Ok(vec![
                        Comparison::new().pair(e2.kbar_integral(&lp2.gplus, s, r), fz.product()),
                        Comparison::new().pair(fz.shift_part.clone(), split),
                    ])
                },
            );
            let lp2 = lp.clone();
            b.add(
                "ladder",
                &format!("shift/Kbar/{tag}"),
                Tier::Integral,
                FIRST_POINTS,
                move || Ok(vec![shift_relation(&ext, &lp2, &factorized_kbar(&ext, &lp2, s, r))]),
            );
        }
    }
    let first = b.sys.presets.first();
    if first.is_some_and(|p| p.c != 0.0 && p.big_c == 0.0) {
        kn_checks(b, &base, &lp);
    }
}

/// Eigenpair of the family at a single quantum number.
fn family_pair(fam: &EigenFamily, value: f64) -> Option<EigenPair> {
    fam.instance(&[value])
}

fn quantum_angular(b: &mut Builder, qp: &QuantumParams, base: &NaturalHamiltonian, fam: &EigenFamily) {
    let Some(cand) = b.sys.candidates.first().cloned() else {
        return;
    };
    let EigenFamily::Symbolic { samples, .. } = fam else {
        return;
    };
    let l0 = schrodinger(base, qp.hbar);
    for v in samples.clone() {
        let eps = v[0];
        for sign in SIGNS {
            let tag = format!("{}/eps={eps}", sign_tag(sign));
            {
                let (qp, metric, g, fam, l0) = (
                    qp.clone(),
                    base.metric().clone(),
                    cand.g.clone(),
                    fam.clone(),
                    l0.clone(),
                );
                b.add(
                    "quantum",
                    &format!("ghat/eigenvalue/{tag}"),
                    Tier::FirstOrder,
                    FIRST_POINTS,
                    move || {
                        let qe = qp.clone().with_epsilon(eps);
                        let op = g_hat(&metric, &g, &qe, sign, Normalization::default()).map_err(err)?;
                        let psi = family_pair(&fam, eps).ok_or("no eigenfunction")?;
                        let lam = qp.lambda_for(eps - sign.value() as f64 * qp.s());
                        let image = EigenPair::new(op.apply(&psi.psi), lam, "L0");
                        Ok(vec![image.comparison(&l0)])
                    },
                );
            }
            {
                let (qp, metric, g, fam) = (qp.clone(), base.metric().clone(), cand.g.clone(), fam.clone());
                b.add(
                    "quantum",
                    &format!("ghat/proportional/{tag}"),
                    Tier::FirstOrder,
                    FIRST_POINTS,
                    move || {
                        let qe = qp.clone().with_epsilon(eps);
                        let op = g_hat(&metric, &g, &qe, sign, Normalization::default()).map_err(err)?;
                        let coeffs = g_hat_coefficients(&qe, sign, eps, Normalization::default()).map_err(err)?;
                        let psi = family_pair(&fam, eps).ok_or("no eigenfunction")?;
                        let next = family_pair(&fam, eps - sign.value() as f64 * qp.s()).ok_or("no eigenfunction")?;
                        Ok(vec![
                            Comparison::new().pair(op.apply(&psi.psi), Expr::real(coeffs.a1) * next.psi)
                        ])
                    },
                );
            }
        }
    }
    if cand.c == 0.0 || cand.c0 != 0.0 || qp.big_c != 0.0 {
        return;
    }
    let eps = samples[samples.len() / 2][0];
    for (m, n) in b.mn() {
        for signs in XSigns::all() {
            let (qp, metric, g, fam, l0) = (
                qp.clone(),
                base.metric().clone(),
                cand.g.clone(),
                fam.clone(),
                l0.clone(),
            );
            // m rungs up is the lowest radial level that no sign variant annihilates
            let name = format!("X/{m}-{n}/{}/level={m}", signs.label());
            b.add_custom("quantum", &name, Tier::Deep, DEEP_POINTS, move |d, pts, t| {
                let pair = family_pair(&fam, eps).ok_or("no eigenfunction")?;
                let qp = qp.clone().with_k(m, n).map_err(err)?;
                let qp = qp.clone().with_epsilon(qp.epsilon_for(pair.eigenvalue.re));
                let f = excited_separable_eigenfunction(&qp, &pair, Sign::Plus, m).map_err(err)?;
                let qp = qp.with_energy(f.eigenvalue.re);
                let h = extended_quantum_h(&l0, &qp).map_err(err)?;
                let x = warped_symmetry_x(&metric, &g, &qp, signs, Normalization::default()).map_err(err)?;
                quantum::check_warped_symmetry(&h, &x, &f, d, pts, t).map_err(err)
            });
        }
    }
}

fn quantum_radial(b: &mut Builder, qp: &QuantumParams, samples: &[f64]) {
    let seed = b.opts.seed;
    let mut dims = vec![qp.dim];
    if qp.dim != 3 {
        dims.push(3);
    }
    for dim in dims {
        let mut qd = qp.clone().with_mu(RADIAL_MU);
        qd.dim = dim;
        for sigma in SIGNS {
            for tau in SIGNS {
                for m in [1, 2] {
                    let qd = qd.clone();
                    let tag = format!("N={dim}/{}{}/m={m}", sign_tag(sigma), sign_tag(tau));
                    b.add(
                        "quantum",
                        &format!("ahat/{tag}"),
                        Tier::Integral,
                        DEEP_POINTS,
                        move || {
                            let tests = random_test_functions(TEST_FUNCTIONS, seed);
                            a_hat_identity(&qd, sigma, tau, m, &tests).map_err(err)
                        },
                    );
                }
            }
        }
    }
    for &big_m in samples {
        for sign in SIGNS {
            for rungs in [1, 2] {
                let qp = qp.clone();
                b.add(
                    "quantum",
                    &format!("dhat/M={big_m}/{}/rungs={rungs}", sign_tag(sign)),
                    Tier::Integral,
                    FIRST_POINTS,
                    move || {
                        let phi = radial_eigenfunction(&qp, big_m, Sign::Plus).map_err(err)?;
                        let (_, cmp) = d_hat_shift(&qp, sign, big_m, &phi, rungs).map_err(err)?;
                        Ok(vec![cmp])
                    },
                );
            }
        }
    }
    for dim in [1usize, 3] {
        let mut qd = qp.clone();
        qd.dim = dim;
        let name = b.name("quantum", &format!("folded-delta0/N={dim}"));
        let negative = qd.delta0() != 0.0;
        let tol = if negative { FOLD_TOL } else { b.profile.first_order };
        let body = move || {
            let tests = random_test_functions(4, seed);
            folded_shift_identity(&qd, Sign::Plus, Sign::Plus, FOLD_NU, &tests).map_err(err)
        };
        let check = IdentityCheck::deferred(&name, b.domain.clone(), b.points(DEEP_POINTS), tol, body);
        b.checks.push(if negative { check.expecting_failure() } else { check });
    }
}

fn quantum_suite(b: &mut Builder) {
    let (Some(qp), Some(fam)) = (b.sys.quantum.clone(), b.sys.eigen.clone()) else {
        return;
    };
    match &fam {
        EigenFamily::Symbolic { .. } => {
            if let Some(base) = b.sys.base.clone() {
                quantum_angular(b, &qp, &base, &fam);
            }
        }
        EigenFamily::Radial { samples } => quantum_radial(b, &qp, samples),
    }
}

/// All checks of `kind` that apply to `sys`.
pub fn build_suite(sys: &SystemDef, kind: SuiteKind, opts: &SuiteOptions) -> Vec<IdentityCheck> {
    let mut b = Builder::new(sys, opts);
    if kind.includes(SuiteKind::Classical) {
        classical(&mut b);
    }
    if kind.includes(SuiteKind::Ladder) {
        ladder(&mut b);
    }
    if kind.includes(SuiteKind::Quantum) {
        quantum_suite(&mut b);
    }
    b.checks
}

pub fn verify(sys: &SystemDef, kind: SuiteKind, opts: &SuiteOptions, timings: bool) -> Report {
    let checks = build_suite(sys, kind, opts);
    let run = RunOptions {
        seed: opts.seed,
        profile: opts.profile(),
        timings,
    };
    run_suite(&checks, &run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems;

    fn failures(r: &Report) -> Vec<String> {
        r.checks
            .iter()
            .filter(|c| c.status != super::super::Status::Pass)
            .map(|c| format!("{} {:?} {:?} {:?}", c.name, c.status, c.max_rel_residual, c.error))
            .collect()
    }

    #[test]
    fn classical_suite_on_ttw_passes() {
        let r = verify(
            &systems::ttw_angular(),
            SuiteKind::Classical,
            &SuiteOptions::default(),
            false,
        );
        assert!(r.success(), "{:#?}", failures(&r));
        assert!(r.total > 10);
    }

    #[test]
    fn planted_negative_is_expected_to_fail() {
        let r = verify(
            &systems::flat_harmonic(),
            SuiteKind::Classical,
            &SuiteOptions::default(),
            false,
        );
        assert!(r.success(), "{:#?}", failures(&r));
        let neg = r.checks.iter().find(|c| c.expect_fail).unwrap();
        assert!(neg.max_rel_residual.unwrap() > 1e-9);
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("ladder".parse::<SuiteKind>(), Ok(SuiteKind::Ladder));
        assert!("nope".parse::<SuiteKind>().is_err());
    }

    #[test]
    fn radial_has_no_classical_checks() {
        assert!(build_suite(
            &systems::radial_oscillator(),
            SuiteKind::Classical,
            &SuiteOptions::default()
        )
        .is_empty());
    }
}
