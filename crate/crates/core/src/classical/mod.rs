//! Natural Hamiltonians, their extensions and the characteristic first integrals.

mod bracket;

pub use bracket::{poisson, BracketConvention, PhaseSpace};

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::expr::sample::{CheckOutcome, Comparison, SampleDomain, SampleError};
use crate::expr::{Expr, Symbol, SymbolKind};
use crate::geometry::Metric;
use crate::scalar::{rational_from_f64, Rational};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassicalError {
    #[error("symbol `{0}` has no canonical partner in the chart")]
    ChartIncomplete(String),
    #[error("G does not solve X_L^2 G = -2(cL + c0) G (max relative residual {residual:e})")]
    FundamentalFailed { residual: f64 },
    #[error("this construction requires Omega = 0")]
    NonzeroOmega,
    #[error("invalid rational index {0}")]
    InvalidIndex(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// `L = 1/2 g^ij p_i p_j + V(q)`.
#[derive(Debug, Clone)]
pub struct NaturalHamiltonian {
    metric: Metric,
    phase: PhaseSpace,
    potential: Expr,
    l: Expr,
}

impl NaturalHamiltonian {
    /// Momenta are named `p_<coordinate>`.
    pub fn new(metric: Metric, potential: Expr) -> Self {
        let momenta: Vec<Symbol> = metric
            .coords()
            .iter()
            .map(|q| Symbol::momentum(&format!("p_{}", q.name())))
            .collect();
        Self::with_momenta(metric, momenta, potential)
    }

    pub fn with_momenta(metric: Metric, momenta: Vec<Symbol>, potential: Expr) -> Self {
        let phase = PhaseSpace::new(metric.coords().iter().cloned().zip(momenta.iter().cloned()).collect());
        let l = Expr::frac(1, 2) * metric.kinetic_form(&momenta) + &potential;
        NaturalHamiltonian {
            metric,
            phase,
            potential,
            l,
        }
    }

    pub fn with_convention(mut self, convention: BracketConvention) -> Self {
        self.phase = self.phase.with_convention(convention);
        self
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn phase(&self) -> &PhaseSpace {
        &self.phase
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    pub fn l(&self) -> &Expr {
        &self.l
    }

    pub fn momenta(&self) -> Vec<Symbol> {
        self.phase.momenta()
    }

    /// `X_L(g) = {L, g}`.
    pub fn x_l(&self, g: &Expr) -> Expr {
        self.phase.bracket(&self.l, g)
    }

    /// `(grad G)^i p_i`.
    pub fn grad_dot_p(&self, g: &Expr) -> Expr {
        let up = self.metric.grad(g);
        Expr::sum(up.iter().zip(self.momenta()).map(|(a, p)| a * p.expr()))
    }
}

/// Constants of one extension. `k = m/n` is kept exact and in lowest terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub c: f64,
    pub c0: f64,
    pub c1: f64,
    /// The constant `C` of `gamma' + c gamma^2 + C = 0`.
    #[serde(rename = "C")]
    pub big_c: f64,
    /// `Omega`, with `omega^2 = 2 Omega`.
    #[serde(rename = "Omega")]
    pub big_omega: f64,
    m: u32,
    n: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl ExtensionParams {
    pub fn new(c: f64, c0: f64, big_c: f64, m: u32, n: u32) -> Result<Self, ClassicalError> {
        if m == 0 || n == 0 {
            return Err(ClassicalError::InvalidIndex(format!("{m}/{n}")));
        }
        let d = gcd(m, n);
        Ok(ExtensionParams {
            c,
            c0,
            c1: 0.0,
            big_c,
            big_omega: 0.0,
            m: m / d,
            n: n / d,
        })
    }

    pub fn with_omega_cap(mut self, big_omega: f64) -> Self {
        self.big_omega = big_omega;
        self
    }

    /// Sets `Omega = omega^2 / 2`.
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.big_omega = omega * omega / 2.0;
        self
    }

    pub fn with_c1(mut self, c1: f64) -> Self {
        self.c1 = c1;
        self
    }

    pub fn with_k(mut self, m: u32, n: u32) -> Result<Self, ClassicalError> {
        let fresh = ExtensionParams::new(self.c, self.c0, self.big_c, m, n)?;
        self.m = fresh.m;
        self.n = fresh.n;
        Ok(self)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> Ratio<i64> {
        Ratio::new(self.m as i64, self.n as i64)
    }

    pub fn k_expr(&self) -> Expr {
        Expr::frac(self.m as i64, self.n as i64)
    }

    /// `omega = sqrt(2 Omega)`.
    pub fn omega(&self) -> f64 {
        (2.0 * self.big_omega).sqrt()
    }

    /// Exact `omega` when `2 Omega` is a perfect square, else its double value.
    pub fn omega_expr(&self) -> Expr {
        (Expr::int(2) * Expr::real(self.big_omega)).sqrt()
    }
}

/// Parses `"m/n"` or `"m"`.
pub fn parse_ratio(text: &str) -> Result<(u32, u32), ClassicalError> {
    let bad = || ClassicalError::InvalidIndex(text.to_string());
    let (m, n) = match text.split_once('/') {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => (text.trim().parse().map_err(|_| bad())?, 1),
    };
    if m == 0 || n == 0 {
        return Err(bad());
    }
    Ok((m, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaggedKind {
    S,
    C,
    T,
}

/// Tagged trigonometric functions: trigonometric for `kappa > 0`, polynomial
/// for `kappa = 0`, hyperbolic for `kappa < 0`.
pub fn tagged_trig(kind: TaggedKind, kappa: &Rational, x: &Expr) -> Expr {
    let s = if kappa.is_zero() {
        x.clone()
    } else {
        let r = Expr::rational(kappa.abs()).sqrt();
        if kappa.is_positive() {
            (&r * x).sin() / &r
        } else {
            (&r * x).sinh() / &r
        }
    };
    let c = if kappa.is_zero() {
        Expr::one()
    } else {
        let r = Expr::rational(kappa.abs()).sqrt();
        if kappa.is_positive() {
            (&r * x).cos()
        } else {
            (&r * x).cosh()
        }
    };
    match kind {
        TaggedKind::S => s,
        TaggedKind::C => c,
        TaggedKind::T => s / c,
    }
}

/// Solution of `gamma' + c gamma^2 + C = 0`: `-C u` for `c = 0`, otherwise
/// `C_k(cu) / S_k(cu)` with `k = C/c`.
pub fn gamma_solution(p: &ExtensionParams, u: &Symbol) -> Expr {
    if p.c == 0.0 {
        return -(Expr::real(p.big_c) * u.expr());
    }
    let c = rational_from_f64(p.c);
    let kappa = rational_from_f64(p.big_c) / &c;
    let x = Expr::rational(c) * u.expr();
    tagged_trig(TaggedKind::C, &kappa, &x) / tagged_trig(TaggedKind::S, &kappa, &x)
}

/// The ODE residual `gamma' + c gamma^2 + C`.
pub fn gamma_residual(gamma: &Expr, u: &Symbol, c: f64, big_c: f64) -> Expr {
    gamma.diff(u) + Expr::real(c) * gamma.powi(2) + Expr::real(big_c)
}

/// `H = 1/2 p_u^2 - k^2 gamma' L + k^2 c0 gamma^2 + Omega / gamma^2` over a base `L`.
#[derive(Debug, Clone)]
pub struct ExtendedSystem {
    base: NaturalHamiltonian,
    params: ExtensionParams,
    u: Symbol,
    pu: Symbol,
    gamma: Expr,
    chart: PhaseSpace,
    h: Expr,
}

pub fn extend(base: &NaturalHamiltonian, params: &ExtensionParams) -> ExtendedSystem {
    let u = Symbol::new("u", SymbolKind::AuxCoordinate);
    let pu = Symbol::new("p_u", SymbolKind::AuxMomentum);
    let gamma = gamma_solution(params, &u);
    extend_with_gamma(base, params, u, pu, gamma)
}

/// Extension with an explicit `gamma(u)`, for callers that shift `u`.
pub fn extend_with_gamma(
    base: &NaturalHamiltonian,
    params: &ExtensionParams,
    u: Symbol,
    pu: Symbol,
    gamma: Expr,
) -> ExtendedSystem {
    let k2 = params.k_expr().powi(2);
    let mut terms = vec![
        Expr::frac(1, 2) * pu.expr().powi(2),
        -(&k2 * gamma.diff(&u) * base.l()),
        &k2 * Expr::real(params.c0) * gamma.powi(2),
    ];
    if params.big_omega != 0.0 {
        terms.push(Expr::real(params.big_omega) * gamma.powi(-2));
    }
    let h = Expr::sum(terms);
    let chart = base.phase().extended(u.clone(), pu.clone());
    ExtendedSystem {
        base: base.clone(),
        params: params.clone(),
        u,
        pu,
        gamma,
        chart,
        h,
    }
}

impl ExtendedSystem {
    pub fn base(&self) -> &NaturalHamiltonian {
        &self.base
    }
    pub fn params(&self) -> &ExtensionParams {
        &self.params
    }
    pub fn u(&self) -> &Symbol {
        &self.u
    }
    pub fn pu(&self) -> &Symbol {
        &self.pu
    }
    pub fn gamma(&self) -> &Expr {
        &self.gamma
    }
    pub fn gamma_prime(&self) -> Expr {
        self.gamma.diff(&self.u)
    }
    pub fn chart(&self) -> &PhaseSpace {
        &self.chart
    }
    pub fn h(&self) -> &Expr {
        &self.h
    }

    /// `X_H(g) = {H, g}` on the extended phase space.
    pub fn x_h(&self, g: &Expr) -> Expr {
        self.chart.bracket(&self.h, g)
    }

    /// `{H, g} = 0` as a comparison scaled by the bracket's own terms.
    pub fn conservation(&self, g: &Expr) -> Comparison {
        let terms = self.chart.bracket_terms(&self.h, g);
        Comparison::new().zero(Expr::sum(terms.clone())).scaled_by(terms)
    }

    /// `U(phi) = p_u phi + a gamma X_L(phi)` with `a = num/den`.
    pub fn apply_u(&self, phi: &Expr, num: i64, den: i64) -> Expr {
        let xl = self.base.x_l(phi);
        self.pu.expr() * phi + Expr::frac(num, den) * &self.gamma * xl
    }

    /// `K_{m,n} = U_{m,n}^m (G_n)` with `U_{m,n} = p_u + (m/n^2) gamma X_L`, for `m/n = k`.
    pub fn k_integral(&self, g: &Expr) -> Expr {
        let (m, n) = (self.params.m as i64, self.params.n as i64);
        let mut acc = recursion_g(&self.base, g, n as u32);
        for _ in 0..m {
            acc = self.apply_u(&acc, m, n * n);
        }
        acc
    }

    /// `((U_{2s,r})^2 + 2 Omega gamma^-2)^s (G_r)`.
    pub fn kbar_integral(&self, g: &Expr, s: u32, r: u32) -> Expr {
        let (num, den) = (2 * s as i64, (r as i64) * (r as i64));
        let two_omega = Expr::int(2) * Expr::real(self.params.big_omega) * self.gamma.powi(-2);
        let mut acc = recursion_g(&self.base, g, r);
        for _ in 0..s {
            let once = self.apply_u(&acc, num, den);
            let twice = self.apply_u(&once, num, den);
            acc = twice + &two_omega * &acc;
        }
        acc
    }
}

/// `G_1 = G`, `G_{j+1} = X_L(G) G_j + (1/j) G X_L(G_j)`.
pub fn recursion_g(base: &NaturalHamiltonian, g: &Expr, n: u32) -> Expr {
    assert!(n >= 1, "recursion index starts at 1");
    let xg = base.x_l(g);
    let mut gj = g.clone();
    for j in 1..n {
        gj = (&xg * &gj + Expr::frac(1, j as i64) * g * base.x_l(&gj)).simplify();
    }
    gj
}

/// The residual `X_L^2 G + 2(cL + c0) G` compared against zero.
pub fn fundamental_comparison(base: &NaturalHamiltonian, g: &Expr, c: f64, c0: f64) -> Comparison {
    let x1 = base.x_l(g);
    let x2 = base.x_l(&x1);
    let rhs = -(Expr::int(2) * (Expr::real(c) * base.l() + Expr::real(c0)) * g);
    Comparison::new().pair(x2, rhs)
}

pub fn check_fundamental(
    base: &NaturalHamiltonian,
    g: &Expr,
    c: f64,
    c0: f64,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<CheckOutcome, SampleError> {
    fundamental_comparison(base, g, c, c0).run(domain, points, tol)
}

fn require_fundamental(
    sys: &ExtendedSystem,
    g: &Expr,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<(), ClassicalError> {
    let p = sys.params();
    let out = check_fundamental(sys.base(), g, p.c, p.c0, domain, points, tol)?;
    if !out.passed {
        return Err(ClassicalError::FundamentalFailed {
            residual: out.max_rel_residual,
        });
    }
    Ok(())
}

/// `K_{m,n}` after checking that `G` solves the fundamental equation.
pub fn characteristic_k(
    sys: &ExtendedSystem,
    g: &Expr,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<Expr, ClassicalError> {
    if sys.params().big_omega != 0.0 {
        return Err(ClassicalError::NonzeroOmega);
    }
    require_fundamental(sys, g, domain, points, tol)?;
    Ok(sys.k_integral(g))
}

/// `Kbar_{2s,r}` after the same check. Odd numerators are the caller's concern.
pub fn characteristic_kbar(
    sys: &ExtendedSystem,
    g: &Expr,
    s: u32,
    r: u32,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<Expr, ClassicalError> {
    if s == 0 || r == 0 {
        return Err(ClassicalError::InvalidIndex(format!("{}/{r}", 2 * s)));
    }
    require_fundamental(sys, g, domain, points, tol)?;
    Ok(sys.kbar_integral(g, s, r))
}

/// Indices `(s, r)` of the conserved `Kbar` for `k = m/n`: `(m/2, n)` for even
/// `m`, `(m, 2n)` for odd `m`.
pub fn kbar_indices(m: u32, n: u32) -> (u32, u32) {
    if m.is_multiple_of(2) {
        (m / 2, n)
    } else {
        (m, 2 * n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn oscillator() -> (NaturalHamiltonian, Symbol, Symbol) {
        let q = Symbol::coordinate("q");
        let p = Symbol::momentum("p");
        let metric = Metric::euclidean(vec![q.clone()]);
        let base = NaturalHamiltonian::with_momenta(metric, vec![p.clone()], Expr::frac(1, 2) * q.expr().powi(2));
        (base, q, p)
    }

    fn domain(q: &Symbol, p: &Symbol) -> SampleDomain {
        SampleDomain::new()
            .with_box(q, -2.0, 2.0)
            .with_box(p, -2.0, 2.0)
            .with_box(&Symbol::new("u", SymbolKind::AuxCoordinate), 0.3, 2.0)
            .with_box(&Symbol::new("p_u", SymbolKind::AuxMomentum), -2.0, 2.0)
    }

    #[test]
    fn tagged_trig_table() {
        let x = Symbol::coordinate("x").expr();
        assert_eq!(tagged_trig(TaggedKind::S, &rational(0, 1), &x), x);
        assert!(tagged_trig(TaggedKind::C, &rational(0, 1), &x).is_one());
        assert_eq!(tagged_trig(TaggedKind::S, &rational(1, 1), &x), x.sin());
        assert_eq!(
            tagged_trig(TaggedKind::S, &rational(-4, 1), &x),
            Expr::frac(1, 2) * (Expr::int(2) * &x).sinh()
        );
    }

    #[test]
    fn gamma_families() {
        let u = Symbol::new("u", SymbolKind::AuxCoordinate);
        let p = ExtensionParams::new(1.0, 0.0, 0.0, 1, 1).unwrap();
        assert_eq!(gamma_solution(&p, &u), u.expr().recip());
        let p = ExtensionParams::new(0.0, 0.5, 1.0, 1, 1).unwrap();
        assert_eq!(gamma_solution(&p, &u), -u.expr());
        let p = ExtensionParams::new(1.0, 0.0, 1.0, 1, 1).unwrap();
        assert_eq!(gamma_solution(&p, &u), u.expr().cos() / u.expr().sin());
        let d = SampleDomain::new().with_box(&u, 0.3, 2.0);
        for (c, cc) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (2.0, -3.0), (-1.0, 2.0)] {
            let p = ExtensionParams::new(c, 0.0, cc, 1, 1).unwrap();
            let r = gamma_residual(&gamma_solution(&p, &u), &u, c, cc);
            let out = Comparison::new().zero(r).run(&d, 50, 1e-10).unwrap();
            assert!(out.passed, "c={c} C={cc}: {out:?}");
        }
    }

    #[test]
    fn k_normalization() {
        let p = ExtensionParams::new(1.0, 0.0, 0.0, 4, 6).unwrap();
        assert_eq!((p.m(), p.n()), (2, 3));
        assert!(ExtensionParams::new(1.0, 0.0, 0.0, 0, 1).is_err());
        assert_eq!(parse_ratio("3/2").unwrap(), (3, 2));
        assert_eq!(parse_ratio("2").unwrap(), (2, 1));
        assert!(parse_ratio("x/2").is_err());
    }

    #[test]
    fn oscillator_extension_and_first_integral() {
        let (base, q, p) = oscillator();
        let params = ExtensionParams::new(0.0, 0.5, 1.0, 1, 1).unwrap();
        let sys = extend(&base, &params);
        let u = sys.u().clone();
        let pu = sys.pu().clone();
        let expected_h = Expr::frac(1, 2) * pu.expr().powi(2) + base.l() + Expr::frac(1, 2) * u.expr().powi(2);
        assert_eq!(sys.h().simplify(), expected_h.simplify());
        let d = domain(&q, &p);
        let k = characteristic_k(&sys, &q.expr(), &d, 30, 1e-10).unwrap();
        assert_eq!(k.simplify(), (pu.expr() * q.expr() - u.expr() * p.expr()).simplify());
        assert!(sys.conservation(&k).run(&d, 50, 1e-10).unwrap().passed);
    }

    #[test]
    fn non_solution_is_rejected() {
        let (base, q, p) = oscillator();
        let sys = extend(&base, &ExtensionParams::new(0.0, 0.5, 1.0, 1, 1).unwrap());
        let err = characteristic_k(&sys, &q.expr().powi(2), &domain(&q, &p), 30, 1e-9).unwrap_err();
        assert!(matches!(err, ClassicalError::FundamentalFailed { residual } if residual > 1e-3));
    }

    #[test]
    fn second_recursion_term() {
        let (base, q, _) = oscillator();
        let g = q.expr();
        assert_eq!(recursion_g(&base, &g, 1), g);
        assert_eq!(recursion_g(&base, &g, 2), (2 * &g * base.x_l(&g)).simplify());
    }

    #[test]
    fn omega_requires_kbar() {
        let (base, q, p) = oscillator();
        let params = ExtensionParams::new(0.0, 0.5, 1.0, 1, 1).unwrap().with_omega_cap(0.5);
        let sys = extend(&base, &params);
        let d = domain(&q, &p);
        assert_eq!(
            characteristic_k(&sys, &q.expr(), &d, 10, 1e-9),
            Err(ClassicalError::NonzeroOmega)
        );
        for (s, r) in [(1, 1), (1, 2)] {
            // k must equal 2s/r for the integral to be conserved
            let sys = extend(&base, &params.clone().with_k(2 * s, r).unwrap());
            let kb = characteristic_kbar(&sys, &q.expr(), s, r, &d, 30, 1e-9).unwrap();
            let out = sys.conservation(&kb).run(&d, 60, 1e-8).unwrap();
            assert!(out.passed, "s={s} r={r}: {out:?}");
        }
    }
}
