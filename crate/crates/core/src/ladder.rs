//! Classical ladder functions `X_L G^± = ±f G^±`, the factorization of the
//! characteristic integrals they induce, and the Kuru-Negro type integrals.

use num_complex::Complex;

use crate::classical::{ExtendedSystem, NaturalHamiltonian};
use crate::expr::sample::{Comparison, SampleDomain, SampleError};
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LadderError {
    #[error("Hessian equation fails for G (max relative residual {0:e})")]
    HessianFailed(f64),
    #[error("no constant c1 satisfies the potential condition (residual {0:e} after fit)")]
    Inconsistent(f64),
    #[error("ladder relation X_L G = f G fails (max relative residual {0:e})")]
    RelationFailed(f64),
    #[error("this construction requires {0}")]
    Precondition(&'static str),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// Ladder functions `G^+`, `G^-` of `L` with factor `f` for `G^+` and `-f` for `G^-`.
#[derive(Debug, Clone)]
pub struct LadderPair {
    pub gplus: Expr,
    pub gminus: Expr,
    /// `sqrt(-2(cL + c0))`, principal branch.
    pub f: Expr,
    /// The coordinate function the pair was built from, if any.
    pub source: Option<Expr>,
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `f = sqrt(-2(cL + c0))`.
pub fn ladder_factor(base: &NaturalHamiltonian, c: f64, c0: f64) -> Expr {
    (Expr::int(-2) * (Expr::real(c) * base.l() + Expr::real(c0))).sqrt()
}

impl LadderPair {
    /// Wraps known ladder functions, e.g. ones not of coordinate origin.
    pub fn from_functions(gplus: Expr, gminus: Expr, f: Expr) -> Self {
        LadderPair {
            gplus,
            gminus,
            f,
            source: None,
            c1: 0.0,
        }
    }

    pub fn get(&self, sign: Sign) -> &Expr {
        match sign {
            Sign::Plus => &self.gplus,
            Sign::Minus => &self.gminus,
        }
    }

    /// Factor of `G^sign`: `f` or `-f`.
    pub fn factor(&self, sign: Sign) -> Expr {
        sign.value() * &self.f
    }

    /// `X_L G^± = ±f G^±` for the given sign.
    pub fn relation(&self, base: &NaturalHamiltonian, sign: Sign) -> Comparison {
        let g = self.get(sign);
        let terms = base.phase().bracket_terms(base.l(), g);
        Comparison::new()
            .pair(Expr::sum(terms.clone()), self.factor(sign) * g)
            .scaled_by(terms)
    }
}

/// `grad V . grad G - 2(cV + c0) G`; adding `c1` gives the potential condition.
pub fn potential_condition(base: &NaturalHamiltonian, g: &Expr, c: f64, c0: f64) -> Expr {
    let v = base.potential();
    base.metric().dot_grad(v, g) - Expr::int(2) * (Expr::real(c) * v + Expr::real(c0)) * g
}

/// Least-squares constant `c1` with `grad V . grad G - 2(cV + c0)G + c1 = 0`.
pub fn solve_c1(
    base: &NaturalHamiltonian,
    g: &Expr,
    c: f64,
    c0: f64,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<f64, LadderError> {
    let r = potential_condition(base, g, c, c0);
    let samples = domain.evaluate(std::slice::from_ref(&r), points)?;
    let vals: Vec<Complex<f64>> = samples.values.iter().map(|row| row[0]).collect();
    let mean = vals.iter().fold(Complex::new(0.0, 0.0), |a, v| a + v) / vals.len() as f64;
    let c1 = -mean;
    let scale = vals.iter().fold(1f64, |m, v| m.max(v.norm()));
    let worst = vals.iter().fold(0f64, |m, v| m.max((v + c1).norm()));
    let residual = (worst / scale).max(c1.im.abs() / scale);
    if residual > tol {
        return Err(LadderError::Inconsistent(residual));
    }
    Ok(c1.re)
}

/// `G^± = ±(grad G)^i p_i + G f + c1 / f` after checking both conditions on `G`.
#[allow(clippy::too_many_arguments)]
pub fn make_ladder(
    base: &NaturalHamiltonian,
    g: &Expr,
    c: f64,
    c0: f64,
    c1: f64,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<LadderPair, LadderError> {
    let hess = base.metric().check_hessian_equation(g, c, domain, points, tol)?;
    if !hess.passed {
        return Err(LadderError::HessianFailed(hess.max_rel_residual));
    }
    let cond = potential_condition(base, g, c, c0);
    let out = Comparison::new().pair(cond, Expr::real(-c1)).run(domain, points, tol)?;
    if !out.passed {
        return Err(LadderError::Inconsistent(out.max_rel_residual));
    }
    let pair = build_ladder(base, g, c, c0, c1);
    for sign in [Sign::Plus, Sign::Minus] {
        let out = pair.relation(base, sign).run(domain, points, tol)?;
        if !out.passed {
            return Err(LadderError::RelationFailed(out.max_rel_residual));
        }
    }
    Ok(pair)
}

/// Unchecked construction of the pair.
pub fn build_ladder(base: &NaturalHamiltonian, g: &Expr, c: f64, c0: f64, c1: f64) -> LadderPair {
    let f = ladder_factor(base, c, c0);
    let gp = base.grad_dot_p(g);
    let mut common = g * &f;
    if c1 != 0.0 {
        common = common + Expr::real(c1) / &f;
    }
    LadderPair {
        gplus: &gp + &common,
        gminus: -&gp + &common,
        f,
        source: Some(g.clone()),
        c1,
    }
}

/// `(2f)^{n-1} G^n` and the shift part `F` of a characteristic integral.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub ladder_part: Expr,
    pub shift_part: Expr,
    /// Split form of `F` for `Omega != 0`.
    pub shift_split: Option<Expr>,
    /// The index multiplying `k^2 gamma' f F` in `X_H F`.
    pub index: u32,
}

impl Factorization {
    pub fn product(&self) -> Expr {
        &self.ladder_part * &self.shift_part
    }
}

/// Factorization of `K_{m,n}` built from `G^+`: `F = (p_u + (m/n) gamma f)^m`.
pub fn factorized_k(sys: &ExtendedSystem, lp: &LadderPair) -> Factorization {
    let p = sys.params();
    let (m, n) = (p.m(), p.n());
    let f = &lp.f;
    let ladder_part = (Expr::int(2) * f).powi(n as i64 - 1) * lp.gplus.powi(n as i64);
    let inner = sys.pu().expr() + Expr::frac(m as i64, n as i64) * sys.gamma() * f;
    Factorization {
        ladder_part,
        shift_part: inner.powi(m as i64),
        shift_split: None,
        index: n,
    }
}

/// Factorization of `Kbar_{2s,r}`: `F = [(p_u + (2s/r) gamma f)^2 + 2 Omega gamma^-2]^s`.
pub fn factorized_kbar(sys: &ExtendedSystem, lp: &LadderPair, s: u32, r: u32) -> Factorization {
    let f = &lp.f;
    let gamma = sys.gamma();
    let ladder_part = (Expr::int(2) * f).powi(r as i64 - 1) * lp.gplus.powi(r as i64);
    let base = sys.pu().expr() + Expr::frac(2 * s as i64, r as i64) * gamma * f;
    let omega_cap = Expr::real(sys.params().big_omega);
    let shift_part = (base.powi(2) + Expr::int(2) * &omega_cap * gamma.powi(-2)).powi(s as i64);
    let w = Expr::i() * (Expr::int(2) * &omega_cap).sqrt() / gamma;
    let split = (&base + &w).powi(s as i64) * (&base - &w).powi(s as i64);
    Factorization {
        ladder_part,
        shift_part,
        shift_split: Some(split),
        index: r,
    }
}

/// `X_H F = index k^2 gamma' f F`.
pub fn shift_relation(sys: &ExtendedSystem, lp: &LadderPair, fz: &Factorization) -> Comparison {
    let k2 = sys.params().k_expr().powi(2);
    let terms = sys.chart().bracket_terms(sys.h(), &fz.shift_part);
    let rhs = Expr::int(fz.index as i64) * k2 * sys.gamma_prime() * &lp.f * &fz.shift_part;
    Comparison::new().pair(Expr::sum(terms.clone()), rhs).scaled_by(terms)
}

/// Factors of the Kuru-Negro type integrals `X^± = (G^±)^{2n} (A^∓)^{2m} (D^±)^m`.
#[derive(Debug, Clone)]
pub struct KnFactors {
    /// `M = k sqrt(2(cL + c0))`.
    pub m: Expr,
    pub aplus: Expr,
    pub aminus: Expr,
    pub dplus: Expr,
    pub dminus: Expr,
    pub xplus: Expr,
    pub xminus: Expr,
    pub gplus_pow: Expr,
    pub gminus_pow: Expr,
}

pub fn kuru_negro(sys: &ExtendedSystem, lp: &LadderPair) -> Result<KnFactors, LadderError> {
    let p = sys.params();
    if p.c == 0.0 {
        return Err(LadderError::Precondition("c != 0"));
    }
    if p.big_omega <= 0.0 {
        return Err(LadderError::Precondition("Omega > 0"));
    }
    let (m, n) = (p.m() as i64, p.n() as i64);
    let k = p.k_expr();
    let gamma = sys.gamma();
    let pu = sys.pu().expr();
    let omega = p.omega_expr();
    let c_ratio = Expr::real(p.big_c) / Expr::real(p.c);
    let big_m = &k * (Expr::int(2) * (Expr::real(p.c) * sys.base().l() + Expr::real(p.c0))).sqrt();
    let rt2 = Expr::int(2).sqrt();
    let a_common = &omega / (&rt2 * gamma) - &big_m * gamma / &rt2;
    let a_mom = Expr::i() / &rt2 * &pu;
    let aplus = -&a_mom + &a_common;
    let aminus = &a_mom + &a_common;
    let d_common = &omega * gamma.powi(-2)
        - sys.h() / &omega
        - &c_ratio / &omega * (Expr::real(p.c0) * k.powi(2) - big_m.powi(2) / 2);
    let d_mom = Expr::i() / gamma * &pu;
    let dplus = -&d_mom + &d_common;
    let dminus = &d_mom + &d_common;
    let gplus_pow = lp.gplus.powi(2 * n);
    let gminus_pow = lp.gminus.powi(2 * n);
    let xplus = &gplus_pow * aminus.powi(2 * m) * dplus.powi(m);
    let xminus = &gminus_pow * aplus.powi(2 * m) * dminus.powi(m);
    Ok(KnFactors {
        m: big_m,
        aplus,
        aminus,
        dplus,
        dminus,
        xplus,
        xminus,
        gplus_pow,
        gminus_pow,
    })
}

/// `{H, F} = lambda F` scaled by the bracket terms.
fn eigen_bracket(sys: &ExtendedSystem, f: &Expr, lambda: Expr) -> Comparison {
    let terms = sys.chart().bracket_terms(sys.h(), f);
    Comparison::new()
        .pair(Expr::sum(terms.clone()), lambda * f)
        .scaled_by(terms)
}

impl KnFactors {
    /// `{H, (G^±)^{2n}} = ∓ 2 i m gamma' M (G^±)^{2n}`.
    pub fn relation_g(&self, sys: &ExtendedSystem, sign: Sign) -> Comparison {
        let m = sys.params().m() as i64;
        let lam = -sign.value() * Expr::i() * Expr::int(2 * m) * sys.gamma_prime() * &self.m;
        let g = match sign {
            Sign::Plus => &self.gplus_pow,
            Sign::Minus => &self.gminus_pow,
        };
        eigen_bracket(sys, g, lam)
    }

    /// `{H, A^±} = ∓ i gamma' (M + omega / gamma^2) A^±`.
    pub fn relation_a(&self, sys: &ExtendedSystem, sign: Sign) -> Comparison {
        let omega = sys.params().omega_expr();
        let lam = -sign.value() * Expr::i() * sys.gamma_prime() * (&self.m + omega * sys.gamma().powi(-2));
        let a = match sign {
            Sign::Plus => &self.aplus,
            Sign::Minus => &self.aminus,
        };
        eigen_bracket(sys, a, lam)
    }

    /// `{H, D^±} = ∓ 2 i gamma' (omega / gamma^2) D^±`.
    pub fn relation_d(&self, sys: &ExtendedSystem, sign: Sign) -> Comparison {
        let omega = sys.params().omega_expr();
        let lam = -sign.value() * Expr::int(2) * Expr::i() * sys.gamma_prime() * omega * sys.gamma().powi(-2);
        let d = match sign {
            Sign::Plus => &self.dplus,
            Sign::Minus => &self.dminus,
        };
        eigen_bracket(sys, d, lam)
    }

    /// `{H, X^±} = 0`.
    pub fn conservation(&self, sys: &ExtendedSystem, sign: Sign) -> Comparison {
        let x = match sign {
            Sign::Plus => &self.xplus,
            Sign::Minus => &self.xminus,
        };
        sys.conservation(x)
    }

    /// `H = A^+ A^- + omega M + (C/c)(M^2/2 - k^2 d)` with `d = c0`.
    pub fn h_factorization(&self, sys: &ExtendedSystem) -> Comparison {
        let p = sys.params();
        let omega = p.omega_expr();
        let k2 = p.k_expr().powi(2);
        let c_ratio = Expr::real(p.big_c) / Expr::real(p.c);
        let rhs =
            &self.aplus * &self.aminus + &omega * &self.m + c_ratio * (self.m.powi(2) / 2 - k2 * Expr::real(p.c0));
        Comparison::new().pair(sys.h().clone(), rhs)
    }

    /// `D^+ D^- - (H/omega + (C/(c omega))(c0 k^2 - M^2/2))^2 = -M^2`.
    pub fn d_factorization(&self, sys: &ExtendedSystem) -> Comparison {
        let p = sys.params();
        let omega = p.omega_expr();
        let k2 = p.k_expr().powi(2);
        let c_ratio = Expr::real(p.big_c) / Expr::real(p.c);
        let shifted = sys.h() / &omega + c_ratio / &omega * (Expr::real(p.c0) * k2 - self.m.powi(2) / 2);
        let lhs = &self.dplus * &self.dminus - shifted.powi(2);
        Comparison::new().pair(lhs, -self.m.powi(2))
    }
}

/// `M^2 + k^2 f^2 = 0` for a given pair.
pub fn m_identity(sys: &ExtendedSystem, kn: &KnFactors, lp: &LadderPair) -> Comparison {
    let k2 = sys.params().k_expr().powi(2);
    Comparison::new().pair(kn.m.powi(2), -(k2 * lp.f.powi(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{extend, ExtensionParams};
    use crate::expr::{Symbol, SymbolKind};
    use crate::geometry::Metric;

    fn oscillator() -> (NaturalHamiltonian, SampleDomain, Symbol) {
        let q = Symbol::coordinate("q");
        let p = Symbol::momentum("p");
        let base = NaturalHamiltonian::with_momenta(
            Metric::euclidean(vec![q.clone()]),
            vec![p.clone()],
            Expr::frac(1, 2) * q.expr().powi(2),
        );
        let d = SampleDomain::new()
            .with_box(&q, -2.0, 2.0)
            .with_box(&p, -2.0, 2.0)
            .with_box(&Symbol::new("u", SymbolKind::AuxCoordinate), 0.3, 2.0)
            .with_box(&Symbol::new("p_u", SymbolKind::AuxMomentum), -2.0, 2.0);
        (base, d, q)
    }

    #[test]
    fn oscillator_ladder() {
        let (base, d, q) = oscillator();
        let lp = make_ladder(&base, &q.expr(), 0.0, 0.5, 0.0, &d, 100, 1e-10).unwrap();
        // f = i, G^+ = p + i q
        let p = Symbol::momentum("p");
        assert_eq!(lp.gplus, p.expr() + Expr::i() * q.expr());
    }

    #[test]
    fn fitting_c1() {
        let (base, d, q) = oscillator();
        let c1 = solve_c1(&base, &q.expr(), 0.0, 0.5, &d, 200, 1e-8).unwrap();
        assert!(c1.abs() < 1e-12);
        let quartic = NaturalHamiltonian::with_momenta(base.metric().clone(), base.momenta(), q.expr().powi(4));
        assert!(matches!(
            solve_c1(&quartic, &q.expr(), 0.0, 0.5, &d, 200, 1e-8),
            Err(LadderError::Inconsistent(_))
        ));
    }

    #[test]
    fn theorem_factorization_on_oscillator() {
        let (base, d, q) = oscillator();
        let lp = make_ladder(&base, &q.expr(), 0.0, 0.5, 0.0, &d, 50, 1e-10).unwrap();
        for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2)] {
            let sys = extend(&base, &ExtensionParams::new(0.0, 0.5, 1.0, m, n).unwrap());
            let k = sys.k_integral(&lp.gplus);
            let fz = factorized_k(&sys, &lp);
            let out = Comparison::new().pair(k, fz.product()).run(&d, 60, 1e-9).unwrap();
            assert!(out.passed, "({m},{n}) {out:?}");
            assert!(shift_relation(&sys, &lp, &fz).run(&d, 60, 1e-9).unwrap().passed);
        }
    }

    #[test]
    fn kuru_negro_rejects_flat_case() {
        let (base, _, q) = oscillator();
        let lp = build_ladder(&base, &q.expr(), 0.0, 0.5, 0.0);
        let sys = extend(
            &base,
            &ExtensionParams::new(0.0, 0.5, 1.0, 1, 1).unwrap().with_omega_cap(0.5),
        );
        assert!(matches!(kuru_negro(&sys, &lp), Err(LadderError::Precondition(_))));
    }
}
