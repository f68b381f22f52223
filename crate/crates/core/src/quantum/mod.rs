//! Quantum counterparts: Schrödinger operators, the extended radial
//! Hamiltonian, ladder operators `G^±_eps`, shift-ladder operators
//! `A^{sigma,tau}_mu`, energy shift operators `D^±_E`, and the warped
//! symmetry built from all three.
//!
//! Ladder relations that only hold on eigenfunctions are checked on explicit
//! eigenfunctions ([`EigenPair`]); operator identities are checked on
//! arbitrary test functions.

mod operator;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use operator::{DiffOperator, OperatorChain};

use crate::classical::NaturalHamiltonian;
use crate::expr::sample::{CheckOutcome, Comparison, SampleDomain, SampleError};
use crate::expr::{Expr, Symbol, SymbolKind};
use crate::geometry::Metric;
use crate::ladder::Sign;
use crate::scalar::rational_from_f64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("this construction requires {0}")]
    Precondition(&'static str),
    #[error("coefficient a2 is singular at epsilon = {epsilon}")]
    SingularCoefficient { epsilon: f64 },
    #[error("negative discriminant {0:e}")]
    NegativeDiscriminant(f64),
    #[error("input is not an eigenfunction (max relative residual {0:e})")]
    NotEigenfunction(f64),
    #[error("factor {factor} of the chain annihilates its input")]
    Annihilated { factor: usize },
    #[error("index must be positive, got {0}")]
    InvalidIndex(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
}

/// The radial coordinate `u` of the extension.
pub fn radial_coordinate() -> Symbol {
    Symbol::new("u", SymbolKind::AuxCoordinate)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Constants of the quantum constructions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumParams {
    pub hbar: f64,
    pub c: f64,
    pub c0: f64,
    pub c1: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    /// Dimension of the base manifold.
    #[serde(rename = "N")]
    pub dim: usize,
    k_m: u32,
    k_n: u32,
    pub omega: f64,
    pub epsilon: f64,
    pub mu: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

impl QuantumParams {
    pub fn new(hbar: f64, c: f64, dim: usize) -> Self {
        QuantumParams {
            hbar,
            c,
            c0: 0.0,
            c1: 0.0,
            big_c: 0.0,
            dim,
            k_m: 1,
            k_n: 1,
            omega: 0.0,
            epsilon: 0.0,
            mu: 0.0,
            energy: 0.0,
            big_m: 0.0,
        }
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn with_c1(mut self, c1: f64) -> Self {
        self.c1 = c1;
        self
    }

    pub fn with_big_c(mut self, big_c: f64) -> Self {
        self.big_c = big_c;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_energy(mut self, energy: f64) -> Self {
        self.energy = energy;
        self
    }

    pub fn with_m(mut self, big_m: f64) -> Self {
        self.big_m = big_m;
        self
    }

    /// `k = m/n`, stored in lowest terms.
    pub fn with_k(mut self, m: u32, n: u32) -> Result<Self, QuantumError> {
        if m == 0 || n == 0 {
            return Err(QuantumError::InvalidIndex(format!("{m}/{n}")));
        }
        let d = gcd(m, n);
        self.k_m = m / d;
        self.k_n = n / d;
        Ok(self)
    }

    pub fn m(&self) -> u32 {
        self.k_m
    }

    pub fn n(&self) -> u32 {
        self.k_n
    }

    pub fn k(&self) -> f64 {
        self.k_m as f64 / self.k_n as f64
    }

    /// `s = hbar sqrt(|c|/2)`.
    pub fn s(&self) -> f64 {
        self.hbar * (self.c.abs() / 2.0).sqrt()
    }

    /// `delta = hbar c omega`.
    pub fn delta(&self) -> f64 {
        self.hbar * self.c * self.omega
    }

    /// `delta0 = -hbar^2 c (N-1)^2 / 8`.
    pub fn delta0(&self) -> f64 {
        let n1 = self.dim as f64 - 1.0;
        -self.hbar * self.hbar * self.c * n1 * n1 / 8.0
    }

    /// `sgn c`.
    pub fn ccheck(&self) -> f64 {
        if self.c < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// `eps = sqrt|lambda - delta0|`, the label of a `L0` eigenvalue.
    pub fn epsilon_for(&self, lambda: f64) -> f64 {
        (lambda - self.delta0()).abs().sqrt()
    }

    /// Eigenvalue `ccheck eps^2 + delta0` labelled by `eps`.
    pub fn lambda_for(&self, epsilon: f64) -> f64 {
        self.ccheck() * epsilon * epsilon + self.delta0()
    }

    fn require_c(&self) -> Result<(), QuantumError> {
        if self.c == 0.0 {
            return Err(QuantumError::Precondition("c != 0"));
        }
        Ok(())
    }

    fn require_radial(&self) -> Result<(), QuantumError> {
        self.require_c()?;
        if self.big_c != 0.0 {
            return Err(QuantumError::Precondition("C = 0, i.e. gamma = 1/(cu)"));
        }
        Ok(())
    }
}

/// `Delta_g` as a second-order operator.
pub fn laplacian(metric: &Metric) -> DiffOperator {
    let coords = metric.coords().to_vec();
    let n = coords.len();
    let inv = metric.inverse();
    let gamma = metric.christoffel();
    let mut op = DiffOperator::zero(coords);
    for i in 0..n {
        for j in 0..n {
            if inv[i][j].is_zero() {
                continue;
            }
            let mut idx = vec![0; n];
            idx[i] += 1;
            idx[j] += 1;
            op.add_term(idx, inv[i][j].clone());
        }
    }
    for k in 0..n {
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !inv[i][j].is_zero() && !gamma[k][i][j].is_zero() {
                    terms.push(-(&inv[i][j] * &gamma[k][i][j]));
                }
            }
        }
        let mut idx = vec![0; n];
        idx[k] = 1;
        op.add_term(idx, Expr::sum(terms).simplify());
    }
    op
}

/// `L = -hbar^2/2 Delta + V`.
pub fn schrodinger(base: &NaturalHamiltonian, hbar: f64) -> DiffOperator {
    let coords = base.metric().coords().to_vec();
    laplacian(base.metric()).scale(&Expr::real(-hbar * hbar / 2.0))
        + DiffOperator::multiplication(coords, base.potential().clone())
}

/// `-hbar^2/2 (d_u^2 + (N/u) d_u)`.
fn radial_kinetic(qp: &QuantumParams, u: &Symbol) -> DiffOperator {
    let c = vec![u.clone()];
    let h2 = qp.hbar * qp.hbar;
    DiffOperator::partial(c.clone(), u, 2).scale(&Expr::real(-h2 / 2.0))
        + DiffOperator::partial(c, u, 1).scale(&(Expr::real(-h2 * qp.dim as f64 / 2.0) / u.expr()))
}

/// `H^0 = -hbar^2/2 (d_u^2 + (N/u) d_u) + omega^2 c^2 u^2 / 2`.
pub fn h_zero(qp: &QuantumParams) -> DiffOperator {
    let u = radial_coordinate();
    let w = Expr::real(qp.omega * qp.omega * qp.c * qp.c / 2.0) * u.expr().powi(2);
    radial_kinetic(qp, &u) + DiffOperator::multiplication(vec![u], w)
}

/// `H^M = H^0 + (M + delta0)/(c u^2)`.
pub fn h_m(qp: &QuantumParams, big_m: f64) -> Result<DiffOperator, QuantumError> {
    qp.require_c()?;
    let u = radial_coordinate();
    let extra = Expr::real((big_m + qp.delta0()) / qp.c) * u.expr().powi(-2);
    Ok(h_zero(qp) + DiffOperator::multiplication(vec![u], extra))
}

/// Extended Hamiltonian
/// `H = H^0 + k^2/(c u^2) L0 + (1 - k^2) delta0/(c u^2)`.
///
/// On `phi(u) psi` with `L0 psi = lambda psi` it acts as `H^M` with
/// `M = k^2 (lambda - delta0) = ccheck k^2 eps^2`.
pub fn extended_quantum_h(l0: &DiffOperator, qp: &QuantumParams) -> Result<DiffOperator, QuantumError> {
    qp.require_c()?;
    let u = radial_coordinate();
    let k2 = qp.k() * qp.k();
    let inv_cu2 = Expr::real(1.0 / qp.c) * u.expr().powi(-2);
    let coupling = l0.scale(&(Expr::real(k2) * &inv_cu2));
    let shift = Expr::real((1.0 - k2) * qp.delta0()) * &inv_cu2;
    Ok(h_zero(qp) + coupling + DiffOperator::multiplication(vec![u], shift))
}

/// Choice of the overall factor `a0` of `G^±_eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    Fixed(f64),
    /// `a0 = s (s ∓ 2 eps)`, which makes the coefficients polynomial in `eps`.
    Polynomial,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization::Fixed(1.0)
    }
}

/// `a0`, `a1`, `a2` of `G^±_eps = a0 grad G . grad + a1 G + a2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhatCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

pub fn g_hat_coefficients(
    qp: &QuantumParams,
    sign: Sign,
    epsilon: f64,
    norm: Normalization,
) -> Result<GhatCoefficients, QuantumError> {
    qp.require_c()?;
    let sg = sign.value() as f64;
    let a0 = match norm {
        Normalization::Fixed(a) => a,
        Normalization::Polynomial => qp.s() * (qp.s() - sg * 2.0 * epsilon),
    };
    let root = (2.0 * qp.c.abs()).sqrt();
    let a1 = a0 * (qp.c * (1.0 - qp.dim as f64) / 2.0 + sg * epsilon * (root / qp.hbar));
    let a2 = if qp.c1 == 0.0 {
        0.0
    } else {
        let h2c = qp.c * qp.hbar * qp.hbar;
        let den = -h2c + sg * 2.0 * qp.hbar * epsilon * root;
        if den.abs() <= 1e-12 * h2c.abs().max(1.0) {
            return Err(QuantumError::SingularCoefficient {
                epsilon: sg * h2c / (2.0 * qp.hbar * root),
            });
        }
        -2.0 * qp.c1 * a0 / den
    };
    Ok(GhatCoefficients { a0, a1, a2 })
}

fn g_hat_at(
    metric: &Metric,
    g: &Expr,
    qp: &QuantumParams,
    sign: Sign,
    epsilon: f64,
    norm: Normalization,
) -> Result<DiffOperator, QuantumError> {
    let k = g_hat_coefficients(qp, sign, epsilon, norm)?;
    let coords = metric.coords().to_vec();
    let grad = metric.grad(g);
    let mut op = DiffOperator::zero(coords.clone());
    for (i, gi) in grad.iter().enumerate() {
        let mut idx = vec![0; coords.len()];
        idx[i] = 1;
        op.add_term(idx, Expr::real(k.a0) * gi);
    }
    op.add_term(vec![0; coords.len()], Expr::real(k.a1) * g + Expr::real(k.a2));
    Ok(op)
}

/// `G^±_eps` at `eps = qp.epsilon`.
pub fn g_hat(
    metric: &Metric,
    g: &Expr,
    qp: &QuantumParams,
    sign: Sign,
    norm: Normalization,
) -> Result<DiffOperator, QuantumError> {
    g_hat_at(metric, g, qp, sign, qp.epsilon, norm)
}

/// `G^±_{eps ∓ (n-1)s} o ... o G^±_eps`, unexpanded. `G^+` lowers the label
/// by `s` at each step and `G^-` raises it.
pub fn g_hat_chain(
    metric: &Metric,
    g: &Expr,
    qp: &QuantumParams,
    sign: Sign,
    n: u32,
    norm: Normalization,
) -> Result<OperatorChain, QuantumError> {
    if n == 0 {
        return Err(QuantumError::InvalidIndex("0".into()));
    }
    let step = -(sign.value() as f64) * qp.s();
    let mut chain = OperatorChain::new();
    for j in 0..n {
        chain = chain.then(g_hat_at(metric, g, qp, sign, qp.epsilon + j as f64 * step, norm)?);
    }
    Ok(chain)
}

pub fn g_hat_power(
    metric: &Metric,
    g: &Expr,
    qp: &QuantumParams,
    sign: Sign,
    n: u32,
    norm: Normalization,
) -> Result<DiffOperator, QuantumError> {
    Ok(g_hat_chain(metric, g, qp, sign, n, norm)?.expand())
}

/// One branch of the general ladder ansatz `a0 grad G . grad + b G + e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderCoefficients {
    pub a0: f64,
    pub b: f64,
    pub e: f64,
    /// Eigenvalue reached from `lambda`.
    pub lambda_bar: f64,
}

/// Both branches (upper sign first) of the coefficients mapping a
/// `lambda`-eigenfunction of `-hbar^2/2 Delta + V` to another eigenfunction,
/// where `G` satisfies the Hessian equation with `c` and the potential
/// condition with `c0`, `c1`.
pub fn solve_ladder_coefficients(
    lambda: f64,
    c: f64,
    c0: f64,
    c1: f64,
    dim: usize,
    hbar: f64,
    a0: f64,
) -> Result<[LadderCoefficients; 2], QuantumError> {
    if c == 0.0 && c0 <= 0.0 {
        return Err(QuantumError::Precondition("c0 > 0 when c = 0"));
    }
    let n1 = dim as f64 - 1.0;
    let disc = c * c * hbar * hbar * n1 * n1 + 8.0 * (c * lambda + c0);
    if disc < 0.0 {
        return Err(QuantumError::NegativeDiscriminant(disc));
    }
    let root = disc.sqrt();
    let branch = |sg: f64| -> Result<LadderCoefficients, QuantumError> {
        let den = c * hbar * hbar - sg * hbar * root;
        let e = if c1 == 0.0 {
            0.0
        } else if den.abs() <= 1e-12 * (c * hbar * hbar).abs().max(1.0) {
            return Err(QuantumError::SingularCoefficient {
                epsilon: root / (2.0 * hbar),
            });
        } else {
            2.0 * c1 * a0 / den
        };
        Ok(LadderCoefficients {
            a0,
            b: a0 * (c * (1.0 - dim as f64) / 2.0 + sg * root / (2.0 * hbar)),
            e,
            lambda_bar: lambda + hbar * hbar * c / 2.0 - sg * hbar * root / 2.0,
        })
    };
    Ok([branch(1.0)?, branch(-1.0)?])
}

/// `A^{sigma,tau}_mu = d_u + sigma (c omega / hbar) u + b/u` with
/// `b = N/2 - (Mbar - M)/(c hbar^2)`, `M = ccheck mu^2`, `Mbar = ccheck (mu - tau s)^2`.
/// It satisfies `H^{Mbar} A = A (H^M - sigma hbar c omega)` identically.
pub fn a_hat_at(qp: &QuantumParams, sigma: Sign, tau: Sign, mu: f64) -> Result<DiffOperator, QuantumError> {
    qp.require_radial()?;
    let u = radial_coordinate();
    let (m, mbar) = a_hat_labels(qp, tau, mu);
    let b = qp.dim as f64 / 2.0 - (mbar - m) / (qp.c * qp.hbar * qp.hbar);
    let mult = Expr::real(sigma.value() as f64 * qp.c * qp.omega / qp.hbar) * u.expr() + Expr::real(b) / u.expr();
    let c = vec![u.clone()];
    Ok(DiffOperator::partial(c.clone(), &u, 1) + DiffOperator::multiplication(c, mult))
}

/// `(M, Mbar)` for one step of `A^{.,tau}_mu`.
pub fn a_hat_labels(qp: &QuantumParams, tau: Sign, mu: f64) -> (f64, f64) {
    let next = mu - tau.value() as f64 * qp.s();
    (qp.ccheck() * mu * mu, qp.ccheck() * next * next)
}

/// `A^{sigma,tau}_mu` at `mu = qp.mu`.
pub fn a_hat(qp: &QuantumParams, sigma: Sign, tau: Sign) -> Result<DiffOperator, QuantumError> {
    a_hat_at(qp, sigma, tau, qp.mu)
}

/// `A_{mu - tau(m-1)s} o ... o A_mu`, unexpanded.
pub fn a_hat_chain(qp: &QuantumParams, sigma: Sign, tau: Sign, m: u32) -> Result<OperatorChain, QuantumError> {
    if m == 0 {
        return Err(QuantumError::InvalidIndex("0".into()));
    }
    let step = -(tau.value() as f64) * qp.s();
    let mut chain = OperatorChain::new();
    for j in 0..m {
        chain = chain.then(a_hat_at(qp, sigma, tau, qp.mu + j as f64 * step)?);
    }
    Ok(chain)
}

pub fn a_hat_power(qp: &QuantumParams, sigma: Sign, tau: Sign, m: u32) -> Result<DiffOperator, QuantumError> {
    Ok(a_hat_chain(qp, sigma, tau, m)?.expand())
}

/// `D^±_E = (hbar/sqrt2) u d_u + hbar(N+1)/(2 sqrt2) ± (E/(sqrt2 c omega) - (omega/sqrt2) c u^2)`,
/// mapping an `E` eigenfunction of `H^M` to one at `E ± 2 hbar c omega`.
pub fn d_hat_at(qp: &QuantumParams, sign: Sign, energy: f64) -> Result<DiffOperator, QuantumError> {
    qp.require_c()?;
    if qp.omega == 0.0 {
        return Err(QuantumError::Precondition("omega != 0"));
    }
    let u = radial_coordinate();
    let r2 = std::f64::consts::SQRT_2;
    let sg = sign.value() as f64;
    let constant = qp.hbar * (qp.dim as f64 + 1.0) / (2.0 * r2) + sg * energy / (r2 * qp.c * qp.omega);
    let mult = Expr::real(constant) - Expr::real(sg * qp.omega * qp.c / r2) * u.expr().powi(2);
    let c = vec![u.clone()];
    Ok(
        DiffOperator::partial(c.clone(), &u, 1).scale(&(Expr::real(qp.hbar / r2) * u.expr()))
            + DiffOperator::multiplication(c, mult),
    )
}

/// `D^±_E` at `E = qp.energy`.
pub fn d_hat(qp: &QuantumParams, sign: Sign) -> Result<DiffOperator, QuantumError> {
    d_hat_at(qp, sign, qp.energy)
}

/// `D^±_{E ± 2(m-1)delta} o ... o D^±_E`, unexpanded.
pub fn d_hat_chain(qp: &QuantumParams, sign: Sign, m: u32) -> Result<OperatorChain, QuantumError> {
    if m == 0 {
        return Err(QuantumError::InvalidIndex("0".into()));
    }
    let step = sign.value() as f64 * 2.0 * qp.delta();
    let mut chain = OperatorChain::new();
    for j in 0..m {
        chain = chain.then(d_hat_at(qp, sign, qp.energy + j as f64 * step)?);
    }
    Ok(chain)
}

pub fn d_hat_power(qp: &QuantumParams, sign: Sign, m: u32) -> Result<DiffOperator, QuantumError> {
    Ok(d_hat_chain(qp, sign, m)?.expand())
}

/// An eigenfunction together with its eigenvalue and a tag for its operator.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub psi: Expr,
    pub eigenvalue: Complex<f64>,
    pub operator: String,
}

impl EigenPair {
    pub fn new(psi: Expr, eigenvalue: f64, operator: &str) -> Self {
        EigenPair {
            psi,
            eigenvalue: Complex::new(eigenvalue, 0.0),
            operator: operator.to_string(),
        }
    }

    /// `op psi == lambda psi`, judged against the size of the terms of `op psi`.
    pub fn comparison(&self, op: &DiffOperator) -> Comparison {
        let terms = op.apply_terms(&self.psi);
        let lam = Expr::complex(self.eigenvalue.re, self.eigenvalue.im);
        Comparison::new()
            .pair(Expr::sum(terms.clone()), lam * &self.psi)
            .scaled_by(terms)
    }

    pub fn check(
        &self,
        op: &DiffOperator,
        domain: &SampleDomain,
        points: usize,
        tol: f64,
    ) -> Result<CheckOutcome, SampleError> {
        self.comparison(op).run(domain, points, tol)
    }
}

/// `u^p exp(-(c omega / 2 hbar) u^2)` with `p(p + N - 1) = 2(M + delta0)/(c hbar^2)`,
/// an eigenfunction of `H^M` with `E = hbar c omega (2p + N + 1)/2`. `root`
/// picks the larger (`Plus`) or smaller indicial root.
pub fn radial_eigenfunction(qp: &QuantumParams, big_m: f64, root: Sign) -> Result<EigenPair, QuantumError> {
    qp.require_c()?;
    let n1 = qp.dim as f64 - 1.0;
    let disc = n1 * n1 + 8.0 * (big_m + qp.delta0()) / (qp.c * qp.hbar * qp.hbar);
    if disc < 0.0 {
        return Err(QuantumError::NegativeDiscriminant(disc));
    }
    let p = (-n1 + root.value() as f64 * disc.sqrt()) / 2.0;
    let u = radial_coordinate();
    let a = qp.c * qp.omega / (2.0 * qp.hbar);
    let psi = Expr::pow(&u.expr(), rational_from_f64(p)) * (Expr::real(-a) * u.expr().powi(2)).exp();
    let energy = qp.hbar * qp.c * qp.omega * (2.0 * p + qp.dim as f64 + 1.0) / 2.0;
    Ok(EigenPair::new(psi, energy, "H^M"))
}

/// Product eigenfunction `phi(u) psi_lambda` of the extended Hamiltonian,
/// where `base` is an eigenpair of `L0`.
pub fn separable_eigenfunction(qp: &QuantumParams, base: &EigenPair, root: Sign) -> Result<EigenPair, QuantumError> {
    let lambda = base.eigenvalue.re;
    let big_m = qp.k() * qp.k() * (lambda - qp.delta0());
    if qp.c * big_m <= 0.0 {
        return Err(QuantumError::Precondition("c (lambda - delta0) > 0"));
    }
    let radial = radial_eigenfunction(qp, big_m, root)?;
    Ok(EigenPair {
        psi: radial.psi * &base.psi,
        eigenvalue: radial.eigenvalue,
        operator: "H".into(),
    })
}

/// Like [`separable_eigenfunction`] with the radial factor raised `level`
/// rungs by `D+`, so the energy is `E + 2 level delta`.
pub fn excited_separable_eigenfunction(
    qp: &QuantumParams,
    base: &EigenPair,
    root: Sign,
    level: u32,
) -> Result<EigenPair, QuantumError> {
    let lambda = base.eigenvalue.re;
    let big_m = qp.k() * qp.k() * (lambda - qp.delta0());
    if qp.c * big_m <= 0.0 {
        return Err(QuantumError::Precondition("c (lambda - delta0) > 0"));
    }
    let mut radial = radial_eigenfunction(qp, big_m, root)?;
    if level > 0 {
        radial = d_hat_shift(qp, Sign::Plus, big_m, &radial, level)?.0;
    }
    Ok(EigenPair {
        psi: radial.psi * &base.psi,
        eigenvalue: radial.eigenvalue,
        operator: "H".into(),
    })
}

/// Signs of the three factors of a warped symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XSigns {
    pub g: Sign,
    pub sigma: Sign,
    pub tau: Sign,
    pub d: Sign,
}

impl XSigns {
    /// `(G^+)^{2n} (A^{1,1})^{2m} (D^+)^m`.
    pub const STANDARD: XSigns = XSigns {
        g: Sign::Plus,
        sigma: Sign::Plus,
        tau: Sign::Plus,
        d: Sign::Plus,
    };

    /// The standard operator and its three sign variants.
    pub fn all() -> [XSigns; 4] {
        use Sign::*;
        [
            Self::STANDARD,
            XSigns {
                g: Minus,
                sigma: Minus,
                tau: Minus,
                d: Minus,
            },
            XSigns {
                g: Minus,
                sigma: Plus,
                tau: Minus,
                d: Plus,
            },
            XSigns {
                g: Plus,
                sigma: Minus,
                tau: Plus,
                d: Minus,
            },
        ]
    }

    /// `tau` must move `mu` the way `G` moves `eps`, and `D` must undo the
    /// energy shift of `A`.
    pub fn is_consistent(&self) -> bool {
        self.g == self.tau && self.d == self.sigma
    }

    pub fn label(&self) -> String {
        let s = |x: Sign| if x == Sign::Plus { "+" } else { "-" };
        format!("G{}A{}{}D{}", s(self.g), s(self.sigma), s(self.tau), s(self.d))
    }
}

/// `X = (G_eps)^{2n} o (A_{k eps})^{2m} o (D_E)^m` for `k = m/n`.
#[derive(Debug, Clone)]
pub struct WarpedSymmetry {
    pub chain: OperatorChain,
    pub signs: XSigns,
    pub epsilon: f64,
    pub mu: f64,
    pub energy: f64,
}

/// A factor whose output is below this fraction of its largest term at every
/// sample point is taken to annihilate its input.
pub const ANNIHILATION_RATIO: f64 = 1e-10;

const ANNIHILATION_POINTS: usize = 8;

impl WarpedSymmetry {
    pub fn apply(&self, psi: &Expr) -> Expr {
        self.chain.apply(psi)
    }

    /// Applies the chain factor by factor and fails at the first factor that
    /// annihilates its input. An annihilated image satisfies any eigenvalue
    /// equation while its residual measures only rounding noise.
    pub fn apply_checked(&self, psi: &Expr, domain: &SampleDomain) -> Result<Expr, QuantumError> {
        let mut cur = psi.clone();
        for (factor, op) in self.chain.factors.iter().enumerate() {
            let terms = op.apply_terms(&cur);
            let out = Expr::sum(terms.iter().cloned());
            let mut exprs = vec![out.clone()];
            exprs.extend(terms);
            let samples = domain.evaluate(&exprs, ANNIHILATION_POINTS)?;
            let ratio = samples
                .values
                .iter()
                .map(|row| {
                    let scale = row[1..].iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if scale > 0.0 {
                        row[0].norm() / scale
                    } else {
                        0.0
                    }
                })
                .fold(0.0, f64::max);
            if ratio < ANNIHILATION_RATIO {
                return Err(QuantumError::Annihilated { factor });
            }
            cur = out;
        }
        Ok(cur)
    }

    /// The fully composed operator.
    pub fn operator(&self) -> DiffOperator {
        self.chain.expand()
    }
}

/// Builds the warped symmetry at `eps = qp.epsilon`, `E = qp.energy`.
pub fn warped_symmetry_x(
    metric: &Metric,
    g: &Expr,
    qp: &QuantumParams,
    signs: XSigns,
    norm: Normalization,
) -> Result<WarpedSymmetry, QuantumError> {
    qp.require_radial()?;
    if qp.c0 != 0.0 {
        return Err(QuantumError::Precondition("c0 = 0"));
    }
    if !signs.is_consistent() {
        return Err(QuantumError::Precondition("matching G/tau and D/sigma signs"));
    }
    let (m, n) = (qp.m(), qp.n());
    let mu = qp.k() * qp.epsilon;
    let rad = qp.clone().with_mu(mu);
    let chain = d_hat_chain(qp, signs.d, m)?
        .then_chain(a_hat_chain(&rad, signs.sigma, signs.tau, 2 * m)?)
        .then_chain(g_hat_chain(metric, g, qp, signs.g, 2 * n, norm)?);
    Ok(WarpedSymmetry {
        chain,
        signs,
        epsilon: qp.epsilon,
        mu,
        energy: qp.energy,
    })
}

/// `H (X f) == E X f` after confirming `H f == E f` and that no factor of
/// `X` annihilates `f`.
pub fn check_warped_symmetry(
    h: &DiffOperator,
    x: &WarpedSymmetry,
    f: &EigenPair,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<CheckOutcome, QuantumError> {
    let pre = f.check(h, domain, points, tol)?;
    if !pre.passed {
        return Err(QuantumError::NotEigenfunction(pre.max_rel_residual));
    }
    let image = EigenPair {
        psi: x.apply_checked(&f.psi, domain)?,
        eigenvalue: f.eigenvalue,
        operator: f.operator.clone(),
    };
    Ok(image.check(h, domain, points, tol)?)
}

/// Seeded test functions `u^a exp(-b u^2)(1 + u)`, `a in [0, 3]`, `b in [0.1, 1]`.
pub fn random_test_functions(count: usize, seed: u64) -> Vec<Expr> {
    let u = radial_coordinate().expr();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..3.0);
            let b: f64 = rng.random_range(0.1..1.0);
            Expr::pow(&u, rational_from_f64(a)) * (Expr::real(-b) * u.powi(2)).exp() * (&u + 1)
        })
        .collect()
}

fn operator_identity(
    lhs: &DiffOperator,
    lhs_inner: &OperatorChain,
    rhs_outer: &OperatorChain,
    rhs: &DiffOperator,
    psi: &Expr,
) -> Comparison {
    let inner = lhs_inner.apply(psi);
    let terms = lhs.apply_terms(&inner);
    let right = rhs_outer.apply(&rhs.apply(psi));
    Comparison::new().pair(Expr::sum(terms.clone()), right).scaled_by(terms)
}

/// `H^{Mbar} (A)^m psi == (A)^m (H^M - m sigma delta) psi` for each test
/// function, with `M = ccheck mu^2`, `Mbar = ccheck (mu - m tau s)^2`.
pub fn a_hat_identity(
    qp: &QuantumParams,
    sigma: Sign,
    tau: Sign,
    m: u32,
    tests: &[Expr],
) -> Result<Vec<Comparison>, QuantumError> {
    let chain = a_hat_chain(qp, sigma, tau, m)?;
    let big_m = qp.ccheck() * qp.mu * qp.mu;
    let last = qp.mu - tau.value() as f64 * m as f64 * qp.s();
    let big_mbar = qp.ccheck() * last * last;
    let lhs = h_m(qp, big_mbar)?;
    let u = radial_coordinate();
    let rhs = h_m(qp, big_m)?
        - DiffOperator::identity(vec![u]).scale(&Expr::real(sigma.value() as f64 * m as f64 * qp.delta()));
    Ok(tests
        .iter()
        .map(|psi| operator_identity(&lhs, &chain, &chain, &rhs, psi))
        .collect())
}

/// Negative control. Absorbs `delta0` into the label: treats `H_0^nu`
/// (`= H^{nu - delta0}`) as if it were `H^nu`, builds `A` from `mu = sqrt|nu|`
/// and claims `H_0^{nubar} A = A (H_0^nu - sigma delta)` with
/// `nubar = ccheck(mu - tau s)^2`. This fails whenever `delta0 != 0`.
pub fn folded_shift_identity(
    qp: &QuantumParams,
    sigma: Sign,
    tau: Sign,
    nu: f64,
    tests: &[Expr],
) -> Result<Vec<Comparison>, QuantumError> {
    let mu = nu.abs().sqrt();
    let a = OperatorChain::new().then(a_hat_at(qp, sigma, tau, mu)?);
    let (_, nubar) = a_hat_labels(qp, tau, mu);
    let h0 = |label: f64| h_m(qp, label - qp.delta0());
    let lhs = h0(nubar)?;
    let u = radial_coordinate();
    let rhs = h0(nu)? - DiffOperator::identity(vec![u]).scale(&Expr::real(sigma.value() as f64 * qp.delta()));
    Ok(tests
        .iter()
        .map(|psi| operator_identity(&lhs, &a, &a, &rhs, psi))
        .collect())
}

/// `H^M (D)^m phi == (E ± 2 m delta) (D)^m phi` for an eigenpair of `H^M`.
pub fn d_hat_shift(
    qp: &QuantumParams,
    sign: Sign,
    big_m: f64,
    eigen: &EigenPair,
    m: u32,
) -> Result<(EigenPair, Comparison), QuantumError> {
    let at = qp.clone().with_energy(eigen.eigenvalue.re);
    let chain = d_hat_chain(&at, sign, m)?;
    let shifted = EigenPair {
        psi: chain.apply(&eigen.psi),
        eigenvalue: eigen.eigenvalue + sign.value() as f64 * 2.0 * m as f64 * qp.delta(),
        operator: eigen.operator.clone(),
    };
    let cmp = shifted.comparison(&h_m(qp, big_m)?);
    Ok((shifted, cmp))
}

/// Runs each comparison and merges the worst residuals.
pub fn run_all(
    comparisons: &[Comparison],
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<CheckOutcome, SampleError> {
    let outs = comparisons
        .iter()
        .map(|c| c.run(domain, points, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CheckOutcome::merge(&outs, tol))
}

/// Commutation of `Delta` with `a0 grad G . grad + b G + e` for a Hessian
/// solution `G` with constant `c`:
/// `Delta G psi = a0 grad G . grad Delta psi + (2b - a0 c(2-N)) grad G . grad psi
///   - b c N G psi + G (b - 2 a0 c) Delta psi + e Delta psi`.
#[allow(clippy::too_many_arguments)]
pub fn check_delta_ghat_lemma(
    metric: &Metric,
    g: &Expr,
    c: f64,
    coeffs: &LadderCoefficients,
    psi: &Expr,
    domain: &SampleDomain,
    points: usize,
    tol: f64,
) -> Result<CheckOutcome, SampleError> {
    let nd = metric.dim() as f64;
    let a0 = Expr::real(coeffs.a0);
    let b = Expr::real(coeffs.b);
    let e = Expr::real(coeffs.e);
    let lap = |f: &Expr| metric.laplace_beltrami(f);
    let ghat_psi = &a0 * metric.dot_grad(g, psi) + &b * g * psi + &e * psi;
    let lhs = lap(&ghat_psi);
    let lap_psi = lap(psi);
    let terms = vec![
        &a0 * metric.dot_grad(g, &lap_psi),
        Expr::real(2.0 * coeffs.b - coeffs.a0 * c * (2.0 - nd)) * metric.dot_grad(g, psi),
        Expr::real(-coeffs.b * c * nd) * g * psi,
        Expr::real(coeffs.b - 2.0 * coeffs.a0 * c) * g * &lap_psi,
        &e * &lap_psi,
    ];
    Comparison::new()
        .pair(lhs, Expr::sum(terms.clone()))
        .scaled_by(terms)
        .run(domain, points, tol)
}
