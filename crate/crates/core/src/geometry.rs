//! Riemannian quantities on an explicit coordinate chart.
//!
//! Curvature follows
//! `R^l_ijk = d_j G^l_ik - d_k G^l_ij + G^m_ik G^l_mj - G^m_ij G^l_mk` with
//! `R_ri = R^j_rij`. With this sign choice the unit sphere S^N has
//! `R_ij = (1 - N) g_ij`.

use std::sync::{Arc, OnceLock};

use crate::expr::sample::{CheckOutcome, Comparison, SampleDomain, SampleError};
use crate::expr::{Expr, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("metric must be a square {n}x{n} matrix")]
    Shape { n: usize },
    #[error("metric is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("metric determinant vanishes identically")]
    Singular,
    #[error("symbolic inversion of a non-diagonal metric is limited to dimension 4 (got {0})")]
    TooLarge(usize),
    #[error("metric determinant vanishes on the sampling domain: {0}")]
    DegenerateOnDomain(String),
}

type Matrix = Vec<Vec<Expr>>;
type Rank3 = Vec<Vec<Vec<Expr>>>;
type Rank4 = Vec<Vec<Vec<Vec<Expr>>>>;

/// Lazily filled derived tensors of a metric.
#[derive(Debug, Default)]
pub struct GeometryCache {
    christoffel: OnceLock<Rank3>,
    riemann: OnceLock<Rank4>,
    ricci: OnceLock<Matrix>,
    ricci_mixed: OnceLock<Matrix>,
}

/// A chart with covariant metric components.
#[derive(Debug, Clone)]
pub struct Metric {
    coords: Vec<Symbol>,
    g: Matrix,
    inv: Matrix,
    det: Expr,
    diagonal: bool,
    cache: Arc<GeometryCache>,
}

fn determinant(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut terms = Vec::with_capacity(n);
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let sign = if j % 2 == 0 { 1 } else { -1 };
                terms.push(sign * &m[0][j] * determinant(&minor(m, 0, j)));
            }
            Expr::sum(terms)
        }
    }
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect()
}

impl Metric {
    pub fn new(coords: Vec<Symbol>, g: Matrix) -> Result<Self, GeometryError> {
        let n = coords.len();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(GeometryError::Shape { n });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if g[i][j] != g[j][i] {
                    return Err(GeometryError::NotSymmetric { i, j });
                }
            }
        }
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || g[i][j].is_zero()));
        let (inv, det) = if diagonal {
            let inv = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { g[i][i].recip() } else { Expr::zero() })
                        .collect()
                })
                .collect();
            (inv, Expr::product(g.iter().enumerate().map(|(i, r)| r[i].clone())))
        } else {
            if n > 4 {
                return Err(GeometryError::TooLarge(n));
            }
            let det = determinant(&g);
            if det.is_zero() {
                return Err(GeometryError::Singular);
            }
            let inv_det = det.recip();
            let inv = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                            (sign * determinant(&minor(&g, j, i)) * &inv_det).simplify()
                        })
                        .collect()
                })
                .collect();
            (inv, det)
        };
        if det.is_zero() {
            return Err(GeometryError::Singular);
        }
        Ok(Metric {
            coords,
            g,
            inv,
            det,
            diagonal,
            cache: Arc::new(GeometryCache::default()),
        })
    }

    pub fn diagonal(coords: Vec<Symbol>, diag: Vec<Expr>) -> Result<Self, GeometryError> {
        let n = diag.len();
        let g = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { diag[i].clone() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        Self::new(coords, g)
    }

    /// Flat metric in the given Cartesian coordinates.
    pub fn euclidean(coords: Vec<Symbol>) -> Self {
        let n = coords.len();
        Self::diagonal(coords, vec![Expr::one(); n]).expect("identity metric")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    /// Contravariant components.
    pub fn inverse(&self) -> &Matrix {
        &self.inv
    }

    pub fn determinant(&self) -> &Expr {
        &self.det
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn cache(&self) -> &GeometryCache {
        &self.cache
    }

    /// Numerical check that the determinant stays away from zero on `domain`.
    pub fn check_nondegenerate(&self, domain: &SampleDomain, points: usize) -> Result<(), GeometryError> {
        // sampling 1/det rejects points with tiny det; an unsatisfiable domain means degeneracy
        let e = self.det.recip();
        match Comparison::new().pair(e.clone(), e).run(domain, points, 1.0) {
            Ok(_) => Ok(()),
            Err(err) => Err(GeometryError::DegenerateOnDomain(err.to_string())),
        }
    }

    /// `Gamma^k_ij`, indexed `[k][i][j]`.
    pub fn christoffel(&self) -> &Rank3 {
        self.cache.christoffel.get_or_init(|| {
            let n = self.dim();
            let x = &self.coords;
            // dg[l][i][j] = d_l g_ij
            let dg: Rank3 = (0..n)
                .map(|l| {
                    (0..n)
                        .map(|i| (0..n).map(|j| self.g[i][j].diff(&x[l])).collect())
                        .collect()
                })
                .collect();
            let mut gamma: Rank3 = vec![vec![vec![Expr::zero(); n]; n]; n];
            for k in 0..n {
                for i in 0..n {
                    for j in i..n {
                        let mut terms = Vec::new();
                        for l in 0..n {
                            if self.inv[k][l].is_zero() {
                                continue;
                            }
                            let bracket = &dg[i][l][j] + &dg[j][l][i] - &dg[l][i][j];
                            if !bracket.is_zero() {
                                terms.push(&self.inv[k][l] * bracket);
                            }
                        }
                        let v = (Expr::frac(1, 2) * Expr::sum(terms)).simplify();
                        gamma[k][i][j] = v.clone();
                        gamma[k][j][i] = v;
                    }
                }
            }
            gamma
        })
    }

    /// `R^l_ijk`, indexed `[l][i][j][k]`.
    pub fn riemann(&self) -> &Rank4 {
        self.cache.riemann.get_or_init(|| {
            let n = self.dim();
            let x = &self.coords;
            let gm = self.christoffel();
            let mut r: Rank4 = vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n];
            for l in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if j == k {
                                continue;
                            }
                            let mut terms = vec![gm[l][i][k].diff(&x[j]), -gm[l][i][j].diff(&x[k])];
                            for m in 0..n {
                                terms.push(&gm[m][i][k] * &gm[l][m][j]);
                                terms.push(-(&gm[m][i][j] * &gm[l][m][k]));
                            }
                            r[l][i][j][k] = Expr::sum(terms).simplify();
                        }
                    }
                }
            }
            r
        })
    }

    /// `R_ri = R^j_rij`.
    pub fn ricci(&self) -> &Matrix {
        self.cache.ricci.get_or_init(|| {
            let n = self.dim();
            let r = self.riemann();
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|i| Expr::sum((0..n).map(|j| r[j][a][i][j].clone())).simplify())
                        .collect()
                })
                .collect()
        })
    }

    /// `R^l_i = g^lj R_ji`, indexed `[l][i]`.
    pub fn ricci_mixed(&self) -> &Matrix {
        self.cache.ricci_mixed.get_or_init(|| {
            let n = self.dim();
            let ric = self.ricci();
            (0..n)
                .map(|l| {
                    (0..n)
                        .map(|i| Expr::sum((0..n).map(|j| &self.inv[l][j] * &ric[j][i])))
                        .collect()
                })
                .collect()
        })
    }

    /// Partial derivatives `d_i psi`.
    pub fn partials(&self, psi: &Expr) -> Vec<Expr> {
        self.coords.iter().map(|x| psi.diff(x)).collect()
    }

    /// `grad^i G = g^ij d_j G`.
    pub fn grad(&self, g: &Expr) -> Vec<Expr> {
        let d = self.partials(g);
        self.raise(&d)
    }

    /// Raises a covector index.
    pub fn raise(&self, v: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                Expr::sum(
                    (0..n)
                        .filter(|&j| !self.inv[i][j].is_zero())
                        .map(|j| &self.inv[i][j] * &v[j]),
                )
            })
            .collect()
    }

    /// `H_ij = d_i d_j G - Gamma^k_ij d_k G`.
    pub fn covariant_hessian(&self, g: &Expr) -> Matrix {
        let n = self.dim();
        let d = self.partials(g);
        let gm = self.christoffel();
        let mut h = vec![vec![Expr::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut terms = vec![d[j].diff(&self.coords[i])];
                for k in 0..n {
                    if !gm[k][i][j].is_zero() {
                        terms.push(-(&gm[k][i][j] * &d[k]));
                    }
                }
                let v = Expr::sum(terms);
                h[i][j] = v.clone();
                h[j][i] = v;
            }
        }
        h
    }

    /// Laplace-Beltrami operator `g^ij (d_i d_j psi - Gamma^k_ij d_k psi)`.
    pub fn laplace_beltrami(&self, psi: &Expr) -> Expr {
        let n = self.dim();
        let h = self.covariant_hessian(psi);
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.inv[i][j].is_zero() {
                    terms.push(&self.inv[i][j] * &h[i][j]);
                }
            }
        }
        Expr::sum(terms)
    }

    /// `grad A . grad B = g^ij d_i A d_j B`.
    pub fn dot_grad(&self, a: &Expr, b: &Expr) -> Expr {
        let da = self.partials(a);
        let gb = self.grad(b);
        Expr::sum(da.iter().zip(&gb).map(|(x, y)| x * y))
    }

    /// `sum_ij g^ij p_i p_j` for the given momenta.
    pub fn kinetic_form(&self, momenta: &[Symbol]) -> Expr {
        let n = self.dim();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if !self.inv[i][j].is_zero() {
                    terms.push(&self.inv[i][j] * momenta[i].expr() * momenta[j].expr());
                }
            }
        }
        Expr::sum(terms)
    }

    /// Checks `grad_i grad_j G + c G g_ij = 0` componentwise.
    pub fn check_hessian_equation(
        &self,
        g: &Expr,
        c: f64,
        domain: &SampleDomain,
        points: usize,
        tol: f64,
    ) -> Result<CheckOutcome, SampleError> {
        let n = self.dim();
        let h = self.covariant_hessian(g);
        let cg = Expr::real(c) * g;
        let mut cmp = Comparison::new();
        for i in 0..n {
            for j in i..n {
                cmp = cmp.pair(h[i][j].clone(), -(&cg * &self.g[i][j]));
            }
        }
        cmp.run(domain, points, tol)
    }

    /// Checks `R_ij grad^j G = c (1 - N) grad_i G`.
    pub fn check_ricci_ladder_lemma(
        &self,
        g: &Expr,
        c: f64,
        domain: &SampleDomain,
        points: usize,
        tol: f64,
    ) -> Result<CheckOutcome, SampleError> {
        let n = self.dim();
        let ric = self.ricci();
        let up = self.grad(g);
        let d = self.partials(g);
        let factor = Expr::real(c * (1.0 - n as f64));
        let mut cmp = Comparison::new();
        for i in 0..n {
            let lhs = Expr::sum((0..n).map(|j| &ric[i][j] * &up[j]));
            cmp = cmp.pair(lhs, &factor * &d[i]);
        }
        cmp.run(domain, points, tol)
    }

    /// `g^jk grad_k grad_j grad_i psi - grad_i Laplacian psi`, one entry per `i`.
    pub fn third_derivative_commutator(&self, psi: &Expr) -> Vec<Expr> {
        let n = self.dim();
        let x = &self.coords;
        let gm = self.christoffel();
        let t = self.covariant_hessian(psi);
        let lap = self.laplace_beltrami(psi);
        (0..n)
            .map(|i| {
                let mut terms = Vec::new();
                for j in 0..n {
                    for k in 0..n {
                        if self.inv[j][k].is_zero() {
                            continue;
                        }
                        // grad_k T_ji
                        let mut cov = vec![t[j][i].diff(&x[k])];
                        for m in 0..n {
                            if !gm[m][k][j].is_zero() {
                                cov.push(-(&gm[m][k][j] * &t[m][i]));
                            }
                            if !gm[m][k][i].is_zero() {
                                cov.push(-(&gm[m][k][i] * &t[j][m]));
                            }
                        }
                        terms.push(&self.inv[j][k] * Expr::sum(cov));
                    }
                }
                terms.push(-lap.diff(&x[i]));
                Expr::sum(terms)
            })
            .collect()
    }

    /// Checks the commutator against `-R^l_i grad_l psi`; holds for any `psi`.
    pub fn check_third_derivative_commutator(
        &self,
        psi: &Expr,
        domain: &SampleDomain,
        points: usize,
        tol: f64,
    ) -> Result<CheckOutcome, SampleError> {
        let n = self.dim();
        let lhs = self.third_derivative_commutator(psi);
        let rm = self.ricci_mixed();
        let d = self.partials(psi);
        let mut cmp = Comparison::new();
        for i in 0..n {
            let rhs = -Expr::sum((0..n).map(|l| &rm[l][i] * &d[l]));
            cmp = cmp.pair(lhs[i].clone(), rhs);
        }
        cmp.run(domain, points, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Binding;
    use num_complex::Complex;

    fn s3() -> (Metric, Vec<Symbol>) {
        let eta = Symbol::coordinate("eta");
        let x1 = Symbol::coordinate("xi1");
        let x2 = Symbol::coordinate("xi2");
        let m = Metric::diagonal(
            vec![eta.clone(), x1.clone(), x2.clone()],
            vec![Expr::one(), eta.expr().sin().powi(2), eta.expr().cos().powi(2)],
        )
        .unwrap();
        (m, vec![eta, x1, x2])
    }

    fn s3_domain(c: &[Symbol]) -> SampleDomain {
        SampleDomain::new()
            .with_box(&c[0], 0.2, 1.3)
            .with_box(&c[1], 0.1, 6.0)
            .with_box(&c[2], 0.2, 1.3)
    }

    #[test]
    fn flat_plane_has_no_connection() {
        let m = Metric::euclidean(vec![Symbol::coordinate("x"), Symbol::coordinate("y")]);
        assert!(m.christoffel().iter().flatten().flatten().all(Expr::is_zero));
        assert!(m.ricci().iter().flatten().all(Expr::is_zero));
    }

    #[test]
    fn s3_christoffel_entry() {
        let (m, c) = s3();
        // Gamma^eta_{xi1 xi1} = -sin(eta) cos(eta)
        let expected = -(c[0].expr().sin() * c[0].expr().cos());
        let d = s3_domain(&c);
        let out = crate::expr::sample::numerically_equal(&m.christoffel()[0][1][1], &expected, &d, 30, 1e-13).unwrap();
        assert!(out.passed);
    }

    #[test]
    fn s3_hessian_and_lemmas() {
        let (m, c) = s3();
        let g = c[2].expr().sin() * c[0].expr().cos();
        let d = s3_domain(&c);
        assert!(m.check_hessian_equation(&g, 1.0, &d, 50, 1e-9).unwrap().passed);
        assert!(m.check_ricci_ladder_lemma(&g, 1.0, &d, 50, 1e-9).unwrap().passed);
        let lap = m.laplace_beltrami(&g);
        assert!(
            crate::expr::sample::numerically_equal(&lap, &(-3 * &g), &d, 50, 1e-10)
                .unwrap()
                .passed
        );
    }

    #[test]
    fn sphere_ricci_sign() {
        let t = Symbol::coordinate("theta");
        let ph = Symbol::coordinate("phi");
        let m = Metric::diagonal(vec![t.clone(), ph.clone()], vec![Expr::one(), t.expr().sin().powi(2)]).unwrap();
        let d = SampleDomain::new().with_box(&t, 0.2, 1.3).with_box(&ph, 0.0, 6.0);
        for i in 0..2 {
            for j in 0..2 {
                let out =
                    crate::expr::sample::numerically_equal(&m.ricci()[i][j], &(-&m.g()[i][j]), &d, 20, 1e-12).unwrap();
                assert!(out.passed, "R_{i}{j}");
            }
        }
    }

    #[test]
    fn hessian_of_square_is_not_a_solution() {
        let x = Symbol::coordinate("x");
        let m = Metric::euclidean(vec![x.clone()]);
        let d = SampleDomain::new().with_box(&x, -2.0, 2.0);
        for c in [-1.0, 0.0, 1.0, 2.0] {
            assert!(
                !m.check_hessian_equation(&x.expr().powi(2), c, &d, 20, 1e-6)
                    .unwrap()
                    .passed
            );
        }
        assert!(m.check_hessian_equation(&x.expr(), 0.0, &d, 20, 1e-12).unwrap().passed);
    }

    #[test]
    fn general_inverse_matches_matrix_inverse() {
        let x = Symbol::coordinate("x");
        let y = Symbol::coordinate("y");
        let g = vec![
            vec![Expr::int(2) + x.expr().powi(2), x.expr() * y.expr()],
            vec![x.expr() * y.expr(), Expr::int(3) + y.expr().powi(2)],
        ];
        let m = Metric::new(vec![x.clone(), y.clone()], g.clone()).unwrap();
        let mut b = Binding::new();
        b.insert(x, Complex::new(0.7, 0.0));
        b.insert(y, Complex::new(-1.1, 0.0));
        for i in 0..2 {
            for j in 0..2 {
                let v = Expr::sum((0..2).map(|k| &g[i][k] * &m.inverse()[k][j]))
                    .eval(&b)
                    .unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - Complex::new(expect, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn asymmetric_and_singular_metrics_rejected() {
        let x = Symbol::coordinate("x");
        let y = Symbol::coordinate("y");
        let g = vec![vec![Expr::one(), x.expr()], vec![Expr::zero(), Expr::one()]];
        assert!(matches!(
            Metric::new(vec![x.clone(), y.clone()], g),
            Err(GeometryError::NotSymmetric { .. })
        ));
        let g = vec![vec![Expr::one(), Expr::one()], vec![Expr::one(), Expr::one()]];
        assert_eq!(Metric::new(vec![x, y], g).unwrap_err(), GeometryError::Singular);
    }
}
