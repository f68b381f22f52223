//! Linear differential operators with expression coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::expr::{Expr, Symbol};

/// `sum_alpha c_alpha(x) d^alpha`, with multi-indices over `coords`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffOperator {
    coords: Vec<Symbol>,
    terms: BTreeMap<Vec<u32>, Expr>,
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut out = 1i64;
    for j in 0..k {
        out = out * (n - j) as i64 / (j + 1) as i64;
    }
    out
}

/// All multi-indices `gamma <= alpha`.
fn sub_indices(alpha: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::with_capacity(alpha.len())];
    for &a in alpha {
        let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
        for prefix in &out {
            for g in 0..=a {
                let mut v = prefix.clone();
                v.push(g);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl DiffOperator {
    /// The zero operator on `coords`.
    pub fn zero(coords: Vec<Symbol>) -> Self {
        DiffOperator {
            coords,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(coords: Vec<Symbol>) -> Self {
        Self::multiplication(coords, Expr::one())
    }

    /// Multiplication by `f`.
    pub fn multiplication(coords: Vec<Symbol>, f: Expr) -> Self {
        let mut op = Self::zero(coords);
        let idx = vec![0; op.coords.len()];
        op.add_term(idx, f);
        op
    }

    /// `d^order / dx^order`; `x` is added to the chart if missing.
    pub fn partial(coords: Vec<Symbol>, x: &Symbol, order: u32) -> Self {
        let mut op = Self::zero(coords);
        let i = op.index_of(x);
        let mut idx = vec![0; op.coords.len()];
        idx[i] = order;
        op.add_term(idx, Expr::one());
        op
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Expr)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total order of a nonzero term.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, alpha: &[u32]) -> Expr {
        self.terms.get(alpha).cloned().unwrap_or_else(Expr::zero)
    }

    fn index_of(&mut self, x: &Symbol) -> usize {
        if let Some(i) = self.coords.iter().position(|c| c == x) {
            return i;
        }
        self.coords.push(x.clone());
        let terms = std::mem::take(&mut self.terms);
        self.terms = terms
            .into_iter()
            .map(|(mut k, v)| {
                k.push(0);
                (k, v)
            })
            .collect();
        self.coords.len() - 1
    }

    /// Adds `coeff * d^alpha`; `alpha` is indexed like `coords()`.
    pub fn add_term(&mut self, alpha: Vec<u32>, coeff: Expr) {
        assert_eq!(alpha.len(), self.coords.len(), "multi-index length");
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&alpha) {
            Some(old) => {
                let v = old + coeff;
                if !v.is_zero() {
                    self.terms.insert(alpha, v);
                }
            }
            None => {
                self.terms.insert(alpha, coeff);
            }
        }
    }

    /// Same operator written over `coords` (a superset of the current chart).
    fn aligned(&self, coords: &[Symbol]) -> DiffOperator {
        let map: Vec<usize> = self
            .coords
            .iter()
            .map(|c| coords.iter().position(|d| d == c).expect("chart superset"))
            .collect();
        let mut out = DiffOperator::zero(coords.to_vec());
        for (k, v) in &self.terms {
            let mut idx = vec![0; coords.len()];
            for (i, &a) in k.iter().enumerate() {
                idx[map[i]] = a;
            }
            out.add_term(idx, v.clone());
        }
        out
    }

    fn union_chart(&self, other: &DiffOperator) -> Vec<Symbol> {
        let mut coords = self.coords.clone();
        for c in &other.coords {
            if !coords.contains(c) {
                coords.push(c.clone());
            }
        }
        coords
    }

    /// `d^alpha psi` for every multi-index of the operator, sharing prefixes.
    fn derivatives(&self, psi: &Expr) -> HashMap<Vec<u32>, Expr> {
        let mut cache: HashMap<Vec<u32>, Expr> = HashMap::new();
        cache.insert(vec![0; self.coords.len()], psi.clone());
        for alpha in self.terms.keys() {
            derivative(&self.coords, alpha, &mut cache);
        }
        cache
    }

    /// `c_alpha d^alpha psi` term by term.
    pub fn apply_terms(&self, psi: &Expr) -> Vec<Expr> {
        let d = self.derivatives(psi);
        self.terms
            .iter()
            .map(|(k, c)| c * &d[k])
            .filter(|t| !t.is_zero())
            .collect()
    }

    pub fn apply(&self, psi: &Expr) -> Expr {
        Expr::sum(self.apply_terms(psi))
    }

    /// `self o other`, expanded with the Leibniz rule.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        let coords = self.union_chart(other);
        let p = self.aligned(&coords);
        let q = other.aligned(&coords);
        let mut out = DiffOperator::zero(coords.clone());
        let mut qcache: Vec<HashMap<Vec<u32>, Expr>> = q
            .terms
            .values()
            .map(|c| {
                let mut m = HashMap::new();
                m.insert(vec![0; coords.len()], c.clone());
                m
            })
            .collect();
        for (alpha, pc) in &p.terms {
            for gamma in sub_indices(alpha) {
                let weight: i64 = alpha.iter().zip(&gamma).map(|(&a, &g)| binomial(a, g)).product();
                let rest: Vec<u32> = alpha.iter().zip(&gamma).map(|(a, g)| a - g).collect();
                for ((beta, _), cache) in q.terms.iter().zip(qcache.iter_mut()) {
                    let dq = derivative(&coords, &gamma, cache);
                    if dq.is_zero() {
                        continue;
                    }
                    let idx: Vec<u32> = rest.iter().zip(beta).map(|(r, b)| r + b).collect();
                    out.add_term(idx, Expr::int(weight) * pc * &dq);
                }
            }
        }
        out
    }

    pub fn scale(&self, f: &Expr) -> DiffOperator {
        let mut out = DiffOperator::zero(self.coords.clone());
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f * v);
        }
        out
    }

    /// `self^n`, with `self^0` the identity.
    pub fn pow(&self, n: u32) -> DiffOperator {
        (0..n).fold(DiffOperator::identity(self.coords.clone()), |acc, _| self.compose(&acc))
    }

    /// Simplifies every coefficient and drops the ones that vanish.
    pub fn simplify(&self) -> DiffOperator {
        let mut out = DiffOperator::zero(self.coords.clone());
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.simplify());
        }
        out
    }

    fn combine(&self, other: &DiffOperator, sign: i64) -> DiffOperator {
        let coords = self.union_chart(other);
        let mut out = self.aligned(&coords);
        for (k, v) in other.aligned(&coords).terms {
            out.add_term(k, if sign < 0 { -v } else { v });
        }
        out
    }
}

fn derivative(coords: &[Symbol], alpha: &[u32], cache: &mut HashMap<Vec<u32>, Expr>) -> Expr {
    if let Some(e) = cache.get(alpha) {
        return e.clone();
    }
    let i = alpha
        .iter()
        .rposition(|&a| a > 0)
        .expect("nonzero index reached the base case");
    let mut lower = alpha.to_vec();
    lower[i] -= 1;
    let e = derivative(coords, &lower, cache).diff(&coords[i]);
    cache.insert(alpha.to_vec(), e.clone());
    e
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, v)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v})")?;
            for (c, &a) in self.coords.iter().zip(k) {
                match a {
                    0 => {}
                    1 => write!(f, "*d_{c}")?,
                    _ => write!(f, "*d_{c}^{a}")?,
                }
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&DiffOperator> for &DiffOperator {
            type Output = DiffOperator;
            fn $m(self, rhs: &DiffOperator) -> DiffOperator {
                let f: fn(&DiffOperator, &DiffOperator) -> DiffOperator = $body;
                f(self, rhs)
            }
        }
        impl $tr<DiffOperator> for DiffOperator {
            type Output = DiffOperator;
            fn $m(self, rhs: DiffOperator) -> DiffOperator {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&DiffOperator> for DiffOperator {
            type Output = DiffOperator;
            fn $m(self, rhs: &DiffOperator) -> DiffOperator {
                (&self).$m(rhs)
            }
        }
        impl $tr<DiffOperator> for &DiffOperator {
            type Output = DiffOperator;
            fn $m(self, rhs: DiffOperator) -> DiffOperator {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.combine(b, 1));
binop!(Sub, sub, |a, b| a.combine(b, -1));
// `P * Q` is the composition `P o Q`
binop!(Mul, mul, |a, b| a.compose(b));

impl Neg for &DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        self.scale(&Expr::int(-1))
    }
}

impl Neg for DiffOperator {
    type Output = DiffOperator;
    fn neg(self) -> DiffOperator {
        -&self
    }
}

/// A product of operators kept unexpanded; `factors[0]` acts first.
#[derive(Debug, Clone, Default)]
pub struct OperatorChain {
    pub factors: Vec<DiffOperator>,
}

impl OperatorChain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a factor that acts after the current ones.
    pub fn then(mut self, op: DiffOperator) -> Self {
        self.factors.push(op);
        self
    }

    /// Appends every factor of `other` after the current ones.
    pub fn then_chain(mut self, other: OperatorChain) -> Self {
        self.factors.extend(other.factors);
        self
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn apply(&self, psi: &Expr) -> Expr {
        self.factors.iter().fold(psi.clone(), |acc, op| op.apply(&acc))
    }

    /// The composed operator. Cost grows quickly with the number of factors.
    pub fn expand(&self) -> DiffOperator {
        let mut iter = self.factors.iter();
        let Some(first) = iter.next() else {
            return DiffOperator::identity(Vec::new());
        };
        iter.fold(first.clone(), |acc, op| op.compose(&acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::sample::{numerically_equal, SampleDomain};

    fn xy() -> (Symbol, Symbol) {
        (Symbol::coordinate("x"), Symbol::coordinate("y"))
    }

    #[test]
    fn apply_partial_and_multiplication() {
        let (x, _) = xy();
        let d = DiffOperator::partial(vec![x.clone()], &x, 2);
        assert_eq!(d.apply(&x.expr().powi(3)), Expr::int(6) * x.expr());
        let m = DiffOperator::multiplication(vec![x.clone()], x.expr());
        assert_eq!(m.apply(&Expr::int(5)), Expr::int(5) * x.expr());
    }

    #[test]
    fn commutator_of_d_and_x_is_identity() {
        let (x, _) = xy();
        let d = DiffOperator::partial(vec![x.clone()], &x, 1);
        let m = DiffOperator::multiplication(vec![x.clone()], x.expr());
        let comm = &d * &m - &m * &d;
        assert_eq!(comm, DiffOperator::identity(vec![x]));
    }

    #[test]
    fn composition_matches_sequential_application() {
        let (x, y) = xy();
        let coords = vec![x.clone(), y.clone()];
        let p = DiffOperator::partial(coords.clone(), &x, 1).scale(&y.expr().sin())
            + DiffOperator::multiplication(coords.clone(), x.expr().powi(2));
        let q = DiffOperator::partial(coords.clone(), &y, 2).scale(&x.expr().exp())
            + DiffOperator::partial(coords.clone(), &x, 1).scale(&(x.expr() * y.expr()));
        let psi = (x.expr() * Expr::int(2) + y.expr()).cos() * y.expr().powi(3);
        let composed = (&p * &q).apply(&psi);
        let stepwise = p.apply(&q.apply(&psi));
        let d = SampleDomain::new().with_box(&x, -1.0, 1.0).with_box(&y, -1.0, 1.0);
        assert!(numerically_equal(&composed, &stepwise, &d, 40, 1e-12).unwrap().passed);
    }

    #[test]
    fn charts_are_merged() {
        let (x, y) = xy();
        let dx = DiffOperator::partial(vec![x.clone()], &x, 1);
        let dy = DiffOperator::partial(vec![y.clone()], &y, 1);
        let mixed = &dx * &dy;
        assert_eq!(mixed.coords().len(), 2);
        assert_eq!(mixed.coefficient(&[1, 1]), Expr::one());
        assert_eq!(mixed.order(), 2);
    }

    #[test]
    fn chain_expand_agrees_with_apply() {
        let (x, _) = xy();
        let c = vec![x.clone()];
        let a = DiffOperator::partial(c.clone(), &x, 1) + DiffOperator::multiplication(c.clone(), x.expr());
        let b = DiffOperator::partial(c.clone(), &x, 1).scale(&x.expr());
        let chain = OperatorChain::new().then(a.clone()).then(b.clone());
        let psi = x.expr().sin();
        let d = SampleDomain::new().with_box(&x, -2.0, 2.0);
        let lhs = chain.apply(&psi);
        let rhs = chain.expand().apply(&psi);
        assert!(numerically_equal(&lhs, &rhs, &d, 30, 1e-12).unwrap().passed);
        assert_eq!(a.pow(0), DiffOperator::identity(c));
    }
}
