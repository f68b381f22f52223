//! Complex-valued symbolic expressions.
//!
//! Nodes are hash-consed: constructing a structurally identical expression
//! twice yields the same handle, so `==` on [`Expr`] is pointer equality.
//! Every constructor applies a small set of local rewrite rules (constant
//! folding, 0/1 identities, flattening, like-term collection, power merging);
//! there is no canonical form and no trigonometric rewriting. Equality of
//! transcendental expressions is decided numerically, see [`sample`].

mod diff;
mod display;
mod eval;
mod parse;
pub mod sample;
mod simplify;

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, LazyLock, Mutex, Weak};

use num_complex::Complex;
use num_traits::{One, Signed, Zero};

pub use eval::{Binding, BindingOf, CompiledExpr, EvalError, EvalOptions};
pub use parse::{parse, parse_with, ParseError, SymbolTable};

use crate::scalar::{
    complex_rational_add, complex_rational_is_one, complex_rational_is_zero, complex_rational_mul, rational,
    rational_add, rational_as_integer, rational_from_f64, rational_int, ComplexRational, Rational,
};

/// Role of a symbol in a phase space or parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    Coordinate,
    Momentum,
    AuxCoordinate,
    AuxMomentum,
    Parameter,
}

struct SymbolData {
    name: Box<str>,
    kind: SymbolKind,
    bit: u64,
}

/// A named scalar variable. Identity is the name; the kind is metadata.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

impl Symbol {
    pub fn new(name: &str, kind: SymbolKind) -> Self {
        let mut h = FxHasher::default();
        name.hash(&mut h);
        let bit = 1u64 << (h.finish() % 64);
        Symbol(Arc::new(SymbolData {
            name: name.into(),
            kind,
            bit,
        }))
    }

    pub fn coordinate(name: &str) -> Self {
        Self::new(name, SymbolKind::Coordinate)
    }

    pub fn momentum(name: &str) -> Self {
        Self::new(name, SymbolKind::Momentum)
    }

    pub fn parameter(name: &str) -> Self {
        Self::new(name, SymbolKind::Parameter)
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.0.kind
    }

    pub(crate) fn bit(&self) -> u64 {
        self.0.bit
    }

    pub fn expr(&self) -> Expr {
        Expr::symbol(self)
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.0.name == other.0.name
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

/// Elementary functions. `sqrt` is represented as the power `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

/// Structure of one node.
#[derive(Clone, PartialEq, Eq)]
pub enum ExprKind {
    Const(ComplexRational),
    Sym(Symbol),
    /// Flattened sum, at least two terms.
    Add(Box<[Expr]>),
    /// Flattened product, at least two factors; a constant factor comes first.
    Mul(Box<[Expr]>),
    Pow(Expr, Rational),
    Func(Func, Expr),
}

struct Node {
    id: u64,
    shash: u64,
    mask: u64,
    kind: ExprKind,
}

/// Handle to an interned expression node.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.shash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

struct Interner {
    /// Keyed by structural hash; collisions share a bucket.
    table: FxHashMap<u64, Vec<Weak<Node>>>,
    purge_at: usize,
}

static INTERNER: LazyLock<Mutex<Interner>> = LazyLock::new(|| {
    Mutex::new(Interner {
        table: FxHashMap::default(),
        purge_at: 1 << 16,
    })
});

// `Hash` for `Ratio` reduces through repeated division; interned values are
// already in lowest terms, so the parts can be hashed directly.
fn hash_rational(q: &Rational, h: &mut FxHasher) {
    q.numer().hash(h);
    q.denom().hash(h);
}

fn structural_hash(kind: &ExprKind) -> u64 {
    let mut h = FxHasher::default();
    match kind {
        ExprKind::Const(c) => {
            0u8.hash(&mut h);
            hash_rational(&c.re, &mut h);
            hash_rational(&c.im, &mut h);
        }
        ExprKind::Sym(s) => {
            1u8.hash(&mut h);
            s.hash(&mut h);
        }
        ExprKind::Add(ts) => {
            2u8.hash(&mut h);
            for t in ts.iter() {
                t.0.shash.hash(&mut h);
            }
        }
        ExprKind::Mul(fs) => {
            3u8.hash(&mut h);
            for t in fs.iter() {
                t.0.shash.hash(&mut h);
            }
        }
        ExprKind::Pow(b, q) => {
            4u8.hash(&mut h);
            b.0.shash.hash(&mut h);
            hash_rational(q, &mut h);
        }
        ExprKind::Func(f, a) => {
            5u8.hash(&mut h);
            f.hash(&mut h);
            a.0.shash.hash(&mut h);
        }
    }
    h.finish()
}

fn symbol_mask(kind: &ExprKind) -> u64 {
    match kind {
        ExprKind::Const(_) => 0,
        ExprKind::Sym(s) => s.bit(),
        ExprKind::Add(ts) | ExprKind::Mul(ts) => ts.iter().fold(0, |m, t| m | t.0.mask),
        ExprKind::Pow(b, _) => b.0.mask,
        ExprKind::Func(_, a) => a.0.mask,
    }
}

fn intern(kind: ExprKind) -> Expr {
    let shash = structural_hash(&kind);
    let mut guard = INTERNER.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(bucket) = guard.table.get(&shash) {
        for w in bucket {
            if let Some(node) = w.upgrade() {
                if node.kind == kind {
                    return Expr(node);
                }
            }
        }
    }
    if guard.table.len() >= guard.purge_at {
        guard.table.retain(|_, b| {
            b.retain(|w| w.strong_count() > 0);
            !b.is_empty()
        });
        guard.purge_at = (guard.table.len() * 2).max(1 << 16);
    }
    let node = Arc::new(Node {
        id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
        shash,
        mask: symbol_mask(&kind),
        kind,
    });
    let bucket = guard.table.entry(shash).or_default();
    bucket.retain(|w| w.strong_count() > 0);
    bucket.push(Arc::downgrade(&node));
    Expr(node)
}

/// Order used inside sums and products: structural hash, then id.
fn node_order(a: &Expr, b: &Expr) -> std::cmp::Ordering {
    (a.0.shash, a.0.id).cmp(&(b.0.shash, b.0.id))
}

const FOLD_MAX_EXPONENT: i64 = 64;
const FOLD_MAX_BITS: u64 = 8192;

impl Expr {
    pub fn kind(&self) -> &ExprKind {
        &self.0.kind
    }

    /// Unique node id; equal ids mean equal handles.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub(crate) fn mask(&self) -> u64 {
        self.0.mask
    }

    pub fn constant(c: ComplexRational) -> Expr {
        intern(ExprKind::Const(c))
    }

    pub fn rational(q: Rational) -> Expr {
        Self::constant(Complex::new(q, Rational::zero()))
    }

    pub fn int(n: i64) -> Expr {
        Self::rational(rational_int(n))
    }

    pub fn frac(numer: i64, denom: i64) -> Expr {
        Self::rational(rational(numer, denom))
    }

    /// Exact image of a double (every finite double is a dyadic rational).
    pub fn real(x: f64) -> Expr {
        Self::rational(rational_from_f64(x))
    }

    pub fn complex(re: f64, im: f64) -> Expr {
        Self::constant(Complex::new(rational_from_f64(re), rational_from_f64(im)))
    }

    pub fn zero() -> Expr {
        Self::int(0)
    }

    pub fn one() -> Expr {
        Self::int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Expr {
        Self::constant(Complex::new(Rational::zero(), Rational::one()))
    }

    pub fn symbol(s: &Symbol) -> Expr {
        intern(ExprKind::Sym(s.clone()))
    }

    pub fn as_const(&self) -> Option<&ComplexRational> {
        match self.kind() {
            ExprKind::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(complex_rational_is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(complex_rational_is_one)
    }

    pub fn is_const(&self) -> bool {
        matches!(self.kind(), ExprKind::Const(_))
    }

    /// Cheap test: `false` means `s` certainly does not occur.
    pub fn may_contain(&self, s: &Symbol) -> bool {
        self.0.mask & s.bit() != 0
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        if !self.may_contain(s) {
            return false;
        }
        match self.kind() {
            ExprKind::Const(_) => false,
            ExprKind::Sym(t) => t == s,
            ExprKind::Add(ts) | ExprKind::Mul(ts) => ts.iter().any(|t| t.contains(s)),
            ExprKind::Pow(b, _) => b.contains(s),
            ExprKind::Func(_, a) => a.contains(s),
        }
    }

    /// Free symbols, sorted by name.
    pub fn free_symbols(&self) -> Vec<Symbol> {
        let mut seen = std::collections::HashSet::new();
        let mut out = std::collections::BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.kind() {
                ExprKind::Const(_) => {}
                ExprKind::Sym(s) => {
                    out.insert(s.clone());
                }
                ExprKind::Add(ts) | ExprKind::Mul(ts) => stack.extend(ts.iter().cloned()),
                ExprKind::Pow(b, _) => stack.push(b.clone()),
                ExprKind::Func(_, a) => stack.push(a.clone()),
            }
        }
        out.into_iter().collect()
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.id()) {
                continue;
            }
            match e.kind() {
                ExprKind::Add(ts) | ExprKind::Mul(ts) => stack.extend(ts.iter().cloned()),
                ExprKind::Pow(b, _) => stack.push(b.clone()),
                ExprKind::Func(_, a) => stack.push(a.clone()),
                _ => {}
            }
        }
        seen.len()
    }

    // ---- smart constructors ----

    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut flat = Vec::new();
        for t in terms {
            match t.kind() {
                ExprKind::Add(ts) => flat.extend(ts.iter().cloned()),
                _ => flat.push(t),
            }
        }
        let mut constant = Complex::new(Rational::zero(), Rational::zero());
        // like-term collection keyed by the non-constant part; a term seen once
        // is kept as is
        let mut order: Vec<Expr> = Vec::new();
        let mut coeffs: FxHashMap<u64, (ComplexRational, Option<Expr>)> = FxHashMap::default();
        for t in flat {
            if let Some(c) = t.as_const() {
                constant = complex_rational_add(&constant, c);
                continue;
            }
            let (c, rest) = t.split_coefficient();
            match coeffs.get_mut(&rest.id()) {
                Some((acc, orig)) => {
                    *acc = complex_rational_add(acc, &c);
                    *orig = None;
                }
                None => {
                    coeffs.insert(rest.id(), (c, Some(t)));
                    order.push(rest);
                }
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(order.len() + 1);
        for rest in order {
            let (c, orig) = coeffs.remove(&rest.id()).expect("collected term");
            if let Some(t) = orig {
                out.push(t);
                continue;
            }
            if complex_rational_is_zero(&c) {
                continue;
            }
            out.push(Expr::scaled(c, rest));
        }
        if !complex_rational_is_zero(&constant) {
            out.push(Expr::constant(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().expect("one term"),
            _ => {
                out.sort_by(node_order);
                intern(ExprKind::Add(out.into_boxed_slice()))
            }
        }
    }

    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut flat = Vec::new();
        for f in factors {
            match f.kind() {
                ExprKind::Mul(fs) => flat.extend(fs.iter().cloned()),
                _ => flat.push(f),
            }
        }
        let mut coeff = Complex::new(Rational::one(), Rational::zero());
        let mut order: Vec<Expr> = Vec::new();
        let mut exps: FxHashMap<u64, (Expr, Rational)> = FxHashMap::default();
        for f in flat {
            if let Some(c) = f.as_const() {
                if complex_rational_is_zero(c) {
                    return Expr::zero();
                }
                coeff = complex_rational_mul(&coeff, c);
                continue;
            }
            let (base, q) = match f.kind() {
                ExprKind::Pow(b, q) => (b.clone(), q.clone()),
                _ => (f.clone(), Rational::one()),
            };
            match exps.get_mut(&base.id()) {
                Some((_, acc)) => *acc = rational_add(acc, &q),
                None => {
                    order.push(base.clone());
                    exps.insert(base.id(), (base, q));
                }
            }
        }
        let mut out: Vec<Expr> = Vec::with_capacity(order.len());
        for base in order {
            let (_, q) = exps.remove(&base.id()).expect("collected factor");
            let p = Expr::pow(&base, q);
            if let Some(c) = p.as_const() {
                coeff = complex_rational_mul(&coeff, c);
                continue;
            }
            match p.kind() {
                // (a*b)^n distributed by pow; merge its pieces back in
                ExprKind::Mul(fs) => {
                    for f in fs.iter() {
                        if let Some(c) = f.as_const() {
                            coeff = complex_rational_mul(&coeff, c);
                        } else {
                            out.push(f.clone());
                        }
                    }
                }
                _ => out.push(p),
            }
        }
        if complex_rational_is_zero(&coeff) {
            return Expr::zero();
        }
        out.sort_by(node_order);
        if out.is_empty() {
            return Expr::constant(coeff);
        }
        if !complex_rational_is_one(&coeff) {
            out.insert(0, Expr::constant(coeff));
        }
        if out.len() == 1 {
            return out.pop().expect("one factor");
        }
        intern(ExprKind::Mul(out.into_boxed_slice()))
    }

    /// `c * e` without re-running the full product normalization when possible.
    fn scaled(c: ComplexRational, e: Expr) -> Expr {
        if complex_rational_is_one(&c) {
            return e;
        }
        if complex_rational_is_zero(&c) {
            return Expr::zero();
        }
        match e.kind() {
            ExprKind::Const(k) => Expr::constant(complex_rational_mul(&c, k)),
            // already normalized: the constant just goes in front
            ExprKind::Mul(fs) if !fs[0].is_const() => {
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::constant(c));
                v.extend(fs.iter().cloned());
                intern(ExprKind::Mul(v.into_boxed_slice()))
            }
            ExprKind::Mul(_) => Expr::product([Expr::constant(c), e]),
            _ => intern(ExprKind::Mul(vec![Expr::constant(c), e].into_boxed_slice())),
        }
    }

    /// Splits off a leading constant coefficient.
    pub fn split_coefficient(&self) -> (ComplexRational, Expr) {
        match self.kind() {
            ExprKind::Const(c) => (c.clone(), Expr::one()),
            ExprKind::Mul(fs) => match fs[0].as_const() {
                Some(c) => {
                    let rest: Vec<Expr> = fs[1..].to_vec();
                    let rest = if rest.len() == 1 {
                        rest.into_iter().next().expect("one factor")
                    } else {
                        intern(ExprKind::Mul(rest.into_boxed_slice()))
                    };
                    (c.clone(), rest)
                }
                None => (Complex::new(Rational::one(), Rational::zero()), self.clone()),
            },
            _ => (Complex::new(Rational::one(), Rational::zero()), self.clone()),
        }
    }

    pub fn pow(base: &Expr, q: Rational) -> Expr {
        if q.is_zero() {
            return Expr::one();
        }
        if q.is_one() {
            return base.clone();
        }
        let int_exp = rational_as_integer(&q);
        match base.kind() {
            ExprKind::Const(c) => {
                if let Some(folded) = fold_const_pow(c, &q) {
                    return Expr::constant(folded);
                }
            }
            ExprKind::Pow(b, r) if int_exp.is_some() => {
                return Expr::pow(b, r * &q);
            }
            ExprKind::Mul(fs) if int_exp.is_some() => {
                return Expr::product(fs.iter().map(|f| Expr::pow(f, q.clone())));
            }
            _ => {}
        }
        intern(ExprKind::Pow(base.clone(), q))
    }

    pub fn powi(&self, n: i64) -> Expr {
        Expr::pow(self, rational_int(n))
    }

    pub fn powq(&self, numer: i64, denom: i64) -> Expr {
        Expr::pow(self, rational(numer, denom))
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Expr {
        self.powq(1, 2)
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn func(f: Func, arg: &Expr) -> Expr {
        if arg.is_zero() {
            match f {
                Func::Sin | Func::Tan | Func::Sinh => return Expr::zero(),
                Func::Cos | Func::Cosh | Func::Exp => return Expr::one(),
                Func::Log => {}
            }
        }
        if f == Func::Log && arg.is_one() {
            return Expr::zero();
        }
        intern(ExprKind::Func(f, arg.clone()))
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self)
    }
    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self)
    }
    pub fn tan(&self) -> Expr {
        Expr::func(Func::Tan, self)
    }
    pub fn sinh(&self) -> Expr {
        Expr::func(Func::Sinh, self)
    }
    pub fn cosh(&self) -> Expr {
        Expr::func(Func::Cosh, self)
    }
    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self)
    }
    pub fn ln(&self) -> Expr {
        Expr::func(Func::Log, self)
    }

    /// Exact partial derivative.
    pub fn diff(&self, s: &Symbol) -> Expr {
        diff::diff(self, s)
    }

    /// Repeated partial derivative.
    pub fn diff_n(&self, s: &Symbol, n: u32) -> Expr {
        (0..n).fold(self.clone(), |e, _| e.diff(s))
    }

    /// Replaces symbols by expressions, rebuilding through the constructors.
    pub fn substitute(&self, map: &HashMap<Symbol, Expr>) -> Expr {
        simplify::substitute(self, map)
    }

    pub fn subs(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut map = HashMap::new();
        map.insert(s.clone(), value.clone());
        self.substitute(&map)
    }

    /// Rebuilds the tree and distributes constant coefficients over sums.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    /// Evaluates in double precision with the default singularity threshold.
    pub fn eval(&self, binding: &Binding) -> Result<Complex<f64>, EvalError> {
        CompiledExpr::new(std::slice::from_ref(self))
            .eval_binding(binding, &EvalOptions::default())
            .map(|v| v[0])
    }

    /// Generic-precision evaluation.
    pub fn eval_as<T: crate::scalar::Real>(&self, binding: &BindingOf<T>) -> Result<Complex<T>, EvalError> {
        CompiledExpr::new(std::slice::from_ref(self))
            .eval_binding(binding, &EvalOptions::default())
            .map(|v| v[0])
    }
}

fn pow_complex_rational(c: &ComplexRational, n: u64) -> ComplexRational {
    let mut result = Complex::new(Rational::one(), Rational::zero());
    let mut base = c.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = complex_rational_mul(&result, &base);
        }
        e >>= 1;
        if e > 0 {
            base = complex_rational_mul(&base, &base);
        }
    }
    result
}

fn const_bits(c: &ComplexRational) -> u64 {
    c.re.numer().bits() + c.re.denom().bits() + c.im.numer().bits() + c.im.denom().bits()
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer();
    let d = q.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

fn fold_const_pow(c: &ComplexRational, q: &Rational) -> Option<ComplexRational> {
    if let Some(n) = rational_as_integer(q) {
        if complex_rational_is_zero(c) {
            return if n > 0 { Some(c.clone()) } else { None };
        }
        if n.abs() > FOLD_MAX_EXPONENT || const_bits(c) * n.unsigned_abs() > FOLD_MAX_BITS {
            return None;
        }
        let p = pow_complex_rational(c, n.unsigned_abs());
        return if n < 0 { Some(p.inv()) } else { Some(p) };
    }
    if complex_rational_is_one(c) {
        return Some(c.clone());
    }
    // principal square roots of real rationals that are perfect squares
    if q == &rational(1, 2) && c.im.is_zero() {
        if let Some(r) = exact_sqrt(&c.re) {
            return Some(Complex::new(r, Rational::zero()));
        }
        if let Some(r) = exact_sqrt(&(-c.re.clone())) {
            return Some(Complex::new(Rational::zero(), r));
        }
    }
    None
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display::write_expr(self, f)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Self {
        Expr::symbol(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<f64> for Expr {
    fn from(x: f64) -> Self {
        Expr::real(x)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &Expr::int(rhs))
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &Expr::int(rhs))
            }
        }
        impl $tr<Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&Expr::int(self), &rhs)
            }
        }
        impl $tr<&Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&Expr::int(self), rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::sum([a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| Expr::sum([a.clone(), -b]));
binop!(Mul, mul, |a, b| Expr::product([a.clone(), b.clone()]));
binop!(Div, div, |a, b| Expr::product([a.clone(), b.recip()]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::product([Expr::int(-1), self.clone()])
    }
}
