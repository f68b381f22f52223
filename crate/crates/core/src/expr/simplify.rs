use std::collections::HashMap;

use rustc_hash::FxHashMap;

use super::{Expr, ExprKind, Symbol};

/// Bottom-up rebuild applying `leaf` at symbols and `post` at every node.
fn rebuild(
    e: &Expr,
    leaf: &dyn Fn(&Symbol) -> Option<Expr>,
    post: &dyn Fn(Expr) -> Expr,
    memo: &mut FxHashMap<u64, Expr>,
) -> Expr {
    if let Some(r) = memo.get(&e.id()) {
        return r.clone();
    }
    let r = match e.kind() {
        ExprKind::Const(_) => e.clone(),
        ExprKind::Sym(s) => leaf(s).unwrap_or_else(|| e.clone()),
        ExprKind::Add(ts) => {
            let parts: Vec<Expr> = ts.iter().map(|t| rebuild(t, leaf, post, memo)).collect();
            post(Expr::sum(parts))
        }
        ExprKind::Mul(fs) => {
            let parts: Vec<Expr> = fs.iter().map(|t| rebuild(t, leaf, post, memo)).collect();
            post(Expr::product(parts))
        }
        ExprKind::Pow(b, q) => post(Expr::pow(&rebuild(b, leaf, post, memo), q.clone())),
        ExprKind::Func(f, a) => post(Expr::func(*f, &rebuild(a, leaf, post, memo))),
    };
    memo.insert(e.id(), r.clone());
    r
}

pub(super) fn substitute(e: &Expr, map: &HashMap<Symbol, Expr>) -> Expr {
    if map.is_empty() {
        return e.clone();
    }
    let mask = map.keys().fold(0u64, |m, s| m | s.bit());
    if e.mask() & mask == 0 {
        return e.clone();
    }
    let mut memo = FxHashMap::default();
    rebuild(e, &|s| map.get(s).cloned(), &|x| x, &mut memo)
}

/// `c * (a + b)` becomes `c*a + c*b` for a constant `c`.
fn distribute_coefficient(e: Expr) -> Expr {
    if let ExprKind::Mul(fs) = e.kind() {
        if fs.len() == 2 && fs[0].is_const() {
            if let ExprKind::Add(ts) = fs[1].kind() {
                let c = fs[0].clone();
                return Expr::sum(ts.iter().map(|t| &c * t));
            }
        }
    }
    e
}

pub(super) fn simplify(e: &Expr) -> Expr {
    let mut memo = FxHashMap::default();
    rebuild(e, &|_| None, &distribute_coefficient, &mut memo)
}
