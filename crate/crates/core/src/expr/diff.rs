use rustc_hash::FxHashMap;

use num_traits::One;

use super::{Expr, ExprKind, Func, Symbol};

pub(super) fn diff(e: &Expr, s: &Symbol) -> Expr {
    let mut memo = FxHashMap::default();
    go(e, s, &mut memo)
}

fn go(e: &Expr, s: &Symbol, memo: &mut FxHashMap<u64, Expr>) -> Expr {
    if !e.may_contain(s) {
        return Expr::zero();
    }
    if let Some(d) = memo.get(&e.id()) {
        return d.clone();
    }
    let d = match e.kind() {
        ExprKind::Const(_) => Expr::zero(),
        ExprKind::Sym(t) => {
            if t == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        ExprKind::Add(ts) => Expr::sum(ts.iter().map(|t| go(t, s, memo))),
        ExprKind::Mul(fs) => {
            let mut terms = Vec::new();
            for i in 0..fs.len() {
                let di = go(&fs[i], s, memo);
                if di.is_zero() {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(fs.len());
                factors.push(di);
                for (j, f) in fs.iter().enumerate() {
                    if j != i {
                        factors.push(f.clone());
                    }
                }
                terms.push(Expr::product(factors));
            }
            Expr::sum(terms)
        }
        ExprKind::Pow(b, q) => {
            let db = go(b, s, memo);
            if db.is_zero() {
                Expr::zero()
            } else {
                let q1 = q - num_rational::BigRational::one();
                Expr::product([Expr::rational(q.clone()), Expr::pow(b, q1), db])
            }
        }
        ExprKind::Func(f, a) => {
            let da = go(a, s, memo);
            if da.is_zero() {
                Expr::zero()
            } else {
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Tan => a.cos().powi(-2),
                    Func::Sinh => a.cosh(),
                    Func::Cosh => a.sinh(),
                    Func::Exp => e.clone(),
                    Func::Log => a.recip(),
                };
                outer * da
            }
        }
    };
    memo.insert(e.id(), d.clone());
    d
}
