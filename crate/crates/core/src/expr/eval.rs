//! Compilation of expression DAGs into a flat instruction tape and its
//! evaluation over any [`Real`] scalar.

use std::collections::HashMap;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::{Expr, ExprKind, Func, Symbol};
use crate::scalar::{complex_rational_to, rational_as_integer, rational_to_f64, ComplexRational, Real};

/// Values for the free symbols of an expression.
pub type BindingOf<T> = HashMap<Symbol, Complex<T>>;

/// Double precision binding.
pub type Binding = BindingOf<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("singular denominator (|x| = {magnitude:e})")]
    Singular { magnitude: f64 },
    #[error("{func} evaluated at its branch point")]
    BranchPoint { func: &'static str },
    #[error("non-finite value")]
    NonFinite,
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Denominators (and branch-point arguments) smaller than this are rejected.
    pub min_denominator: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { min_denominator: 1e-12 }
    }
}

#[derive(Debug, Clone)]
enum PowKind {
    Int(i32),
    Sqrt,
    InvSqrt,
    Real(f64),
}

#[derive(Debug, Clone)]
enum Op {
    Const(ComplexRational),
    Var(usize),
    Add(Vec<usize>),
    Mul(Vec<usize>),
    Pow(usize, PowKind),
    Func(Func, usize),
}

/// A set of expressions compiled to one shared tape.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    vars: Vec<Symbol>,
    ops: Vec<Op>,
    outputs: Vec<usize>,
}

impl CompiledExpr {
    pub fn new(exprs: &[Expr]) -> Self {
        let mut slot_of: rustc_hash::FxHashMap<u64, usize> = Default::default();
        let mut var_slot: HashMap<Symbol, usize> = HashMap::new();
        let mut vars = Vec::new();
        let mut ops = Vec::new();
        let mut outputs = Vec::with_capacity(exprs.len());
        for root in exprs {
            // iterative post-order
            let mut stack: Vec<(Expr, bool)> = vec![(root.clone(), false)];
            while let Some((e, expanded)) = stack.pop() {
                if slot_of.contains_key(&e.id()) {
                    continue;
                }
                if !expanded {
                    stack.push((e.clone(), true));
                    match e.kind() {
                        ExprKind::Add(ts) | ExprKind::Mul(ts) => {
                            for t in ts.iter().rev() {
                                stack.push((t.clone(), false));
                            }
                        }
                        ExprKind::Pow(b, _) => stack.push((b.clone(), false)),
                        ExprKind::Func(_, a) => stack.push((a.clone(), false)),
                        _ => {}
                    }
                    continue;
                }
                let op = match e.kind() {
                    ExprKind::Const(c) => Op::Const(c.clone()),
                    ExprKind::Sym(s) => {
                        let idx = *var_slot.entry(s.clone()).or_insert_with(|| {
                            vars.push(s.clone());
                            vars.len() - 1
                        });
                        Op::Var(idx)
                    }
                    ExprKind::Add(ts) => Op::Add(ts.iter().map(|t| slot_of[&t.id()]).collect()),
                    ExprKind::Mul(ts) => Op::Mul(ts.iter().map(|t| slot_of[&t.id()]).collect()),
                    ExprKind::Pow(b, q) => {
                        let kind = match rational_as_integer(q) {
                            Some(n) if n.unsigned_abs() <= i32::MAX as u64 => PowKind::Int(n as i32),
                            _ => {
                                let v = rational_to_f64(q);
                                if v == 0.5 {
                                    PowKind::Sqrt
                                } else if v == -0.5 {
                                    PowKind::InvSqrt
                                } else {
                                    PowKind::Real(v)
                                }
                            }
                        };
                        Op::Pow(slot_of[&b.id()], kind)
                    }
                    ExprKind::Func(f, a) => Op::Func(*f, slot_of[&a.id()]),
                };
                ops.push(op);
                slot_of.insert(e.id(), ops.len() - 1);
            }
            outputs.push(slot_of[&root.id()]);
        }
        CompiledExpr { vars, ops, outputs }
    }

    /// Free symbols in input order for [`CompiledExpr::eval`].
    pub fn variables(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn tape_len(&self) -> usize {
        self.ops.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn eval_binding<T: Real>(
        &self,
        binding: &BindingOf<T>,
        opts: &EvalOptions,
    ) -> Result<Vec<Complex<T>>, EvalError> {
        let mut inputs = Vec::with_capacity(self.vars.len());
        for v in &self.vars {
            match binding.get(v) {
                Some(z) => inputs.push(*z),
                None => return Err(EvalError::Unbound(v.name().to_string())),
            }
        }
        self.eval(&inputs, opts)
    }

    /// Evaluates with `inputs` ordered as [`CompiledExpr::variables`].
    pub fn eval<T: Real>(&self, inputs: &[Complex<T>], opts: &EvalOptions) -> Result<Vec<Complex<T>>, EvalError> {
        assert_eq!(inputs.len(), self.vars.len(), "input arity");
        let tiny = T::from_f64(opts.min_denominator).unwrap_or_else(T::zero);
        let mut regs: Vec<Complex<T>> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match op {
                Op::Const(c) => complex_rational_to::<T>(c),
                Op::Var(i) => inputs[*i],
                Op::Add(ts) => ts.iter().fold(Complex::zero(), |acc, &t| acc + regs[t]),
                Op::Mul(ts) => ts.iter().fold(Complex::one(), |acc, &t| acc * regs[t]),
                Op::Pow(b, kind) => {
                    let z = clean(regs[*b]);
                    let mag = z.norm();
                    match kind {
                        PowKind::Int(n) => {
                            if *n < 0 && mag < tiny {
                                return Err(singular(mag));
                            }
                            z.powi(*n)
                        }
                        PowKind::Sqrt => {
                            if mag < tiny {
                                return Err(EvalError::BranchPoint { func: "sqrt" });
                            }
                            z.sqrt()
                        }
                        PowKind::InvSqrt => {
                            if mag < tiny {
                                return Err(singular(mag));
                            }
                            z.sqrt().inv()
                        }
                        PowKind::Real(q) => {
                            if mag < tiny {
                                return Err(EvalError::BranchPoint { func: "pow" });
                            }
                            z.powf(T::from_f64(*q).unwrap_or_else(T::nan))
                        }
                    }
                }
                Op::Func(f, a) => {
                    let z = clean(regs[*a]);
                    match f {
                        Func::Sin => z.sin(),
                        Func::Cos => z.cos(),
                        Func::Tan => {
                            let c = z.cos();
                            if c.norm() < tiny {
                                return Err(singular(c.norm().to_f64().unwrap_or(0.0)));
                            }
                            z.sin() / c
                        }
                        Func::Sinh => z.sinh(),
                        Func::Cosh => z.cosh(),
                        Func::Exp => z.exp(),
                        Func::Log => {
                            if z.norm() < tiny {
                                return Err(EvalError::BranchPoint { func: "log" });
                            }
                            z.ln()
                        }
                    }
                }
            };
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(EvalError::NonFinite);
            }
            regs.push(v);
        }
        Ok(self.outputs.iter().map(|&o| regs[o]).collect())
    }
}

fn singular<T: Real>(mag: T) -> EvalError {
    EvalError::Singular {
        magnitude: mag.to_f64().unwrap_or(0.0),
    }
}

/// Maps a negative-zero imaginary part to positive zero so the principal
/// branch cut is approached from above.
fn clean<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.im == T::zero() {
        Complex::new(z.re, T::zero())
    } else {
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Symbol;

    #[test]
    fn principal_sqrt_of_negative() {
        let l = Symbol::coordinate("L");
        let e = (Expr::int(-2) * (Expr::int(8) * l.expr())).sqrt();
        let mut b = Binding::new();
        b.insert(l, Complex::new(1.0, 0.0));
        let v = e.eval(&b).unwrap();
        assert!((v - Complex::new(0.0, 4.0)).norm() < 1e-14);
    }

    #[test]
    fn negative_zero_imaginary_part_is_cleaned() {
        let x = Symbol::coordinate("x");
        let e = x.expr().sqrt();
        let mut b = Binding::new();
        b.insert(x, Complex::new(-4.0, -0.0));
        assert!((e.eval(&b).unwrap() - Complex::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn reciprocal_at_zero_is_singular() {
        let u = Symbol::coordinate("u");
        let mut b = Binding::new();
        b.insert(u.clone(), Complex::new(0.0, 0.0));
        assert!(matches!(u.expr().recip().eval(&b), Err(EvalError::Singular { .. })));
    }

    #[test]
    fn sin_at_half_pi() {
        let t = Symbol::coordinate("theta");
        let mut b = Binding::new();
        b.insert(t.clone(), Complex::new(std::f64::consts::FRAC_PI_2, 0.0));
        assert!((t.expr().sin().eval(&b).unwrap() - Complex::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_precision_evaluation() {
        let t = Symbol::coordinate("t");
        let e = t.expr().powi(2) + 1;
        let mut b = BindingOf::<f32>::new();
        b.insert(t, Complex::new(2.0f32, 0.0));
        assert_eq!(e.eval_as(&b).unwrap(), Complex::new(5.0f32, 0.0));
    }

    #[test]
    fn unbound_symbol_reported() {
        let t = Symbol::coordinate("t");
        assert_eq!(t.expr().eval(&Binding::new()), Err(EvalError::Unbound("t".into())));
    }

    #[test]
    fn shared_tape_for_several_outputs() {
        let t = Symbol::coordinate("t");
        let a = (t.expr() + 1).sin();
        let tape = CompiledExpr::new(&[a.clone(), a.powi(2)]);
        assert_eq!(tape.output_count(), 2);
        // t, 1, t+1, sin, ^2
        assert_eq!(tape.tape_len(), 5);
    }
}
