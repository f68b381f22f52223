//! Infix printing that the parser reads back to the same tree.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::{Expr, ExprKind};
use crate::scalar::{rational, ComplexRational, Rational};

const SUM: u8 = 1;
const PROD: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str(&render(e).0)
}

fn wrap(s: (String, u8), min: u8) -> String {
    if s.1 < min {
        format!("({})", s.0)
    } else {
        s.0
    }
}

fn render_rational(q: &Rational) -> (String, u8) {
    let s = if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    };
    let prec = if q.is_negative() {
        NEG
    } else if q.is_integer() {
        ATOM
    } else {
        PROD
    };
    (s, prec)
}

fn render_imag(q: &Rational) -> (String, u8) {
    if q.is_one() {
        return ("i".into(), ATOM);
    }
    if (-q).is_one() {
        return ("-i".into(), NEG);
    }
    let (s, p) = render_rational(q);
    (format!("{s}*i"), if p == NEG { NEG } else { PROD })
}

fn render_const(c: &ComplexRational) -> (String, u8) {
    if c.im.is_zero() {
        return render_rational(&c.re);
    }
    if c.re.is_zero() {
        return render_imag(&c.im);
    }
    let (re, _) = render_rational(&c.re);
    let (im, _) = render_imag(&c.im.abs());
    let op = if c.im.is_negative() { "-" } else { "+" };
    (format!("{re} {op} {im}"), SUM)
}

fn render_pow(base: &Expr, q: &Rational) -> (String, u8) {
    if q == &rational(1, 2) {
        return (format!("sqrt({})", render(base).0), ATOM);
    }
    let b = wrap(render(base), ATOM);
    let exp = wrap(render_rational(q), ATOM);
    (format!("{b}^{exp}"), POW)
}

fn render_mul(fs: &[Expr]) -> (String, u8) {
    let (coeff, rest) = match fs[0].as_const() {
        Some(c) => (Some(c.clone()), &fs[1..]),
        None => (None, fs),
    };
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in rest {
        match f.kind() {
            ExprKind::Pow(b, q) if q.is_negative() => {
                let pos = -q.clone();
                if pos.is_one() {
                    den.push(wrap(render(b), POW));
                } else {
                    den.push(wrap(render_pow(b, &pos), POW));
                }
            }
            _ => num.push(wrap(render(f), POW)),
        }
    }
    let mut out = String::new();
    let mut prec = PROD;
    match coeff {
        Some(c) if c.im.is_zero() && (-c.re.clone()).is_one() => {
            out.push('-');
            prec = NEG;
        }
        Some(c) => {
            let (s, p) = render_const(&c);
            if p == NEG {
                prec = NEG;
            }
            let s = if p == SUM { format!("({s})") } else { s };
            out.push_str(&s);
            if !num.is_empty() {
                out.push('*');
            }
        }
        None => {}
    }
    if num.is_empty() && !out.ends_with(|ch: char| ch.is_ascii_alphanumeric() || ch == ')') {
        out.push('1');
    }
    out.push_str(&num.join("*"));
    if !den.is_empty() {
        out.push('/');
        if den.len() == 1 {
            out.push_str(&den[0]);
        } else {
            out.push('(');
            out.push_str(&den.join("*"));
            out.push(')');
        }
    }
    (out, prec)
}

fn render(e: &Expr) -> (String, u8) {
    match e.kind() {
        ExprKind::Const(c) => render_const(c),
        ExprKind::Sym(s) => (s.name().to_string(), ATOM),
        ExprKind::Func(func, a) => (format!("{}({})", func.name(), render(a).0), ATOM),
        ExprKind::Pow(b, q) => {
            if q.is_negative() {
                render_mul(std::slice::from_ref(e))
            } else {
                render_pow(b, q)
            }
        }
        ExprKind::Mul(fs) => render_mul(fs),
        ExprKind::Add(ts) => {
            let mut out = String::new();
            for (i, t) in ts.iter().enumerate() {
                let (s, p) = render(t);
                let s = if p == SUM { format!("({s})") } else { s };
                if i == 0 {
                    out.push_str(&s);
                } else if let Some(rest) = s.strip_prefix('-') {
                    out.push_str(" - ");
                    out.push_str(rest);
                } else {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
            (out, SUM)
        }
    }
}
