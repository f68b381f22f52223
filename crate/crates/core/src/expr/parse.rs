//! Recursive-descent parser for the infix expression language.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := ("-" | "+") unary | power
//! power   := primary ("^" unary)?
//! primary := number | "i" | "pi" | ident | ident "(" expr ")" | "(" expr ")"
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Expr, Func, Symbol, SymbolKind};
use crate::scalar::{rational_from_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownFunction { offset, .. }
            | ParseError::UnknownSymbol { offset, .. } => *offset,
        }
    }
}

/// Known symbols by name. When supplied, any other identifier is an error.
#[derive(Debug, Clone, Default)]
pub struct SymbolTable {
    symbols: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, s: Symbol) {
        self.symbols.insert(s.name().to_string(), s);
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }
}

impl FromIterator<Symbol> for SymbolTable {
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let mut t = SymbolTable::new();
        for s in iter {
            t.insert(s);
        }
        t
    }
}

/// Parses with every identifier accepted as a coordinate symbol.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, None).run()
}

/// Parses resolving identifiers through `table`.
pub fn parse_with(text: &str, table: &SymbolTable) -> Result<Expr, ParseError> {
    Parser::new(text, Some(table)).run()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(u8),
    End,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    tok: Tok,
    tok_start: usize,
    table: Option<&'a SymbolTable>,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn decimal_to_rational(int_part: &str, frac_part: &str, exp: i32) -> Rational {
    let digits = format!("{int_part}{frac_part}");
    let mantissa: BigInt = digits.parse().unwrap_or_else(|_| BigInt::zero());
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        Rational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
    }
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, table: Option<&'a SymbolTable>) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
            table,
        }
    }

    fn run(mut self) -> Result<Expr, ParseError> {
        self.advance()?;
        let e = self.expr()?;
        if self.tok != Tok::End {
            return Err(syntax(self.tok_start, "unexpected trailing input"));
        }
        Ok(e)
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= self.src.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let ch = self.src[self.pos];
        if ch.is_ascii_digit() || (ch == b'.' && self.peek_digit(self.pos + 1)) {
            self.tok = Tok::Num(self.number()?);
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            let start = self.pos;
            while self.pos < self.src.len()
                && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
            {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
            self.tok = Tok::Ident(name.to_string());
        } else if b"+-*/^()".contains(&ch) {
            self.pos += 1;
            self.tok = Tok::Op(ch);
        } else {
            return Err(syntax(
                self.pos,
                format!("unexpected character {:?}", self.char_at(self.pos)),
            ));
        }
        Ok(())
    }

    fn char_at(&self, pos: usize) -> char {
        std::str::from_utf8(&self.src[pos..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('\u{fffd}')
    }

    fn peek_digit(&self, pos: usize) -> bool {
        pos < self.src.len() && self.src[pos].is_ascii_digit()
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.peek_digit(self.pos) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn number(&mut self) -> Result<Rational, ParseError> {
        let int_part = self.digits();
        let mut frac_part = "";
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            frac_part = self.digits();
        }
        let mut exp = 0i32;
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            let mut p = self.pos + 1;
            let mut neg = false;
            if p < self.src.len() && (self.src[p] == b'+' || self.src[p] == b'-') {
                neg = self.src[p] == b'-';
                p += 1;
            }
            if self.peek_digit(p) {
                self.pos = p;
                let d = self.digits();
                let v: i32 = d.parse().map_err(|_| syntax(save, "exponent out of range"))?;
                if v > 4000 {
                    return Err(syntax(save, "exponent out of range"));
                }
                exp = if neg { -v } else { v };
            }
        }
        Ok(decimal_to_rational(int_part, frac_part, exp))
    }

    fn expect_op(&mut self, op: u8) -> Result<(), ParseError> {
        if self.tok == Tok::Op(op) {
            self.advance()
        } else {
            Err(syntax(self.tok_start, format!("expected `{}`", op as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.tok {
                Tok::Op(b'+') => {
                    self.advance()?;
                    terms.push(self.term()?);
                }
                Tok::Op(b'-') => {
                    self.advance()?;
                    terms.push(-self.term()?);
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.tok {
                Tok::Op(b'*') => {
                    self.advance()?;
                    acc = acc * self.unary()?;
                }
                Tok::Op(b'/') => {
                    self.advance()?;
                    acc = acc / self.unary()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.tok {
            Tok::Op(b'-') => {
                self.advance()?;
                Ok(-self.unary()?)
            }
            Tok::Op(b'+') => {
                self.advance()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok != Tok::Op(b'^') {
            return Ok(base);
        }
        self.advance()?;
        let exponent = self.unary()?;
        match exponent.as_const() {
            Some(c) if c.im.is_zero() => Ok(Expr::pow(&base, c.re.clone())),
            // non-rational exponents go through the principal logarithm
            _ => Ok((exponent * base.ln()).exp()),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let start = self.tok_start;
        match self.tok.clone() {
            Tok::Num(q) => {
                self.advance()?;
                Ok(Expr::rational(q))
            }
            Tok::Op(b'(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_op(b')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.advance()?;
                if self.tok == Tok::Op(b'(') {
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_op(b')')?;
                    if name == "sqrt" {
                        return Ok(arg.sqrt());
                    }
                    return match Func::from_name(&name) {
                        Some(f) => Ok(Expr::func(f, &arg)),
                        None => Err(ParseError::UnknownFunction { name, offset: start }),
                    };
                }
                match name.as_str() {
                    "i" => return Ok(Expr::i()),
                    "pi" => return Ok(Expr::rational(rational_from_f64(std::f64::consts::PI))),
                    _ => {}
                }
                if Func::from_name(&name).is_some() || name == "sqrt" {
                    return Err(syntax(self.tok_start, format!("expected `(` after `{name}`")));
                }
                match self.table {
                    Some(t) => match t.get(&name) {
                        Some(s) => Ok(s.expr()),
                        None => Err(ParseError::UnknownSymbol { name, offset: start }),
                    },
                    None => Ok(Symbol::new(&name, SymbolKind::Coordinate).expr()),
                }
            }
            Tok::End => Err(syntax(start, "unexpected end of input")),
            Tok::Op(op) => Err(syntax(start, format!("unexpected `{}`", op as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Binding;
    use num_complex::Complex;

    #[test]
    fn parses_cos_two_theta() {
        let t = Symbol::coordinate("theta");
        assert_eq!(parse("cos(2*theta)").unwrap(), (2 * t.expr()).cos());
    }

    #[test]
    fn rational_literal_is_exact() {
        let e = parse("p_u + (1/2)*gamma").unwrap();
        let expected = Symbol::coordinate("p_u").expr() + Expr::frac(1, 2) * Symbol::coordinate("gamma").expr();
        assert_eq!(e, expected);
        assert_eq!(parse("0.25").unwrap(), Expr::frac(1, 4));
        assert_eq!(parse("1.5e2").unwrap(), Expr::int(150));
    }

    #[test]
    fn sqrt_of_negative_evaluates_to_4i() {
        let e = parse("sqrt(-2*(c*L+c0))").unwrap();
        let mut b = Binding::new();
        b.insert(Symbol::parameter("c"), Complex::new(8.0, 0.0));
        b.insert(Symbol::parameter("c0"), Complex::new(0.0, 0.0));
        b.insert(Symbol::coordinate("L"), Complex::new(1.0, 0.0));
        let v = e.eval(&b).unwrap();
        assert!((v - Complex::new(0.0, 4.0)).norm() < 1e-14);
    }

    #[test]
    fn precedence_and_associativity() {
        let x = Symbol::coordinate("x");
        assert_eq!(parse("-x^2").unwrap(), -x.expr().powi(2));
        assert_eq!(parse("2^3^2").unwrap(), Expr::int(512));
        assert_eq!(parse("x^-1").unwrap(), x.expr().recip());
        assert_eq!(parse("1 - 2 - 3").unwrap(), Expr::int(-4));
        assert_eq!(parse("8/2/2").unwrap(), Expr::int(2));
    }

    #[test]
    fn errors_have_offsets() {
        let err = parse("1 + * 2").unwrap_err();
        assert_eq!(err.offset(), 4);
        assert!(matches!(
            parse("foo(1)"),
            Err(ParseError::UnknownFunction { offset: 0, .. })
        ));
        assert!(matches!(parse("(1 + 2"), Err(ParseError::Syntax { offset: 6, .. })));
        let table: SymbolTable = [Symbol::coordinate("x")].into_iter().collect();
        assert!(matches!(
            parse_with("x + y", &table),
            Err(ParseError::UnknownSymbol { offset: 4, .. })
        ));
        assert!(parse("x # 1").is_err());
    }

    #[test]
    fn independent_parses_share_handles() {
        let a = parse("sin(x)^2 + 3*x/y").unwrap();
        let b = parse("sin(x)^2 + 3*x/y").unwrap();
        assert_eq!(a.id(), b.id());
    }

    #[test]
    fn imaginary_unit() {
        assert_eq!(parse("i*i").unwrap(), Expr::int(-1));
    }
}
