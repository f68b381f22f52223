use crate::expr::{Expr, Symbol, SymbolKind};

use super::ClassicalError;

/// Sign convention of the Poisson bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketConvention {
    /// `{f,g} = sum df/dp dg/dq - df/dq dg/dp`, so `{q,p} = -1`.
    #[default]
    MomentumFirst,
    /// The opposite sign, `{q,p} = +1`.
    CoordinateFirst,
}

/// Canonical pairs `(q^i, p_i)` of a phase space.
#[derive(Debug, Clone)]
pub struct PhaseSpace {
    pairs: Vec<(Symbol, Symbol)>,
    convention: BracketConvention,
}

impl PhaseSpace {
    pub fn new(pairs: Vec<(Symbol, Symbol)>) -> Self {
        PhaseSpace {
            pairs,
            convention: BracketConvention::default(),
        }
    }

    pub fn with_convention(mut self, convention: BracketConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn convention(&self) -> BracketConvention {
        self.convention
    }

    pub fn pairs(&self) -> &[(Symbol, Symbol)] {
        &self.pairs
    }

    pub fn coordinates(&self) -> Vec<Symbol> {
        self.pairs.iter().map(|(q, _)| q.clone()).collect()
    }

    pub fn momenta(&self) -> Vec<Symbol> {
        self.pairs.iter().map(|(_, p)| p.clone()).collect()
    }

    /// Appends a pair, e.g. `(u, p_u)` for an extension.
    pub fn extended(&self, q: Symbol, p: Symbol) -> PhaseSpace {
        let mut pairs = self.pairs.clone();
        pairs.push((q, p));
        PhaseSpace {
            pairs,
            convention: self.convention,
        }
    }

    fn knows(&self, s: &Symbol) -> bool {
        self.pairs.iter().any(|(q, p)| q == s || p == s)
    }

    /// Every non-parameter symbol of `e` must belong to a canonical pair.
    pub fn ensure_covers(&self, e: &Expr) -> Result<(), ClassicalError> {
        for s in e.free_symbols() {
            if s.kind() != SymbolKind::Parameter && !self.knows(&s) {
                return Err(ClassicalError::ChartIncomplete(s.name().to_string()));
            }
        }
        Ok(())
    }

    /// The individual products whose sum is the bracket. Their magnitudes give
    /// the natural scale for judging a bracket that should vanish.
    pub fn bracket_terms(&self, f: &Expr, g: &Expr) -> Vec<Expr> {
        let mut terms = Vec::new();
        for (q, p) in &self.pairs {
            let a = f.diff(p) * g.diff(q);
            let b = f.diff(q) * g.diff(p);
            let (a, b) = match self.convention {
                BracketConvention::MomentumFirst => (a, -b),
                BracketConvention::CoordinateFirst => (-a, b),
            };
            if !a.is_zero() {
                terms.push(a);
            }
            if !b.is_zero() {
                terms.push(b);
            }
        }
        terms
    }

    /// Poisson bracket `{f, g}`.
    pub fn bracket(&self, f: &Expr, g: &Expr) -> Expr {
        Expr::sum(self.bracket_terms(f, g))
    }

    /// Checked bracket: fails when a symbol has no canonical partner.
    pub fn poisson(&self, f: &Expr, g: &Expr) -> Result<Expr, ClassicalError> {
        self.ensure_covers(f)?;
        self.ensure_covers(g)?;
        Ok(self.bracket(f, g))
    }
}

/// `{f, g}` on `chart`.
pub fn poisson(f: &Expr, g: &Expr, chart: &PhaseSpace) -> Result<Expr, ClassicalError> {
    chart.poisson(f, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> (PhaseSpace, Symbol, Symbol) {
        let q = Symbol::coordinate("theta");
        let p = Symbol::momentum("p_theta");
        (PhaseSpace::new(vec![(q.clone(), p.clone())]), q, p)
    }

    #[test]
    fn coordinate_momentum_bracket_is_minus_one() {
        let (ch, q, p) = chart();
        assert_eq!(poisson(&q.expr(), &p.expr(), &ch).unwrap(), Expr::int(-1));
        let flipped = ch.with_convention(BracketConvention::CoordinateFirst);
        assert_eq!(flipped.bracket(&q.expr(), &p.expr()), Expr::one());
    }

    #[test]
    fn harmonic_oscillator_flow() {
        let (ch, q, p) = chart();
        let l = Expr::frac(1, 2) * (p.expr().powi(2) + q.expr().powi(2));
        let xq = ch.bracket(&l, &q.expr());
        assert_eq!(xq, p.expr());
        assert_eq!(ch.bracket(&l, &xq), -q.expr());
        assert!(ch.bracket(&l, &l).is_zero());
    }

    #[test]
    fn missing_partner_is_reported() {
        let (ch, q, _) = chart();
        let stray = Symbol::coordinate("u");
        assert_eq!(
            poisson(&q.expr(), &stray.expr(), &ch),
            Err(ClassicalError::ChartIncomplete("u".into()))
        );
        let alpha = Symbol::parameter("alpha");
        assert!(poisson(&q.expr(), &alpha.expr(), &ch).unwrap().is_zero());
    }
}
