//! Extended Hamiltonians, their characteristic first integrals, classical and
//! quantum ladder and shift constructions, and a sampling verifier for every
//! identity relating them.
//!
//! The symbolic layer works over exact complex rationals; numerical checks are
//! generic over [`scalar::Real`] and default to `f64`.

// index loops mirror the tensor notation
#![allow(clippy::needless_range_loop)]

pub mod classical;
pub mod expr;
pub mod geometry;
pub mod harness;
pub mod ladder;
pub mod quantum;
pub mod scalar;
pub mod systems;

pub use expr::sample::{numerically_equal, CheckOutcome, Comparison, SampleDomain, SampleError};
pub use expr::{parse, parse_with, Expr, ExprKind, Func, Symbol, SymbolKind, SymbolTable};
pub use scalar::{ComplexRational, Rational, Real};

/// Double precision complex scalar.
pub type Complex64 = num_complex::Complex<f64>;
/// Single precision complex scalar.
pub type Complex32 = num_complex::Complex<f32>;
/// Symbol binding in double precision.
pub type Binding = expr::Binding;
