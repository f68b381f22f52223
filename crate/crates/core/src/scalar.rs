//! Scalar abstractions shared by the evaluator and the verifiers.
//!
//! Symbolic constants are exact complex rationals. Numerical evaluation is
//! generic over any IEEE float implementing [`Real`]; the verification
//! tolerances are calibrated for `f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FloatConst, FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Floating point type usable for evaluation: `f32` or `f64`.
pub trait Real: num_traits::Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    fn from_rational(q: &BigRational) -> Self {
        Self::from_f64(rational_to_f64(q)).unwrap_or_else(Self::nan)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational number.
pub type Rational = BigRational;

/// Exact complex rational, the payload of constant nodes.
pub type ComplexRational = Complex<BigRational>;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rational_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact conversion of a finite double to a rational. Non-finite input maps to zero.
pub fn rational_from_f64(x: f64) -> Rational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        return v;
    }
    // very large numerator/denominator: scale by bit length first
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::one() << (shift as usize))
    } else {
        q * BigRational::from_integer(BigInt::one() << ((-shift) as usize))
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

pub fn complex_rational(re: Rational, im: Rational) -> ComplexRational {
    Complex::new(re, im)
}

pub fn complex_rational_is_zero(z: &ComplexRational) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

pub fn complex_rational_is_one(z: &ComplexRational) -> bool {
    z.re.is_one() && z.im.is_zero()
}

pub fn complex_rational_to<T: Real>(z: &ComplexRational) -> Complex<T> {
    Complex::new(T::from_rational(&z.re), T::from_rational(&z.im))
}

/// `Some(n)` when the rational is an integer fitting in `i64`.
pub fn rational_as_integer(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

fn small_parts(q: &Rational) -> Option<(i128, i128)> {
    Some((q.numer().to_i128()?, q.denom().to_i128()?))
}

/// Reduces `n/d` (with `d > 0`) in machine words.
fn small_ratio(n: i128, d: i128) -> Rational {
    let g = num_integer::gcd(n, d);
    let (n, d) = if g > 1 { (n / g, d / g) } else { (n, d) };
    BigRational::new_raw(BigInt::from(n), BigInt::from(d))
}

/// Sum with an integer fast path that skips the gcd reduction.
pub fn rational_add(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_integer() && b.is_integer() {
        return BigRational::from_integer(a.numer() + b.numer());
    }
    if let (Some((an, ad)), Some((bn, bd))) = (small_parts(a), small_parts(b)) {
        let n = an
            .checked_mul(bd)
            .zip(bn.checked_mul(ad))
            .and_then(|(x, y)| x.checked_add(y));
        if let (Some(n), Some(d)) = (n, ad.checked_mul(bd)) {
            return small_ratio(n, d);
        }
    }
    a + b
}

pub fn rational_mul(a: &Rational, b: &Rational) -> Rational {
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    if a.is_integer() && b.is_integer() {
        return BigRational::from_integer(a.numer() * b.numer());
    }
    if let (Some((an, ad)), Some((bn, bd))) = (small_parts(a), small_parts(b)) {
        if let (Some(n), Some(d)) = (an.checked_mul(bn), ad.checked_mul(bd)) {
            return small_ratio(n, d);
        }
    }
    a * b
}

pub fn complex_rational_add(a: &ComplexRational, b: &ComplexRational) -> ComplexRational {
    Complex::new(rational_add(&a.re, &b.re), rational_add(&a.im, &b.im))
}

pub fn complex_rational_mul(a: &ComplexRational, b: &ComplexRational) -> ComplexRational {
    if a.im.is_zero() && b.im.is_zero() {
        return Complex::new(rational_mul(&a.re, &b.re), BigRational::zero());
    }
    if complex_rational_is_one(a) {
        return b.clone();
    }
    if complex_rational_is_one(b) {
        return a.clone();
    }
    let re = rational_add(&rational_mul(&a.re, &b.re), &-rational_mul(&a.im, &b.im));
    let im = rational_add(&rational_mul(&a.re, &b.im), &rational_mul(&a.im, &b.re));
    Complex::new(re, im)
}

pub fn rational_is_negative(q: &Rational) -> bool {
    q.is_negative()
}
