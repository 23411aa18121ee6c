//! Scalar abstraction for the two numeric modes.
//!
//! Every pricing operator in this crate is generic over [`Scalar`]. Two
//! implementations are provided:
//!
//! * `f64` — fast float mode. All sign and equality decisions use the zero
//!   band [`FLOAT_ZERO_BAND`], because node classification and null-set
//!   detection hinge on whether a quantity is exactly zero.
//! * [`BigRational`] — exact mode. No rounding anywhere; sign decisions are
//!   exact. Recommended whenever a result feeds a classification.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Zero band for float-mode sign and equality decisions.
pub const FLOAT_ZERO_BAND: f64 = 1e-9;

/// Sign of a scalar after the mode's zero decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Numbers the pricing operators can run on.
///
/// Implementations must form an ordered field without NaNs: `partial_cmp`
/// is required to succeed on any pair of values the crate produces.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True when arithmetic is exact (no zero band in use).
    const IS_EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;

    /// Exact ratio of two integers. Panics when `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Conversion from a finite double. Exact mode converts the binary
    /// expansion exactly, so a tree built in float mode can be re-priced in
    /// exact mode without perturbing any price.
    fn from_f64(x: f64) -> Self;

    /// Lossy view as a double (used for reports and by the float oracles).
    fn to_f64(&self) -> f64;

    /// Parses `"p/q"`, a decimal literal such as `"-1.25"` or `"3e-2"`, or a
    /// plain integer. Exact mode parses decimals exactly.
    fn parse_literal(text: &str) -> Option<Self>;

    /// Renders a literal that `parse_literal` accepts back.
    fn render_literal(&self) -> String;

    /// Sign under the mode's zero decision.
    fn sign(&self) -> Sign;

    fn abs(&self) -> Self {
        match self.sign() {
            Sign::Negative => -self.clone(),
            _ => self.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }

    /// Equality under the mode's zero decision.
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    /// Total order. The crate never constructs NaNs.
    fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.partial_cmp(other)
            .expect("scalar comparison must be total")
    }

    fn min_val(self, other: Self) -> Self {
        if self.total_cmp(&other).is_le() {
            self
        } else {
            other
        }
    }

    fn max_val(self, other: Self) -> Self {
        if self.total_cmp(&other).is_ge() {
            self
        } else {
            other
        }
    }
}

impl Scalar for f64 {
    const IS_EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            return Some(num / den);
        }
        let v: f64 = text.parse().ok()?;
        v.is_finite().then_some(v)
    }

    fn render_literal(&self) -> String {
        format!("{self}")
    }

    fn sign(&self) -> Sign {
        if f64::abs(*self) <= FLOAT_ZERO_BAND {
            Sign::Zero
        } else if *self > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

impl Scalar for BigRational {
    const IS_EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float expected")
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_literal(text: &str) -> Option<Self> {
        let text = text.trim();
        if let Some((num, den)) = text.split_once('/') {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            return Some(BigRational::new(num, den));
        }
        parse_decimal_exact(text)
    }

    fn render_literal(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn sign(&self) -> Sign {
        if <BigRational as Zero>::is_zero(self) {
            Sign::Zero
        } else if self.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Exact rational value of a decimal literal with optional exponent.
fn parse_decimal_exact(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut num = BigInt::from(0);
    for c in int_part.chars().chain(frac_part.chars()) {
        let d = c.to_digit(10)?;
        num = num * 10 + d;
    }
    num *= sign;
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::new(num, ten.pow(scale as u32))
    } else {
        BigRational::from_integer(num * ten.pow((-scale) as u32))
    })
}
