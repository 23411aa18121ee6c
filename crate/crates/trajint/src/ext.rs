//! Extended reals `[-∞, +∞]` under the hedging conventions.
//!
//! Payoffs and prices live in the extended line. Arithmetic follows the
//! conventions the superhedging operators require, which differ from IEEE
//! floats in one place:
//!
//! * `0 · (±∞) = 0`
//! * `∞ + (−∞) = ∞` — in both argument orders
//! * `u − v ≡ u + (−v)`, so also `∞ − ∞ = ∞`
//! * the infimum of an empty hedge set is `+∞`
//!
//! Comparison is total: `−∞ < finite < +∞`.

use std::cmp::Ordering;
use std::fmt;

use crate::scalar::{Scalar, Sign};

/// A value in `[-∞, +∞]` over the scalar `T`.
#[derive(Debug, Clone, PartialEq)]
pub enum Ext<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> Ext<T> {
    pub fn finite(v: T) -> Self {
        Ext::Finite(v)
    }

    pub fn zero() -> Self {
        Ext::Finite(T::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Ext::Finite(T::from_int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&T> {
        match self {
            Ext::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Extended addition with `∞ + (−∞) = ∞` in both orders.
    pub fn add(&self, rhs: &Self) -> Self {
        use Ext::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a.clone() + b.clone()),
            (PosInf, NegInf) | (NegInf, PosInf) => PosInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Finite(v) => Ext::Finite(-v.clone()),
            Ext::PosInf => Ext::NegInf,
        }
    }

    /// `u − v ≡ u + (−v)`. Note `∞ − ∞ = ∞`.
    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Scaling by a finite scalar with `0 · (±∞) = 0`.
    pub fn scale(c: &T, a: &Self) -> Self {
        match a {
            Ext::Finite(v) => Ext::Finite(c.clone() * v.clone()),
            inf => match c.sign() {
                Sign::Zero => Ext::zero(),
                Sign::Positive => inf.clone(),
                Sign::Negative => inf.neg(),
            },
        }
    }

    pub fn sign(&self) -> Sign {
        match self {
            Ext::NegInf => Sign::Negative,
            Ext::Finite(v) => v.sign(),
            Ext::PosInf => Sign::Positive,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign() == Sign::Zero
    }

    /// Equality under the mode's zero decision; infinities compare exactly.
    pub fn approx_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a.approx_eq(b),
            (a, b) => a == b,
        }
    }

    /// Total order: `−∞ < finite < +∞`.
    pub fn cmp_ext(&self, other: &Self) -> Ordering {
        use Ext::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.total_cmp(b),
        }
    }

    pub fn le_ext(&self, other: &Self) -> bool {
        self.cmp_ext(other).is_le()
    }

    /// `≤` up to the mode's tolerance on the finite/finite case.
    pub fn le_approx(&self, other: &Self) -> bool {
        self.le_ext(other) || self.approx_eq(other)
    }

    pub fn max_ext(self, other: Self) -> Self {
        if self.cmp_ext(&other).is_ge() {
            self
        } else {
            other
        }
    }

    pub fn min_ext(self, other: Self) -> Self {
        if self.cmp_ext(&other).is_le() {
            self
        } else {
            other
        }
    }

    /// Positive part `max(x, 0)`.
    pub fn pos_part(&self) -> Self {
        self.clone().max_ext(Ext::zero())
    }

    /// Negative part `max(−x, 0)`, so `x = x⁺ − x⁻`.
    pub fn neg_part(&self) -> Self {
        self.neg().max_ext(Ext::zero())
    }

    pub fn abs_ext(&self) -> Self {
        match self {
            Ext::Finite(v) => Ext::Finite(Scalar::abs(v)),
            _ => Ext::PosInf,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::Finite(v) => v.to_f64(),
            Ext::PosInf => f64::INFINITY,
        }
    }
}

/// Convention-following addition, exposed as the `+` operator.
impl<T: Scalar> std::ops::Add for Ext<T> {
    type Output = Ext<T>;
    fn add(self, rhs: Self) -> Self {
        Ext::add(&self, &rhs)
    }
}

impl<T: Scalar> std::ops::Sub for Ext<T> {
    type Output = Ext<T>;
    fn sub(self, rhs: Self) -> Self {
        Ext::sub(&self, &rhs)
    }
}

impl<T: Scalar> std::ops::Neg for Ext<T> {
    type Output = Ext<T>;
    fn neg(self) -> Self {
        Ext::neg(&self)
    }
}

impl<T: Scalar> fmt::Display for Ext<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::PosInf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = Ext<f64>;

    fn fin(x: f64) -> E {
        Ext::Finite(x)
    }

    #[test]
    fn addition_convention_table() {
        use Ext::*;
        let cases: Vec<(E, E, E)> = vec![
            (PosInf, NegInf, PosInf),
            (NegInf, PosInf, PosInf),
            (fin(3.0), fin(4.0), fin(7.0)),
            (NegInf, fin(5.0), NegInf),
            (fin(5.0), NegInf, NegInf),
            (PosInf, fin(-2.0), PosInf),
            (fin(-2.0), PosInf, PosInf),
            (PosInf, PosInf, PosInf),
            (NegInf, NegInf, NegInf),
        ];
        for (a, b, want) in cases {
            assert_eq!(a.add(&b), want);
        }
    }

    #[test]
    fn subtraction_is_add_of_negation() {
        use Ext::*;
        let a: E = PosInf;
        assert_eq!(a.sub(&PosInf), PosInf);
        assert_eq!(fin(1.0).sub(&PosInf), NegInf);
        assert_eq!(fin(1.0).sub(&fin(4.0)), fin(-3.0));
    }

    #[test]
    fn scaling_convention() {
        use Ext::*;
        assert_eq!(Ext::scale(&0.0, &PosInf), fin(0.0));
        assert_eq!(Ext::scale(&0.0, &NegInf), fin(0.0));
        assert_eq!(Ext::scale(&2.0, &fin(3.0)), fin(6.0));
        assert_eq!(Ext::scale(&-1.0, &PosInf), NegInf);
        assert_eq!(Ext::scale(&-3.0, &NegInf), PosInf);
    }

    #[test]
    fn total_order() {
        use Ext::*;
        let neg: E = NegInf;
        assert!(neg.cmp_ext(&fin(-1e18)).is_lt());
        assert!(fin(1e18).cmp_ext(&PosInf).is_lt());
        assert!(neg.cmp_ext(&PosInf).is_lt());
        assert_eq!(fin(2.0).max_ext(fin(1.0)), fin(2.0));
    }

    #[test]
    fn parts() {
        assert_eq!(fin(-3.0).pos_part(), fin(0.0));
        assert_eq!(fin(-3.0).neg_part(), fin(3.0));
        let inf: E = Ext::PosInf;
        assert_eq!(inf.neg_part(), fin(0.0));
        assert_eq!(inf.pos_part(), Ext::PosInf);
    }
}
