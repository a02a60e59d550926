//! Scalar abstractions.
//!
//! Polynomial algorithms are written against [`Field`], which is satisfied by
//! [`Rational`](crate::Rational) for exact work and by `f32`/`f64` for quick numerics.
//! Archimedean densities are written against [`Real`], implemented for every
//! `num_traits::Float` and for the certified [`Interval`](crate::interval::Interval).

use std::fmt::Debug;
use std::ops::Neg;

use num_traits::{Float, FloatConst, Num, ToPrimitive};

use crate::interval::Interval;
use crate::Rational;

/// A field in which polynomial arithmetic can be carried out.
pub trait Field: Clone + Debug + PartialEq + Num + Neg<Output = Self> {}

impl<T> Field for T where T: Clone + Debug + PartialEq + Num + Neg<Output = T> {}

/// Real numbers as needed by the archimedean density.
pub trait Real: Clone + Debug {
    fn from_rational(q: &Rational) -> Self;
    fn pi() -> Self;
    fn sqrt(&self) -> Self;
    fn ln(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// Working precision in bits.
    fn precision_bits() -> u32;
    /// A bound on the absolute error of `to_f64`'s underlying value, if tracked.
    fn error_bound(&self) -> Option<f64> {
        None
    }
}

impl<T: Float + FloatConst + Debug> Real for T {
    fn from_rational(q: &Rational) -> Self {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        T::from(n / d).unwrap_or_else(T::nan)
    }
    fn pi() -> Self {
        T::PI()
    }
    fn sqrt(&self) -> Self {
        Float::sqrt(*self)
    }
    fn ln(&self) -> Self {
        Float::ln(*self)
    }
    fn add(&self, other: &Self) -> Self {
        *self + *other
    }
    fn mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn div(&self, other: &Self) -> Self {
        *self / *other
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn precision_bits() -> u32 {
        T::epsilon().log2().neg().to_u32().unwrap_or(0) + 1
    }
}

impl Real for Interval {
    fn from_rational(q: &Rational) -> Self {
        Interval::from_rational(q, Interval::DEFAULT_PRECISION)
    }
    fn pi() -> Self {
        Interval::pi(Interval::DEFAULT_PRECISION)
    }
    fn sqrt(&self) -> Self {
        Interval::sqrt(self)
    }
    fn ln(&self) -> Self {
        Interval::ln(self)
    }
    fn add(&self, other: &Self) -> Self {
        Interval::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Interval::mul(self, other)
    }
    fn div(&self, other: &Self) -> Self {
        Interval::div(self, other)
    }
    fn to_f64(&self) -> f64 {
        self.midpoint_f64()
    }
    fn precision_bits() -> u32 {
        Interval::DEFAULT_PRECISION
    }
    fn error_bound(&self) -> Option<f64> {
        Some(self.radius_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_precision_bits() {
        assert_eq!(<f64 as Real>::precision_bits(), 53);
        assert_eq!(<f32 as Real>::precision_bits(), 24);
    }

    #[test]
    fn generic_pi_quarter_agrees_across_scalars() {
        fn quarter_pi<R: Real>() -> f64 {
            R::pi().div(&R::from_rational(&Rational::from_integer(4.into()))).to_f64()
        }
        let exact = std::f64::consts::FRAC_PI_4;
        assert!((quarter_pi::<f64>() - exact).abs() < 1e-15);
        assert!((quarter_pi::<f32>() - exact).abs() < 1e-6);
        assert!((quarter_pi::<Interval>() - exact).abs() < 1e-15);
    }
}
