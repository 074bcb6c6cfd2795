//! Arithmetic abstraction for the simplex kernel: double precision for
//! the hot path, arbitrary-precision rationals for exact oracle runs.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Field operations the simplex kernel needs, implemented for `f64` and
/// [`BigRational`].
pub trait Scalar:
    Clone
    + PartialOrd
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact arithmetic: all kernel tolerances collapse to zero.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// Conversion from a double; must be exact for finite inputs.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as num_traits::One>::one()
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite value required for exact arithmetic")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Fall back to a quotient of rounded parts for out-of-range values.
            let num = self.numer().to_f64().unwrap_or(f64::MAX);
            let den = self.denom().to_f64().unwrap_or(f64::MAX);
            num / den
        })
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Exact rational from an integer, used when building oracle problems.
pub fn rational_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}
