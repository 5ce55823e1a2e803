//! Scalar abstraction so tableau construction and order-condition
//! checks run identically in f64 and in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Field operations needed by the tableau construction. Implemented for
/// `f64` (arbitrary gamma) and `BigRational` (exact coefficients).
pub trait CoefField: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` when dividing by a (numerical) zero.
    fn div(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_f64(&self) -> f64;
}

/// Tolerance below which an f64 coefficient counts as zero. Exact
/// degeneracies of the construction (gamma = 1/2, 1/3) produce exact
/// zeros; this only guards against representation noise.
const F64_ZERO_TOL: f64 = 1e-12;

impl CoefField for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if o.abs() < F64_ZERO_TOL {
            None
        } else {
            Some(self / o)
        }
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.abs() < F64_ZERO_TOL
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl CoefField for BigRational {
    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        BigRational::from_integer(BigInt::from(1))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Option<Self> {
        if Zero::is_zero(o) {
            None
        } else {
            Some(self / o)
        }
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn to_f64(&self) -> f64 {
        // Falls back to a sign-aware infinity for out-of-range values;
        // tableau coefficients never get near that.
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
}
