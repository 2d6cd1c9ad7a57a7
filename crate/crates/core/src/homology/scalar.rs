//! Coefficient arithmetic shared by the elimination routines: checked
//! machine integers first, `BigInt` when those overflow.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub(crate) trait Scalar: Clone + std::fmt::Debug {
    fn from_i64(v: i64) -> Self;
    fn is_nil(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `self - f * x`, or `None` on overflow.
    fn sub_mul(&self, f: &Self, x: &Self) -> Option<Self>;
    /// `self * u` for a unit `u`.
    fn mul_unit(&self, u: &Self) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn sub_mul(&self, f: &Self, x: &Self) -> Option<Self> {
        self.checked_sub(f.checked_mul(*x)?)
    }
    fn mul_unit(&self, u: &Self) -> Option<Self> {
        self.checked_mul(*u)
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn sub_mul(&self, f: &Self, x: &Self) -> Option<Self> {
        Some(self - f * x)
    }
    fn mul_unit(&self, u: &Self) -> Option<Self> {
        Some(self * u)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}
