use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point type the numerical core is written against.
///
/// Implemented for `f32` and `f64`. All tolerances quoted in tests assume
/// `f64`; `f32` is supported for memory-constrained callers.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + FromStr + Display + Debug + Send + Sync + 'static
{
    /// Lossless widening used by the JSON encoders.
    fn to_f64_lossless(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }

    fn from_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

pub(crate) fn mean<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut n = 0usize;
    let mut acc = T::zero();
    for v in values {
        acc = acc + v;
        n += 1;
    }
    if n == 0 {
        T::zero()
    } else {
        acc / <T as Scalar>::from_usize(n)
    }
}
