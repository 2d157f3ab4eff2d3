use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Scalar type used by every numerical routine in the crate.
///
/// Implemented for `f32` and `f64`. Everything above the scalar layer is
/// written against this trait; reports are always emitted in `f64`.
pub trait Real:
    'static
    + Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    /// Converts a count or index into this scalar.
    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion for reporting.
    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for [`Real::lit`] in generic code.
#[inline]
pub fn c<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Maximum of a slice ignoring NaN; `-inf` when empty.
pub fn max_of<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::neg_infinity(), |m, &x| if x > m { x } else { m })
}

/// Minimum of a slice ignoring NaN; `+inf` when empty.
pub fn min_of<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::infinity(), |m, &x| if x < m { x } else { m })
}

/// Maximum absolute value of a slice.
pub fn sup_abs<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}
