//! Scalar abstraction: the whole library is generic over the floating-point
//! type through this trait, with `f32` and `f64` as the shipped instances.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum<Self>
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` constant into the working scalar type.
///
/// All tuning constants and random draws in this crate are produced in `f64`
/// and narrowed through this function, so an `f32` build sees the same
/// sequence of values (rounded once) as an `f64` build.
#[inline]
pub fn real<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("f64 constant not representable in scalar type")
}

/// Convert a count into the working scalar type.
#[inline]
pub fn real_usize<T: Scalar>(v: usize) -> T {
    T::from_usize(v).expect("usize not representable in scalar type")
}
