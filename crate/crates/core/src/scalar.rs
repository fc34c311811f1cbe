//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the solver is generic over.
///
/// Implemented for `f32` and `f64`. Everything in the crate is written against
/// this trait; tolerances are stored as `f64` in the configuration types and
/// converted with [`Real::of`] at the point of use. The reference
/// tolerances (1e-13 residuals and friends) only make sense for `f64`, so `f32`
/// is mostly useful for the projection primitives.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + LowerExp + Debug + Send + Sync + 'static
{
    /// Lossy conversion from a double, used for tolerances and literals.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 is representable")
    }

    /// Conversion to `f64` for reporting.
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
