//! Scalar abstraction: the numeric type the whole pipeline is generic over.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar usable throughout the library: `f32` or `f64`.
///
/// Combines the field/elementary-function operations of
/// [`nalgebra::RealField`] with the primitive conversions of `num-traits`.
pub trait Float: Copy + nalgebra::RealField + FromPrimitive + ToPrimitive {
    /// Lossy conversion from `f64`, for constants and tolerances.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 constant must convert")
    }

    /// Lossy conversion to `f64`, for reporting and diagnostics.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("real scalar must convert to f64")
    }
}

impl Float for f32 {}
impl Float for f64 {}
