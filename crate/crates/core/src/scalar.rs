//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Real field the measures, divergences and solvers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances throughout the crate are
/// written as `f64` literals and converted with [`Scalar::lit`].
pub trait Scalar:
    Float + FromPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion to `f64`, used by serialization and reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Coordinate-wise absolute tolerance under which two points are the same atom.
pub const POINT_TOL: f64 = 1e-9;

/// Weights in `[-WEIGHT_TOL, 0)` are treated as rounding noise and clamped to zero.
pub const WEIGHT_TOL: f64 = 1e-12;
