use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar backing every complex amplitude in the crate.
///
/// Implemented for `f32` and `f64`. Tolerances are written as `f64` literals
/// and mapped through [`Real::tol`], which widens them in proportion to the
/// machine epsilon of the target type, so an `f64` tolerance of `1e-10` stays
/// `1e-10` while the `f32` build gets a correspondingly looser bound.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + Sum + 'static
{
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn tol(x: f64) -> Self {
        let widen = Self::epsilon().to_f64().unwrap_or(f64::EPSILON) / f64::EPSILON;
        Self::of(x * widen.max(1.0))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
