use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the solvers are generic over.
///
/// Implemented for `f32` and `f64`. Distances, weights, LP coefficients and
/// objective values all live in this type; counts and indices stay `usize`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Absolute tolerance for feasibility and metric checks.
    fn tol() -> Self;

    /// Pivot threshold below which a tableau entry counts as zero.
    fn pivot_eps() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    #[inline]
    fn tol() -> Self {
        1e-9
    }

    #[inline]
    fn pivot_eps() -> Self {
        1e-11
    }
}

impl Real for f32 {
    #[inline]
    fn tol() -> Self {
        1e-4
    }

    #[inline]
    fn pivot_eps() -> Self {
        1e-6
    }
}
