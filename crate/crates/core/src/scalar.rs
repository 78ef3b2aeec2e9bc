//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::dd::DoubleDouble;

/// Real scalar the algorithms are written against.
///
/// Implemented for `f32`, `f64` and [`DoubleDouble`],
/// which is what the extension solver escalates to when the linearized
/// constraint system is badly conditioned.
pub trait Real: Float + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits the scalar")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    fn pi() -> Self {
        Self::lit(std::f64::consts::PI)
    }
}

impl Real for f32 {}

impl Real for f64 {}

impl Real for DoubleDouble {
    fn pi() -> Self {
        DoubleDouble::PI
    }
}
