//! Real scalar abstraction for the numeric layers.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable as the real part of operator coefficients.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Moduli below this are treated as exact zeros when merging terms.
    fn drop_threshold() -> Self;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("representable")
    }
}

impl Real for f32 {
    fn drop_threshold() -> Self {
        1e-7
    }
}

impl Real for f64 {
    fn drop_threshold() -> Self {
        1e-14
    }
}
