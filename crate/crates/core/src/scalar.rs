//! Scalar abstraction for the closed-form analytics and topology rates.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Real scalar: `f32` or `f64`.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_count(n: u32) -> Self {
        Self::from_u32(n).expect("count representable in scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}
