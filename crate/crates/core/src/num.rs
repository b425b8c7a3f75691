//! Scalar abstraction for the whole crate.
//!
//! Every numerical routine is generic over [`Real`], which is satisfied by
//! `f32` and `f64`. Concrete `f64` aliases for the main types live at the
//! crate root.

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable")
    }

    /// Conversion from a `usize` count.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable")
    }

    /// Lossy conversion to `f64`, mostly for error payloads and output.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand used throughout the crate bodies.
#[inline]
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::of(x)
}
