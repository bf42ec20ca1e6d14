//! Scalar abstraction used by every numeric kernel in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar type for device models, fitters and simulators.
///
/// Implemented for `f32` and `f64`. `f64` is the default type parameter on
/// every generic record in the crate and the precision the bundled
/// command-line tools run at; `f32` is available for memory-bound sweeps.
pub trait Real:
    Float
    + FromPrimitive
    + Debug
    + Display
    + Sum
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into the scalar type.
    ///
    /// Rounds when narrowing to `f32`; never fails for finite input.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal")
    }

    /// Lossy widening back to `f64`, mainly for error messages.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}
