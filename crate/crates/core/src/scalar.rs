//! Numeric abstraction for currency, statistics and similarity scores.
//!
//! Inventory is always counted in whole units (`u64`); everything measured in
//! money or as a ratio is generic over [`Scalar`] so the simulator can run in
//! `f32` or `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar usable for costs and statistics: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumCast
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts a unit count into the scalar type.
    fn from_units(units: u64) -> Self {
        <Self as NumCast>::from(units).expect("unit count fits in a float")
    }

    /// Converts an `f64` literal or configuration value into the scalar type.
    fn lit(value: f64) -> Self {
        <Self as NumCast>::from(value).expect("finite f64 fits in scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
