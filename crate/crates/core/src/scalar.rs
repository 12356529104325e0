//! Scalar abstraction for times, energies and areas.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real-valued quantity used throughout the timing, energy and area models.
///
/// Counts stay integral (`u64`); everything measured in ns, pJ or mm² is a
/// `Scalar`. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
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
    /// Lossy conversion from an event count.
    fn from_count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable as float")
    }

    /// Conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable as float")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// A quantity split between the CPU side and the accelerator side.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, serde::Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Split<S> {
    pub cpu: S,
    pub acc: S,
}

impl<S: Scalar> Split<S> {
    pub fn new(cpu: S, acc: S) -> Self {
        Self { cpu, acc }
    }

    pub fn total(&self) -> S {
        self.cpu + self.acc
    }
}

impl<S: Scalar> std::ops::Add for Split<S> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            cpu: self.cpu + rhs.cpu,
            acc: self.acc + rhs.acc,
        }
    }
}
