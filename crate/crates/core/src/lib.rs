//! Trace-driven MMU simulation and design-space exploration for
//! heterogeneous CPU + accelerator systems.
//!
//! The pipeline: a [`trace::Trace`] is partitioned into CPU and accelerator
//! segments by [`trace::identify_hotspots`]; each segment's data references
//! are translated by an [`mmu::LocalMmu`] (or remotely through the CPU's L2
//! TLB); [`cost::assemble`] turns the per-segment stats into a four-term
//! runtime, energy and area; [`dse`] sweeps the configuration space and
//! extracts Pareto frontiers.
//!
//! Everything measured in ns, pJ or mm² is generic over [`Scalar`]
//! (`f32` or `f64`); the `*F64` / `*F32` aliases below fix the precision.

pub mod cost;
pub mod dse;
pub mod error;
pub mod manifest;
pub mod mmu;
pub mod params;
pub mod scalar;
pub mod trace;

pub use error::{Error, Result};
pub use scalar::{Scalar, Split};

pub type MmuConfigF64 = mmu::MmuConfig<f64>;
pub type MmuConfigF32 = mmu::MmuConfig<f32>;
pub type MmuStatsF64 = mmu::MmuStats<f64>;
pub type ParamPackF64 = params::ParamPack<f64>;
pub type ParamPackF32 = params::ParamPack<f32>;
pub type CostResultF64 = cost::CostResult<f64>;
pub type CostResultF32 = cost::CostResult<f32>;
pub type SweepResultF64 = dse::SweepResult<f64>;
pub type SweepResultF32 = dse::SweepResult<f32>;
