use serde::{Deserialize, Serialize};

use super::PT_LEVELS;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A page table walker able to run `threads` walks concurrently.
///
/// Walk latency is one average figure (typically taken from performance
/// counters on the calibration machine); the cache hierarchy that decides
/// it is not part of the explored space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PtwConfig<S> {
    pub threads: usize,
    pub walk_latency_ns: S,
    /// Energy of one page-table-entry fetch from the cache hierarchy.
    pub walk_mem_access_energy_pj: S,
    pub area_mm2: S,
}

impl<S: Scalar> PtwConfig<S> {
    pub fn levels(&self) -> u32 {
        PT_LEVELS
    }

    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::InvalidConfig("PTW needs at least one thread".into()));
        }
        if !(self.walk_latency_ns > S::zero() && self.walk_latency_ns.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "walk_latency_ns = {} must be positive",
                self.walk_latency_ns
            )));
        }
        for (name, v) in [
            ("walk_mem_access_energy_pj", self.walk_mem_access_energy_pj),
            ("area_mm2", self.area_mm2),
        ] {
            if !(v >= S::zero() && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("PTW {name} = {v} must be non-negative")));
            }
        }
        Ok(())
    }
}

/// `(latency_ns, energy_pj)` of one walk: the configured latency, and one
/// PTE fetch per radix level.
pub fn walk_cost<S: Scalar>(ptw: &PtwConfig<S>) -> (S, S) {
    (
        ptw.walk_latency_ns,
        S::from_count(PT_LEVELS as u64) * ptw.walk_mem_access_energy_pj,
    )
}

/// `threads` identical servers handing out walks first-come first-served.
///
/// Requests must arrive in non-decreasing issue time; each one takes the
/// server that frees up earliest (lowest index on ties).
#[derive(Debug, Clone)]
pub struct WalkScheduler<S> {
    free_at: Vec<S>,
    latency: S,
}

impl<S: Scalar> WalkScheduler<S> {
    pub fn new(threads: usize, latency: S) -> Self {
        Self {
            free_at: vec![S::zero(); threads.max(1)],
            latency,
        }
    }

    /// Makes every server idle from time zero.
    pub fn reset(&mut self) {
        self.free_at.iter_mut().for_each(|t| *t = S::zero());
    }

    /// Schedules a walk issued at `issue` and returns its completion time.
    pub fn schedule(&mut self, issue: S) -> S {
        let (idx, free) = self
            .free_at
            .iter()
            .copied()
            .enumerate()
            .fold((0, S::infinity()), |best, (i, t)| if t < best.1 { (i, t) } else { best });
        let done = issue.max(free) + self.latency;
        self.free_at[idx] = done;
        done
    }
}
