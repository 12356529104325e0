//! Component parameter packs: calibration plus per-size TLB and PTW costs.
//!
//! The pack bundled with the crate (`placeholder()`) is a labelled
//! placeholder, not CACTI or RTL output.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::CalibrationParams;
use crate::error::{Error, Result};
use crate::mmu::{PtwConfig, TlbConfig};
use crate::scalar::Scalar;

const PLACEHOLDER_JSON: &str = include_str!("../data/placeholder_params.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    pub entries: usize,
    pub ways: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PtwParams<S> {
    pub threads: usize,
    pub area_mm2: S,
}

fn four() -> usize {
    4
}

fn default_filter() -> Geometry {
    Geometry { entries: 64, ways: 4 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ParamPack<S> {
    #[serde(default)]
    pub description: String,
    #[serde(flatten)]
    pub calibration: CalibrationParams<S>,
    pub walk_latency_ns: S,
    pub walk_mem_access_energy_pj: S,
    pub one_way_delay_ns: S,
    pub tlbs: Vec<TlbConfig<S>>,
    pub ptws: Vec<PtwParams<S>>,
    /// Associativity of accelerator L2 TLBs.
    #[serde(default = "four")]
    pub acc_l2_ways: usize,
    /// Associativity of CPU L2 TLBs.
    #[serde(default = "four")]
    pub cpu_l2_ways: usize,
    /// Geometry of the filter TLB in filtered remote mode.
    #[serde(default = "default_filter")]
    pub filter: Geometry,
}

impl<S: Scalar> ParamPack<S> {
    pub fn placeholder() -> Self {
        Self::from_json_str(PLACEHOLDER_JSON).expect("bundled placeholder params are valid")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let pack: Self = serde_json::from_str(s)?;
        pack.validate()?;
        Ok(pack)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("param pack serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.calibration.validate()?;
        for t in &self.tlbs {
            t.validate()?;
        }
        for (i, a) in self.tlbs.iter().enumerate() {
            if self.tlbs[..i].iter().any(|b| (b.entries, b.ways) == (a.entries, a.ways)) {
                return Err(Error::InvalidConfig(format!("TLB {} listed twice", a.label())));
            }
        }
        for p in &self.ptws {
            self.ptw(p.threads)?.validate()?;
        }
        if !(self.one_way_delay_ns >= S::zero() && self.one_way_delay_ns.is_finite()) {
            return Err(Error::InvalidConfig("one_way_delay_ns must be non-negative".into()));
        }
        Ok(())
    }

    pub fn tlb(&self, entries: usize, ways: usize) -> Result<TlbConfig<S>> {
        self.tlbs
            .iter()
            .find(|t| t.entries == entries && t.ways == ways)
            .cloned()
            .ok_or_else(|| Error::MissingParameter(format!("TLB {entries}x{ways}")))
    }

    pub fn ptw(&self, threads: usize) -> Result<PtwConfig<S>> {
        let p = self
            .ptws
            .iter()
            .find(|p| p.threads == threads)
            .ok_or_else(|| Error::MissingParameter(format!("PTW with {threads} threads")))?;
        Ok(PtwConfig {
            threads,
            walk_latency_ns: self.walk_latency_ns,
            walk_mem_access_energy_pj: self.walk_mem_access_energy_pj,
            area_mm2: p.area_mm2,
        })
    }

    pub fn filter_tlb(&self) -> Result<TlbConfig<S>> {
        self.tlb(self.filter.entries, self.filter.ways)
    }
}
