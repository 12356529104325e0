//! Synthetic trace generation.
//!
//! Generated traces have two phases. A cold initialisation phase executes
//! straight-line code (every pc unique) and is followed by a hot loop nest:
//! an inner body of `loop_pcs` instructions runs for a random number of trips
//! (a power of two between 1 and 256), then a single cold "glue" instruction
//! with a fresh pc leaves the inner loop before the next one starts. The
//! varying trip counts give hot runs whose lengths span several orders of
//! magnitude, so different minimum hotspot sizes select different amounts of
//! work.
//!
//! Memory references are spread evenly: record `i` of `n` carries one iff
//! `floor((i+1)·m/n) > floor(i·m/n)`, where `m = round(mem_ref_ratio·n)`.
//! Every data page lies in the contiguous working set starting at
//! [`WORKING_SET_BASE_VPN`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmu::PAGE_SHIFT;

use super::{InstructionRecord, Trace, VA_MAX};

/// First page of the generated working set.
pub const WORKING_SET_BASE_VPN: u64 = 0x1_0000;
const LOOP_PC_BASE: u64 = 0x40_0000;
const COLD_PC_BASE: u64 = 0x100_0000;
const MAX_TRIP_LOG2: u32 = 8;
const ADDR_RNG_STREAM: u64 = 0xA5A5_5A5A_0F0F_F0F0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    /// Reference `k` touches working-set page `(k·pages) mod working_set_pages`.
    Stride { pages: u64 },
    UniformRandom,
    /// Page rank drawn from a Zipf law; rank 1 is the first working-set page.
    Zipf { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(default = "default_name")]
    pub name: String,
    pub instr_count: u64,
    pub mem_ref_ratio: f64,
    pub working_set_pages: u64,
    pub locality: Locality,
    pub loop_pcs: u64,
    /// Upper bound on inner-loop body executions; the hot phase is at most
    /// `loop_pcs · loop_iterations` instructions long.
    pub loop_iterations: u64,
    pub seed: u64,
}

fn default_name() -> String {
    "synthetic".to_string()
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.instr_count == 0 {
            return Err(Error::InvalidSpec("instr_count must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.mem_ref_ratio) {
            return Err(Error::InvalidSpec(format!(
                "mem_ref_ratio {} is outside [0, 1]",
                self.mem_ref_ratio
            )));
        }
        if self.working_set_pages == 0 && self.mem_ref_count() > 0 {
            return Err(Error::InvalidSpec(
                "working_set_pages is zero but the trace has memory references".into(),
            ));
        }
        if (WORKING_SET_BASE_VPN + self.working_set_pages) << PAGE_SHIFT > VA_MAX + 1 {
            return Err(Error::InvalidSpec(format!(
                "working set of {} pages does not fit in 48 bits",
                self.working_set_pages
            )));
        }
        if COLD_PC_BASE + 4 * self.instr_count > VA_MAX {
            return Err(Error::InvalidSpec("instr_count too large for the code layout".into()));
        }
        if let Locality::Zipf { exponent } = self.locality {
            if !(exponent >= 0.0 && exponent.is_finite()) {
                return Err(Error::InvalidSpec(format!("zipf exponent {exponent} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    /// Number of records that carry a data reference.
    pub fn mem_ref_count(&self) -> u64 {
        ((self.mem_ref_ratio * self.instr_count as f64).round() as u64).min(self.instr_count)
    }
}

/// Generates a trace; identical specs give identical traces.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Trace> {
    spec.validate()?;
    let n = spec.instr_count;
    let hot_len = spec.loop_pcs.saturating_mul(spec.loop_iterations).min(n);
    let cold_len = n - hot_len;

    let mut pcs: Vec<u64> = Vec::with_capacity(n as usize);
    let mut next_cold = 0u64;
    let mut cold_pc = || {
        let pc = COLD_PC_BASE + 4 * next_cold;
        next_cold += 1;
        pc
    };
    for _ in 0..cold_len {
        pcs.push(cold_pc());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    'hot: while (pcs.len() as u64) < n {
        let trips = 1u64 << rng.random_range(0..=MAX_TRIP_LOG2);
        for _ in 0..trips {
            for b in 0..spec.loop_pcs {
                if pcs.len() as u64 == n {
                    break 'hot;
                }
                pcs.push(LOOP_PC_BASE + 4 * b);
            }
        }
        if pcs.len() as u64 == n {
            break;
        }
        pcs.push(cold_pc());
    }

    let mut addrs = AddressStream::new(spec)?;
    let refs = spec.mem_ref_count() as u128;
    let records = pcs
        .into_iter()
        .enumerate()
        .map(|(i, pc)| {
            let i = i as u128;
            let n = n as u128;
            let has_ref = (i + 1) * refs / n > i * refs / n;
            InstructionRecord::new(pc, has_ref.then(|| addrs.next()))
        })
        .collect();
    Ok(Trace::new(spec.name.clone(), records))
}

struct AddressStream {
    rng: ChaCha8Rng,
    locality: Locality,
    pages: u64,
    zipf: Option<Zipf<f64>>,
    k: u64,
}

impl AddressStream {
    fn new(spec: &SyntheticSpec) -> Result<Self> {
        let zipf = match spec.locality {
            Locality::Zipf { exponent } if spec.working_set_pages > 0 => Some(
                Zipf::new(spec.working_set_pages as f64, exponent)
                    .map_err(|e| Error::InvalidSpec(format!("zipf: {e}")))?,
            ),
            _ => None,
        };
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(spec.seed ^ ADDR_RNG_STREAM),
            locality: spec.locality,
            pages: spec.working_set_pages,
            zipf,
            k: 0,
        })
    }

    fn next(&mut self) -> u64 {
        let page = match self.locality {
            Locality::Stride { pages } => (self.k as u128 * pages as u128 % self.pages as u128) as u64,
            Locality::UniformRandom => self.rng.random_range(0..self.pages),
            Locality::Zipf { .. } => {
                let rank = self.zipf.as_ref().expect("zipf built").sample(&mut self.rng) as u64;
                rank.clamp(1, self.pages) - 1
            }
        };
        let offset = (self.k * 64) % (1 << PAGE_SHIFT);
        self.k += 1;
        ((WORKING_SET_BASE_VPN + page) << PAGE_SHIFT) | offset
    }
}
