//! Accelerator reference-pattern transforms.
//!
//! A transform reorders the data addresses an accelerator segment touches
//! without changing which addresses are touched. Records keep their pc and
//! position; only the `data_vaddr` values move between the segment's memory
//! records.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HotspotPartition, SegmentKind, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    /// Original program order.
    ProgramOrder,
    /// Uniform shuffle driven by [`XorShift64Star`].
    Random { seed: u64 },
    /// Ascending page number, i.e. a streaming accelerator.
    Sorted,
}

impl PatternKind {
    /// Short name used in CSV output and on the command line.
    pub fn label(&self) -> &'static str {
        match self {
            PatternKind::ProgramOrder => "program",
            PatternKind::Random { .. } => "random",
            PatternKind::Sorted => "sorted",
        }
    }

    /// Parses `program`, `random` or `sorted`; `seed` feeds `random`.
    pub fn from_label(label: &str, seed: u64) -> Option<Self> {
        match label {
            "program" => Some(PatternKind::ProgramOrder),
            "random" => Some(PatternKind::Random { seed }),
            "sorted" => Some(PatternKind::Sorted),
            _ => None,
        }
    }

    /// Position in the canonical program/random/sorted ordering.
    pub fn ordinal(&self) -> u8 {
        match self {
            PatternKind::ProgramOrder => 0,
            PatternKind::Random { .. } => 1,
            PatternKind::Sorted => 2,
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PatternKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_label(s, 0).ok_or_else(|| format!("unknown pattern {s:?} (expected program, random or sorted)"))
    }
}

/// Marsaglia's xorshift64* generator.
///
/// State update, all arithmetic modulo 2^64:
///
/// ```text
/// x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;
/// output = x * 0x2545F4914F6CDD1D
/// ```
///
/// The initial state is `splitmix64(seed)`, replaced by the output constant
/// itself in the (unreachable in practice) case that it is zero.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

const XORSHIFT_MULT: u64 = 0x2545_F491_4F6C_DD1D;

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self {
            state: if s == 0 { XORSHIFT_MULT } else { s },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(XORSHIFT_MULT)
    }

    /// Index in `0..bound` by plain modulo reduction.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `ordinal`-th accelerator segment of a trace under
/// `Random { seed }`: `splitmix64(seed ^ splitmix64(ordinal))`.
pub fn segment_seed(seed: u64, ordinal: u64) -> u64 {
    splitmix64(seed ^ splitmix64(ordinal))
}

/// Reorders one segment's references.
///
/// Fisher–Yates for `Random`: for `i` from `n-1` down to `1`, swap `i` with
/// `rng.below(i + 1)`.
pub fn apply_pattern<T: Ord + Clone>(items: &[T], pattern: PatternKind) -> Vec<T> {
    let mut out = items.to_vec();
    match pattern {
        PatternKind::ProgramOrder => {}
        PatternKind::Sorted => out.sort(),
        PatternKind::Random { seed } => {
            let mut rng = XorShift64Star::new(seed);
            for i in (1..out.len()).rev() {
                let j = rng.below(i as u64 + 1) as usize;
                out.swap(i, j);
            }
        }
    }
    out
}

/// Applies `pattern` independently inside every accelerator segment.
///
/// Sorting by full virtual address orders references by page number, which
/// is what `Sorted` promises. Segment `k` (counting accelerator segments
/// only) of a `Random { seed }` transform uses `segment_seed(seed, k)`.
pub fn reorder_accelerator_refs(trace: &Trace, partition: &HotspotPartition, pattern: PatternKind) -> Trace {
    let mut out = trace.clone();
    if pattern == PatternKind::ProgramOrder {
        return out;
    }
    let acc = partition
        .segments()
        .iter()
        .filter(|s| s.kind == SegmentKind::Acc);
    for (ordinal, seg) in acc.enumerate() {
        let slots: Vec<usize> = seg
            .range()
            .filter(|&i| out.records[i].data_vaddr.is_some())
            .collect();
        let addrs: Vec<u64> = slots
            .iter()
            .map(|&i| out.records[i].data_vaddr.unwrap())
            .collect();
        let seg_pattern = match pattern {
            PatternKind::Random { seed } => PatternKind::Random {
                seed: segment_seed(seed, ordinal as u64),
            },
            other => other,
        };
        for (&slot, va) in slots.iter().zip(apply_pattern(&addrs, seg_pattern)) {
            out.records[slot].data_vaddr = Some(va);
        }
    }
    out
}
