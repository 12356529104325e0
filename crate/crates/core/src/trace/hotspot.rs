use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SegmentKind {
    Cpu,
    Acc,
}

/// A contiguous run of trace records, `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub start: usize,
    pub end: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }
}

/// Alternating CPU/accelerator segments tiling a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HotspotPartition {
    segments: Vec<Segment>,
    trace_len: usize,
}

impl HotspotPartition {
    /// Builds a partition from explicit segments, checking that they tile
    /// `0..trace_len` in order.
    pub fn from_segments(segments: Vec<Segment>, trace_len: usize) -> Result<Self> {
        let mut next = 0;
        for s in &segments {
            if s.start != next || s.end < s.start {
                return Err(Error::InvalidConfig(format!(
                    "segment {}..={} does not continue the tiling at {next}",
                    s.start, s.end
                )));
            }
            next = s.end + 1;
        }
        if next != trace_len {
            return Err(Error::InvalidConfig(format!(
                "segments cover {next} records, trace has {trace_len}"
            )));
        }
        Ok(Self {
            segments,
            trace_len,
        })
    }

    /// Everything on the CPU.
    pub fn all_cpu(trace_len: usize) -> Self {
        let segments = if trace_len == 0 {
            Vec::new()
        } else {
            vec![Segment {
                kind: SegmentKind::Cpu,
                start: 0,
                end: trace_len - 1,
            }]
        };
        Self {
            segments,
            trace_len,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn trace_len(&self) -> usize {
        self.trace_len
    }

    pub fn instructions(&self, kind: SegmentKind) -> u64 {
        self.segments
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.len() as u64)
            .sum()
    }

    pub fn acc_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Acc)
    }
}

/// Splits a trace into accelerator hotspots and CPU code.
///
/// A pc is hot when it executes strictly more than `hot_exec_threshold`
/// times. Maximal runs of consecutive hot records at least `min_hotspot_len`
/// long go to the accelerator; every other record stays on the CPU. Any
/// non-hot record breaks a run, memory reference or not.
pub fn identify_hotspots(trace: &Trace, hot_exec_threshold: u64, min_hotspot_len: usize) -> HotspotPartition {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for r in &trace.records {
        *counts.entry(r.pc).or_default() += 1;
    }
    let hot: Vec<bool> = trace
        .records
        .iter()
        .map(|r| counts[&r.pc] > hot_exec_threshold)
        .collect();

    let mut segments: Vec<Segment> = Vec::new();
    let mut push = |kind: SegmentKind, start: usize, end: usize| match segments.last_mut() {
        Some(last) if last.kind == kind => last.end = end,
        _ => segments.push(Segment { kind, start, end }),
    };

    let mut i = 0;
    while i < hot.len() {
        let mut j = i;
        while j < hot.len() && hot[j] == hot[i] {
            j += 1;
        }
        let kind = if hot[i] && j - i >= min_hotspot_len {
            SegmentKind::Acc
        } else {
            SegmentKind::Cpu
        };
        push(kind, i, j - 1);
        i = j;
    }

    HotspotPartition {
        segments,
        trace_len: trace.len(),
    }
}

/// Share of dynamic instructions assigned to the accelerator.
pub fn accelerated_fraction<S: Scalar>(p: &HotspotPartition) -> S {
    if p.trace_len == 0 {
        return S::zero();
    }
    S::from_count(p.instructions(SegmentKind::Acc)) / S::from_count(p.trace_len as u64)
}
