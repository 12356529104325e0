//! First-order performance, energy and area model.
//!
//! Runtime is the sum of four terms: CPU compute, CPU translation,
//! accelerator compute and accelerator translation. The compute terms are
//! analytic (`instructions · CPI / GHz`, divided by the speedup on the
//! accelerator); the translation terms come from the MMU simulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmu::{walk_cost, MmuConfig, MmuStats, TlbConfig, TranslationMode};
use crate::scalar::{Scalar, Split};
use crate::trace::{HotspotPartition, SegmentKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CalibrationParams<S> {
    /// Cycles per instruction when not walking page tables.
    pub cpi_app: S,
    pub clock_ghz: S,
    pub accel_speedup: S,
    #[serde(default)]
    pub notes: String,
}

impl<S: Scalar> CalibrationParams<S> {
    pub fn new(cpi_app: S, clock_ghz: S, accel_speedup: S) -> Self {
        Self {
            cpi_app,
            clock_ghz,
            accel_speedup,
            notes: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: S| v > S::zero() && v.is_finite();
        if !finite_pos(self.cpi_app) || !finite_pos(self.clock_ghz) {
            return Err(Error::InvalidConfig("cpi_app and clock_ghz must be positive".into()));
        }
        if !(self.accel_speedup >= S::one() && self.accel_speedup.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "accel_speedup = {} must be at least 1",
                self.accel_speedup
            )));
        }
        Ok(())
    }

    /// Ideal CPU time per instruction, ns.
    pub fn cpu_ns_per_instr(&self) -> S {
        self.cpi_app / self.clock_ghz
    }

    /// Ideal accelerator time per instruction, ns.
    pub fn acc_ns_per_instr(&self) -> S {
        self.cpu_ns_per_instr() / self.accel_speedup
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct TimeBreakdown<S> {
    pub cpu_non_mmu_ns: S,
    pub cpu_mmu_ns: S,
    pub acc_non_mmu_ns: S,
    pub acc_mmu_ns: S,
}

impl<S: Scalar> TimeBreakdown<S> {
    pub fn total(&self) -> S {
        self.cpu_non_mmu_ns + self.cpu_mmu_ns + self.acc_non_mmu_ns + self.acc_mmu_ns
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CostResult<S> {
    pub breakdown: TimeBreakdown<S>,
    pub runtime_ns: S,
    /// Runtime over the software-only baseline runtime.
    pub normalized_runtime: S,
    pub mmu_energy_pj: Split<S>,
    pub mmu_area_mm2: Split<S>,
}

pub fn cpu_compute_time<S: Scalar>(instrs: u64, p: &CalibrationParams<S>) -> S {
    S::from_count(instrs) * p.cpi_app / p.clock_ghz
}

pub fn acc_compute_time<S: Scalar>(instrs: u64, p: &CalibrationParams<S>) -> S {
    cpu_compute_time(instrs, p) / p.accel_speedup
}

/// Amdahl's law: normalized runtime when a fraction `f` of the work runs
/// `s` times faster.
pub fn amdahl_bound<S: Scalar>(f: S, s: S) -> S {
    (S::one() - f) + f / s
}

/// Normalized runtime if every accelerator reference hit in `smallest_l1`.
///
/// The CPU side keeps its simulated translation time `cpu_mmu_ns`.
pub fn ideal_l1_bound<S: Scalar>(
    partition: &HotspotPartition,
    acc_refs: u64,
    smallest_l1: &TlbConfig<S>,
    p: &CalibrationParams<S>,
    cpu_mmu_ns: S,
    baseline_runtime_ns: S,
) -> Result<S> {
    if baseline_runtime_ns <= S::zero() {
        return Err(Error::ZeroBaseline);
    }
    let breakdown = TimeBreakdown {
        cpu_non_mmu_ns: cpu_compute_time(partition.instructions(SegmentKind::Cpu), p),
        cpu_mmu_ns,
        acc_non_mmu_ns: acc_compute_time(partition.instructions(SegmentKind::Acc), p),
        acc_mmu_ns: S::from_count(acc_refs) * smallest_l1.access_time_ns,
    };
    Ok(breakdown.total() / baseline_runtime_ns)
}

/// Area of one MMU.
pub fn mmu_area<S: Scalar>(cfg: &MmuConfig<S>) -> S {
    cfg.area_mm2()
}

/// CPU/accelerator area split of a system. Remote modes have no accelerator
/// MMU beyond the optional filter TLB.
pub fn system_area<S: Scalar>(cpu: &MmuConfig<S>, acc: Option<&MmuConfig<S>>, mode: &TranslationMode<S>) -> Split<S> {
    let acc_area = match mode {
        TranslationMode::Local => acc.map(mmu_area).unwrap_or_else(S::zero),
        TranslationMode::RemoteNoMmu { .. } => S::zero(),
        TranslationMode::RemoteFiltered { filter, .. } => filter.area_mm2,
    };
    Split::new(mmu_area(cpu), acc_area)
}

/// Translation energy of a locally translated stream, recomputed from its
/// event counts.
pub fn mmu_energy<S: Scalar>(stats: &MmuStats<S>, cfg: &MmuConfig<S>) -> S {
    let probe = |n: u64, t: Option<&TlbConfig<S>>| t.map_or(S::zero(), |t| S::from_count(n) * t.access_energy_pj);
    probe(stats.l1_probes, cfg.l1.as_ref())
        + probe(stats.l2_probes, cfg.l2.as_ref())
        + S::from_count(stats.walks) * walk_cost(&cfg.ptw).1
}

/// Energy split of a remotely translated stream: the filter on the
/// accelerator, CPU L2 probes and CPU walks on the CPU.
pub fn remote_mmu_energy<S: Scalar>(stats: &MmuStats<S>, filter: Option<&TlbConfig<S>>, cpu: &MmuConfig<S>) -> Split<S> {
    let acc = filter.map_or(S::zero(), |f| S::from_count(stats.l1_probes) * f.access_energy_pj);
    let l2 = cpu.l2.as_ref().map_or(S::zero(), |t| S::from_count(stats.l2_probes) * t.access_energy_pj);
    Split::new(l2 + S::from_count(stats.walks) * walk_cost(&cpu.ptw).1, acc)
}

/// Combines per-segment translation stats with the analytic compute terms.
///
/// `segment_stats[i]` belongs to `partition.segments()[i]`. Time spent on a
/// segment's translation is charged to that segment's side; energy spent in
/// CPU structures on behalf of accelerator probes is charged to the CPU.
/// With `baseline = None` the result is its own baseline (normalized 1).
pub fn assemble<S: Scalar>(
    partition: &HotspotPartition,
    segment_stats: &[MmuStats<S>],
    p: &CalibrationParams<S>,
    area: Split<S>,
    baseline: Option<&CostResult<S>>,
) -> Result<CostResult<S>> {
    if segment_stats.len() != partition.segments().len() {
        return Err(Error::InvalidConfig(format!(
            "{} segment stats for {} segments",
            segment_stats.len(),
            partition.segments().len()
        )));
    }
    let mut cpu = MmuStats::default();
    let mut acc = MmuStats::default();
    for (seg, stats) in partition.segments().iter().zip(segment_stats) {
        match seg.kind {
            SegmentKind::Cpu => cpu += *stats,
            SegmentKind::Acc => acc += *stats,
        }
    }
    let breakdown = TimeBreakdown {
        cpu_non_mmu_ns: cpu_compute_time(partition.instructions(SegmentKind::Cpu), p),
        cpu_mmu_ns: cpu.mmu_time_ns,
        acc_non_mmu_ns: acc_compute_time(partition.instructions(SegmentKind::Acc), p),
        acc_mmu_ns: acc.mmu_time_ns,
    };
    let runtime_ns = breakdown.total();
    let normalized_runtime = match baseline {
        None if runtime_ns > S::zero() => S::one(),
        None => return Err(Error::ZeroBaseline),
        Some(b) if b.runtime_ns > S::zero() => runtime_ns / b.runtime_ns,
        Some(_) => return Err(Error::ZeroBaseline),
    };
    let energy = Split::new(
        cpu.mmu_energy_pj + acc.remote_energy_pj,
        acc.mmu_energy_pj - acc.remote_energy_pj,
    );
    Ok(CostResult {
        breakdown,
        runtime_ns,
        normalized_runtime,
        mmu_energy_pj: energy,
        mmu_area_mm2: area,
    })
}
