//! Evaluating one system configuration on one workload.

use crate::cost::{assemble, system_area, CalibrationParams, CostResult};
use crate::error::{Error, Result};
use crate::mmu::{vpn_of, LocalMmu, MmuConfig, MmuStats, RemoteTranslator, TimedRef, TimingModel, TranslationMode};
use crate::scalar::Scalar;
use crate::trace::{accelerated_fraction, reorder_accelerator_refs, HotspotPartition, PatternKind, SegmentKind, Trace};

use super::SystemConfig;

/// The data references of one segment with their ideal issue times.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRefs<S> {
    pub kind: SegmentKind,
    pub instrs: u64,
    pub refs: Vec<TimedRef<S>>,
}

/// A partitioned trace with its accelerator references in a given order,
/// ready for translation.
///
/// A reference's issue time is its instruction's offset within the segment
/// times the ideal per-instruction time of the engine running it.
#[derive(Debug, Clone)]
pub struct Workload<S> {
    pub name: String,
    pub partition: HotspotPartition,
    pub pattern: PatternKind,
    pub calibration: CalibrationParams<S>,
    pub segments: Vec<SegmentRefs<S>>,
}

impl<S: Scalar> Workload<S> {
    pub fn new(
        trace: &Trace,
        partition: &HotspotPartition,
        pattern: PatternKind,
        calibration: &CalibrationParams<S>,
    ) -> Result<Self> {
        if trace.is_empty() {
            return Err(Error::EmptyInput("trace"));
        }
        if partition.trace_len() != trace.len() {
            return Err(Error::InvalidConfig(format!(
                "partition covers {} records, trace has {}",
                partition.trace_len(),
                trace.len()
            )));
        }
        let ordered = reorder_accelerator_refs(trace, partition, pattern);
        let mut segments = Vec::with_capacity(partition.segments().len());
        for seg in partition.segments() {
            let per_instr = match seg.kind {
                SegmentKind::Cpu => calibration.cpu_ns_per_instr(),
                SegmentKind::Acc => calibration.acc_ns_per_instr(),
            };
            let mut refs = Vec::new();
            for (offset, rec) in ordered.records[seg.range()].iter().enumerate() {
                if let Some(va) = rec.data_vaddr {
                    refs.push(TimedRef {
                        issue_ns: S::from_count(offset as u64) * per_instr,
                        vpn: vpn_of(va)?,
                    });
                }
            }
            segments.push(SegmentRefs {
                kind: seg.kind,
                instrs: seg.len() as u64,
                refs,
            });
        }
        Ok(Self {
            name: trace.name.clone(),
            partition: partition.clone(),
            pattern,
            calibration: calibration.clone(),
            segments,
        })
    }

    /// The whole trace on the CPU, in program order.
    pub fn software_only(trace: &Trace, calibration: &CalibrationParams<S>) -> Result<Self> {
        Self::new(
            trace,
            &HotspotPartition::all_cpu(trace.len()),
            PatternKind::ProgramOrder,
            calibration,
        )
    }

    pub fn refs(&self, kind: SegmentKind) -> u64 {
        self.segments
            .iter()
            .filter(|s| s.kind == kind)
            .map(|s| s.refs.len() as u64)
            .sum()
    }

    pub fn accelerated_fraction(&self) -> S {
        accelerated_fraction(&self.partition)
    }
}

/// Runs every `kind` segment through one MMU, in order. Entries for the
/// other kind are zero, so the CPU-side and accelerator-side vectors of a
/// local-mode system add up to its per-segment stats.
pub fn simulate_side<S: Scalar>(w: &Workload<S>, cfg: &MmuConfig<S>, kind: SegmentKind) -> Vec<MmuStats<S>> {
    let timing = match kind {
        SegmentKind::Cpu => TimingModel::Cpu,
        SegmentKind::Acc => TimingModel::Accelerator,
    };
    let mut mmu = LocalMmu::new(cfg.clone(), timing);
    w.segments
        .iter()
        .map(|seg| {
            if seg.kind == kind {
                mmu.run_segment(&seg.refs)
            } else {
                MmuStats::default()
            }
        })
        .collect()
}

/// Per-segment translation stats of a system.
///
/// In remote modes the accelerator shares the CPU's L2 TLB, so both sides
/// are simulated together in trace order.
pub fn simulate_system<S: Scalar>(w: &Workload<S>, sys: &SystemConfig<S>) -> Result<Vec<MmuStats<S>>> {
    sys.cpu.validate()?;
    match (&sys.mode, &sys.acc) {
        (TranslationMode::Local, Some(acc)) => {
            acc.validate()?;
            let cpu = simulate_side(w, &sys.cpu, SegmentKind::Cpu);
            let acc = simulate_side(w, acc, SegmentKind::Acc);
            Ok(cpu.into_iter().zip(acc).map(|(c, a)| c + a).collect())
        }
        (TranslationMode::Local, None) => Err(Error::InvalidConfig(format!(
            "{}: local translation needs an accelerator MMU",
            sys.id
        ))),
        (_, Some(_)) => Err(Error::InvalidConfig(format!(
            "{}: remote translation takes no accelerator MMU",
            sys.id
        ))),
        (mode, None) => {
            let mut cpu = LocalMmu::new(sys.cpu.clone(), TimingModel::Cpu);
            let mut remote = RemoteTranslator::new(mode)?;
            w.segments
                .iter()
                .map(|seg| match seg.kind {
                    SegmentKind::Cpu => Ok(cpu.run_segment(&seg.refs)),
                    SegmentKind::Acc => remote.run_segment(seg.refs.iter().map(|r| r.vpn), &mut cpu),
                })
                .collect()
        }
    }
}

/// A system's results on one workload.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemRun<S> {
    pub segment_stats: Vec<MmuStats<S>>,
    pub cpu_stats: MmuStats<S>,
    pub acc_stats: MmuStats<S>,
    pub cost: CostResult<S>,
}

impl<S: Scalar> SystemRun<S> {
    pub fn from_segment_stats(
        w: &Workload<S>,
        sys: &SystemConfig<S>,
        segment_stats: Vec<MmuStats<S>>,
        baseline: Option<&CostResult<S>>,
    ) -> Result<Self> {
        let area = system_area(&sys.cpu, sys.acc.as_ref(), &sys.mode);
        let cost = assemble(&w.partition, &segment_stats, &w.calibration, area, baseline)?;
        let side = |kind| {
            w.segments
                .iter()
                .zip(&segment_stats)
                .filter(|(seg, _)| seg.kind == kind)
                .map(|(_, s)| *s)
                .sum()
        };
        Ok(Self {
            cpu_stats: side(SegmentKind::Cpu),
            acc_stats: side(SegmentKind::Acc),
            segment_stats,
            cost,
        })
    }
}

pub fn evaluate_system<S: Scalar>(
    w: &Workload<S>,
    sys: &SystemConfig<S>,
    baseline: Option<&CostResult<S>>,
) -> Result<SystemRun<S>> {
    let stats = simulate_system(w, sys)?;
    SystemRun::from_segment_stats(w, sys, stats, baseline)
}

/// The whole trace on the CPU with `cpu`; normalized to itself.
pub fn software_baseline<S: Scalar>(
    trace: &Trace,
    cpu: &MmuConfig<S>,
    calibration: &CalibrationParams<S>,
) -> Result<CostResult<S>> {
    cpu.validate()?;
    let w = Workload::software_only(trace, calibration)?;
    let stats = simulate_side(&w, cpu, SegmentKind::Cpu);
    let area = system_area(cpu, None, &TranslationMode::Local);
    assemble(&w.partition, &stats, calibration, area, None)
}
