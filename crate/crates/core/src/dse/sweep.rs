//! Sweeps over system configurations and reference patterns.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::cost::{amdahl_bound, ideal_l1_bound, CostResult};
use crate::error::{Error, Result};
use crate::mmu::{MmuConfig, MmuStats, TranslationMode};
use crate::params::ParamPack;
use crate::scalar::Scalar;
use crate::trace::{HotspotPartition, PatternKind, SegmentKind, Trace};

use super::{
    annotate_pareto, baseline_cpu_config, simulate_side, simulate_system, smallest_l1, software_baseline,
    SystemConfig, SystemRun, Workload,
};

pub const CSV_HEADER: [&str; 19] = [
    "config_id",
    "cpu_l1",
    "cpu_l2",
    "acc_l1",
    "acc_l2",
    "ptw_threads",
    "mode",
    "pattern",
    "runtime_ns",
    "normalized_runtime",
    "area_mm2_cpu",
    "area_mm2_acc",
    "energy_pj_cpu",
    "energy_pj_acc",
    "l1_hit_rate",
    "l2_hit_rate",
    "walks",
    "area_optimal",
    "energy_optimal",
];

/// One (system, pattern) result.
///
/// `acc_stats` covers the accelerator's references: its own TLBs and walks
/// in local mode, the filter TLB (as L1), the remotely probed CPU L2 and the
/// CPU walks in remote modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<S> {
    pub config_id: String,
    pub cpu: MmuConfig<S>,
    pub acc: Option<MmuConfig<S>>,
    pub mode: TranslationMode<S>,
    pub pattern: PatternKind,
    pub cost: CostResult<S>,
    pub cpu_stats: MmuStats<S>,
    pub acc_stats: MmuStats<S>,
    pub area_optimal: bool,
    pub energy_optimal: bool,
}

impl<S: Scalar> SweepRow<S> {
    pub fn acc_l1_label(&self) -> String {
        match (&self.acc, self.mode.filter()) {
            (Some(acc), _) => acc.l1_label(),
            (None, Some(f)) => f.label(),
            (None, None) => String::new(),
        }
    }

    pub fn acc_l2_label(&self) -> String {
        self.acc.as_ref().map(MmuConfig::l2_label).unwrap_or_default()
    }

    pub fn ptw_threads(&self) -> Option<usize> {
        self.acc.as_ref().map(|a| a.ptw.threads)
    }

    pub fn l1_hit_rate(&self) -> Option<S> {
        self.acc_stats.l1_hit_rate()
    }

    pub fn l2_hit_rate(&self) -> Option<S> {
        self.acc_stats.l2_hit_rate()
    }

    pub fn walks(&self) -> u64 {
        self.acc_stats.walks
    }

    fn csv_record(&self) -> [String; 19] {
        let opt = |v: Option<S>| v.map(|v| v.to_string()).unwrap_or_default();
        let c = &self.cost;
        [
            self.config_id.clone(),
            self.cpu.l1_label(),
            self.cpu.l2_label(),
            self.acc_l1_label(),
            self.acc_l2_label(),
            self.ptw_threads().map(|w| w.to_string()).unwrap_or_default(),
            self.mode.label().to_string(),
            self.pattern.label().to_string(),
            c.runtime_ns.to_string(),
            c.normalized_runtime.to_string(),
            c.mmu_area_mm2.cpu.to_string(),
            c.mmu_area_mm2.acc.to_string(),
            c.mmu_energy_pj.cpu.to_string(),
            c.mmu_energy_pj.acc.to_string(),
            opt(self.l1_hit_rate()),
            opt(self.l2_hit_rate()),
            self.walks().to_string(),
            self.area_optimal.to_string(),
            self.energy_optimal.to_string(),
        ]
    }
}

#[derive(Debug)]
pub struct SweepFailure {
    pub config_id: String,
    pub pattern: PatternKind,
    pub error: Error,
}

#[derive(Debug)]
pub struct SweepResult<S> {
    /// Successful rows, ordered by config id then pattern.
    pub rows: Vec<SweepRow<S>>,
    pub failures: Vec<SweepFailure>,
    /// Software-only run every row is normalized to.
    pub baseline: CostResult<S>,
    pub accelerated_fraction: S,
    pub amdahl_bound: S,
    pub ideal_l1_bound: S,
}

fn attach(id: &str, e: Error) -> Error {
    Error::Run {
        config_id: id.to_string(),
        source: Box::new(e),
    }
}

/// Runs every system on every pattern.
///
/// Local-mode systems are assembled from per-MMU simulations shared between
/// systems (the CPU and accelerator MMUs are independent there); remote
/// systems are simulated whole. A failing run is recorded in `failures` with
/// its config id and the sweep carries on. Errors in the inputs shared by
/// all rows (trace, partition, baseline) fail the sweep.
pub fn run_sweep<S: Scalar>(
    trace: &Trace,
    partition: &HotspotPartition,
    systems: &[SystemConfig<S>],
    patterns: &[PatternKind],
    params: &ParamPack<S>,
) -> Result<SweepResult<S>> {
    if patterns.is_empty() {
        return Err(Error::EmptyInput("pattern list"));
    }
    let calib = &params.calibration;
    let base_cpu = baseline_cpu_config(params)?;
    let baseline = software_baseline(trace, &base_cpu, calib)?;
    let workloads: Vec<Workload<S>> = patterns
        .par_iter()
        .map(|&p| Workload::new(trace, partition, p, calib))
        .collect::<Result<_>>()?;

    let w0 = &workloads[0];
    let cpu_mmu_ns = simulate_side(w0, &base_cpu, SegmentKind::Cpu)
        .iter()
        .map(|s| s.mmu_time_ns)
        .sum();
    let f = w0.accelerated_fraction();
    let ideal = ideal_l1_bound(
        partition,
        w0.refs(SegmentKind::Acc),
        &smallest_l1(params)?,
        calib,
        cpu_mmu_ns,
        baseline.runtime_ns,
    )?;

    let invalid: HashMap<&str, Error> = systems
        .iter()
        .filter_map(|s| {
            let check = s.cpu.validate().and_then(|_| s.acc.as_ref().map_or(Ok(()), MmuConfig::validate));
            check.err().map(|e| (s.id.as_str(), e))
        })
        .collect();
    let local = |s: &&SystemConfig<S>| s.mode == TranslationMode::Local && s.acc.is_some() && !invalid.contains_key(s.id.as_str());

    let mut cpu_cfgs: Vec<&MmuConfig<S>> = systems.iter().filter(local).map(|s| &s.cpu).collect();
    cpu_cfgs.sort_by(|a, b| a.id.cmp(&b.id));
    cpu_cfgs.dedup_by(|a, b| a.id == b.id);
    let mut acc_cfgs: Vec<&MmuConfig<S>> = systems.iter().filter(local).filter_map(|s| s.acc.as_ref()).collect();
    acc_cfgs.sort_by(|a, b| a.id.cmp(&b.id));
    acc_cfgs.dedup_by(|a, b| a.id == b.id);

    // CPU segments do not depend on the accelerator's reference order.
    let cpu_side: HashMap<&str, Vec<MmuStats<S>>> = cpu_cfgs
        .par_iter()
        .map(|c| (c.id.as_str(), simulate_side(w0, c, SegmentKind::Cpu)))
        .collect();
    let acc_side: HashMap<(&str, usize), Vec<MmuStats<S>>> = acc_cfgs
        .par_iter()
        .flat_map_iter(|c| (0..workloads.len()).map(move |p| (c, p)))
        .map(|(c, p)| ((c.id.as_str(), p), simulate_side(&workloads[p], c, SegmentKind::Acc)))
        .collect();

    let jobs: Vec<(&SystemConfig<S>, usize)> = systems
        .iter()
        .flat_map(|s| (0..workloads.len()).map(move |p| (s, p)))
        .collect();
    let outcomes: Vec<Result<SweepRow<S>, SweepFailure>> = jobs
        .par_iter()
        .map(|&(sys, p)| {
            let w = &workloads[p];
            let run = || -> Result<SystemRun<S>> {
                if let Some(e) = invalid.get(sys.id.as_str()) {
                    return Err(Error::InvalidConfig(e.to_string()));
                }
                let stats = match (&sys.mode, &sys.acc) {
                    (TranslationMode::Local, Some(acc)) => {
                        let cpu = &cpu_side[sys.cpu.id.as_str()];
                        let acc = &acc_side[&(acc.id.as_str(), p)];
                        cpu.iter().zip(acc).map(|(c, a)| *c + *a).collect()
                    }
                    _ => simulate_system(w, sys)?,
                };
                SystemRun::from_segment_stats(w, sys, stats, Some(&baseline))
            };
            run()
                .map(|r| SweepRow {
                    config_id: sys.id.clone(),
                    cpu: sys.cpu.clone(),
                    acc: sys.acc.clone(),
                    mode: sys.mode.clone(),
                    pattern: w.pattern,
                    cost: r.cost,
                    cpu_stats: r.cpu_stats,
                    acc_stats: r.acc_stats,
                    area_optimal: false,
                    energy_optimal: false,
                })
                .map_err(|e| SweepFailure {
                    config_id: sys.id.clone(),
                    pattern: w.pattern,
                    error: attach(&sys.id, e),
                })
        })
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => rows.push(r),
            Err(f) => failures.push(f),
        }
    }
    rows.sort_by(|a, b| {
        a.config_id
            .cmp(&b.config_id)
            .then(a.pattern.ordinal().cmp(&b.pattern.ordinal()))
    });
    failures.sort_by(|a, b| {
        a.config_id
            .cmp(&b.config_id)
            .then(a.pattern.ordinal().cmp(&b.pattern.ordinal()))
    });
    if !rows.is_empty() {
        annotate_pareto(&mut rows)?;
    }
    Ok(SweepResult {
        rows,
        failures,
        baseline,
        accelerated_fraction: f,
        amdahl_bound: amdahl_bound(f, calib.accel_speedup),
        ideal_l1_bound: ideal,
    })
}

/// Writes `rows` with the mandatory header, columns in [`CSV_HEADER`] order.
pub fn write_csv<S: Scalar, W: Write>(rows: &[SweepRow<S>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::InvalidConfig(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.csv_record()).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

pub fn to_csv_string<S: Scalar>(rows: &[SweepRow<S>]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}
