//! Design-space exploration: configuration spaces, sweeps and Pareto
//! analysis.

mod enumerate;
mod eval;
mod pareto;
mod sweep;

pub use enumerate::{
    baseline_cpu_config, enumerate_accel_configs, enumerate_cpu_configs, enumerate_system_configs, remote_modes,
    remote_system_configs, smallest_l1, SystemConfig, ACC_L1, BASELINE_CPU_L1, BASELINE_CPU_L2_ENTRIES, CPU_L1,
    L2_ENTRIES, PTW_THREADS, SMALLEST_L1,
};
pub use eval::{evaluate_system, simulate_side, simulate_system, software_baseline, SegmentRefs, SystemRun, Workload};
pub use pareto::{annotate_pareto, dominates, pareto, pareto_front, split_breakdown, CostMetric, ParetoPoint, SplitRow};
pub use sweep::{run_sweep, to_csv_string, write_csv, SweepFailure, SweepResult, SweepRow, CSV_HEADER};
