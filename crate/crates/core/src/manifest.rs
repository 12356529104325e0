//! Reproducible runs: a manifest names the inputs, thresholds, patterns and
//! modes of a sweep, and [`RunManifest::run`] writes its outputs.
//!
//! Outputs (all deterministic in the manifest and input files):
//! `sweep.csv` (every row), `pareto.csv` (rows optimal in area or energy),
//! `hotspots.csv` (accelerated fraction per minimum hotspot size) and
//! `summary.txt`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dse::{
    enumerate_accel_configs, enumerate_cpu_configs, enumerate_system_configs, remote_modes, remote_system_configs,
    run_sweep, to_csv_string, SweepResult, SweepRow,
};
use crate::error::{Error, Result};
use crate::params::ParamPack;
use crate::scalar::Scalar;
use crate::trace::{accelerated_fraction, generate_synthetic, identify_hotspots, PatternKind, SegmentKind, SyntheticSpec, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternName {
    Program,
    Random,
    Sorted,
}

impl PatternName {
    /// Random order is seeded with the run seed.
    pub fn kind(self, seed: u64) -> PatternKind {
        match self {
            PatternName::Program => PatternKind::ProgramOrder,
            PatternName::Random => PatternKind::Random { seed },
            PatternName::Sorted => PatternKind::Sorted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    /// The 486 CPU x accelerator MMU systems.
    Local,
    /// One no-MMU accelerator per CPU MMU.
    Remote,
    /// One filter-TLB accelerator per CPU MMU.
    RemoteFiltered,
}

fn all_patterns() -> Vec<PatternName> {
    vec![PatternName::Program, PatternName::Random, PatternName::Sorted]
}

fn local_only() -> Vec<ModeName> {
    vec![ModeName::Local]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    /// Trace file (text format). Exactly one of `trace` and `synthetic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    /// Parameter pack; the bundled placeholder when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calib: Option<PathBuf>,
    pub hot_exec_threshold: u64,
    /// Minimum hotspot sizes to report; the sweep uses the middle one.
    pub min_hotspot_len: Vec<usize>,
    #[serde(default = "all_patterns")]
    pub patterns: Vec<PatternName>,
    #[serde(default = "local_only")]
    pub modes: Vec<ModeName>,
    pub out: PathBuf,
    pub seed: u64,
}

/// Accelerated fraction for one minimum hotspot size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HotspotRow {
    pub min_hotspot_len: usize,
    pub acc_segments: usize,
    pub acc_instructions: u64,
    pub accelerated_fraction: f64,
}

/// One row per minimum hotspot size, in ascending size order.
pub fn hotspot_report(trace: &Trace, hot_exec_threshold: u64, min_lens: &[usize]) -> Vec<HotspotRow> {
    let mut lens = min_lens.to_vec();
    lens.sort_unstable();
    lens.dedup();
    lens.into_iter()
        .map(|len| {
            let p = identify_hotspots(trace, hot_exec_threshold, len);
            HotspotRow {
                min_hotspot_len: len,
                acc_segments: p.acc_segments().count(),
                acc_instructions: p.instructions(SegmentKind::Acc),
                accelerated_fraction: accelerated_fraction(&p),
            }
        })
        .collect()
}

pub fn hotspot_csv(trace: &Trace, hot_exec_threshold: u64, rows: &[HotspotRow]) -> String {
    let mut s = String::from("trace,hot_exec_threshold,min_hotspot_len,acc_segments,acc_instructions,accelerated_fraction\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            trace.name, hot_exec_threshold, r.min_hotspot_len, r.acc_segments, r.acc_instructions, r.accelerated_fraction
        );
    }
    s
}

/// Files written by [`RunManifest::run`].
#[derive(Debug)]
pub struct RunReport {
    pub sweep_csv: PathBuf,
    pub pareto_csv: PathBuf,
    pub hotspots_csv: PathBuf,
    pub summary: PathBuf,
    pub rows: usize,
    pub failures: usize,
}

impl RunManifest {
    /// Reads a manifest; relative paths are taken from the manifest's
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut m: Self = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [m.trace.as_mut(), m.calib.as_mut(), Some(&mut m.out)].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("manifest: {m}")));
        match (&self.trace, &self.synthetic) {
            (Some(_), Some(_)) => return bad("give either trace or synthetic, not both"),
            (None, None) => return bad("needs a trace or a synthetic spec"),
            (Some(t), None) if !t.is_file() => {
                return Err(Error::io(t, std::io::Error::new(std::io::ErrorKind::NotFound, "trace not found")))
            }
            (None, Some(s)) => s.validate()?,
            _ => {}
        }
        if let Some(c) = &self.calib {
            if !c.is_file() {
                return Err(Error::io(c, std::io::Error::new(std::io::ErrorKind::NotFound, "parameter pack not found")));
            }
        }
        if self.hot_exec_threshold == 0 {
            return bad("hot_exec_threshold must be at least 1");
        }
        if self.min_hotspot_len.is_empty() || self.min_hotspot_len.contains(&0) {
            return bad("min_hotspot_len needs one or more values, each at least 1");
        }
        if self.patterns.is_empty() {
            return bad("no patterns");
        }
        if self.modes.is_empty() {
            return bad("no modes");
        }
        Ok(())
    }

    /// The middle of the sorted minimum hotspot sizes (lower middle for an
    /// even count).
    pub fn sweep_min_hotspot_len(&self) -> usize {
        let mut v = self.min_hotspot_len.clone();
        v.sort_unstable();
        v[(v.len() - 1) / 2]
    }

    pub fn load_trace(&self) -> Result<Trace> {
        match (&self.trace, &self.synthetic) {
            (Some(path), _) => {
                let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
                let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                Trace::parse(name, std::io::BufReader::new(f))
            }
            (None, Some(spec)) => generate_synthetic(spec),
            (None, None) => Err(Error::InvalidConfig("manifest: needs a trace or a synthetic spec".into())),
        }
    }

    pub fn load_params<S: Scalar>(&self) -> Result<ParamPack<S>> {
        match &self.calib {
            Some(p) => ParamPack::load(p),
            None => Ok(ParamPack::placeholder()),
        }
    }

    /// Runs the sweep in memory.
    pub fn sweep<S: Scalar>(&self, trace: &Trace, params: &ParamPack<S>) -> Result<SweepResult<S>> {
        let partition = identify_hotspots(trace, self.hot_exec_threshold, self.sweep_min_hotspot_len());
        let cpus = enumerate_cpu_configs(params)?;
        let [plain, filtered] = remote_modes(params)?;
        let mut modes = self.modes.clone();
        modes.sort();
        modes.dedup();
        let mut systems = Vec::new();
        for m in modes {
            match m {
                ModeName::Local => systems.extend(enumerate_system_configs(&enumerate_accel_configs(params)?, &cpus)),
                ModeName::Remote => systems.extend(remote_system_configs(&cpus, &plain)),
                ModeName::RemoteFiltered => systems.extend(remote_system_configs(&cpus, &filtered)),
            }
        }
        let mut names = self.patterns.clone();
        names.sort();
        names.dedup();
        let patterns: Vec<PatternKind> = names.into_iter().map(|p| p.kind(self.seed)).collect();
        run_sweep(trace, &partition, &systems, &patterns, params)
    }

    /// Validates, sweeps and writes every output file. Fails only when no
    /// row succeeds; individual failures are listed in the summary.
    pub fn run(&self) -> Result<RunReport> {
        self.validate()?;
        let trace = self.load_trace()?;
        if trace.is_empty() {
            return Err(Error::EmptyInput("trace"));
        }
        let params = self.load_params::<f64>()?;
        let result = self.sweep(&trace, &params)?;
        if result.rows.is_empty() {
            let first = result.failures.first().map(|f| f.error.to_string()).unwrap_or_default();
            return Err(Error::InvalidConfig(format!("every configuration failed; first: {first}")));
        }
        let hotspots = hotspot_report(&trace, self.hot_exec_threshold, &self.min_hotspot_len);

        fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        let write = |name: &str, contents: &str| -> Result<PathBuf> {
            let p = self.out.join(name);
            fs::write(&p, contents).map_err(|e| Error::io(&p, e))?;
            Ok(p)
        };
        let optimal: Vec<SweepRow<f64>> = result
            .rows
            .iter()
            .filter(|r| r.area_optimal || r.energy_optimal)
            .cloned()
            .collect();
        Ok(RunReport {
            sweep_csv: write("sweep.csv", &to_csv_string(&result.rows))?,
            pareto_csv: write("pareto.csv", &to_csv_string(&optimal))?,
            hotspots_csv: write("hotspots.csv", &hotspot_csv(&trace, self.hot_exec_threshold, &hotspots))?,
            summary: write("summary.txt", &self.summary(&trace, &params, &result, &hotspots))?,
            rows: result.rows.len(),
            failures: result.failures.len(),
        })
    }

    fn summary(&self, trace: &Trace, params: &ParamPack<f64>, r: &SweepResult<f64>, hotspots: &[HotspotRow]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "trace: {} ({} records, {} memory references)", trace.name, trace.len(), trace.mem_refs());
        let _ = writeln!(s, "seed: {}", self.seed);
        let _ = writeln!(s, "hot_exec_threshold: {}", self.hot_exec_threshold);
        for h in hotspots {
            let _ = writeln!(
                s,
                "  min_hotspot_len {:>8}: accelerated fraction {:.4} ({} segments)",
                h.min_hotspot_len, h.accelerated_fraction, h.acc_segments
            );
        }
        let _ = writeln!(s, "sweep min_hotspot_len: {}", self.sweep_min_hotspot_len());
        let _ = writeln!(s, "accelerated fraction: {:.6}", r.accelerated_fraction);
        let _ = writeln!(s, "accelerator speedup: {}", params.calibration.accel_speedup);
        let _ = writeln!(s, "baseline runtime_ns: {}", r.baseline.runtime_ns);
        let _ = writeln!(s, "amdahl bound: {:.6}", r.amdahl_bound);
        let _ = writeln!(s, "ideal-L1 bound: {:.6}", r.ideal_l1_bound);
        let _ = writeln!(s, "rows: {}  failures: {}", r.rows.len(), r.failures.len());

        let mut patterns: Vec<PatternKind> = r.rows.iter().map(|x| x.pattern).collect();
        patterns.sort_by_key(|p| p.ordinal());
        patterns.dedup();
        for p in patterns {
            let rows: Vec<&SweepRow<f64>> = r.rows.iter().filter(|x| x.pattern == p).collect();
            let best = |key: &dyn Fn(&SweepRow<f64>) -> f64| {
                *rows
                    .iter()
                    .min_by(|a, b| key(a).total_cmp(&key(b)).then(a.config_id.cmp(&b.config_id)))
                    .expect("non-empty group")
            };
            let fast = best(&|x| x.cost.normalized_runtime);
            let small = best(&|x| x.cost.mmu_area_mm2.total());
            let frugal = best(&|x| x.cost.mmu_energy_pj.total());
            let _ = writeln!(s, "\npattern {}:", p.label());
            let _ = writeln!(s, "  fastest:      {} normalized runtime {:.6}", fast.config_id, fast.cost.normalized_runtime);
            let _ = writeln!(
                s,
                "  least area:   {} {:.6} mm2 (normalized runtime {:.6})",
                small.config_id,
                small.cost.mmu_area_mm2.total(),
                small.cost.normalized_runtime
            );
            let _ = writeln!(
                s,
                "  least energy: {} {:.3} pJ (normalized runtime {:.6})",
                frugal.config_id,
                frugal.cost.mmu_energy_pj.total(),
                frugal.cost.normalized_runtime
            );
            let area = rows.iter().filter(|x| x.area_optimal).count();
            let energy = rows.iter().filter(|x| x.energy_optimal).count();
            let both = rows.iter().filter(|x| x.area_optimal && x.energy_optimal).count();
            let _ = writeln!(s, "  area-optimal: {area}  energy-optimal: {energy}  both: {both}");
            let below = rows.iter().filter(|x| x.cost.normalized_runtime < r.amdahl_bound).count();
            let _ = writeln!(s, "  rows below the amdahl bound: {below}");
        }
        if !r.failures.is_empty() {
            let _ = writeln!(s, "\nfailures:");
            for f in &r.failures {
                let _ = writeln!(s, "  {} {}: {}", f.config_id, f.pattern.label(), f.error);
            }
        }
        s
    }
}
