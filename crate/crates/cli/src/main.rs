//! `hetmmu`: trace generation, hotspot reports and design-space sweeps.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hetmmu::manifest::{hotspot_csv, hotspot_report, ModeName, PatternName, RunManifest};
use hetmmu::params::ParamPack;
use hetmmu::trace::{generate_synthetic, SyntheticSpec, Trace};
use hetmmu::Error;

#[derive(Parser)]
#[command(name = "hetmmu", version, about = "MMU design-space exploration for CPU+accelerator systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic trace from a JSON spec.
    GenTrace {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the spec's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Accelerated fraction for each minimum hotspot size.
    Hotspots {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        hot_threshold: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        min_hotspot: Vec<usize>,
        /// Also write the report as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the configuration space; from a manifest or from flags.
    Sweep(SweepArgs),
    /// Print the bundled placeholder parameter pack.
    Params,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct Input {
    /// Trace file in text format.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Synthetic trace spec (JSON).
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PatternArg {
    Program,
    Random,
    Sorted,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Local,
    Remote,
    RemoteFiltered,
}

#[derive(Args)]
struct SweepArgs {
    /// Run manifest (JSON). Excludes the other sweep flags.
    #[arg(long, conflicts_with_all = ["trace", "spec", "calib", "hot_threshold", "min_hotspot", "pattern", "mode", "seed", "out"])]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    input: Input,
    /// Parameter pack (JSON); the bundled placeholder when omitted.
    #[arg(long)]
    calib: Option<PathBuf>,
    #[arg(long)]
    hot_threshold: Option<u64>,
    /// One or more minimum hotspot sizes; the sweep uses the middle one.
    #[arg(long, value_delimiter = ',')]
    min_hotspot: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pattern: Vec<PatternArg>,
    #[arg(long, value_enum, value_delimiter = ',')]
    mode: Vec<ModeArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn load_spec(path: &Path) -> Result<SyntheticSpec, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn load_input(input: &Input) -> Result<Trace, Failure> {
    match (&input.trace, &input.spec) {
        (Some(path), _) => {
            let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok(Trace::parse(name, std::io::BufReader::new(f))?)
        }
        (None, Some(spec)) => Ok(generate_synthetic(&load_spec(spec)?)?),
        (None, None) => Err(Failure::Usage("one of --trace or --spec is required".into())),
    }
}

fn manifest_from_flags(a: SweepArgs) -> Result<RunManifest, Failure> {
    let missing = |f: &str| Failure::Usage(format!("{f} is required without --manifest"));
    let synthetic = a.input.spec.as_deref().map(load_spec).transpose()?;
    if a.input.trace.is_none() && synthetic.is_none() {
        return Err(missing("--trace or --spec"));
    }
    if a.min_hotspot.is_empty() {
        return Err(missing("--min-hotspot"));
    }
    let patterns = if a.pattern.is_empty() {
        vec![PatternName::Program, PatternName::Random, PatternName::Sorted]
    } else {
        a.pattern
            .iter()
            .map(|p| match p {
                PatternArg::Program => PatternName::Program,
                PatternArg::Random => PatternName::Random,
                PatternArg::Sorted => PatternName::Sorted,
            })
            .collect()
    };
    let modes = if a.mode.is_empty() {
        vec![ModeName::Local]
    } else {
        a.mode
            .iter()
            .map(|m| match m {
                ModeArg::Local => ModeName::Local,
                ModeArg::Remote => ModeName::Remote,
                ModeArg::RemoteFiltered => ModeName::RemoteFiltered,
            })
            .collect()
    };
    Ok(RunManifest {
        trace: a.input.trace,
        synthetic,
        calib: a.calib,
        hot_exec_threshold: a.hot_threshold.ok_or_else(|| missing("--hot-threshold"))?,
        min_hotspot_len: a.min_hotspot,
        patterns,
        modes,
        out: a.out.ok_or_else(|| missing("--out"))?,
        seed: a.seed.ok_or_else(|| missing("--seed"))?,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Command::GenTrace { spec, seed, out } => {
            let mut spec = load_spec(&spec)?;
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            let trace = generate_synthetic(&spec)?;
            fs::write(&out, trace.to_text()).map_err(|e| Error::io(&out, e))?;
            eprintln!("wrote {} records to {}", trace.len(), out.display());
        }
        Command::Hotspots {
            input,
            hot_threshold,
            min_hotspot,
            out,
        } => {
            if hot_threshold == 0 || min_hotspot.contains(&0) {
                return Err(Failure::Usage("thresholds must be at least 1".into()));
            }
            let trace = load_input(&input)?;
            let rows = hotspot_report(&trace, hot_threshold, &min_hotspot);
            println!("{:>16} {:>10} {:>14} {:>10}", "min_hotspot_len", "segments", "acc_instrs", "fraction");
            for r in &rows {
                println!(
                    "{:>16} {:>10} {:>14} {:>10.4}",
                    r.min_hotspot_len, r.acc_segments, r.acc_instructions, r.accelerated_fraction
                );
            }
            if let Some(out) = out {
                fs::write(&out, hotspot_csv(&trace, hot_threshold, &rows)).map_err(|e| Error::io(&out, e))?;
            }
        }
        Command::Sweep(args) => {
            let manifest = match &args.manifest {
                Some(path) => RunManifest::load(path)?,
                None => manifest_from_flags(args)?,
            };
            let report = manifest.run()?;
            println!("{} rows, {} failures", report.rows, report.failures);
            for p in [&report.sweep_csv, &report.pareto_csv, &report.hotspots_csv, &report.summary] {
                println!("wrote {}", p.display());
            }
        }
        Command::Params => println!("{}", ParamPack::<f64>::placeholder().to_json()),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Data(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => {
            eprintln!("internal error");
            ExitCode::from(3)
        }
    }
}
