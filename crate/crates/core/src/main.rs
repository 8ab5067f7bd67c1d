use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spin_discord::io::{
    load_bath, render_records, render_signal, write_output, ConfigOverrides, EqualSpec,
    OutputFormat, RawConfig, RunConfig,
};
use spin_discord::model::BETA_WARN_THRESHOLD;
use spin_discord::oracle::Oracle;
use spin_discord::sweep::{figure1_presets, figure2_presets, run_sweep, SweepGrid, SweepVariable};
use spin_discord::verify::{run_verify, VerifyOptions, DEFAULT_CASES, DEFAULT_SEED};
use spin_discord::{Error, ExperimentConfig, Result};

/// Correlations between a central electron spin and its nuclear bath.
///
/// Frequencies are angular and share one unit; time is in the reciprocal
/// unit. Setting A = 1 for the reference spin gives the dimensionless
/// field axis 2ω/A.
#[derive(Parser)]
#[command(name = "spin-discord", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signal g(t) and per-spin v over a time sweep
    Signal(RunArgs),
    /// Correlation measures over a sweep (time by default)
    Correlations(RunArgs),
    /// Correlation measures along the field envelope, x = 2ω/A
    SweepField(RunArgs),
    /// Correlation measures with v as the free variable
    SweepV(RunArgs),
    /// Field-envelope curves for FID and echo, n = 2 (writes figure1_*.csv)
    Figure1(PresetArgs),
    /// v sweeps for n = 2 and n = 10 (writes figure2_*.csv)
    Figure2(PresetArgs),
    /// Compare closed forms with the dense oracle on seeded random baths
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pulse sequence: fid or echo
    #[arg(long)]
    seq: Option<String>,
    /// Equal-coupling bath as n,A,omega
    #[arg(long, value_name = "n,A,omega")]
    equal: Option<String>,
    /// JSON list of {"A_x": .., "omega": ..}
    #[arg(long, value_name = "PATH")]
    bath: Option<PathBuf>,
    /// Electron polarization beta_S
    #[arg(long)]
    beta: Option<f64>,
    /// Sweep variable: time, field or v
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct PresetArgs {
    #[arg(long)]
    beta: Option<f64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Random cases per bath size
    #[arg(long, default_value_t = DEFAULT_CASES)]
    cases: usize,
    /// Single bath size (default: 1 to 4)
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    beta: f64,
    #[arg(long, default_value_t = Oracle::DEFAULT_CAP)]
    oracle_cap: usize,
}

fn parse_equal(s: &str) -> Result<EqualSpec> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Error::Config {
        path: "equal".into(),
        reason: format!("expected n,A,omega, got `{s}`"),
    };
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(EqualSpec {
        n: parts[0].parse().map_err(|_| bad())?,
        a_x: parts[1].parse().map_err(|_| bad())?,
        omega: parts[2].parse().map_err(|_| bad())?,
    })
}

fn build_config(args: &RunArgs, forced: Option<SweepVariable>) -> Result<RunConfig> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_json(&fs::read_to_string(path)?)?,
        None => RawConfig::default(),
    };
    let variable = match (forced, &args.sweep) {
        (Some(v), Some(s)) if s.parse::<SweepVariable>()? != v => {
            return Err(Error::Config {
                path: "sweep.variable".into(),
                reason: format!(
                    "this command sweeps `{}`; --sweep {s} does not apply",
                    v.as_str()
                ),
            })
        }
        (Some(v), _) => Some(v.as_str().to_string()),
        (None, s) => s.clone(),
    };
    let bath = match &args.bath {
        Some(p) => Some(load_bath(p)?),
        None => None,
    };
    raw.apply(ConfigOverrides {
        sequence: args.seq.clone(),
        bath,
        equal: args.equal.as_deref().map(parse_equal).transpose()?,
        beta: args.beta,
        variable,
        start: args.start,
        stop: args.stop,
        steps: args.steps,
        out: args.out.clone(),
        format: args.format.clone(),
    })?;
    raw.validate()
}

fn warn_beta(beta: f64) {
    if beta > BETA_WARN_THRESHOLD {
        eprintln!(
            "warning: beta_S = {beta} exceeds {BETA_WARN_THRESHOLD}; the quadratic-order formulas degrade"
        );
    }
}

fn run(args: RunArgs, forced: Option<SweepVariable>, signal_only: bool) -> Result<()> {
    let cfg = build_config(&args, forced)?;
    warn_beta(cfg.beta_s);
    let records = run_sweep(&cfg.grid(), &cfg.experiment())?;
    let text = if signal_only {
        render_signal(&records, cfg.format)?
    } else {
        render_records(&records, cfg.format)?
    };
    write_output(&text, cfg.out.as_deref())
}

fn run_presets(args: PresetArgs, presets: Vec<(&'static str, SweepGrid)>) -> Result<()> {
    let format: OutputFormat = args.format.parse()?;
    let exp = match args.beta {
        Some(b) => ExperimentConfig::new(b)?,
        None => ExperimentConfig::default(),
    };
    warn_beta(exp.beta_s);
    fs::create_dir_all(&args.out)?;
    for (name, grid) in presets {
        let records = run_sweep(&grid, &exp)?;
        let path: PathBuf = args.out.join(format!("{name}.{}", format.extension()));
        write_output(&render_records(&records, format)?, Some(Path::new(&path)))?;
        eprintln!("wrote {} ({} rows)", path.display(), records.len());
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let opts = VerifyOptions {
        seed: args.seed,
        cases: args.cases,
        n_values: match args.n {
            Some(n) => vec![n],
            None => vec![1, 2, 3, 4],
        },
        beta_s: args.beta,
        cap: args.oracle_cap,
        ..VerifyOptions::default()
    };
    let report = run_verify(&opts)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    print!("{report}");
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Signal(a) => run(a, Some(SweepVariable::Time), true).map(|_| true),
        Command::Correlations(a) => run(a, None, false).map(|_| true),
        Command::SweepField(a) => run(a, Some(SweepVariable::FieldRatio), false).map(|_| true),
        Command::SweepV(a) => run(a, Some(SweepVariable::VParameter), false).map(|_| true),
        Command::Figure1(a) => run_presets(a, figure1_presets()).map(|_| true),
        Command::Figure2(a) => run_presets(a, figure2_presets()).map(|_| true),
        Command::Verify(a) => verify(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
