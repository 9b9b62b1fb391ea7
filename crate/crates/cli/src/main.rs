use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ous_core::harness::{export_csv, run_scenario, Experiment, ScenarioFile};
use ous_core::ingest::{
    extract_user_days, generate_synthetic_log, read_step_log, read_user_days_csv, replay_with,
    write_step_log, write_user_days_csv, ReplayConfig,
};
use ous_core::theory::{theoretical_cr_learn, theoretical_cr_rand, Regime};
use ous_core::{OusError, PolicyKind, RngStream};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

/// Online uniform sampling: theory tables, Monte Carlo sweeps, step-log
/// ingestion and replay.
#[derive(Parser)]
#[command(name = "ous", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print worst-case competitive ratios for horizons and interval upper bounds.
    Theory(TheoryArgs),
    /// Run a tau or width sweep from a JSON scenario config.
    Simulate(ScenarioArgs),
    /// Run a budget audit or no-penalty sweep from a JSON scenario config.
    Audit(ScenarioArgs),
    /// Turn a minute-level step log into per-day risk counts.
    Ingest(IngestArgs),
    /// Replay policies over extracted user-days.
    Replay(ReplayArgs),
    /// Write a synthetic minute-level step log.
    Synth(SynthArgs),
}

#[derive(Args)]
struct TheoryArgs {
    /// Budget b.
    #[arg(long)]
    b: f64,
    /// Horizons T (comma separated).
    #[arg(long = "t", value_delimiter = ',')]
    horizons: Vec<u32>,
    /// Interval upper bounds U (comma separated).
    #[arg(long = "u", value_delimiter = ',')]
    uppers: Vec<u32>,
    /// Emit CSV instead of an aligned table.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario config (JSON).
    config: PathBuf,
    /// Override the horizon T.
    #[arg(long = "T")]
    horizon: Option<u32>,
    /// Override the budget b.
    #[arg(long)]
    b: Option<f64>,
    /// Override the replications per point.
    #[arg(long)]
    n_reps: Option<usize>,
    /// Master seed; falls back to the config, then to $OUS_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the penalty weight σ (default 1/τ*).
    #[arg(long)]
    sigma: Option<f64>,
    /// Override the policy list (comma separated).
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<String>>,
    /// Override the interval widths (comma separated).
    #[arg(long, value_delimiter = ',')]
    widths: Option<Vec<u32>>,
    /// Override the scenario id.
    #[arg(long)]
    scenario_id: Option<String>,
    /// Output CSV (default: <scenario_id>.csv).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args)]
struct IngestArgs {
    /// Step log CSV: user_id,timestamp,steps,message_flag.
    input: PathBuf,
    /// User-day CSV to write.
    output: PathBuf,
    /// Also dump the 144 per-decision-time flag codes (2·risk + available).
    #[arg(long)]
    flags: bool,
}

#[derive(Args)]
struct ReplayArgs {
    /// User-day CSV produced by `ingest`.
    userdays: PathBuf,
    /// Interval widths (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0")]
    width: Vec<u32>,
    /// Budget b.
    #[arg(long, default_value_t = 1.5)]
    b: f64,
    /// Decision times per day.
    #[arg(long = "T", default_value_t = 144)]
    horizon: u32,
    /// Penalty weight σ (default 1/τ*).
    #[arg(long)]
    sigma: Option<f64>,
    /// Policies (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "alg1,alg2,const_bU,seqrts")]
    policies: Vec<String>,
    /// Master seed; falls back to $OUS_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV.
    #[arg(long, default_value = "replay.csv")]
    out: PathBuf,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Step log CSV to write.
    output: PathBuf,
    #[arg(long, default_value_t = 10)]
    users: usize,
    #[arg(long, default_value_t = 7)]
    days: usize,
    /// Probability that a decision time is a risk time.
    #[arg(long, default_value_t = 0.3)]
    sedentary_fraction: f64,
    /// Master seed; falls back to $OUS_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ThreadArgs {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl ThreadArgs {
    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads.unwrap_or(0))
            .build()
            .context("starting thread pool")?;
        Ok(pool.install(f))
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var("OUS_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| OusError::Config(format!("OUS_SEED must be an unsigned integer, got {s:?}")).into()),
        Err(_) => Ok(None),
    }
}

fn parse_policies(names: &[String]) -> Result<Vec<PolicyKind>> {
    Ok(names
        .iter()
        .map(|n| n.trim().parse())
        .collect::<Result<Vec<PolicyKind>, OusError>>()?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| OusError::io(path, e))?))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| OusError::io(path, e))?;
    Ok(())
}

fn cmd_theory(args: &TheoryArgs) -> Result<()> {
    if !(args.b.is_finite() && args.b > 0.0) {
        return Err(OusError::Config(format!("--b must be positive, got {}", args.b)).into());
    }
    if args.horizons.is_empty() && args.uppers.is_empty() {
        return Err(OusError::Config("give at least one of --t or --u".into()).into());
    }
    let rows: Vec<(&str, u32, Regime, f64)> = args
        .horizons
        .iter()
        .map(|&t| ("T", t, Regime::classify(f64::from(t), args.b), theoretical_cr_rand(t, args.b)))
        .chain(
            args.uppers
                .iter()
                .map(|&u| ("U", u, Regime::classify(f64::from(u), args.b), theoretical_cr_learn(u, args.b))),
        )
        .collect();
    let mut out = io::stdout().lock();
    if args.csv {
        writeln!(out, "kind,value,b,regime,bound")?;
        for (sym, v, regime, x) in rows {
            writeln!(out, "{sym},{v},{},{},{x:.6}", args.b, regime.label(sym))?;
        }
    } else {
        writeln!(out, "{:<4} {:>6} {:<14} {:>9}", "", "value", "regime", "bound")?;
        for (sym, v, regime, x) in rows {
            writeln!(out, "{sym:<4} {v:>6} {:<14} {x:>9.6}", regime.label(sym))?;
        }
    }
    Ok(())
}

fn cmd_scenario(args: &ScenarioArgs, audit: bool) -> Result<()> {
    let mut file = ScenarioFile::load(&args.config)?;
    file.horizon = args.horizon.or(file.horizon);
    file.b = args.b.or(file.b);
    file.n_reps = args.n_reps.or(file.n_reps);
    file.sigma = args.sigma.or(file.sigma);
    file.widths = args.widths.clone().or(file.widths);
    file.scenario_id = args.scenario_id.clone().or(file.scenario_id);
    if let Some(p) = &args.policies {
        file.policies = Some(parse_policies(p)?);
    }
    file.master_seed = match args.seed.or(file.master_seed) {
        Some(s) => Some(s),
        None => env_seed()?,
    };
    let cfg = file.resolve()?;
    let wanted = if audit { "an audit" } else { "a tau or width sweep" };
    if cfg.experiment.is_audit() != audit {
        let other = if audit { "simulate" } else { "audit" };
        return Err(OusError::Config(format!(
            "`experiment`: {:?} is not {wanted}; use `ous {other}`",
            cfg.experiment
        ))
        .into());
    }
    debug_assert!(audit || matches!(cfg.experiment, Experiment::TauSweep | Experiment::WidthSweep));
    let rows = args.threads.install(|| run_scenario(&cfg))??;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.scenario_id)));
    export_csv(&rows, &out)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_ingest(args: &IngestArgs) -> Result<()> {
    let rows = read_step_log(&args.input)?;
    let days = extract_user_days(rows)?;
    let w = create(&args.output)?;
    write_user_days_csv(&days, args.flags, w)?;
    println!("wrote {} user-days to {}", days.len(), args.output.display());
    Ok(())
}

fn cmd_replay(args: &ReplayArgs) -> Result<()> {
    let file = File::open(&args.userdays).map_err(|e| OusError::io(&args.userdays, e))?;
    let days = read_user_days_csv(io::BufReader::new(file), &args.userdays)?;
    let policies = parse_policies(&args.policies)?;
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let root = RngStream::new(seed);
    let mut rows = Vec::new();
    for &w in &args.width {
        let cfg = ReplayConfig {
            budget: args.b,
            horizon: args.horizon,
            width: w,
            policies: policies.clone(),
            sigma: args.sigma,
        };
        let outcome = args
            .threads
            .install(|| replay_with(&cfg, &days, &root.derive(u64::from(w))))?
            .map_err(|e| match e {
                OusError::InvalidParameter(m) => OusError::Config(m),
                other => other,
            })?;
        eprintln!(
            "width {w}: {} user-days replayed, {} without risk times skipped, {} below budget skipped",
            outcome.days_used, outcome.skipped_empty, outcome.skipped_below_budget
        );
        rows.extend(outcome.rows);
    }
    export_csv(&rows, &args.out)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let rows = generate_synthetic_log(args.users, args.days, args.sedentary_fraction, &RngStream::new(seed))?;
    let mut w = create(&args.output)?;
    write_step_log(&rows, &mut w).map_err(|e| OusError::io(&args.output, io::Error::other(e)))?;
    finish(w, &args.output)?;
    println!("wrote {} rows to {}", rows.len(), args.output.display());
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<OusError>() {
        Some(OusError::Io { .. }) => EXIT_IO,
        Some(
            OusError::Config(_)
            | OusError::InvalidParameter(_)
            | OusError::InvalidInput(_)
            | OusError::Parse { .. },
        ) => EXIT_CONFIG,
        Some(_) => 1,
        None if err.downcast_ref::<io::Error>().is_some() => EXIT_IO,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Theory(a) => cmd_theory(a),
        Command::Simulate(a) => cmd_scenario(a, false),
        Command::Audit(a) => cmd_scenario(a, true),
        Command::Ingest(a) => cmd_ingest(a),
        Command::Replay(a) => cmd_replay(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
