//! `cellcov` — coverage, throughput and critical-density analysis of
//! downlink cellular networks over Poisson base-station fields, with
//! multi-slope pathloss and an antenna height difference.
//!
//! Exit codes: 0 success, 1 computational failure (a grid point failed,
//! or validation disagreed), 2 usage or configuration error.

mod config;
mod critical;
mod records;
mod sweep;
mod validate;

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use cellcov_core::analytic::{coverage_probability, cp_bounds_mspm};
use cellcov_core::montecarlo::{estimate_cp, estimate_st};

use config::{model_id, RawConfig, Settings};
use records::{write_records, CsvRow, OutputFormat, SweepRecord};

#[derive(Parser)]
#[command(
    name = "cellcov",
    version,
    about = "Coverage probability, spatial throughput and critical densities of downlink cellular networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic coverage and throughput at one operating point
    Eval(CommonArgs),
    /// Monte Carlo coverage and throughput at one operating point
    Simulate(CommonArgs),
    /// Sweep density or antenna height difference over a grid
    Sweep(CommonArgs),
    /// Critical densities, with and without a coverage requirement
    Critical(CommonArgs),
    /// Analytic-vs-Monte-Carlo agreement report over the standard grid
    Validate(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Config file: flat `key = value` lines or JSON with the same keys
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Pathloss exponents, e.g. "1.5,4" (overrides model.alphas)
    #[arg(long)]
    alphas: Option<String>,
    /// Breakpoint distances in meters, e.g. "10" (model.breakpoints_m)
    #[arg(long)]
    breakpoints_m: Option<String>,
    /// Decoding threshold in dB (net.tau_db)
    #[arg(long)]
    tau_db: Option<f64>,
    /// Transmit power in dBm; no effect on SIR results (net.p_dbm)
    #[arg(long)]
    p_dbm: Option<f64>,
    /// Antenna height difference in meters (net.delta_h_m)
    #[arg(long)]
    delta_h_m: Option<f64>,
    /// Base-station density in BS/km^2 (net.lambda_per_km2)
    #[arg(long)]
    lambda_per_km2: Option<f64>,
    /// Fading: rayleigh or rice (net.fading)
    #[arg(long)]
    fading: Option<String>,
    /// Rice noncentrality (net.rice_nu_nc)
    #[arg(long)]
    rice_nu_nc: Option<f64>,
    /// Rice degrees of freedom (net.rice_nu_dof)
    #[arg(long)]
    rice_nu_dof: Option<f64>,
    /// Monte Carlo trial count (mc.trials)
    #[arg(long)]
    trials: Option<u64>,
    /// Monte Carlo master seed (mc.seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Coverage requirement for critical-density analysis (qos.epsilon)
    #[arg(long)]
    epsilon: Option<f64>,

    /// Swept quantity: lambda or ahd (sweep.variable)
    #[arg(long)]
    sweep_variable: Option<String>,
    /// Sweep lower bound (sweep.lo)
    #[arg(long)]
    sweep_lo: Option<f64>,
    /// Sweep upper bound (sweep.hi)
    #[arg(long)]
    sweep_hi: Option<f64>,
    /// Sweep point count (sweep.points)
    #[arg(long)]
    sweep_points: Option<u64>,
    /// Sweep spacing: log or linear (sweep.scale)
    #[arg(long)]
    sweep_scale: Option<String>,
    /// Explicit sweep grid, e.g. "100,1000,10000" (sweep.grid)
    #[arg(long)]
    sweep_grid: Option<String>,
    /// Sweep outputs: analytic, mc, bounds (sweep.outputs)
    #[arg(long)]
    sweep_outputs: Option<String>,

    /// Output path (default: stdout)
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

/// Failure with the process exit code it maps to.
struct Failure {
    code: i32,
    error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn compute(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

fn main() {
    let cli = Cli::parse();
    if let Err(f) = run(cli) {
        eprintln!("error: {:#}", f.error);
        std::process::exit(f.code);
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Critical(args) => cmd_critical(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

fn build_settings(args: &CommonArgs) -> Result<Settings> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::empty(),
    };
    if let Some(v) = &args.alphas {
        raw.set_flat("model.alphas", v);
    }
    if let Some(v) = &args.breakpoints_m {
        raw.set_flat("model.breakpoints_m", v);
    }
    if let Some(v) = args.tau_db {
        raw.set("net.tau_db", v.into());
    }
    if let Some(v) = args.p_dbm {
        raw.set("net.p_dbm", v.into());
    }
    if let Some(v) = args.delta_h_m {
        raw.set("net.delta_h_m", v.into());
    }
    if let Some(v) = args.lambda_per_km2 {
        raw.set("net.lambda_per_km2", v.into());
    }
    if let Some(v) = &args.fading {
        raw.set_flat("net.fading", v);
    }
    if let Some(v) = args.rice_nu_nc {
        raw.set("net.rice_nu_nc", v.into());
    }
    if let Some(v) = args.rice_nu_dof {
        raw.set("net.rice_nu_dof", v.into());
    }
    if let Some(v) = args.trials {
        raw.set("mc.trials", v.into());
    }
    if let Some(v) = args.seed {
        raw.set("mc.seed", v.into());
    }
    if let Some(v) = args.epsilon {
        raw.set("qos.epsilon", v.into());
    }
    if let Some(v) = &args.sweep_variable {
        raw.set_flat("sweep.variable", v);
    }
    if let Some(v) = args.sweep_lo {
        raw.set("sweep.lo", v.into());
    }
    if let Some(v) = args.sweep_hi {
        raw.set("sweep.hi", v.into());
    }
    if let Some(v) = args.sweep_points {
        raw.set("sweep.points", v.into());
    }
    if let Some(v) = &args.sweep_scale {
        raw.set_flat("sweep.scale", v);
    }
    if let Some(v) = &args.sweep_grid {
        raw.set_flat("sweep.grid", v);
    }
    if let Some(v) = &args.sweep_outputs {
        raw.set_flat("sweep.outputs", v);
    }

    let settings = Settings::from_raw(raw)?;
    if settings.power_given {
        eprintln!(
            "note: net.p_dbm is stored for interface fidelity; coverage and throughput are power-invariant"
        );
    }
    Ok(settings)
}

fn emit<T: serde::Serialize + CsvRow>(
    args: &CommonArgs,
    records: &[T],
) -> Result<(), Failure> {
    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(
            std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))
                .map_err(usage)?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    write_records(records, args.format, &mut out).map_err(compute)
}

fn cmd_eval(args: CommonArgs) -> Result<(), Failure> {
    let settings = build_settings(&args).map_err(usage)?;
    let lambda = settings.require_lambda().map_err(usage)?;
    let cfg = settings.network_at(lambda, settings.ahd).map_err(usage)?;
    let cp = coverage_probability(&cfg).map_err(|e| compute(anyhow!(e)))?;
    let st = cfg.lambda * cp * (1.0 + cfg.tau).log2();
    let bounds = if cfg.model.segment_count() >= 3 {
        Some(cp_bounds_mspm(&cfg).map_err(|e| compute(anyhow!(e)))?)
    } else {
        None
    };
    let record = SweepRecord {
        lambda_per_km2: lambda * 1e6,
        delta_h_m: settings.ahd,
        model_id: model_id(&cfg.model),
        cp_analytic: Some(cp),
        st_analytic: Some(st),
        cp_mc: None,
        cp_mc_ci95: None,
        st_mc: None,
        cp_lower: bounds.map(|b| b.lower),
        cp_upper: bounds.map(|b| b.upper),
        error: None,
    };
    emit(&args, &[record])
}

fn cmd_simulate(args: CommonArgs) -> Result<(), Failure> {
    let settings = build_settings(&args).map_err(usage)?;
    let lambda = settings.require_lambda().map_err(usage)?;
    if settings.trials < 1000 {
        return Err(usage(anyhow!("mc.trials: at least 1000 trials required")));
    }
    let cfg = settings.network_at(lambda, settings.ahd).map_err(usage)?;
    let cp = estimate_cp(&cfg, settings.trials, settings.seed);
    let st = estimate_st(&cfg, settings.trials, settings.seed);
    let record = SweepRecord {
        lambda_per_km2: lambda * 1e6,
        delta_h_m: settings.ahd,
        model_id: model_id(&cfg.model),
        cp_analytic: None,
        st_analytic: None,
        cp_mc: Some(cp.mean),
        cp_mc_ci95: Some(cp.ci95_halfwidth),
        st_mc: Some(st.mean),
        cp_lower: None,
        cp_upper: None,
        error: None,
    };
    emit(&args, &[record])
}

fn cmd_sweep(args: CommonArgs) -> Result<(), Failure> {
    let settings = build_settings(&args).map_err(usage)?;
    let (records, failed) = sweep::run_sweep(&settings).map_err(usage)?;
    emit(&args, &records)?;
    if failed {
        Err(compute(anyhow!("one or more grid points failed; see the error column")))
    } else {
        Ok(())
    }
}

fn cmd_critical(args: CommonArgs) -> Result<(), Failure> {
    let settings = build_settings(&args).map_err(usage)?;
    let records = critical::run_critical(&settings).map_err(compute)?;
    emit(&args, &records)
}

// The validation report is nested (per-point variant checks), so it is
// always emitted as JSON regardless of --format.
fn cmd_validate(args: CommonArgs) -> Result<(), Failure> {
    let settings = build_settings(&args).map_err(usage)?;
    let report = validate::run_validate(&settings).map_err(compute)?;
    let mut out: Box<dyn Write> = match &args.output {
        Some(path) => Box::new(
            std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))
                .map_err(usage)?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    serde_json::to_writer_pretty(&mut out, &report)
        .and_then(|()| {
            use std::io::Write as _;
            writeln!(out).map_err(serde_json::Error::io)
        })
        .map_err(|e| compute(anyhow!(e)))?;
    if report.overall_pass {
        Ok(())
    } else {
        Err(compute(anyhow!(
            "validation failed: {}/{} primary points passed",
            report.primary_passed,
            report.primary_total
        )))
    }
}
