// SPDX-License-Identifier: Apache-2.0

//! `qmetro`: bounds, resource allocation, figure data, Monte-Carlo runs and
//! self-verification for decoherence-limited qubit frequency estimation.
//!
//! Exit codes: 0 success, 2 invalid input, 3 infeasible resources,
//! 4 verification failure.

mod config;
mod output;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;

use config::{parse, pick, require, FileConfig};
use output::{Format, Sink};
use qmetro::allocator::{self, Allocation, FigureKind, FigureTable, Resources, DEFAULT_NU_MIN, FIG3_SCALES};
use qmetro::bounds::{bound, BoundForm, BoundQuery};
use qmetro::channel::ChannelParams;
use qmetro::montecarlo::{run_trials, sweet_spot_offset, EstimateReport, TrialConfig};
use qmetro::probes::{ProbeFamily, ProbeSpec};
use qmetro::verify::{run_all, VerifyOptions, VerifyReport, DEFAULT_TOLERANCE};
use qmetro::Execution;

/// Environment variable holding the worker-thread count.
const THREADS_ENV: &str = "QMETRO_THREADS";

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Infeasible(String),
    VerificationFailed,
    Io(String),
}

impl From<qmetro::Error> for CliError {
    fn from(e: qmetro::Error) -> Self {
        match e {
            qmetro::Error::Infeasible(m) => CliError::Infeasible(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::VerificationFailed => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Infeasible(m) => write!(f, "infeasible resources: {m}"),
            CliError::VerificationFailed => f.write_str("verification failed"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

/// All rates are in s⁻¹ and all times in s.
#[derive(Debug, Parser)]
#[command(name = "qmetro", version, about = "Qubit frequency-estimation bounds and resource allocation")]
struct Cli {
    /// JSON file of defaults; keys are the long flag names (e.g. "T", "nu-min").
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format: json or csv [default: csv for figure, json otherwise].
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a lower bound on δg (s⁻¹).
    Bound(BoundArgs),
    /// Choose T, n and ν for a qubit supply.
    Optimize(OptimizeArgs),
    /// Emit the curve data of the interaction-time or dimensionless-bound figures.
    Figure(FigureArgs),
    /// Simulate the arccos estimator.
    Simulate(SimulateArgs),
    /// Run the built-in oracle suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ChannelArgs {
    /// Longitudinal decay rate γ₁ (s⁻¹) [default: 0].
    #[arg(long)]
    gamma1: Option<f64>,
    /// Transverse dephasing rate γ₂ (s⁻¹) [default: 0].
    #[arg(long)]
    gamma2: Option<f64>,
    /// Bloch z of the channel fixed point, in [-1, 1] [default: 0].
    #[arg(long)]
    mu: Option<f64>,
}

impl ChannelArgs {
    fn resolve(&self, file: &FileConfig) -> Result<ChannelParams, CliError> {
        Ok(ChannelParams::new(
            pick(self.gamma1, file.gamma1, 0.0),
            pick(self.gamma2, file.gamma2, 0.0),
            pick(self.mu, file.mu, 0.0),
        )?)
    }
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// product or cat [default: product].
    #[arg(long)]
    family: Option<String>,
    /// nodec, weak or strong [default: strong].
    #[arg(long)]
    form: Option<String>,
    /// Qubits per probe [default: 1].
    #[arg(long)]
    n: Option<usize>,
    /// Number of probes.
    #[arg(long)]
    nu: Option<u64>,
    /// Interaction time T (s).
    #[arg(long = "T")]
    t: Option<f64>,
    /// Qubit supply rate R (s⁻¹); adds the dimensionless bound when γ₂ > 0.
    #[arg(long = "R")]
    r: Option<f64>,
    #[command(flatten)]
    channel: ChannelArgs,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    /// product or cat [default: cat].
    #[arg(long)]
    family: Option<String>,
    /// Qubit supply rate R (s⁻¹).
    #[arg(long = "R")]
    r: Option<f64>,
    /// Total duration τ (s).
    #[arg(long)]
    tau: Option<f64>,
    /// Minimum number of probes [default: 50].
    #[arg(long = "nu-min")]
    nu_min: Option<u64>,
    #[command(flatten)]
    channel: ChannelArgs,
}

#[derive(Debug, Args)]
struct FigureArgs {
    /// 2 (optimal interaction time) or 3 (dimensionless cat bound).
    #[arg(long)]
    which: Option<String>,
    /// Smallest γ₂τ of the log grid [default: 0.01 for 2, 1e-4 for 3].
    #[arg(long = "grid-min")]
    grid_min: Option<f64>,
    /// Largest γ₂τ of the log grid [default: 100].
    #[arg(long = "grid-max")]
    grid_max: Option<f64>,
    /// Grid points per curve [default: 200].
    #[arg(long)]
    points: Option<usize>,
    /// Comma-separated √(R/γ₂) values for figure 3 [default: 10,100,1000,10000].
    #[arg(long, value_delimiter = ',')]
    scales: Option<Vec<f64>>,
    /// Minimum number of probes [default: 50].
    #[arg(long = "nu-min")]
    nu_min: Option<u64>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// product or cat [default: product].
    #[arg(long)]
    family: Option<String>,
    /// Qubits per probe [default: 1].
    #[arg(long)]
    n: Option<usize>,
    /// Interaction time T (s) [default: 1].
    #[arg(long = "T")]
    t: Option<f64>,
    /// True coupling g (s⁻¹) [default: 0].
    #[arg(long)]
    g: Option<f64>,
    /// Move g to the nearest point with |sin(m g T)| = 1.
    #[arg(long = "gT-sweet")]
    gt_sweet: bool,
    /// Probes per experiment.
    #[arg(long)]
    nu: Option<u64>,
    /// Independent experiments [default: 2000].
    #[arg(long)]
    experiments: Option<u64>,
    /// RNG seed [default: 0, with a warning].
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    channel: ChannelArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Largest probe simulated densely, at most 6 [default: 4].
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// Relative tolerance of the dense-algebra checks [default: 1e-8].
    #[arg(long)]
    tolerance: Option<f64>,
    /// Draws per randomized check [default: 200].
    #[arg(long)]
    draws: Option<usize>,
    /// RNG seed for the randomized checks [default: 0].
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct BoundOutput {
    delta_g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimensionless: Option<f64>,
    inputs: BoundQuery,
}

#[derive(Serialize)]
struct BoundRow {
    delta_g: f64,
    dimensionless: Option<f64>,
    family: ProbeFamily,
    form: BoundForm,
    n: usize,
    nu: u64,
    #[serde(rename = "T")]
    t: f64,
    gamma1: f64,
    gamma2: f64,
    mu: f64,
}

#[derive(Serialize, Deserialize)]
struct OptimizeOutput {
    #[serde(flatten)]
    allocation: Allocation,
    inputs: Resources,
}

#[derive(Serialize)]
struct OptimizeRow {
    family: ProbeFamily,
    regime: &'static str,
    #[serde(rename = "T")]
    t: f64,
    n: u64,
    nu: u64,
    #[serde(rename = "N")]
    total_qubits: u64,
    delta_g: f64,
    dimensionless: Option<f64>,
    #[serde(rename = "T_continuous")]
    t_continuous: f64,
    n_continuous: f64,
    nu_continuous: f64,
    delta_g_continuous: f64,
    dimensionless_continuous: Option<f64>,
    delta_g_full: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct SimulateOutput {
    #[serde(flatten)]
    report: EstimateReport,
    inputs: TrialConfig,
}

#[derive(Serialize)]
struct SimulateRow {
    g_true: f64,
    g_est_mean: f64,
    slope: f64,
    empirical_delta_g: f64,
    empirical_delta_g_stderr: f64,
    predicted_delta_g: f64,
    clipped_fraction: f64,
    degenerate_fraction: f64,
    linearization: f64,
    experiments: u64,
    trials: u64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct VerifyOutput {
    #[serde(flatten)]
    report: VerifyReport,
    inputs: VerifyOptions,
}

#[derive(Serialize)]
struct VerifyRow<'a> {
    suite: &'a str,
    passed: bool,
    checks: usize,
    failures: usize,
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn cmd_bound(a: &BoundArgs, file: &FileConfig, sink: &Sink) -> Result<(), CliError> {
    let params = a.channel.resolve(file)?;
    let query = BoundQuery {
        family: parse(&pick(a.family.clone(), file.family.clone(), "product".into()))?,
        form: parse(&pick(a.form.clone(), file.form.clone(), "strong".into()))?,
        n: pick(a.n, file.n, 1),
        nu: require(a.nu, file.nu, "nu")?,
        t: require(a.t, file.t, "T")?,
        params,
    };
    let mut result = bound(&query)?;
    if let Some(r) = a.r.or(file.r) {
        result = result.with_dimensionless(r, params.gamma2());
    }
    let row = BoundRow {
        delta_g: result.delta_g,
        dimensionless: result.dimensionless,
        family: query.family,
        form: query.form,
        n: query.n,
        nu: query.nu,
        t: query.t,
        gamma1: params.gamma1(),
        gamma2: params.gamma2(),
        mu: params.mu(),
    };
    sink.emit(&BoundOutput { delta_g: result.delta_g, dimensionless: result.dimensionless, inputs: query }, &[row])
}

fn cmd_optimize(a: &OptimizeArgs, file: &FileConfig, sink: &Sink) -> Result<(), CliError> {
    let family: ProbeFamily = parse(&pick(a.family.clone(), file.family.clone(), "cat".into()))?;
    let res = Resources {
        r: require(a.r, file.r, "R")?,
        tau: require(a.tau, file.tau, "tau")?,
        nu_min: pick(a.nu_min, file.nu_min, DEFAULT_NU_MIN),
        gamma2: pick(a.channel.gamma2, file.gamma2, 0.0),
        gamma1: a.channel.gamma1.or(file.gamma1),
        mu: a.channel.mu.or(file.mu),
    };
    res.validate()?;
    let alloc = match family {
        ProbeFamily::Product => allocator::optimize_product(&res)?,
        ProbeFamily::Cat => allocator::optimize_cat(&res)?,
    };
    let c = alloc.continuous;
    let row = OptimizeRow {
        family: alloc.family,
        regime: alloc.regime.label(),
        t: alloc.t,
        n: alloc.n,
        nu: alloc.nu,
        total_qubits: alloc.total_qubits,
        delta_g: alloc.delta_g,
        dimensionless: alloc.dimensionless,
        t_continuous: c.t,
        n_continuous: c.n,
        nu_continuous: c.nu,
        delta_g_continuous: c.delta_g,
        dimensionless_continuous: c.dimensionless,
        delta_g_full: alloc.delta_g_full,
    };
    sink.emit(&OptimizeOutput { allocation: alloc, inputs: res }, &[row])
}

fn cmd_figure(a: &FigureArgs, file: &FileConfig, sink: &Sink, exec: Execution) -> Result<(), CliError> {
    let kind: FigureKind = parse(&require(a.which.clone(), file.which.clone(), "which")?)?;
    let default_min = match kind {
        FigureKind::Fig2 => 0.01,
        FigureKind::Fig3 => 1e-4,
    };
    let grid = allocator::log_grid(
        pick(a.grid_min, file.grid_min, default_min),
        pick(a.grid_max, file.grid_max, 100.0),
        pick(a.points, file.points, 200),
    )?;
    let scales = pick(a.scales.clone(), file.scales.clone(), FIG3_SCALES.to_vec());
    let table = allocator::figure_curves(kind, &grid, &scales, pick(a.nu_min, file.nu_min, DEFAULT_NU_MIN), exec)?;
    match &table {
        FigureTable::Fig2(rows) => sink.emit(&table, rows),
        FigureTable::Fig3(rows) => sink.emit(&table, rows),
    }
}

fn cmd_simulate(a: &SimulateArgs, file: &FileConfig, sink: &Sink, exec: Execution) -> Result<(), CliError> {
    let params = a.channel.resolve(file)?;
    let family: ProbeFamily = parse(&pick(a.family.clone(), file.family.clone(), "product".into()))?;
    let mut spec = ProbeSpec::new(family, pick(a.n, file.n, 1), pick(a.t, file.t, 1.0), pick(a.g, file.g, 0.0))?;
    if a.gt_sweet || file.gt_sweet == Some(true) {
        spec.g = sweet_spot_offset(&spec)?;
    }
    let seed = match a.seed.or(file.seed) {
        Some(s) => s,
        None => {
            warn("no --seed given, using seed 0");
            0
        }
    };
    let cfg = TrialConfig {
        spec,
        params,
        trials: require(a.nu, file.nu, "nu")?,
        experiments: pick(a.experiments, file.experiments, 2000),
        seed,
    };
    let report = run_trials(&cfg, exec)?;
    for w in &report.warnings {
        warn(w);
    }
    let row = SimulateRow {
        g_true: report.g_true,
        g_est_mean: report.g_est_mean,
        slope: report.slope,
        empirical_delta_g: report.empirical_delta_g,
        empirical_delta_g_stderr: report.empirical_delta_g_stderr,
        predicted_delta_g: report.predicted_delta_g,
        clipped_fraction: report.clipped_fraction,
        degenerate_fraction: report.degenerate_fraction,
        linearization: report.linearization,
        experiments: report.experiments,
        trials: report.trials,
        seed: report.seed,
    };
    sink.emit(&SimulateOutput { report, inputs: cfg }, &[row])
}

fn cmd_verify(a: &VerifyArgs, file: &FileConfig, sink: &Sink, exec: Execution) -> Result<(), CliError> {
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        n_max: pick(a.n_max, file.n_max, defaults.n_max),
        tolerance: pick(a.tolerance, file.tolerance, DEFAULT_TOLERANCE),
        draws: pick(a.draws, file.draws, defaults.draws),
        seed: pick(a.seed, file.seed, defaults.seed),
    };
    let report = run_all(&opts, exec)?;
    for s in &report.suites {
        eprintln!("{:<10} {} ({} checks)", s.name, if s.passed { "PASS" } else { "FAIL" }, s.checks);
        for f in s.failures.iter().take(5) {
            eprintln!("    {f}");
        }
    }
    let rows: Vec<VerifyRow> = report
        .suites
        .iter()
        .map(|s| VerifyRow { suite: &s.name, passed: s.passed, checks: s.checks, failures: s.failures.len() })
        .collect();
    let passed = report.passed;
    sink.emit(&VerifyOutput { report: report.clone(), inputs: opts }, &rows)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| CliError::Validation(format!("{THREADS_ENV}={v:?} is not a count")))?;
        Execution::init_threads(n)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let default_format = if matches!(cli.command, Command::Figure(_)) { "csv" } else { "json" };
    let sink = Sink {
        format: pick(cli.format.clone(), file.format.clone(), default_format.into()).parse::<Format>()?,
        path: cli.output.clone().or(file.output.clone().map(PathBuf::from)),
    };
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match &cli.command {
        Command::Bound(a) => cmd_bound(a, &file, &sink),
        Command::Optimize(a) => cmd_optimize(a, &file, &sink),
        Command::Figure(a) => cmd_figure(a, &file, &sink, exec),
        Command::Simulate(a) => cmd_simulate(a, &file, &sink, exec),
        Command::Verify(a) => cmd_verify(a, &file, &sink, exec),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
