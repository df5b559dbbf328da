//! `aud` — closed forms, simulation, figure sweeps and verification.
//!
//! Exit status: 0 on success or verify pass, 1 on verify fail, 2 on usage or
//! parameter errors.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use aud_core::analytic::{find_m0_star, AnalyticValue};
use aud_core::experiments::{
    closed_forms, emit_csv, parse_config, run_sweep, verify, write_csv, ConfigMap, FigureId,
    SweepSpec,
};
use aud_core::simulator::{self, Discipline, SimRunConfig, SystemSpec, DEFAULT_WARMUP};
use aud_core::stochastic::{ArrivalModel, DecisionKind, DecisionModel, ServiceKind, ServiceModel};
use aud_core::Error;

#[derive(Parser)]
#[command(
    name = "aud",
    version,
    about = "Age upon decisions for bufferless update queues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form AuD and missing probability of one system.
    Analytic(AnalyticArgs),
    /// Simulate one system.
    Simulate(SimulateArgs),
    /// Run a figure sweep and write its CSV.
    Sweep(SweepArgs),
    /// Run a figure sweep and check it against the tolerance policy.
    Verify(VerifyArgs),
    /// Print the event log of a short run.
    Trace(TraceArgs),
}

#[derive(Args)]
struct ConfigArg {
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SystemFlags {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Decision rate; for periodic decisions defaults to m0 * mu.
    #[arg(long)]
    nu: Option<f64>,
    /// Periodic decision ratio nu / mu.
    #[arg(long)]
    m0: Option<u64>,
    /// uniform | exp | det
    #[arg(long)]
    service: Option<String>,
    /// poisson | periodic
    #[arg(long)]
    decision: Option<String>,
    /// blocking1 | fcfs
    #[arg(long)]
    discipline: Option<String>,
    /// Fixed lattice offset for periodic decisions (random when absent).
    #[arg(long)]
    phase: Option<f64>,
}

#[derive(Args)]
struct BudgetFlags {
    /// Decisions per replication, warmup included.
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    warmup: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    system: SystemFlags,
    /// Also scan m0 = 1..=N for the uniform/exponential crossing m0*.
    #[arg(long, value_name = "N")]
    m0_star: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    system: SystemFlags,
    #[command(flatten)]
    budget: BudgetFlags,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    config: ConfigArg,
    #[command(flatten)]
    system: SystemFlags,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_events: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepFlags {
    #[command(flatten)]
    config: ConfigArg,
    /// fig_aud_vs_rho_M | fig_pmis_vs_nu_M | fig_aud_vs_rho_D |
    /// fig_pmis_vs_nu_D | fig_decision_compare | fig_summary_bar
    #[arg(long)]
    figure: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    m0: Option<u64>,
    /// Comma-separated grid overriding the figure default.
    #[arg(long)]
    grid: Option<String>,
    /// Add infinite-buffer rows to load sweeps.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    fcfs_baselines: Option<bool>,
    #[command(flatten)]
    budget: BudgetFlags,
    #[arg(long)]
    k_sigma: Option<f64>,
    #[arg(long)]
    approx_rel_aud: Option<f64>,
    #[arg(long)]
    approx_rel_pmis: Option<f64>,
    /// CSV destination (stdout for sweep when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    flags: SweepFlags,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    flags: SweepFlags,
}

/// Flag value, else config value, else `None`.
struct Settings {
    config: ConfigMap,
}

impl Settings {
    fn load(arg: &ConfigArg) -> Result<Self, Error> {
        let config = match &arg.config {
            Some(path) => parse_config(&fs::read_to_string(path)?)?,
            None => ConfigMap::new(),
        };
        Ok(Self { config })
    }

    fn get<T: FromStr>(&self, flag: Option<T>, key: &'static str) -> Result<Option<T>, Error>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.config.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| Error::InvalidParameter {
                name: key,
                reason: format!("cannot parse `{raw}`: {e}"),
            }),
        }
    }

    fn require<T: FromStr>(&self, flag: Option<T>, key: &'static str) -> Result<T, Error>
    where
        T::Err: std::fmt::Display,
    {
        self.get(flag, key)?.ok_or_else(|| Error::InvalidParameter {
            name: key,
            reason: "required".into(),
        })
    }
}

fn build_system(s: &Settings, f: &SystemFlags) -> Result<SystemSpec, Error> {
    let lambda = s.require(f.lambda, "lambda")?;
    let mu = s.require(f.mu, "mu")?;
    let kind: ServiceKind = s.require(f.service.clone(), "service")?.parse()?;
    let decision: DecisionKind = s
        .get(f.decision.clone(), "decision")?
        .unwrap_or_else(|| "poisson".into())
        .parse()?;
    let discipline: Discipline = s
        .get(f.discipline.clone(), "discipline")?
        .unwrap_or_else(|| "blocking1".into())
        .parse()?;
    let m0 = s.get(f.m0, "m0")?;
    let nu = match (s.get(f.nu, "nu")?, m0) {
        (Some(nu), _) => nu,
        (None, Some(m0)) => m0 as f64 * mu,
        (None, None) => {
            return Err(Error::InvalidParameter {
                name: "nu",
                reason: "give --nu or --m0".into(),
            })
        }
    };
    let decision = match decision {
        DecisionKind::Poisson => DecisionModel::poisson(nu)?,
        DecisionKind::Periodic => DecisionModel::periodic(nu, s.get(f.phase, "phase")?)?,
    };
    Ok(SystemSpec {
        arrival: ArrivalModel::new(lambda)?,
        service: ServiceModel::named(kind, mu)?,
        decision,
        discipline,
    })
}

fn show(v: Option<AnalyticValue>) -> String {
    v.map_or_else(|| "no closed form".to_string(), |v| v.to_string())
}

fn cmd_analytic(a: AnalyticArgs) -> Result<ExitCode, Error> {
    let s = Settings::load(&a.config)?;
    let m0_star = s.get(a.m0_star, "m0-star")?;
    // the m0* scan needs only the two rates
    if m0_star.is_none() || s.get(a.system.service.clone(), "service")?.is_some() {
        let spec = build_system(&s, &a.system)?;
        println!("system: {}", spec.label());
        println!("rho: {}", spec.rho()?);
        let (aud, pmis) = closed_forms(&spec)?;
        println!("avg_aud: {}", show(aud));
        println!("missing_prob: {}", show(pmis));
    }
    if let Some(max) = m0_star {
        let lambda = s.require(a.system.lambda, "lambda")?;
        let mu = s.require(a.system.mu, "mu")?;
        match find_m0_star(lambda, mu, max)? {
            Some(m) => println!("m0_star: {m}"),
            None => println!("m0_star: none in 1..={max}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(a: SimulateArgs) -> Result<ExitCode, Error> {
    let s = Settings::load(&a.config)?;
    let spec = build_system(&s, &a.system)?;
    let config = SimRunConfig {
        spec,
        horizon: s.get(a.budget.horizon, "horizon")?.unwrap_or(2_000_000),
        warmup: s.get(a.budget.warmup, "warmup")?.unwrap_or(DEFAULT_WARMUP),
        seed: s.get(a.budget.seed, "seed")?.unwrap_or(1),
    };
    let reps = s.get(a.budget.reps, "reps")?.unwrap_or(1);
    let est = simulator::replicate(&config, reps)?;
    println!("system: {}", config.spec.label());
    println!("avg_aud: {} (stderr {})", est.avg_aud, est.aud_stderr);
    println!(
        "missing_prob: {} (stderr {})",
        est.missing_prob, est.pmis_stderr
    );
    println!("drop_prob: {} (stderr {})", est.drop_prob, est.drop_stderr);
    println!(
        "mean_interdeparture: {} (stderr {})",
        est.mean_interdeparture, est.interdeparture_stderr
    );
    println!("n_decisions: {}", est.n_decisions);
    println!("n_generated: {}", est.n_generated);
    println!("n_successful: {}", est.n_successful);
    println!("n_dropped: {}", est.n_dropped);
    println!("n_missed_updates: {}", est.n_missed_updates);
    println!("max_in_system: {}", est.max_in_system);
    Ok(ExitCode::SUCCESS)
}

fn cmd_trace(a: TraceArgs) -> Result<ExitCode, Error> {
    let s = Settings::load(&a.config)?;
    let spec = build_system(&s, &a.system)?;
    let seed = s.get(a.seed, "seed")?.unwrap_or(1);
    let max_events = s.get(a.max_events, "max-events")?.unwrap_or(100);
    let config = SimRunConfig::new(spec, 2, seed).with_warmup(0);
    let trace = simulator::trace(&config, max_events)?;
    match s.get(a.out, "out")? {
        Some(path) => trace.write_text(io::BufWriter::new(fs::File::create(path)?))?,
        None => trace.write_text(io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_grid(raw: &str) -> Result<Vec<f64>, Error> {
    raw.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidParameter {
                    name: "grid",
                    reason: format!("`{t}`: {e}"),
                })
        })
        .collect()
}

fn build_sweep(f: &SweepFlags, default_baselines: bool) -> Result<(SweepSpec, Settings), Error> {
    let s = Settings::load(&f.config)?;
    let figure: FigureId = s.require(f.figure.clone(), "figure")?.parse()?;
    let mut spec = SweepSpec::for_figure(figure);
    macro_rules! set {
        ($field:expr, $flag:expr, $key:literal) => {
            if let Some(v) = s.get($flag, $key)? {
                $field = v;
            }
        };
    }
    set!(spec.mu, f.mu, "mu");
    set!(spec.rho, f.rho, "rho");
    set!(spec.nu, f.nu, "nu");
    set!(spec.m0, f.m0, "m0");
    if let Some(g) = s.get(f.grid.clone(), "grid")? {
        spec.grid = parse_grid(&g)?;
    }
    spec.fcfs_baselines = s
        .get(f.fcfs_baselines, "fcfs-baselines")?
        .unwrap_or(default_baselines);
    set!(spec.budget.horizon, f.budget.horizon, "horizon");
    set!(spec.budget.warmup, f.budget.warmup, "warmup");
    set!(spec.budget.n_reps, f.budget.reps, "reps");
    set!(spec.budget.seed, f.budget.seed, "seed");
    set!(spec.tolerance.k_sigma, f.k_sigma, "k-sigma");
    set!(
        spec.tolerance.approx_rel_aud,
        f.approx_rel_aud,
        "approx-rel-aud"
    );
    set!(
        spec.tolerance.approx_rel_pmis,
        f.approx_rel_pmis,
        "approx-rel-pmis"
    );
    spec.validate()?;
    Ok((spec, s))
}

fn write_table(rows: &[aud_core::experiments::SweepRow], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => emit_csv(rows, path),
        None => write_csv(rows, io::stdout().lock()),
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<ExitCode, Error> {
    let (spec, s) = build_sweep(&a.flags, false)?;
    let table = run_sweep(&spec)?;
    write_table(&table.rows, s.get(a.flags.out.clone(), "out")?.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode, Error> {
    let (spec, s) = build_sweep(&a.flags, true)?;
    let table = run_sweep(&spec)?;
    if let Some(path) = s.get(a.flags.out.clone(), "out")? {
        emit_csv(&table.rows, &path)?;
    }
    let report = verify(&table, &spec.tolerance);
    print!("{report}");
    io::stdout().flush()?;
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analytic(a) => cmd_analytic(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Trace(a) => cmd_trace(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("aud: {e}");
            ExitCode::from(2)
        }
    }
}
