//! Command-line front end: `simulate`, `sweep`, `aep` and `verify`.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 numerical
//! failure, 3 verification failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use oswec::energy::{aep_study, load_jpd_path};
use oswec::sweep::{run_study, Study, SweepPlan, STUDY_DISTANCES_M};
use oswec::verify::{run_verification, Fault, VerifyOptions};
use oswec::{Model, RunConfig, ScenarioKind, TorqueScenario, WaveCondition};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("verification failed")]
    Verify,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Verify => EXIT_VERIFY,
        }
    }
}

impl From<oswec::Error> for CliError {
    fn from(e: oswec::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "oswec", version, about = "Paired oscillating surge flap simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output directory; overrides the config's output_dir.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one torque- or wave-forced case.
    Simulate(SimulateArgs),
    /// Run a torque, wave or heading study grid.
    Sweep(SweepArgs),
    /// Annual energy per separation distance against a doubled single flap.
    Aep(AepArgs),
    /// Check the solver against its oracles on random systems.
    Verify(VerifyArgs),
}

#[allow(non_snake_case)]
#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// Torque scenario: single, right-only-left-fixed, right-only-left-free,
    /// in-phase, out-of-phase, arbitrary-phase.
    #[arg(long, conflicts_with_all = ["wave", "H", "beta"])]
    pub scenario: Option<ScenarioKind>,
    /// Regular-wave forcing instead of a torque scenario.
    #[arg(long)]
    pub wave: bool,
    /// Separation distance [m]; omit with --wave for one flap.
    #[arg(long = "d")]
    pub d: Option<f64>,
    /// Forcing period [s].
    #[arg(long = "Te")]
    pub Te: f64,
    /// Torque amplitude [N m].
    #[arg(long = "T0")]
    pub T0: Option<f64>,
    /// Wave height [m].
    #[arg(long = "H")]
    pub H: Option<f64>,
    /// Wave heading [deg].
    #[arg(long = "beta", default_value_t = 0.0)]
    pub beta: f64,
    /// Also write the time series CSV.
    #[arg(long)]
    pub series: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub study: Study,
    /// Comma-separated distances [m].
    #[arg(long)]
    pub distances: Option<String>,
    /// Comma-separated periods [s].
    #[arg(long)]
    pub periods: Option<String>,
    /// Comma-separated torque amplitudes [N m].
    #[arg(long)]
    pub amplitudes: Option<String>,
    /// Comma-separated wave heights [m].
    #[arg(long)]
    pub heights: Option<String>,
    /// Comma-separated headings [deg].
    #[arg(long)]
    pub headings: Option<String>,
    /// Comma-separated torque scenarios.
    #[arg(long)]
    pub scenarios: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct AepArgs {
    pub config: PathBuf,
    /// Joint occurrence table (CSV).
    #[arg(long)]
    pub jpd: PathBuf,
    /// Comma-separated distances [m]; default the seven reference separations.
    #[arg(long)]
    pub distances: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Optional config; only its integration settings are used.
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Test hook: inject a deliberate fault.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

/// Parses a comma-separated list; an empty list is an error.
pub fn parse_list<T: std::str::FromStr>(name: &str, text: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(CliError::Config(format!("--{name} list is empty")));
    }
    items
        .iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| CliError::Config(format!("--{name}: bad value '{s}': {e}")))
        })
        .collect()
}

struct Loaded {
    model: Model,
    out: PathBuf,
}

fn load(path: &Path, common: &Common) -> CliResult<Loaded> {
    let config = RunConfig::from_path(path)?;
    let model = config.to_model()?;
    let out = common.out.clone().unwrap_or_else(|| config.output_dir());
    Ok(Loaded { model, out })
}

fn write_file(dir: &Path, name: &str, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    let path = dir.join(name);
    fs::write(&path, buf).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    write_file(dir, name, |buf| {
        serde_json::to_writer_pretty(&mut *buf, value)?;
        buf.write_all(b"\n")
    })
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Config("--workers must be >= 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[allow(non_snake_case)]
#[derive(Serialize)]
struct SimulateOutput<'a> {
    model: oswec::ModelDescriptor,
    forcing: &'a oswec::dynamics::ForcingSpec,
    flaps: &'a [oswec::dynamics::FlapMetrics],
    power_W: &'a [f64],
    total_power_W: f64,
    steady: bool,
    cycles_used: usize,
    periods_integrated: usize,
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let l = load(&args.config, &args.common)?;
    let case = if args.wave {
        let h = args
            .H
            .ok_or_else(|| CliError::Config("--wave needs --H".into()))?;
        l.model
            .simulate_wave(&WaveCondition::new(h, args.Te, args.beta), args.d)?
    } else {
        let kind = args
            .scenario
            .ok_or_else(|| CliError::Config("give --scenario or --wave".into()))?;
        let t0 = args
            .T0
            .ok_or_else(|| CliError::Config("torque scenarios need --T0".into()))?;
        let distance = match (kind.is_dual(), args.d) {
            (true, Some(d)) => d,
            (true, None) => {
                return Err(CliError::Config(format!("scenario {kind} needs --d")));
            }
            (false, _) => 0.0,
        };
        l.model.simulate_torque(&TorqueScenario {
            kind,
            amplitude: t0,
            period: args.Te,
            distance,
        })?
    };

    let output = SimulateOutput {
        model: l.model.descriptor(),
        forcing: &case.forcing,
        flaps: &case.metrics.flaps,
        power_W: &case.power.per_flap,
        total_power_W: case.power.total,
        steady: case.metrics.steady,
        cycles_used: case.metrics.cycles_used,
        periods_integrated: case.metrics.periods_integrated,
    };
    write_json(&l.out, "simulate.json", &output)?;
    if args.series {
        write_file(&l.out, "timeseries.csv", |buf| case.record.write_csv(buf))?;
    }

    let rms: Vec<String> = case
        .metrics
        .flaps
        .iter()
        .map(|f| format!("{:.6}", f.rms_rotation))
        .collect();
    println!(
        "rms_rad=[{}] power_W=[{}] total_W={:.3} steady={}",
        rms.join(", "),
        case.power
            .per_flap
            .iter()
            .map(|p| format!("{p:.3}"))
            .collect::<Vec<_>>()
            .join(", "),
        case.power.total,
        case.metrics.steady
    );
    Ok(())
}

pub fn sweep_plan(args: &SweepArgs) -> CliResult<SweepPlan> {
    let mut plan = SweepPlan::default_for(args.study);
    if let Some(s) = &args.distances {
        plan.distances_m = parse_list("distances", s)?;
    }
    if let Some(s) = &args.periods {
        plan.periods_s = parse_list("periods", s)?;
    }
    if let Some(s) = &args.amplitudes {
        plan.torque_amplitudes_Nm = parse_list("amplitudes", s)?;
    }
    if let Some(s) = &args.heights {
        plan.wave_heights_m = parse_list("heights", s)?;
    }
    if let Some(s) = &args.headings {
        plan.headings_deg = parse_list("headings", s)?;
    }
    if let Some(s) = &args.scenarios {
        plan.scenarios = parse_list("scenarios", s)?;
    }
    // the heading study runs at a single separation
    if args.study == Study::Heading {
        if let Some(d) = args.distances.as_ref().map(|_| plan.distances_m[0]) {
            plan.heading_distance_m = d;
        }
    }
    Ok(plan)
}

pub fn cmd_sweep(args: &SweepArgs) -> CliResult<()> {
    let plan = sweep_plan(args)?;
    let l = load(&args.config, &args.common)?;
    let report = with_pool(args.common.workers, || run_study(args.study, &plan, &l.model))??;

    let stem = format!("sweep_{}", args.study);
    let csv = write_file(&l.out, &format!("{stem}.csv"), |buf| {
        report
            .write_csv(&mut *buf)
            .map_err(|e| std::io::Error::other(e.to_string()))
    })?;
    write_json(&l.out, &format!("{stem}.json"), &report.to_json())?;

    let failed = report.failed_rows().count();
    for r in report.failed_rows() {
        eprintln!(
            "point failed (T = {} s, d = {:?} m): {}",
            r.period_s,
            r.distance_m,
            r.error.as_deref().unwrap_or("")
        );
    }
    println!(
        "{} study: {} rows, {} failed -> {}",
        args.study,
        report.rows.len(),
        failed,
        csv.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct AepOutput<'a> {
    table: Vec<oswec::energy::AepRow>,
    relative_spread: f64,
    single: &'a oswec::energy::AepReport,
    dual: &'a [oswec::energy::AepReport],
}

pub fn cmd_aep(args: &AepArgs) -> CliResult<()> {
    let distances: Vec<f64> = match &args.distances {
        Some(s) => parse_list("distances", s)?,
        None => STUDY_DISTANCES_M.to_vec(),
    };
    let l = load(&args.config, &args.common)?;
    let jpd = load_jpd_path(&args.jpd)?;
    let study = with_pool(args.common.workers, || aep_study(&l.model, &jpd, &distances))??;

    write_file(&l.out, "aep.csv", |buf| study.write_table_csv(buf))?;
    write_json(
        &l.out,
        "aep.json",
        &AepOutput {
            table: study.table(),
            relative_spread: study.relative_spread(),
            single: &study.single,
            dual: &study.dual,
        },
    )?;
    write_file(&l.out, "aep_cells_single.csv", |buf| study.single.write_csv(buf))?;
    for r in &study.dual {
        let d = r.design.distance.unwrap_or(0.0);
        write_file(&l.out, &format!("aep_cells_d{d}.csv"), |buf| r.write_csv(buf))?;
    }

    for row in study.table() {
        println!(
            "{:<18} {:>10.4} GWh  {:>7.4}x",
            row.label, row.aep_GWh, row.relative_to_doubled_single
        );
    }
    println!("relative spread over distances: {:.4}", study.relative_spread());
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    let integration = match &args.config {
        Some(p) => RunConfig::from_path(p)?.integration,
        None => oswec::dynamics::IntegrationConfig::default(),
    };
    let fault = match args.inject_fault.as_deref() {
        None => None,
        Some("flip-damping-sign") => Some(Fault::FlipDampingSign),
        Some(other) => return Err(CliError::Config(format!("unknown fault '{other}'"))),
    };
    if args.cases == 0 {
        return Err(CliError::Config("--cases must be >= 1".into()));
    }
    let opts = VerifyOptions {
        cases: args.cases,
        seed: args.seed,
        fault,
    };
    let report = with_pool(args.common.workers, || run_verification(&opts, &integration))?;

    for (prop, pass, total) in report.summary() {
        let verdict = if pass == total { "PASS" } else { "FAIL" };
        println!("{verdict} {prop}: {pass}/{total} cases");
    }
    if let Some(out) = &args.common.out {
        write_json(out, "verify.json", &report)?;
    }
    if report.passed() {
        return Ok(());
    }
    for c in report.failures() {
        eprintln!("{}", c.case);
        for p in c.properties.iter().filter(|p| !p.passed) {
            eprintln!("  {} failed: {}", p.property, p.detail);
        }
    }
    Err(CliError::Verify)
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Aep(a) => cmd_aep(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
/// Usage errors map to the configuration exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            if !matches!(e, CliError::Verify) {
                eprintln!("error: {e}");
            }
            e.exit_code()
        }
    }
}
