//! `siri`: analyze and simulate the delayed SIRI model from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use siri_core::analysis::{compute_r0, equilibrium_report, DEFAULT_TOL};
use siri_core::incidence::linspace;
use siri_core::scenario::{
    exit_code, fmt_f64, run_scenario, sweep, verify_incidence, write_sweep_csv, Preset, ScenarioConfig,
    SweepParam,
};
use siri_core::Error;

#[derive(Parser)]
#[command(name = "siri", version, about = "Delayed SIRI epidemic model: equilibria, simulation and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print R0, the equilibria and the next-generation matrices.
    Analyze(SourceGroup),
    /// Integrate a scenario and check invariants and Lyapunov certificates.
    Run(RunArgs),
    /// Equilibrium analysis over a list of values for one parameter.
    Sweep(SweepArgs),
    /// Check the incidence hypotheses on a sample grid.
    VerifyIncidence(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig1,
    Fig2,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SourceGroup {
    /// Scenario config file (key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in scenario.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceGroup,
    /// Directory for the trajectory CSV and summary (overrides run.output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step (overrides run.step).
    #[arg(long)]
    step: Option<f64>,
    /// Final time (overrides run.t_end).
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Skip the Lyapunov certificate evaluation.
    #[arg(long = "no-certificates")]
    no_certificates: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: SourceGroup,
    /// lambda, mu, gamma, c, beta, delta or h.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    values: Vec<f64>,
    /// Directory for `<name>_sweep_<param>.csv`; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: SourceGroup,
    /// Upper end of the s grid; defaults to 2 lambda / mu.
    #[arg(long = "s-max")]
    s_max: Option<f64>,
    /// Upper end of the i grid; defaults to 2 lambda / mu.
    #[arg(long = "i-max")]
    i_max: Option<f64>,
    /// Points per grid axis.
    #[arg(long, default_value_t = 101)]
    points: usize,
}

fn load(src: &SourceGroup) -> Result<ScenarioConfig, Error> {
    match (&src.config, src.preset) {
        (Some(path), _) => ScenarioConfig::load(path),
        (None, Some(PresetArg::Fig1)) => Ok(ScenarioConfig::preset(Preset::Fig1)),
        (None, Some(PresetArg::Fig2)) => Ok(ScenarioConfig::preset(Preset::Fig2)),
        (None, None) => Err(Error::Config("one of --config or --preset is required".into())),
    }
}

fn failure_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 1,
        _ => exit_code::CONFIG as u8,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze(&a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => run_sweep(a),
        Command::VerifyIncidence(a) => verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(failure_code(&e))
        }
    }
}

fn analyze(src: &SourceGroup) -> Result<u8, Error> {
    let config = load(src)?;
    config.validate()?;
    let inc = config.build_incidence()?;
    let report = equilibrium_report(&config.params, &inc, DEFAULT_TOL)?;
    let (_, ngm) = compute_r0(&config.params, &inc);
    let mat = |m: [[f64; 2]; 2]| {
        format!("[[{}, {}], [{}, {}]]", fmt_f64(m[0][0]), fmt_f64(m[0][1]), fmt_f64(m[1][0]), fmt_f64(m[1][1]))
    };
    println!("name = {}", config.name);
    println!("r0 = {}", fmt_f64(report.r0));
    println!("k = {}", fmt_f64(report.k));
    println!("e0 = {}, {}, {}", fmt_f64(report.e0.s), fmt_f64(report.e0.i), fmt_f64(report.e0.r));
    match &report.endemic {
        Some(e) => println!("endemic = {}, {}, {}", fmt_f64(e.s), fmt_f64(e.i), fmt_f64(e.r)),
        None => println!("endemic = none"),
    }
    println!("equilibrium_residual = {}", fmt_f64(report.residual));
    println!("F = {}", mat(ngm.f));
    println!("V = {}", mat(ngm.v));
    println!("FV^-1 = {}", mat(ngm.fv_inv));
    println!("spectral_radius = {}", fmt_f64(ngm.spectral_radius));
    Ok(0)
}

fn run(args: RunArgs) -> Result<u8, Error> {
    let mut config = load(&args.source)?;
    if let Some(step) = args.step {
        config.run.step = step;
    }
    if let Some(t_end) = args.t_end {
        config.run.t_end = t_end;
    }
    if args.no_certificates {
        config.checks.certificates = false;
    }
    let (run, _) = run_scenario(&config, args.out.as_deref())?;
    for v in run.violations.iter().take(5) {
        eprintln!("monitor: {v}");
    }
    if let Some(certs) = &run.certificates {
        for v in certs.violations.iter().take(5) {
            eprintln!("certificate: {v}");
        }
    }
    print!("{}", run.summary.to_text());
    Ok(run.summary.exit_code() as u8)
}

fn run_sweep(args: SweepArgs) -> Result<u8, Error> {
    let config = load(&args.source)?;
    let param: SweepParam = args.param.parse()?;
    let rows = sweep(&config, param, &args.values)?;
    match &args.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}_sweep_{}.csv", config.name, args.param));
            write_sweep_csv(fs::File::create(&path)?, &rows)?;
            println!("wrote {}", path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_sweep_csv(&mut lock, &rows)?;
            lock.flush()?;
        }
    }
    Ok(0)
}

fn verify(args: VerifyArgs) -> Result<u8, Error> {
    let config = load(&args.source)?;
    config.validate()?;
    if args.points < 2 {
        return Err(Error::Config("--points must be at least 2".into()));
    }
    let scale = 2.0 * config.params.s0();
    let s_max = args.s_max.unwrap_or(scale);
    let i_max = args.i_max.unwrap_or(scale);
    let n = args.points;
    let s_grid = linspace(0.0, s_max, n);
    let i_grid = linspace(i_max / n as f64, i_max, n);
    let report = verify_incidence(&config, &s_grid, &i_grid)?;
    print!("{report}");
    Ok(if report.all_pass() { 0 } else { 1 })
}

