//! Scenario configuration, end-to-end runs, parameter sweeps and the flat
//! file formats used by the command-line driver.
//!
//! Config and summary files share one line format: `key = value`, with `#`
//! comments and blank lines ignored. Unknown or repeated keys are errors and
//! model rates have no defaults.
//!
//! ```text
//! name = fig1
//! lambda = 20
//! mu = 0.4
//! gamma = 0.7
//! c = 0.1
//! beta = 0.02
//! delta = 0.006
//! kernel.family = truncated-exponential   # or uniform, point-mass
//! kernel.h = 2
//! kernel.n_nodes = 201                    # optional, must equal h/step + 1
//! incidence.family = bilinear             # or saturated
//! incidence.saturation = 0.1              # required for saturated
//! history = fig1                          # fig1, fig2 or sinusoidal
//! history.s = 1, 0.5, 0, 0, 150           # sinusoidal only: a, w, b, v, c
//! run.t_end = 200
//! run.step = 0.01
//! run.output = out                        # optional output directory
//! checks.certificates = true              # optional, default true
//! checks.invariants = true                # optional, default true
//! ```
//!
//! A sinusoidal component `a, w, b, v, c` stands for `a sin(w theta) + b cos(v theta) + c`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::{equilibrium_report, EndemicEquilibrium, EquilibriumReport, DEFAULT_TOL};
use crate::diagnostics::{certify, monitor_invariants, CertificateSeries, Functional, Violation, ViolationKind};
use crate::error::{Error, Result};
use crate::incidence::{check_hypotheses, HypothesisReport, IncidenceFunction};
use crate::integrator::{fig1_sinusoids, fig2_sinusoids, integrate, HistoryFunction, Sinusoid, Trajectory};
use crate::kernel::{DelayKernel, KernelFamily};
use crate::model::{Model, ModelParams, State};

/// Process exit codes of the driver.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const MONITOR: i32 = 3;
    pub const CERTIFICATE: i32 = 4;
}

pub const CSV_HEADER: [&str; 10] = ["t", "s", "i", "r", "N", "w", "V", "V1", "V2", "V3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            other => Err(Error::Config(format!("unknown preset `{other}` (expected fig1 or fig2)"))),
        }
    }
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HistorySpec {
    Preset(Preset),
    Sinusoidal([Sinusoid; 3]),
}

impl HistorySpec {
    pub fn components(&self) -> [Sinusoid; 3] {
        match self {
            HistorySpec::Preset(Preset::Fig1) => fig1_sinusoids(),
            HistorySpec::Preset(Preset::Fig2) => fig2_sinusoids(),
            HistorySpec::Sinusoidal(c) => *c,
        }
    }

    pub fn build(&self) -> HistoryFunction {
        let [s, i, r] = self.components();
        HistoryFunction::sinusoidal(s, i, r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub h: f64,
    pub n_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceSpec {
    pub family: String,
    pub saturation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub t_end: f64,
    pub step: f64,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checks {
    pub certificates: bool,
    pub invariants: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub params: ModelParams,
    pub kernel: KernelSpec,
    pub incidence: IncidenceSpec,
    pub history: HistorySpec,
    pub run: RunSpec,
    pub checks: Checks,
}

impl ScenarioConfig {
    /// Shipped scenarios: truncated-exponential kernel with `h = 2`, bilinear
    /// incidence, step 0.01 over `[0, 200]`.
    pub fn preset(preset: Preset) -> Self {
        let params = match preset {
            Preset::Fig1 => ModelParams::fig1(),
            Preset::Fig2 => ModelParams::fig2(),
        };
        ScenarioConfig {
            name: preset.as_str().to_string(),
            params,
            kernel: KernelSpec {
                family: KernelFamily::TruncatedExponential,
                h: 2.0,
                n_nodes: None,
            },
            incidence: IncidenceSpec {
                family: "bilinear".into(),
                saturation: 0.0,
            },
            history: HistorySpec::Preset(preset),
            run: RunSpec {
                t_end: 200.0,
                step: 0.01,
                output: None,
            },
            checks: Checks {
                certificates: true,
                invariants: true,
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let params = ModelParams {
            lambda: kv.required_f64("lambda")?,
            mu: kv.required_f64("mu")?,
            gamma: kv.required_f64("gamma")?,
            c: kv.required_f64("c")?,
            beta: kv.required_f64("beta")?,
            delta: kv.required_f64("delta")?,
        };
        let kernel = KernelSpec {
            family: kv.required("kernel.family")?.parse()?,
            h: kv.required_f64("kernel.h")?,
            n_nodes: kv
                .optional("kernel.n_nodes")
                .map(|v| parse_value::<usize>("kernel.n_nodes", &v))
                .transpose()?,
        };
        let family = kv.required("incidence.family")?;
        let saturation = match kv.optional("incidence.saturation") {
            Some(v) => parse_value("incidence.saturation", &v)?,
            None if family == "saturated" => {
                return Err(Error::Config("missing key `incidence.saturation`".into()));
            }
            None => 0.0,
        };
        let history = match kv.required("history")?.as_str() {
            "sinusoidal" => HistorySpec::Sinusoidal([
                parse_sinusoid("history.s", &kv.required("history.s")?)?,
                parse_sinusoid("history.i", &kv.required("history.i")?)?,
                parse_sinusoid("history.r", &kv.required("history.r")?)?,
            ]),
            other => HistorySpec::Preset(other.parse()?),
        };
        let run = RunSpec {
            t_end: kv.required_f64("run.t_end")?,
            step: kv.required_f64("run.step")?,
            output: kv.optional("run.output").map(PathBuf::from),
        };
        let checks = Checks {
            certificates: kv.optional_bool("checks.certificates")?.unwrap_or(true),
            invariants: kv.optional_bool("checks.invariants")?.unwrap_or(true),
        };
        let name = kv.optional("name").unwrap_or_else(|| "scenario".to_string());
        kv.finish()?;

        let config = ScenarioConfig {
            name,
            params,
            kernel,
            incidence: IncidenceSpec { family, saturation },
            history,
            run,
            checks,
        };
        config.validate()?;
        Ok(config)
    }

    /// Serializes to the config format; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let p = &self.params;
        let _ = writeln!(out, "name = {}", self.name);
        for (k, v) in [
            ("lambda", p.lambda),
            ("mu", p.mu),
            ("gamma", p.gamma),
            ("c", p.c),
            ("beta", p.beta),
            ("delta", p.delta),
        ] {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "kernel.family = {}", self.kernel.family);
        let _ = writeln!(out, "kernel.h = {}", self.kernel.h);
        if let Some(n) = self.kernel.n_nodes {
            let _ = writeln!(out, "kernel.n_nodes = {n}");
        }
        let _ = writeln!(out, "incidence.family = {}", self.incidence.family);
        let _ = writeln!(out, "incidence.saturation = {}", self.incidence.saturation);
        match &self.history {
            HistorySpec::Preset(pr) => {
                let _ = writeln!(out, "history = {}", pr.as_str());
            }
            HistorySpec::Sinusoidal(c) => {
                let _ = writeln!(out, "history = sinusoidal");
                for (k, s) in ["history.s", "history.i", "history.r"].iter().zip(c) {
                    let _ = writeln!(
                        out,
                        "{k} = {}, {}, {}, {}, {}",
                        s.sin_amp,
                        s.sin_freq,
                        s.cos_amp,
                        s.cos_freq,
                        s.offset
                    );
                }
            }
        }
        let _ = writeln!(out, "run.t_end = {}", self.run.t_end);
        let _ = writeln!(out, "run.step = {}", self.run.step);
        if let Some(o) = &self.run.output {
            let _ = writeln!(out, "run.output = {}", o.display());
        }
        let _ = writeln!(out, "checks.certificates = {}", self.checks.certificates);
        let _ = writeln!(out, "checks.invariants = {}", self.checks.invariants);
        out
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.build_incidence()?;
        self.build_kernel()?;
        if !(self.run.t_end > 0.0) || !self.run.t_end.is_finite() {
            return Err(Error::Config(format!("run.t_end must be positive, got {}", self.run.t_end)));
        }
        Ok(())
    }

    pub fn build_incidence(&self) -> Result<IncidenceFunction> {
        IncidenceFunction::builtin(&self.incidence.family, self.incidence.saturation)
    }

    pub fn build_kernel(&self) -> Result<DelayKernel> {
        let kernel = DelayKernel::with_step(self.kernel.family, self.kernel.h, self.run.step)?;
        if let Some(n) = self.kernel.n_nodes {
            if kernel.family() != KernelFamily::PointMass && n != kernel.nodes().len() {
                return Err(Error::Config(format!(
                    "kernel.n_nodes = {n} but h / step + 1 = {}",
                    kernel.nodes().len()
                )));
            }
        }
        Ok(kernel)
    }

    pub fn build_model(&self) -> Result<Model> {
        Model::new(self.params, self.build_incidence()?, self.build_kernel()?)
    }
}

/// Outcome of one scenario run, as written to the summary file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub r0: f64,
    pub k: f64,
    pub e0: State,
    pub endemic: Option<EndemicEquilibrium>,
    pub equilibrium_residual: f64,
    pub final_state: State,
    pub rows: usize,
    pub clamp_events: usize,
    pub monitor_violations: usize,
    /// Which functional was evaluated: `w` when R0 <= 1, `V` otherwise.
    pub certificate: Option<Functional>,
    pub certificate_monotone: Option<bool>,
    pub certificate_max_increase: Option<f64>,
    pub certificate_skipped: usize,
    pub trajectory_csv: Option<PathBuf>,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        if self.monitor_violations > 0 {
            exit_code::MONITOR
        } else if self.certificate_monotone == Some(false) || self.certificate_skipped > 0 {
            exit_code::CERTIFICATE
        } else {
            exit_code::SUCCESS
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let state = |s: &State| format!("{}, {}, {}, {}", fmt_f64(s.t), fmt_f64(s.s), fmt_f64(s.i), fmt_f64(s.r));
        let _ = writeln!(out, "name = {}", self.name);
        let _ = writeln!(out, "r0 = {}", fmt_f64(self.r0));
        let _ = writeln!(out, "k = {}", fmt_f64(self.k));
        let _ = writeln!(out, "e0 = {}", state(&self.e0));
        match &self.endemic {
            Some(e) => {
                let _ = writeln!(out, "endemic = {}, {}, {}", fmt_f64(e.s), fmt_f64(e.i), fmt_f64(e.r));
            }
            None => {
                let _ = writeln!(out, "endemic = none");
            }
        }
        let _ = writeln!(out, "equilibrium_residual = {}", fmt_f64(self.equilibrium_residual));
        let _ = writeln!(out, "final_state = {}", state(&self.final_state));
        let _ = writeln!(out, "rows = {}", self.rows);
        let _ = writeln!(out, "clamp_events = {}", self.clamp_events);
        let _ = writeln!(out, "monitor_violations = {}", self.monitor_violations);
        let cert = match self.certificate {
            Some(Functional::W) => "w",
            Some(Functional::V) => "V",
            None => "none",
        };
        let _ = writeln!(out, "certificate = {cert}");
        let _ = writeln!(out, "certificate_monotone = {}", opt(self.certificate_monotone.map(|b| b.to_string())));
        let _ = writeln!(out, "certificate_max_increase = {}", opt(self.certificate_max_increase.map(fmt_f64)));
        let _ = writeln!(out, "certificate_skipped = {}", self.certificate_skipped);
        let _ = writeln!(
            out,
            "trajectory_csv = {}",
            opt(self.trajectory_csv.as_ref().map(|p| p.display().to_string()))
        );
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::parse(text)?;
        let state = |key: &str, v: &str| -> Result<State> {
            let xs = parse_list(key, v, 4)?;
            Ok(State::new(xs[0], xs[1], xs[2], xs[3]))
        };
        let summary = RunSummary {
            name: kv.required("name")?,
            r0: kv.required_f64("r0")?,
            k: kv.required_f64("k")?,
            e0: state("e0", &kv.required("e0")?)?,
            endemic: match kv.required("endemic")?.as_str() {
                "none" => None,
                v => {
                    let xs = parse_list("endemic", v, 3)?;
                    Some(EndemicEquilibrium {
                        s: xs[0],
                        i: xs[1],
                        r: xs[2],
                    })
                }
            },
            equilibrium_residual: kv.required_f64("equilibrium_residual")?,
            final_state: state("final_state", &kv.required("final_state")?)?,
            rows: parse_value("rows", &kv.required("rows")?)?,
            clamp_events: parse_value("clamp_events", &kv.required("clamp_events")?)?,
            monitor_violations: parse_value("monitor_violations", &kv.required("monitor_violations")?)?,
            certificate: match kv.required("certificate")?.as_str() {
                "w" => Some(Functional::W),
                "V" => Some(Functional::V),
                "none" => None,
                other => return Err(Error::Config(format!("bad certificate `{other}`"))),
            },
            certificate_monotone: parse_opt("certificate_monotone", &kv.required("certificate_monotone")?)?,
            certificate_max_increase: parse_opt("certificate_max_increase", &kv.required("certificate_max_increase")?)?,
            certificate_skipped: parse_value("certificate_skipped", &kv.required("certificate_skipped")?)?,
            trajectory_csv: match kv.required("trajectory_csv")?.as_str() {
                "none" => None,
                p => Some(PathBuf::from(p)),
            },
        };
        kv.finish()?;
        Ok(summary)
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Everything computed by one run, kept in memory.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub summary: RunSummary,
    pub report: EquilibriumReport,
    pub trajectory: Trajectory,
    pub certificates: Option<CertificateSeries>,
    pub violations: Vec<Violation>,
}

/// Paths written by [`run_scenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutputs {
    pub trajectory_csv: PathBuf,
    pub summary: PathBuf,
}

/// Analyze, integrate and diagnose without touching the filesystem.
pub fn execute(config: &ScenarioConfig) -> Result<ScenarioRun> {
    config.validate()?;
    let model = config.build_model()?;
    let history = config.history.build();
    let report = equilibrium_report(&model.params, &model.incidence, DEFAULT_TOL)?;
    let trajectory = integrate(&model, &history, config.run.t_end, config.run.step)?;

    let violations = if config.checks.invariants {
        monitor_invariants(&model.params, &trajectory)
    } else {
        Vec::new()
    };

    let (certificate, certificates) = if config.checks.certificates {
        let dfe = report.endemic.is_none();
        let series = certify(&model, &trajectory, &history, dfe, report.endemic.as_ref())?;
        (Some(if dfe { Functional::W } else { Functional::V }), Some(series))
    } else {
        (None, None)
    };

    let summary = RunSummary {
        name: config.name.clone(),
        r0: report.r0,
        k: report.k,
        e0: report.e0,
        endemic: report.endemic,
        equilibrium_residual: report.residual,
        final_state: trajectory.final_state(),
        rows: trajectory.len(),
        clamp_events: trajectory.clamp_events(),
        monitor_violations: violations.len(),
        certificate,
        certificate_monotone: certificates.as_ref().map(CertificateSeries::is_monotone),
        certificate_max_increase: certificates.as_ref().map(CertificateSeries::max_relative_increase),
        certificate_skipped: certificates
            .as_ref()
            .map(|c| {
                c.violations
                    .iter()
                    .filter(|v| matches!(v.kind, ViolationKind::NonPositive(_)))
                    .count()
            })
            .unwrap_or(0),
        trajectory_csv: None,
    };

    Ok(ScenarioRun {
        summary,
        report,
        trajectory,
        certificates,
        violations,
    })
}

/// Runs the scenario and, when an output directory is given (argument first,
/// then `run.output`), writes `<name>_trajectory.csv` and `<name>_summary.txt`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: Option<&Path>) -> Result<(ScenarioRun, Option<ScenarioOutputs>)> {
    let mut run = execute(config)?;
    let dir = out_dir.map(Path::to_path_buf).or_else(|| config.run.output.clone());
    let outputs = match dir {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            let csv_path = dir.join(format!("{}_trajectory.csv", config.name));
            let summary_path = dir.join(format!("{}_summary.txt", config.name));
            write_trajectory_csv(&csv_path, &run.trajectory, run.certificates.as_ref())?;
            run.summary.trajectory_csv = Some(csv_path.clone());
            fs::write(&summary_path, run.summary.to_text())?;
            Some(ScenarioOutputs {
                trajectory_csv: csv_path,
                summary: summary_path,
            })
        }
        None => None,
    };
    Ok((run, outputs))
}

/// Writes the trajectory with the `t,s,i,r,N,w,V,V1,V2,V3` schema; unevaluated
/// certificate cells are left empty.
pub fn write_trajectory_csv(path: &Path, traj: &Trajectory, certs: Option<&CertificateSeries>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    write_trajectory_rows(&mut w, traj, certs)?;
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_rows<W: std::io::Write>(
    w: &mut csv::Writer<W>,
    traj: &Trajectory,
    certs: Option<&CertificateSeries>,
) -> Result<()> {
    w.write_record(CSV_HEADER)?;
    let w_vals = certs.and_then(|c| c.w_values.as_ref());
    let v_vals = certs.and_then(|c| c.v_values.as_ref());
    for (n, smp) in traj.samples().iter().enumerate() {
        let st = smp.state;
        let mut row: Vec<String> = [st.t, st.s, st.i, st.r, st.total()].iter().map(|&x| fmt_f64(x)).collect();
        row.push(w_vals.and_then(|v| v[n]).map(fmt_f64).unwrap_or_default());
        match v_vals.and_then(|v| v[n]) {
            Some(e) => row.extend([e.v, e.v1, e.v2, e.v3].iter().map(|&x| fmt_f64(x))),
            None => row.extend(std::iter::repeat_n(String::new(), 4)),
        }
        w.write_record(&row)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Mu,
    Gamma,
    C,
    Beta,
    Delta,
    H,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lambda" => SweepParam::Lambda,
            "mu" => SweepParam::Mu,
            "gamma" => SweepParam::Gamma,
            "c" => SweepParam::C,
            "beta" => SweepParam::Beta,
            "delta" => SweepParam::Delta,
            "h" => SweepParam::H,
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter `{other}` (expected lambda, mu, gamma, c, beta, delta or h)"
                )))
            }
        })
    }
}

impl SweepParam {
    fn apply(self, config: &mut ScenarioConfig, value: f64) {
        let p = &mut config.params;
        match self {
            SweepParam::Lambda => p.lambda = value,
            SweepParam::Mu => p.mu = value,
            SweepParam::Gamma => p.gamma = value,
            SweepParam::C => p.c = value,
            SweepParam::Beta => p.beta = value,
            SweepParam::Delta => p.delta = value,
            SweepParam::H => {
                config.kernel.h = value;
                config.kernel.n_nodes = None;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub r0: f64,
    pub endemic: Option<EndemicEquilibrium>,
}

/// Equilibrium analysis for each value of one parameter, other settings held at `base`.
pub fn sweep(base: &ScenarioConfig, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&value| {
            let mut config = base.clone();
            param.apply(&mut config, value);
            config.validate()?;
            let report = equilibrium_report(&config.params, &config.build_incidence()?, DEFAULT_TOL)?;
            Ok(SweepRow {
                value,
                r0: report.r0,
                endemic: report.endemic,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: std::io::Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["value", "R0", "endemic", "s_star", "i_star", "r_star"])?;
    for row in rows {
        let (flag, s, i, r) = match &row.endemic {
            Some(e) => ("true", fmt_f64(e.s), fmt_f64(e.i), fmt_f64(e.r)),
            None => ("false", String::new(), String::new(), String::new()),
        };
        w.write_record([fmt_f64(row.value), fmt_f64(row.r0), flag.to_string(), s, i, r])?;
    }
    w.flush()?;
    Ok(())
}

/// Checks the hypotheses for the incidence named in `config`.
pub fn verify_incidence(config: &ScenarioConfig, s_grid: &[f64], i_grid: &[f64]) -> Result<HypothesisReport> {
    check_hypotheses(&config.build_incidence()?, s_grid, i_grid)
}

/// Decimal rendering with 17 significant digits, which round-trips any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        format!("{x:.prec$}", prec = (16 - exp) as usize)
    } else {
        sci
    }
}

fn opt(v: Option<String>) -> String {
    v.unwrap_or_else(|| "none".into())
}

fn parse_opt<T: FromStr>(key: &str, v: &str) -> Result<Option<T>> {
    if v == "none" {
        Ok(None)
    } else {
        parse_value(key, v).map(Some)
    }
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("cannot parse value `{v}` for key `{key}`")))
}

fn parse_list(key: &str, v: &str, len: usize) -> Result<Vec<f64>> {
    let xs = v
        .split(',')
        .map(|x| parse_value::<f64>(key, x.trim()))
        .collect::<Result<Vec<_>>>()?;
    if xs.len() != len {
        return Err(Error::Config(format!("key `{key}` expects {len} comma-separated numbers")));
    }
    Ok(xs)
}

fn parse_sinusoid(key: &str, v: &str) -> Result<Sinusoid> {
    let xs = parse_list(key, v, 5)?;
    Ok(Sinusoid {
        sin_amp: xs[0],
        sin_freq: xs[1],
        cos_amp: xs[2],
        cos_freq: xs[3],
        offset: xs[4],
    })
}

/// Parsed `key = value` lines; every key must be consumed.
struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", n + 1)));
            }
        }
        Ok(KeyValues { map })
    }

    fn optional(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.optional(key)
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    fn required_f64(&mut self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        parse_value(key, &v)
    }

    fn optional_bool(&mut self, key: &str) -> Result<Option<bool>> {
        self.optional(key).map(|v| parse_value(key, &v)).transpose()
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::Config(format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_config_round_trips_through_text() {
        for preset in [Preset::Fig1, Preset::Fig2] {
            let c = ScenarioConfig::preset(preset);
            assert_eq!(ScenarioConfig::parse(&c.to_text()).unwrap(), c);
        }
    }

    #[test]
    fn sinusoidal_history_parses() {
        let mut c = ScenarioConfig::preset(Preset::Fig2);
        c.history = HistorySpec::Sinusoidal(fig1_sinusoids());
        let back = ScenarioConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back.history, c.history);
        let h = back.history.build();
        assert_eq!(h.i(-0.3), (10.0f64 * -0.3).sin() + 20.0);
    }

    #[test]
    fn zero_mu_is_a_config_error() {
        let text: String = ScenarioConfig::preset(Preset::Fig1)
            .to_text()
            .lines()
            .map(|l| if l.starts_with("mu =") { "mu = 0\n".to_string() } else { format!("{l}\n") })
            .collect();
        assert!(matches!(
            ScenarioConfig::parse(&text),
            Err(Error::InvalidParameter { name: "mu", .. })
        ));
    }

    #[test]
    fn unknown_duplicate_and_missing_keys() {
        let base = ScenarioConfig::preset(Preset::Fig1).to_text();
        assert!(ScenarioConfig::parse(&format!("{base}colour = red\n")).is_err());
        assert!(ScenarioConfig::parse(&format!("{base}beta = 0.3\n")).is_err());
        let missing: String = base.lines().filter(|l| !l.starts_with("beta")).map(|l| format!("{l}\n")).collect();
        let err = ScenarioConfig::parse(&missing).unwrap_err();
        assert_eq!(err, Error::Config("missing key `beta`".into()));
    }

    #[test]
    fn misaligned_step_is_rejected() {
        let mut c = ScenarioConfig::preset(Preset::Fig1);
        c.run.step = 0.03;
        assert!(c.validate().is_err());
        c.run.step = 0.01;
        c.kernel.n_nodes = Some(101);
        assert!(c.validate().is_err());
        c.kernel.n_nodes = Some(201);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn fmt_f64_round_trips() {
        for x in [0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 123456.789, 1e-7, 6.02e23, -4.9e-324, f64::MAX] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "0.50000000000000000");
        assert_eq!(fmt_f64(200.0), "200.00000000000000");
    }

    #[test]
    fn sweep_parameter_names() {
        assert_eq!("beta".parse::<SweepParam>().unwrap(), SweepParam::Beta);
        assert!("sigma".parse::<SweepParam>().is_err());
    }

    #[test]
    fn sweep_beta_tracks_threshold() {
        let base = ScenarioConfig::preset(Preset::Fig1);
        let rows = sweep(&base, SweepParam::Beta, &[0.005, 0.01, 0.02, 0.04]).unwrap();
        let per_beta = rows[0].r0 / 0.005;
        for row in &rows {
            assert!((row.r0 - per_beta * row.value).abs() < 1e-12);
            assert_eq!(row.endemic.is_some(), row.r0 > 1.0);
        }
        assert!(rows[2].endemic.is_none() && rows[3].endemic.is_some());
    }

    #[test]
    fn sweep_h_leaves_r0_unchanged() {
        let base = ScenarioConfig::preset(Preset::Fig2);
        let rows = sweep(&base, SweepParam::H, &[0.5, 1.0, 2.0]).unwrap();
        assert!(rows.iter().all(|r| r.r0 == rows[0].r0));
        assert!(sweep(&base, SweepParam::Mu, &[0.0]).is_err());
    }

    #[test]
    fn summary_round_trips() {
        let mut c = ScenarioConfig::preset(Preset::Fig2);
        c.run.t_end = 2.0;
        c.run.step = 0.1;
        let run = execute(&c).unwrap();
        let back = RunSummary::parse(&run.summary.to_text()).unwrap();
        assert_eq!(back, run.summary);
        assert_eq!(run.summary.rows, 21);
    }
}
