//! Browser bindings for `siri-core`: equilibrium analysis, simulation with
//! certificates, and one-parameter sweeps.

use siri_core::analysis::{equilibrium_report, DEFAULT_TOL};
use siri_core::diagnostics::Functional;
use siri_core::scenario::{execute, sweep, Preset, ScenarioConfig, SweepParam};
use siri_core::KernelFamily;
use wasm_bindgen::prelude::*;

fn err(e: siri_core::Error) -> String {
    e.to_string()
}

/// A mutable scenario, starting from one of the built-in presets.
#[wasm_bindgen]
pub struct Scenario {
    config: ScenarioConfig,
}

#[wasm_bindgen]
#[derive(Debug, Clone, Copy)]
pub struct Analysis {
    pub r0: f64,
    pub k: f64,
    pub s0: f64,
    pub endemic: bool,
    /// NaN when there is no endemic equilibrium.
    pub s_star: f64,
    pub i_star: f64,
    pub r_star: f64,
}

#[wasm_bindgen]
pub struct Simulation {
    t: Vec<f64>,
    s: Vec<f64>,
    i: Vec<f64>,
    r: Vec<f64>,
    cert: Vec<f64>,
    cert_name: String,
    monotone: bool,
    monitor_violations: u32,
    exit_code: i32,
}

#[wasm_bindgen]
pub struct Sweep {
    values: Vec<f64>,
    r0: Vec<f64>,
    i_star: Vec<f64>,
}

#[wasm_bindgen]
impl Scenario {
    #[wasm_bindgen(constructor)]
    pub fn new(preset: &str) -> Result<Scenario, String> {
        let preset = match preset {
            "fig1" => Preset::Fig1,
            "fig2" => Preset::Fig2,
            other => return Err(format!("unknown preset `{other}`")),
        };
        let mut config = ScenarioConfig::preset(preset);
        config.run.step = 0.05;
        Ok(Scenario { config })
    }

    /// Sets a model parameter (`lambda`, `mu`, `gamma`, `c`, `beta`, `delta`),
    /// `h`, `saturation`, `t_end` or `step`.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        let p = &mut self.config.params;
        match key {
            "lambda" => p.lambda = value,
            "mu" => p.mu = value,
            "gamma" => p.gamma = value,
            "c" => p.c = value,
            "beta" => p.beta = value,
            "delta" => p.delta = value,
            "h" => self.config.kernel.h = value,
            "saturation" => self.config.incidence.saturation = value,
            "t_end" => self.config.run.t_end = value,
            "step" => self.config.run.step = value,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Result<f64, String> {
        let p = &self.config.params;
        Ok(match key {
            "lambda" => p.lambda,
            "mu" => p.mu,
            "gamma" => p.gamma,
            "c" => p.c,
            "beta" => p.beta,
            "delta" => p.delta,
            "h" => self.config.kernel.h,
            "saturation" => self.config.incidence.saturation,
            "t_end" => self.config.run.t_end,
            "step" => self.config.run.step,
            other => return Err(format!("unknown key `{other}`")),
        })
    }

    /// `truncated-exponential` or `uniform`.
    pub fn set_kernel(&mut self, family: &str) -> Result<(), String> {
        self.config.kernel.family = family.parse::<KernelFamily>().map_err(err)?;
        Ok(())
    }

    /// `bilinear` or `saturated`.
    pub fn set_incidence(&mut self, family: &str) -> Result<(), String> {
        let mut next = self.config.clone();
        next.incidence.family = family.to_string();
        next.build_incidence().map_err(err)?;
        self.config = next;
        Ok(())
    }

    pub fn analyze(&self) -> Result<Analysis, String> {
        self.config.validate().map_err(err)?;
        let inc = self.config.build_incidence().map_err(err)?;
        let rep = equilibrium_report(&self.config.params, &inc, DEFAULT_TOL).map_err(err)?;
        let (s, i, r) = rep.endemic.map_or((f64::NAN, f64::NAN, f64::NAN), |e| (e.s, e.i, e.r));
        Ok(Analysis {
            r0: rep.r0,
            k: rep.k,
            s0: rep.e0.s,
            endemic: rep.endemic.is_some(),
            s_star: s,
            i_star: i,
            r_star: r,
        })
    }

    pub fn simulate(&self) -> Result<Simulation, String> {
        let run = execute(&self.config).map_err(err)?;
        let samples = run.trajectory.samples();
        let pick = |f: fn(&siri_core::State) -> f64| samples.iter().map(|x| f(&x.state)).collect::<Vec<_>>();
        let cert = match &run.certificates {
            Some(c) => match (&c.w_values, &c.v_values) {
                (Some(w), _) => w.iter().map(|v| v.unwrap_or(f64::NAN)).collect(),
                (None, Some(v)) => v.iter().map(|v| v.map_or(f64::NAN, |e| e.v)).collect(),
                (None, None) => Vec::new(),
            },
            None => Vec::new(),
        };
        let cert_name = match run.summary.certificate {
            Some(Functional::W) => "w",
            Some(Functional::V) => "V",
            None => "",
        };
        Ok(Simulation {
            t: pick(|s| s.t),
            s: pick(|s| s.s),
            i: pick(|s| s.i),
            r: pick(|s| s.r),
            cert,
            cert_name: cert_name.into(),
            monotone: run.summary.certificate_monotone.unwrap_or(true),
            monitor_violations: run.summary.monitor_violations as u32,
            exit_code: run.summary.exit_code(),
        })
    }

    /// Equilibrium analysis for each of `values` assigned to `param`.
    pub fn sweep(&self, param: &str, values: Vec<f64>) -> Result<Sweep, String> {
        let param: SweepParam = param.parse().map_err(err)?;
        let rows = sweep(&self.config, param, &values).map_err(err)?;
        Ok(Sweep {
            values,
            r0: rows.iter().map(|r| r.r0).collect(),
            i_star: rows.iter().map(|r| r.endemic.map_or(0.0, |e| e.i)).collect(),
        })
    }
}

#[wasm_bindgen]
impl Simulation {
    pub fn t(&self) -> Vec<f64> {
        self.t.clone()
    }
    pub fn s(&self) -> Vec<f64> {
        self.s.clone()
    }
    pub fn i(&self) -> Vec<f64> {
        self.i.clone()
    }
    pub fn r(&self) -> Vec<f64> {
        self.r.clone()
    }
    /// Certificate values, NaN where not evaluated; empty when disabled.
    pub fn certificate(&self) -> Vec<f64> {
        self.cert.clone()
    }
    pub fn certificate_name(&self) -> String {
        self.cert_name.clone()
    }
    pub fn monotone(&self) -> bool {
        self.monotone
    }
    pub fn monitor_violations(&self) -> u32 {
        self.monitor_violations
    }
    pub fn exit_code(&self) -> i32 {
        self.exit_code
    }
}

#[wasm_bindgen]
impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
    pub fn r0(&self) -> Vec<f64> {
        self.r0.clone()
    }
    /// Endemic infective level, 0 where R0 <= 1.
    pub fn i_star(&self) -> Vec<f64> {
        self.i_star.clone()
    }
}
