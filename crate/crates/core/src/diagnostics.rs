//! Lyapunov functionals evaluated along trajectories, and runtime monitors
//! for positivity and the total-population comparison bound.
//!
//! Monotonicity of the functionals is checked on the discrete grid: a
//! certificate holds when `V(t_{k+1}) <= V(t_k) + tol (1 + |V(t_k)|)` at every
//! step. The `sigma`-integrals use the closed logarithmic form when the
//! incidence is linear in `s` and composite Simpson quadrature otherwise.

use std::fmt;

use crate::analysis::EndemicEquilibrium;
use crate::error::{Error, Result};
use crate::incidence::IncidenceFunction;
use crate::integrator::{HistoryFunction, Trajectory};
use crate::model::{Model, ModelParams};

/// Per-step relative slack for discrete monotonicity.
pub const MONOTONE_TOL: f64 = 1e-8;

/// Components at or below this are treated as zero by the logarithmic terms.
pub const LOG_GUARD: f64 = 1e-300;

/// Slack on the positivity monitor.
pub const NEGATIVITY_SLACK: f64 = 1e-9;

/// Slack on the comparison bound, relative to `N(0)`.
pub const BOUND_SLACK: f64 = 1e-6;

const SIMPSON_INTERVALS: usize = 64;

/// `G(x) = x - 1 - ln x`, non-negative with its only zero at `x = 1`.
pub fn g(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::OutOfDomain {
            value: x,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    Ok(g_unchecked(x))
}

#[inline]
fn g_unchecked(x: f64) -> f64 {
    let d = x - 1.0;
    d - d.ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    S,
    I,
    R,
}

impl Component {
    pub fn as_str(self) -> &'static str {
        match self {
            Component::S => "s",
            Component::I => "i",
            Component::R => "r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// Disease-free functional `w`.
    W,
    /// Endemic functional `V`.
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A stored state component dropped below zero.
    Negative(Component),
    /// `N(t)` exceeded the comparison bound.
    ComparisonBound,
    /// A logarithmic term needed a strictly positive component; evaluation was skipped.
    NonPositive(Component),
    /// A functional increased by more than the tolerance over one step.
    Increase(Functional),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub kind: ViolationKind,
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::Negative(c) => write!(f, "t = {}: {} negative ({})", self.t, c.as_str(), self.magnitude),
            ViolationKind::ComparisonBound => {
                write!(f, "t = {}: N(t) exceeds comparison bound by {}", self.t, self.magnitude)
            }
            ViolationKind::NonPositive(c) => {
                write!(f, "t = {}: {} non-positive, certificate skipped", self.t, c.as_str())
            }
            ViolationKind::Increase(Functional::W) => write!(f, "t = {}: w increased by {}", self.t, self.magnitude),
            ViolationKind::Increase(Functional::V) => write!(f, "t = {}: V increased by {}", self.t, self.magnitude),
        }
    }
}

/// Value of the endemic functional and its three parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndemicValue {
    pub v: f64,
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

/// Functional values on the trajectory grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CertificateSeries {
    pub times: Vec<f64>,
    /// `None` when `w` was not requested; inner `None` where evaluation was skipped.
    pub w_values: Option<Vec<Option<f64>>>,
    pub v_values: Option<Vec<Option<EndemicValue>>>,
    pub violations: Vec<Violation>,
}

impl CertificateSeries {
    /// True when no increase beyond tolerance was recorded.
    pub fn is_monotone(&self) -> bool {
        !self
            .violations
            .iter()
            .any(|v| matches!(v.kind, ViolationKind::Increase(_)))
    }

    /// Largest one-step relative increase `(V_{k+1} - V_k) / (1 + |V_k|)` observed.
    pub fn max_relative_increase(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        let mut scan = |vals: &mut dyn Iterator<Item = Option<f64>>| {
            let mut prev: Option<f64> = None;
            for v in vals {
                if let (Some(a), Some(b)) = (prev, v) {
                    worst = worst.max((b - a) / (1.0 + a.abs()));
                }
                prev = v;
            }
        };
        if let Some(w) = &self.w_values {
            scan(&mut w.iter().copied());
        }
        if let Some(v) = &self.v_values {
            scan(&mut v.iter().map(|x| x.map(|e| e.v)));
        }
        worst
    }
}

fn check_alignment(model: &Model, traj: &Trajectory) -> Result<()> {
    if model.kernel.lag_count() != traj.lag_count() {
        return Err(Error::StepMismatch {
            step: traj.step(),
            h: model.kernel.h(),
        });
    }
    Ok(())
}

/// `sum_j m_j int_0^{tau_j} q(i(t_n - u)) du` on the kernel grid, with the
/// inner integral accumulated by the trapezoid rule.
fn delay_double_integral<Q>(model: &Model, traj: &Trajectory, history: &HistoryFunction, n: usize, q: Q) -> Result<f64>
where
    Q: Fn(f64) -> Result<f64>,
{
    let masses = model.kernel.masses();
    let half = 0.5 * traj.step();
    let mut inner = 0.0;
    let mut prev = q(traj.lagged_i(history, n, 0))?;
    let mut total = 0.0;
    for (l, &mass) in masses.iter().enumerate().skip(1) {
        let cur = q(traj.lagged_i(history, n, l))?;
        inner += half * (prev + cur);
        total += mass * inner;
        prev = cur;
    }
    Ok(total)
}

fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, q: F) -> f64 {
    let n = SIMPSON_INTERVALS;
    let dx = (b - a) / n as f64;
    let mut acc = q(a) + q(b);
    for k in 1..n {
        let x = a + k as f64 * dx;
        acc += if k % 2 == 1 { 4.0 * q(x) } else { 2.0 * q(x) };
    }
    acc * dx / 3.0
}

/// `s - s_ref - int_{s_ref}^{s} ratio(sigma) dsigma` where `ratio` is
/// `a(s_ref) / a(sigma)` for the s-dependence `a` of the incidence.
fn s_term<R: Fn(f64) -> f64>(inc: &IncidenceFunction, s: f64, s_ref: f64, ratio: R) -> f64 {
    if inc.is_linear_in_s() {
        s_ref * g_unchecked(s / s_ref)
    } else {
        s - s_ref - simpson(s_ref, s, ratio)
    }
}

fn positive(value: f64, component: Component, t: f64) -> Result<f64> {
    if value > LOG_GUARD {
        Ok(value)
    } else {
        Err(Error::NonPositive {
            component: component.as_str(),
            value,
            t,
        })
    }
}

/// The disease-free functional
/// `w = s - s0 - int_{s0}^{s} phi0(s0)/phi0(sigma) dsigma + i
///      + k int g(tau) int_0^tau i(t-u) du dtau + delta/(mu+delta) r`
/// at grid time `t`.
pub fn dfe_functional(model: &Model, traj: &Trajectory, history: &HistoryFunction, t: f64) -> Result<f64> {
    check_alignment(model, traj)?;
    let n = traj.index_of(t)?;
    dfe_at(model, traj, history, n)
}

fn dfe_at(model: &Model, traj: &Trajectory, history: &HistoryFunction, n: usize) -> Result<f64> {
    let p = &model.params;
    let inc = &model.incidence;
    let st = traj.samples()[n].state;
    let s = positive(st.s, Component::S, st.t)?;
    let s0 = p.s0();
    let phi0_ref = inc.phi0(s0);
    let s_part = s_term(inc, s, s0, |sigma| phi0_ref / inc.phi0(sigma));
    let delay = delay_double_integral(model, traj, history, n, Ok)?;
    Ok(s_part + st.i + p.k() * delay + p.delta / (p.mu + p.delta) * st.r)
}

/// The endemic functional `V = V1 + V2 + V3` at grid time `t`.
pub fn endemic_functional(
    model: &Model,
    traj: &Trajectory,
    history: &HistoryFunction,
    e_star: &EndemicEquilibrium,
    t: f64,
) -> Result<EndemicValue> {
    check_alignment(model, traj)?;
    let n = traj.index_of(t)?;
    endemic_at(model, traj, history, e_star, n)
}

fn endemic_at(
    model: &Model,
    traj: &Trajectory,
    history: &HistoryFunction,
    e: &EndemicEquilibrium,
    n: usize,
) -> Result<EndemicValue> {
    let p = &model.params;
    let inc = &model.incidence;
    let st = traj.samples()[n].state;
    let s = positive(st.s, Component::S, st.t)?;
    let i = positive(st.i, Component::I, st.t)?;

    let f_star = inc.f(e.s, e.i);
    let s_part = s_term(inc, s, e.s, |sigma| f_star / inc.f(sigma, e.i));
    let v1 = s_part + e.i * g_unchecked(i / e.i);

    let v2 = p.beta
        * f_star
        * delay_double_integral(model, traj, history, n, |lagged| {
            let lagged = positive(lagged, Component::I, st.t)?;
            Ok(g_unchecked(lagged / e.i))
        })?;

    let v3 = if p.delta == 0.0 {
        0.0
    } else if e.r == 0.0 {
        p.delta / (p.mu + p.delta) * st.r
    } else {
        let r = positive(st.r, Component::R, st.t)?;
        p.delta / (p.mu + p.delta) * e.r * g_unchecked(r / e.r)
    };

    Ok(EndemicValue {
        v: v1 + v2 + v3,
        v1,
        v2,
        v3,
    })
}

fn non_positive_kind(err: &Error) -> Option<ViolationKind> {
    match err {
        Error::NonPositive { component, .. } => Some(ViolationKind::NonPositive(match *component {
            "s" => Component::S,
            "i" => Component::I,
            _ => Component::R,
        })),
        _ => None,
    }
}

fn record_increases(times: &[f64], values: &[Option<f64>], which: Functional, tol: f64, out: &mut Vec<Violation>) {
    for k in 1..values.len() {
        if let (Some(a), Some(b)) = (values[k - 1], values[k]) {
            let slack = tol * (1.0 + a.abs());
            if b > a + slack {
                out.push(Violation {
                    t: times[k],
                    kind: ViolationKind::Increase(which),
                    magnitude: b - a,
                });
            }
        }
    }
}

/// Evaluates `w` (when `dfe` is set) and `V` (when `e_star` is given) at every
/// grid point and records skipped points and discrete increases.
pub fn certify(
    model: &Model,
    traj: &Trajectory,
    history: &HistoryFunction,
    dfe: bool,
    e_star: Option<&EndemicEquilibrium>,
) -> Result<CertificateSeries> {
    check_alignment(model, traj)?;
    let times: Vec<f64> = traj.samples().iter().map(|s| s.state.t).collect();
    let mut violations = Vec::new();

    let w_values = if dfe {
        let mut vals = Vec::with_capacity(times.len());
        for n in 0..times.len() {
            match dfe_at(model, traj, history, n) {
                Ok(w) => vals.push(Some(w)),
                Err(e) => {
                    let kind = non_positive_kind(&e).ok_or(e)?;
                    violations.push(Violation {
                        t: times[n],
                        kind,
                        magnitude: 0.0,
                    });
                    vals.push(None);
                }
            }
        }
        record_increases(&times, &vals, Functional::W, MONOTONE_TOL, &mut violations);
        Some(vals)
    } else {
        None
    };

    let v_values = match e_star {
        Some(e) => {
            let mut vals = Vec::with_capacity(times.len());
            for n in 0..times.len() {
                match endemic_at(model, traj, history, e, n) {
                    Ok(v) => vals.push(Some(v)),
                    Err(err) => {
                        let kind = non_positive_kind(&err).ok_or(err)?;
                        violations.push(Violation {
                            t: times[n],
                            kind,
                            magnitude: 0.0,
                        });
                        vals.push(None);
                    }
                }
            }
            let totals: Vec<Option<f64>> = vals.iter().map(|v| v.map(|x| x.v)).collect();
            record_increases(&times, &totals, Functional::V, MONOTONE_TOL, &mut violations);
            Some(vals)
        }
        None => None,
    };

    Ok(CertificateSeries {
        times,
        w_values,
        v_values,
        violations,
    })
}

/// Positivity and the comparison bound
/// `N(t) <= Lambda/mu (1 - e^{-mu t}) + N(0) e^{-mu t}` at every sample.
pub fn monitor_invariants(params: &ModelParams, traj: &Trajectory) -> Vec<Violation> {
    let mut out = Vec::new();
    let samples = traj.samples();
    let n0 = samples[0].state.total();
    let s0 = params.s0();
    for smp in samples {
        let st = smp.state;
        for (c, v) in [(Component::S, st.s), (Component::I, st.i), (Component::R, st.r)] {
            if v < -NEGATIVITY_SLACK {
                out.push(Violation {
                    t: st.t,
                    kind: ViolationKind::Negative(c),
                    magnitude: v,
                });
            }
        }
        let decay = (-params.mu * (st.t - traj.t_start())).exp();
        let bound = s0 * (1.0 - decay) + n0 * decay;
        let excess = st.total() - bound;
        if excess > BOUND_SLACK * n0 {
            out.push(Violation {
                t: st.t,
                kind: ViolationKind::ComparisonBound,
                magnitude: excess,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{endemic_equilibrium, DEFAULT_TOL};
    use crate::integrator::{integrate, Sample};
    use crate::kernel::{DelayKernel, KernelFamily};
    use crate::model::{Derivative, State};

    fn model(params: ModelParams, step: f64) -> Model {
        Model::new(
            params,
            IncidenceFunction::bilinear(),
            DelayKernel::with_step(KernelFamily::TruncatedExponential, 2.0, step).unwrap(),
        )
        .unwrap()
    }

    fn constant_traj(state: (f64, f64, f64), step: f64, n: usize) -> Trajectory {
        let samples = (0..=n)
            .map(|k| Sample {
                state: State::new(k as f64 * step, state.0, state.1, state.2),
                deriv: Derivative::default(),
            })
            .collect();
        Trajectory::from_samples(0.0, step, 2.0, samples).unwrap()
    }

    #[test]
    fn g_values() {
        assert_eq!(g(1.0).unwrap(), 0.0);
        assert!((g(std::f64::consts::E).unwrap() - 0.7182818284590451).abs() < 1e-15);
        assert!((g(0.5).unwrap() - 0.1931471805599453).abs() < 1e-15);
        assert!(g(0.0).is_err());
        assert!(g(-1.0).is_err());
    }

    #[test]
    fn w_vanishes_at_dfe() {
        let p = ModelParams::fig1();
        let m = model(p, 0.1);
        let traj = constant_traj((p.s0(), 0.0, 0.0), 0.1, 30);
        let hist = HistoryFunction::constant(p.s0(), 0.0, 0.0);
        for t in [0.0, 1.0, 3.0] {
            assert_eq!(dfe_functional(&m, &traj, &hist, t).unwrap(), 0.0);
        }
        assert!(dfe_functional(&m, &traj, &hist, 0.05).is_err());
    }

    #[test]
    fn w_s_term_is_logarithmic_for_bilinear() {
        let p = ModelParams::fig1();
        let m = model(p, 0.1);
        let s0 = p.s0();
        for s in [5.0, 50.0, 170.0] {
            let traj = constant_traj((s, 0.0, 0.0), 0.1, 5);
            let hist = HistoryFunction::constant(s, 0.0, 0.0);
            let w = dfe_functional(&m, &traj, &hist, 0.0).unwrap();
            let want = s - s0 - s0 * (s / s0).ln();
            assert!((w - want).abs() < 1e-12 * s0, "s = {s}: {w} vs {want}");
            assert!(w >= 0.0);
        }
    }

    #[test]
    fn simpson_path_agrees_with_closed_form() {
        // a custom copy of the bilinear family forces the quadrature path
        let p = ModelParams::fig2();
        let custom = IncidenceFunction::custom("bilinear-copy", |s, i| s * i, |s| s, |s| s);
        let kernel = DelayKernel::with_step(KernelFamily::TruncatedExponential, 2.0, 0.1).unwrap();
        let m_num = Model::new(p, custom, kernel.clone()).unwrap();
        let m_exact = Model::new(p, IncidenceFunction::bilinear(), kernel).unwrap();
        let e = endemic_equilibrium(&p, &IncidenceFunction::bilinear(), DEFAULT_TOL).unwrap();
        let traj = constant_traj((30.0, 4.0, 6.0), 0.1, 5);
        let hist = HistoryFunction::constant(30.0, 4.0, 6.0);
        let a = endemic_functional(&m_num, &traj, &hist, &e, 0.2).unwrap();
        let b = endemic_functional(&m_exact, &traj, &hist, &e, 0.2).unwrap();
        // 64-interval Simpson on s*/sigma over [10.7, 30]
        assert!((a.v1 - b.v1).abs() < 1e-6, "{} vs {}", a.v1, b.v1);
        let wa = dfe_functional(&m_num, &traj, &hist, 0.2).unwrap();
        let wb = dfe_functional(&m_exact, &traj, &hist, 0.2).unwrap();
        assert!((wa - wb).abs() < 1e-6);
    }

    #[test]
    fn v_vanishes_at_endemic_equilibrium() {
        let p = ModelParams::fig2();
        let m = model(p, 0.1);
        let e = endemic_equilibrium(&p, &m.incidence, DEFAULT_TOL).unwrap();
        let traj = constant_traj((e.s, e.i, e.r), 0.1, 30);
        let hist = HistoryFunction::constant(e.s, e.i, e.r);
        let v = endemic_functional(&m, &traj, &hist, &e, 2.0).unwrap();
        assert_eq!(v, EndemicValue { v: 0.0, v1: 0.0, v2: 0.0, v3: 0.0 });
    }

    #[test]
    fn v2_vanishes_for_constant_i_star() {
        let p = ModelParams::fig2();
        let m = model(p, 0.1);
        let e = endemic_equilibrium(&p, &m.incidence, DEFAULT_TOL).unwrap();
        let traj = constant_traj((e.s * 2.0, e.i, e.r * 0.5), 0.1, 30);
        let hist = HistoryFunction::constant(e.s * 2.0, e.i, e.r * 0.5);
        let v = endemic_functional(&m, &traj, &hist, &e, 1.0).unwrap();
        assert_eq!(v.v2, 0.0);
        assert!(v.v1 > 0.0 && v.v3 > 0.0);
    }

    #[test]
    fn v_reports_non_positive_component() {
        let p = ModelParams::fig2();
        let m = model(p, 0.1);
        let e = endemic_equilibrium(&p, &m.incidence, DEFAULT_TOL).unwrap();
        let traj = constant_traj((10.0, 0.0, 1.0), 0.1, 30);
        let hist = HistoryFunction::constant(10.0, 0.0, 1.0);
        let err = endemic_functional(&m, &traj, &hist, &e, 0.0).unwrap_err();
        assert!(matches!(err, Error::NonPositive { component: "i", .. }));
        let series = certify(&m, &traj, &hist, false, Some(&e)).unwrap();
        assert_eq!(series.violations.len(), traj.len());
        assert!(series.v_values.unwrap().iter().all(Option::is_none));
    }

    #[test]
    fn monitors_quiet_at_dfe() {
        let p = ModelParams::fig1();
        let traj = constant_traj((p.s0(), 0.0, 0.0), 0.1, 100);
        assert!(monitor_invariants(&p, &traj).is_empty());
    }

    #[test]
    fn monitor_flags_single_negative_sample() {
        let p = ModelParams::fig1();
        let mut samples: Vec<Sample> = constant_traj((40.0, 2.0, 1.0), 0.1, 20).samples().to_vec();
        samples[7].state.i = -0.5;
        let traj = Trajectory::from_samples(0.0, 0.1, 2.0, samples).unwrap();
        let v = monitor_invariants(&p, &traj);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Negative(Component::I));
        assert!((v[0].t - 0.7).abs() < 1e-12);
    }

    #[test]
    fn monitor_flags_bound_excess() {
        let p = ModelParams::fig1();
        // N = 60 constant is below N(0) = 60 only at t = 0; the bound decays toward 50
        let traj = constant_traj((50.0, 5.0, 5.0), 0.1, 20);
        let v = monitor_invariants(&p, &traj);
        assert_eq!(v.len(), 20);
        assert!(v.iter().all(|x| x.kind == ViolationKind::ComparisonBound));
    }

    #[test]
    fn short_fig1_run_is_certified() {
        let p = ModelParams::fig1();
        let m = model(p, 0.05);
        let hist = HistoryFunction::fig1();
        let traj = integrate(&m, &hist, 20.0, 0.05).unwrap();
        let series = certify(&m, &traj, &hist, true, None).unwrap();
        assert!(series.is_monotone(), "{:?}", &series.violations[..series.violations.len().min(5)]);
        assert!(series.w_values.unwrap().iter().all(|w| w.unwrap() >= 0.0));
        assert!(monitor_invariants(&p, &traj).is_empty());
    }
}
