//! Method-of-steps integration of the delayed system.
//!
//! Each step is a classic four-stage Runge-Kutta update. The kernel node
//! spacing equals the step, so the delayed values needed by the first and
//! last stages fall on stored grid points; the two midpoint stages read
//! half-grid values from cubic Hermite interpolation of committed samples
//! and their stored derivatives. Lags that reach before `t_start` are served
//! by the initial history function.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::kernel::lag_intervals;
use crate::model::{vector_field, Derivative, Model, State};

type Component = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `a sin(w theta) + b cos(v theta) + offset`, the form of the shipped initial histories.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sinusoid {
    pub sin_amp: f64,
    pub sin_freq: f64,
    pub cos_amp: f64,
    pub cos_freq: f64,
    pub offset: f64,
}

impl Sinusoid {
    pub fn constant(value: f64) -> Self {
        Sinusoid {
            offset: value,
            ..Default::default()
        }
    }

    pub fn sin(amp: f64, freq: f64, offset: f64) -> Self {
        Sinusoid {
            sin_amp: amp,
            sin_freq: freq,
            offset,
            ..Default::default()
        }
    }

    pub fn cos(amp: f64, freq: f64, offset: f64) -> Self {
        Sinusoid {
            cos_amp: amp,
            cos_freq: freq,
            offset,
            ..Default::default()
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.offset;
        if self.sin_amp != 0.0 {
            v += self.sin_amp * (self.sin_freq * theta).sin();
        }
        if self.cos_amp != 0.0 {
            v += self.cos_amp * (self.cos_freq * theta).cos();
        }
        v
    }
}

/// Initial data `(s, i, r)(theta)` for `theta` in `[-h, 0]`.
#[derive(Clone)]
pub struct HistoryFunction {
    s: Component,
    i: Component,
    r: Component,
}

impl fmt::Debug for HistoryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at0 = self.state(0.0);
        write!(f, "HistoryFunction(s0 = {}, i0 = {}, r0 = {})", at0.s, at0.i, at0.r)
    }
}

impl HistoryFunction {
    pub fn new<S, I, R>(s: S, i: I, r: R) -> Self
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
        I: Fn(f64) -> f64 + Send + Sync + 'static,
        R: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        HistoryFunction {
            s: Arc::new(s),
            i: Arc::new(i),
            r: Arc::new(r),
        }
    }

    pub fn sinusoidal(s: Sinusoid, i: Sinusoid, r: Sinusoid) -> Self {
        Self::new(move |t| s.eval(t), move |t| i.eval(t), move |t| r.eval(t))
    }

    pub fn constant(s: f64, i: f64, r: f64) -> Self {
        Self::new(move |_| s, move |_| i, move |_| r)
    }

    /// `(sin(theta/2) + 150, sin(10 theta) + 20, 0)`.
    pub fn fig1() -> Self {
        let [s, i, r] = fig1_sinusoids();
        Self::sinusoidal(s, i, r)
    }

    /// `(cos(5 theta) + 200, 10 sin(theta) + 30, 70)`.
    pub fn fig2() -> Self {
        let [s, i, r] = fig2_sinusoids();
        Self::sinusoidal(s, i, r)
    }

    pub fn s(&self, theta: f64) -> f64 {
        (self.s)(theta)
    }

    pub fn i(&self, theta: f64) -> f64 {
        (self.i)(theta)
    }

    pub fn r(&self, theta: f64) -> f64 {
        (self.r)(theta)
    }

    /// State at offset `theta` (time label `theta`).
    pub fn state(&self, theta: f64) -> State {
        State::new(theta, self.s(theta), self.i(theta), self.r(theta))
    }
}

pub fn fig1_sinusoids() -> [Sinusoid; 3] {
    [
        Sinusoid::sin(1.0, 0.5, 150.0),
        Sinusoid::sin(1.0, 10.0, 20.0),
        Sinusoid::constant(0.0),
    ]
}

pub fn fig2_sinusoids() -> [Sinusoid; 3] {
    [
        Sinusoid::cos(1.0, 5.0, 200.0),
        Sinusoid::sin(10.0, 1.0, 30.0),
        Sinusoid::constant(70.0),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: State,
    pub deriv: Derivative,
}

/// Dense record of a run on the uniform grid `t_start + n * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    step: f64,
    t_start: f64,
    max_delay: f64,
    lag_count: usize,
    samples: Vec<Sample>,
    clamp_events: usize,
}

impl Trajectory {
    /// Builds a trajectory from precomputed samples; used for manufactured
    /// data in tests and diagnostics.
    pub fn from_samples(t_start: f64, step: f64, max_delay: f64, samples: Vec<Sample>) -> Result<Self> {
        let lag_count = lag_intervals(max_delay, step)?;
        if samples.is_empty() {
            return Err(Error::InvalidIntegration("trajectory needs at least one sample".into()));
        }
        Ok(Trajectory {
            step,
            t_start,
            max_delay,
            lag_count,
            samples,
            clamp_events: 0,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.time_at(self.samples.len() - 1)
    }

    pub fn max_delay(&self) -> f64 {
        self.max_delay
    }

    /// `h / step`.
    pub fn lag_count(&self) -> usize {
        self.lag_count
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn final_state(&self) -> State {
        self.samples[self.samples.len() - 1].state
    }

    /// Number of negative delayed values that were clamped to zero.
    pub fn clamp_events(&self) -> usize {
        self.clamp_events
    }

    pub fn time_at(&self, n: usize) -> f64 {
        self.t_start + n as f64 * self.step
    }

    /// Grid index of `t`, or [`Error::OffGrid`].
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.t_start) / self.step;
        let n = x.round();
        if (x - n).abs() > 1e-9 * n.abs().max(1.0) || n < 0.0 || n as usize >= self.samples.len() {
            return Err(Error::OffGrid { t });
        }
        Ok(n as usize)
    }

    /// `i(t_n - l * step)`, from the samples or the history.
    pub fn lagged_i(&self, history: &HistoryFunction, n: usize, l: usize) -> f64 {
        if l <= n {
            self.samples[n - l].state.i
        } else {
            history.i(-((l - n) as f64) * self.step)
        }
    }

    /// State at an arbitrary time in `[t_start - h, t_end]`.
    pub fn interpolate(&self, history: &HistoryFunction, t: f64) -> Result<State> {
        let lower = self.t_start - self.max_delay;
        let upper = self.t_end();
        let slack = 1e-12 * self.step.max(1.0);
        if !(t >= lower - slack && t <= upper + slack) {
            return Err(Error::OutOfRange { t, lower, upper });
        }
        if t <= self.t_start {
            let mut st = history.state(t - self.t_start);
            st.t = t;
            return Ok(st);
        }
        let x = (t - self.t_start) / self.step;
        let n = x.round();
        if (x - n).abs() <= 1e-9 * n.max(1.0) {
            let idx = (n as usize).min(self.samples.len() - 1);
            return Ok(self.samples[idx].state);
        }
        let k = (x.floor() as usize).min(self.samples.len() - 2);
        let theta = x - k as f64;
        let a = &self.samples[k];
        let b = &self.samples[k + 1];
        Ok(State::new(
            t,
            hermite(a.state.s, a.deriv.ds, b.state.s, b.deriv.ds, self.step, theta),
            hermite(a.state.i, a.deriv.di, b.state.i, b.deriv.di, self.step, theta),
            hermite(a.state.r, a.deriv.dr, b.state.r, b.deriv.dr, self.step, theta),
        ))
    }
}

/// Cubic Hermite interpolant at fraction `theta` of an interval of length `dt`.
#[inline]
pub fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, dt: f64, theta: f64) -> f64 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * dt * d0 + h01 * y1 + h11 * dt * d1
}

#[inline]
fn hermite_mid(y0: f64, d0: f64, y1: f64, d1: f64, dt: f64) -> f64 {
    0.5 * (y0 + y1) + 0.125 * dt * (d0 - d1)
}

#[inline]
fn clamp_count(v: f64, clamps: &mut usize) -> f64 {
    if v < 0.0 {
        *clamps += 1;
        0.0
    } else {
        v
    }
}

fn advance(y: &State, k: &Derivative, dt: f64, t: f64) -> State {
    State::new(t, y.s + dt * k.ds, y.i + dt * k.di, y.r + dt * k.dr)
}

/// Integrates `model` from `history` over `[0, t_end]` with a fixed `step`.
///
/// The kernel spacing must equal `step` (`h = m * step`); a point-mass kernel
/// accepts any step. The number of steps is `floor(t_end / step)`.
pub fn integrate(model: &Model, history: &HistoryFunction, t_end: f64, step: f64) -> Result<Trajectory> {
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidIntegration(format!("t_end must be positive, got {t_end}")));
    }
    let h = model.kernel.h();
    let m = lag_intervals(h, step)?;
    if m != model.kernel.lag_count() {
        return Err(Error::StepMismatch { step, h });
    }
    for l in 0..=m {
        let theta = -(l as f64) * step;
        let st = history.state(theta);
        if !st.is_non_negative() || !(st.s + st.i + st.r).is_finite() {
            return Err(Error::InvalidIntegration(format!(
                "history must be finite and non-negative, got {st:?} at theta = {theta}"
            )));
        }
    }

    let n_steps = (t_end / step + 1e-9).floor() as usize;
    let params = &model.params;
    let t_start = 0.0;
    let mut clamps = 0usize;

    let mut samples: Vec<Sample> = Vec::with_capacity(n_steps + 1);
    let mut end_lags = vec![0.0; m + 1];
    let mut mid_lags = vec![0.0; m + 1];

    let y0 = history.state(0.0);
    for (l, slot) in end_lags.iter_mut().enumerate() {
        *slot = history.i(-(l as f64) * step);
    }
    let d0 = vector_field(params, &y0, model.delayed_incidence_sampled(y0.s, &end_lags));
    samples.push(Sample { state: y0, deriv: d0 });

    for n in 0..n_steps {
        let Sample { state: y, deriv: k1 } = samples[n];
        let t_n = t_start + n as f64 * step;
        let t_mid = t_n + 0.5 * step;
        let t_next = t_start + (n + 1) as f64 * step;

        for l in 1..=m {
            let v = if l <= n {
                let a = &samples[n - l];
                let b = &samples[n - l + 1];
                hermite_mid(a.state.i, a.deriv.di, b.state.i, b.deriv.di, step)
            } else {
                history.i(t_mid - l as f64 * step - t_start)
            };
            mid_lags[l] = clamp_count(v, &mut clamps);
        }
        for l in 1..=m {
            end_lags[l] = if l <= n + 1 {
                samples[n + 1 - l].state.i
            } else {
                history.i(-((l - n - 1) as f64) * step)
            };
        }

        let y2 = advance(&y, &k1, 0.5 * step, t_mid);
        mid_lags[0] = y2.i;
        let k2 = vector_field(params, &y2, model.delayed_incidence_sampled(y2.s, &mid_lags));

        let y3 = advance(&y, &k2, 0.5 * step, t_mid);
        mid_lags[0] = y3.i;
        let k3 = vector_field(params, &y3, model.delayed_incidence_sampled(y3.s, &mid_lags));

        let y4 = advance(&y, &k3, step, t_next);
        end_lags[0] = y4.i;
        let k4 = vector_field(params, &y4, model.delayed_incidence_sampled(y4.s, &end_lags));

        let sixth = step / 6.0;
        let next = State::new(
            t_next,
            y.s + sixth * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds),
            y.i + sixth * (k1.di + 2.0 * k2.di + 2.0 * k3.di + k4.di),
            y.r + sixth * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr),
        );
        end_lags[0] = next.i;
        let deriv = vector_field(params, &next, model.delayed_incidence_sampled(next.s, &end_lags));
        samples.push(Sample { state: next, deriv });
    }

    Ok(Trajectory {
        step,
        t_start,
        max_delay: h,
        lag_count: m,
        samples,
        clamp_events: clamps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::IncidenceFunction;
    use crate::kernel::{DelayKernel, KernelFamily};
    use crate::model::ModelParams;

    fn model(params: ModelParams, h: f64, step: f64) -> Model {
        Model::new(
            params,
            IncidenceFunction::bilinear(),
            DelayKernel::with_step(KernelFamily::TruncatedExponential, h, step).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn dfe_history_stays_put() {
        let p = ModelParams::fig2();
        let m = model(p, 2.0, 0.05);
        let hist = HistoryFunction::constant(p.s0(), 0.0, 0.0);
        let traj = integrate(&m, &hist, 20.0, 0.05).unwrap();
        for smp in traj.samples() {
            assert!((smp.state.s - p.s0()).abs() < 1e-10);
            assert_eq!(smp.state.i, 0.0);
            assert_eq!(smp.state.r, 0.0);
        }
    }

    #[test]
    fn row_count_is_floor_of_ratio_plus_one() {
        let m = model(ModelParams::fig1(), 2.0, 0.1);
        let traj = integrate(&m, &HistoryFunction::fig1(), 1.05, 0.1).unwrap();
        assert_eq!(traj.len(), 11);
        let traj = integrate(&m, &HistoryFunction::fig1(), 1.0, 0.1).unwrap();
        assert_eq!(traj.len(), 11);
        assert!((traj.t_end() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_misaligned_step() {
        let m = model(ModelParams::fig1(), 2.0, 0.1);
        assert!(matches!(
            integrate(&m, &HistoryFunction::fig1(), 10.0, 0.05),
            Err(Error::StepMismatch { .. })
        ));
        assert!(integrate(&m, &HistoryFunction::fig1(), 0.0, 0.1).is_err());
        assert!(integrate(&m, &HistoryFunction::constant(1.0, -1.0, 0.0), 1.0, 0.1).is_err());
    }

    #[test]
    fn interpolate_hits_grid_and_history() {
        let m = model(ModelParams::fig1(), 2.0, 0.1);
        let hist = HistoryFunction::fig1();
        let traj = integrate(&m, &hist, 5.0, 0.1).unwrap();
        let on_grid = traj.interpolate(&hist, traj.time_at(17)).unwrap();
        assert_eq!(on_grid, traj.samples()[17].state);
        let back = traj.interpolate(&hist, -1.0).unwrap();
        assert_eq!(back.i, (10.0f64 * -1.0).sin() + 20.0);
        assert!(traj.interpolate(&hist, -2.5).is_err());
        assert!(traj.interpolate(&hist, 5.5).is_err());
    }

    #[test]
    fn hermite_reproduces_lines() {
        let samples: Vec<Sample> = (0..4)
            .map(|n| {
                let t = n as f64 * 0.5;
                Sample {
                    state: State::new(t, 2.0 * t + 1.0, 3.0 - t, 0.5 * t),
                    deriv: Derivative {
                        ds: 2.0,
                        di: -1.0,
                        dr: 0.5,
                    },
                }
            })
            .collect();
        let traj = Trajectory::from_samples(0.0, 0.5, 0.0, samples).unwrap();
        let hist = HistoryFunction::constant(1.0, 3.0, 0.0);
        let mid = traj.interpolate(&hist, 0.75).unwrap();
        assert!((mid.s - 0.5 * (2.0 + 3.0)).abs() < 1e-12);
        assert!((mid.i - 0.5 * (2.5 + 2.0)).abs() < 1e-12);
        assert!((mid.r - 0.375).abs() < 1e-12);
    }

    #[test]
    fn index_of_checks_grid() {
        let m = model(ModelParams::fig1(), 2.0, 0.1);
        let traj = integrate(&m, &HistoryFunction::fig1(), 1.0, 0.1).unwrap();
        assert_eq!(traj.index_of(0.3).unwrap(), 3);
        assert!(traj.index_of(0.35).is_err());
        assert!(traj.index_of(1.5).is_err());
    }
}
