//! Parameters and right-hand side of the delayed SIRI system
//!
//! ```text
//! s' = L - mu s - beta int_0^h g(tau) f(s(t), i(t - tau)) dtau
//! i' = beta int_0^h g(tau) f(s(t), i(t - tau)) dtau - (mu + c + gamma) i + delta r
//! r' = gamma i - (mu + delta) r
//! ```

use crate::error::{Error, Result};
use crate::incidence::IncidenceFunction;
use crate::kernel::DelayKernel;

/// The six rates of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Recruitment rate.
    pub lambda: f64,
    /// Natural death rate.
    pub mu: f64,
    /// Recovery rate.
    pub gamma: f64,
    /// Disease-induced death rate.
    pub c: f64,
    /// Transmission coefficient.
    pub beta: f64,
    /// Relapse rate.
    pub delta: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, mu: f64, gamma: f64, c: f64, beta: f64, delta: f64) -> Result<Self> {
        let p = ModelParams {
            lambda,
            mu,
            gamma,
            c,
            beta,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameter set of the disease-free demonstration (R0 < 1).
    pub fn fig1() -> Self {
        ModelParams {
            lambda: 20.0,
            mu: 0.4,
            gamma: 0.7,
            c: 0.1,
            beta: 0.02,
            delta: 0.006,
        }
    }

    /// Parameter set of the endemic demonstration (R0 > 1).
    pub fn fig2() -> Self {
        ModelParams {
            lambda: 18.0,
            mu: 0.65,
            gamma: 0.75,
            c: 0.77,
            beta: 0.2,
            delta: 0.02,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("lambda", self.lambda), ("mu", self.mu)];
        for (name, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and positive",
                });
            }
        }
        let non_negative = [
            ("gamma", self.gamma),
            ("c", self.c),
            ("beta", self.beta),
            ("delta", self.delta),
        ];
        for (name, value) in non_negative {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and non-negative",
                });
            }
        }
        Ok(())
    }

    /// Total removal rate from the infective class, `mu + c + gamma`.
    pub fn infective_outflow(&self) -> f64 {
        self.mu + self.c + self.gamma
    }

    /// `(mu + delta)(mu + c + gamma) - delta gamma`, the R0 denominator.
    pub fn transition_determinant(&self) -> f64 {
        (self.mu + self.delta) * self.infective_outflow() - self.delta * self.gamma
    }

    /// Net per-capita loss of infectives once relapse is accounted for:
    /// `k = ((mu + delta)(mu + c + gamma) - delta gamma) / (mu + delta)`.
    pub fn k(&self) -> f64 {
        self.infective_outflow() - self.delta * self.gamma / (self.mu + self.delta)
    }

    /// Susceptible level at the disease-free equilibrium, `Lambda / mu`.
    pub fn s0(&self) -> f64 {
        self.lambda / self.mu
    }
}

/// A point of the phase space at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl State {
    pub fn new(t: f64, s: f64, i: f64, r: f64) -> Self {
        State { t, s, i, r }
    }

    /// Total population `s + i + r`.
    pub fn total(&self) -> f64 {
        self.s + self.i + self.r
    }

    pub fn is_non_negative(&self) -> bool {
        self.s >= 0.0 && self.i >= 0.0 && self.r >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Derivative {
    pub ds: f64,
    pub di: f64,
    pub dr: f64,
}

impl Derivative {
    pub fn max_abs(&self) -> f64 {
        self.ds.abs().max(self.di.abs()).max(self.dr.abs())
    }
}

/// Parameters, incidence and kernel bundled as one vector field.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: ModelParams,
    pub incidence: IncidenceFunction,
    pub kernel: DelayKernel,
}

impl Model {
    pub fn new(params: ModelParams, incidence: IncidenceFunction, kernel: DelayKernel) -> Result<Self> {
        params.validate()?;
        Ok(Model {
            params,
            incidence,
            kernel,
        })
    }

    /// `beta * int g(tau) f(s_now, i(t - tau)) dtau` with `i_history(tau) = i(t - tau)`.
    pub fn delayed_incidence<H: Fn(f64) -> f64>(&self, s_now: f64, i_history: H) -> f64 {
        self.params.beta * self.kernel.convolve(|tau| self.incidence.f(s_now, i_history(tau)))
    }

    /// Same as [`delayed_incidence`](Self::delayed_incidence) with `i` already
    /// sampled at the kernel nodes (`lagged_i[j] = i(t - tau_j)`).
    pub fn delayed_incidence_sampled(&self, s_now: f64, lagged_i: &[f64]) -> f64 {
        let masses = self.kernel.masses();
        debug_assert_eq!(masses.len(), lagged_i.len());
        let sum: f64 = masses
            .iter()
            .zip(lagged_i)
            .map(|(m, &i)| m * self.incidence.f(s_now, i))
            .sum();
        self.params.beta * sum
    }

    /// The vector field at `state` given the lag-indexed infective history.
    pub fn rhs<H: Fn(f64) -> f64>(&self, state: &State, i_history: H) -> Derivative {
        let inflow = self.delayed_incidence(state.s, i_history);
        vector_field(&self.params, state, inflow)
    }
}

/// Right-hand side given the already-evaluated delayed incidence term.
#[inline]
pub fn vector_field(params: &ModelParams, state: &State, incidence: f64) -> Derivative {
    Derivative {
        ds: params.lambda - params.mu * state.s - incidence,
        di: incidence - params.infective_outflow() * state.i + params.delta * state.r,
        dr: params.gamma * state.i - (params.mu + params.delta) * state.r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFamily;

    fn fig1_model() -> Model {
        Model::new(
            ModelParams::fig1(),
            IncidenceFunction::bilinear(),
            DelayKernel::new(KernelFamily::TruncatedExponential, 2.0, 201).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn incidence_vanishes_on_boundary() {
        let m = fig1_model();
        assert_eq!(m.delayed_incidence(40.0, |_| 0.0), 0.0);
        assert_eq!(m.delayed_incidence(0.0, |tau| 3.0 + tau), 0.0);
    }

    #[test]
    fn constant_history_pulls_out_of_kernel() {
        let m = fig1_model();
        let got = m.delayed_incidence(40.0, |_| 7.0);
        let want = 0.02 * 40.0 * 7.0;
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn dfe_is_a_rest_point() {
        let m = fig1_model();
        let d = m.rhs(&State::new(0.0, 50.0, 0.0, 0.0), |_| 0.0);
        assert_eq!(d, Derivative::default());
    }

    #[test]
    fn population_balance_identity() {
        let m = fig1_model();
        let st = State::new(0.0, 31.7, 4.2, 9.9);
        let d = m.rhs(&st, |tau| 4.0 + (3.0 * tau).sin());
        let want = 20.0 - 0.4 * st.total() - 0.1 * st.i;
        assert!((d.ds + d.di + d.dr - want).abs() < 1e-12);
    }

    #[test]
    fn boundary_points_inward() {
        let m = fig1_model();
        let d = m.rhs(&State::new(0.0, 0.0, 3.0, 0.0), |_| 3.0);
        assert_eq!(d.ds, 20.0);
        assert!(d.dr >= 0.0);
    }

    #[test]
    fn rejects_invalid_rates() {
        assert!(ModelParams::new(20.0, 0.0, 0.7, 0.1, 0.02, 0.006).is_err());
        assert!(ModelParams::new(0.0, 0.4, 0.7, 0.1, 0.02, 0.006).is_err());
        assert!(ModelParams::new(20.0, 0.4, -0.7, 0.1, 0.02, 0.006).is_err());
        assert!(ModelParams::new(20.0, 0.4, 0.7, 0.1, f64::NAN, 0.006).is_err());
        assert!(ModelParams::new(20.0, 0.4, 0.7, 0.1, 0.02, 0.006).is_ok());
    }

    #[test]
    fn k_matches_both_forms() {
        let p = ModelParams::fig2();
        let direct = p.transition_determinant() / (p.mu + p.delta);
        assert!((p.k() - direct).abs() < 1e-14);
        assert!(p.k() > 0.0);
    }
}
