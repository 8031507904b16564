//! Equilibria and the basic reproduction number.
//!
//! R0 is computed twice: from its closed form and as the spectral radius of
//! the next-generation matrix `F V^-1` of the infected subsystem `(i, r)`.
//! The endemic equilibrium is located by bisection on
//! `H(i) = beta phi(s(i), i) - k` with `s(i) = Lambda/mu - (k/mu) i`, which is
//! positive near `i = 0` exactly when R0 > 1 and strictly decreasing under H2.

use crate::error::{Error, Result};
use crate::incidence::IncidenceFunction;
use crate::model::{vector_field, Derivative, ModelParams, State};

pub type Mat2 = [[f64; 2]; 2];

/// Default relative tolerance on `i*`.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Left bracket is placed at this fraction of the right endpoint.
const LEFT_BRACKET_FRACTION: f64 = 1e-12;

const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NextGenMatrices {
    /// New-infection matrix.
    pub f: Mat2,
    /// Transition matrix.
    pub v: Mat2,
    pub v_inv: Mat2,
    pub fv_inv: Mat2,
    pub spectral_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndemicEquilibrium {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl EndemicEquilibrium {
    pub fn as_state(&self, t: f64) -> State {
        State::new(t, self.s, self.i, self.r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub r0: f64,
    pub e0: State,
    pub endemic: Option<EndemicEquilibrium>,
    /// Max-norm of the vector field at the reported equilibria under constant history.
    pub residual: f64,
    pub k: f64,
}

/// Closed-form R0 `beta (mu + delta) f_i(E0) / ((mu + delta)(mu + c + gamma) - delta gamma)`.
pub fn r0_closed_form(params: &ModelParams, inc: &IncidenceFunction) -> f64 {
    params.beta * (params.mu + params.delta) * inc.d2f_at_dfe(params.s0()) / params.transition_determinant()
}

/// R0 together with the next-generation matrices.
pub fn compute_r0(params: &ModelParams, inc: &IncidenceFunction) -> (f64, NextGenMatrices) {
    let p = params;
    let a = p.infective_outflow();
    let b = p.mu + p.delta;
    let f: Mat2 = [[p.beta * inc.d2f_at_dfe(p.s0()), 0.0], [0.0, 0.0]];
    // i' loses (mu+c+gamma) i and gains delta r; r' gains gamma i and loses (mu+delta) r
    let v: Mat2 = [[a, -p.delta], [-p.gamma, b]];
    let v_inv = inverse(&v);
    let fv_inv = matmul(&f, &v_inv);
    let spectral_radius = spectral_radius(&fv_inv);
    let ngm = NextGenMatrices {
        f,
        v,
        v_inv,
        fv_inv,
        spectral_radius,
    };
    (r0_closed_form(params, inc), ngm)
}

/// Upper end of the admissible `i` interval, `Lambda / k`, where `s(i)` reaches zero.
pub fn i_upper(params: &ModelParams) -> f64 {
    params.lambda * (params.mu + params.delta) / params.transition_determinant()
}

/// Susceptibles on the `s' + i' = 0` line at infective level `i`.
pub fn s_on_steady_line(params: &ModelParams, i: f64) -> f64 {
    params.s0() - params.k() / params.mu * i
}

/// `H(i) = beta f(s(i), i) / i - k` on `(0, Lambda/k]`.
pub fn h_of_i(params: &ModelParams, inc: &IncidenceFunction, i: f64) -> Result<f64> {
    let upper = i_upper(params);
    if !(i > 0.0 && i <= upper) {
        return Err(Error::OutOfDomain {
            value: i,
            lower: 0.0,
            upper,
        });
    }
    // clamp roundoff at the right endpoint
    let s = s_on_steady_line(params, i).max(0.0);
    Ok(params.beta * inc.phi(s, i) - params.k())
}

/// The endemic equilibrium, or [`Error::NoEndemicEquilibrium`] when R0 <= 1.
pub fn endemic_equilibrium(params: &ModelParams, inc: &IncidenceFunction, tol: f64) -> Result<EndemicEquilibrium> {
    params.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    let r0 = r0_closed_form(params, inc);
    if r0 <= 1.0 {
        return Err(Error::NoEndemicEquilibrium { r0 });
    }

    let mut hi = i_upper(params);
    let mut lo = LEFT_BRACKET_FRACTION * hi;
    let h_lo = h_of_i(params, inc, lo)?;
    let h_hi = h_of_i(params, inc, hi)?;
    if !(h_lo > 0.0 && h_hi < 0.0) {
        return Err(Error::NoSignChange { left: h_lo, right: h_hi });
    }

    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid || mid == lo || mid == hi {
            break;
        }
        let h_mid = h_of_i(params, inc, mid)?;
        if h_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if h_mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i = 0.5 * (lo + hi);
    Ok(EndemicEquilibrium {
        s: s_on_steady_line(params, i),
        i,
        r: params.gamma * i / (params.mu + params.delta),
    })
}

/// Vector field at a constant history equal to `state`.
pub fn steady_residual(params: &ModelParams, inc: &IncidenceFunction, state: &State) -> Derivative {
    // a normalized kernel integrates a constant history exactly
    let incidence = params.beta * inc.f(state.s, state.i);
    vector_field(params, state, incidence)
}

/// R0, the disease-free equilibrium and, when R0 > 1, the endemic one.
pub fn equilibrium_report(params: &ModelParams, inc: &IncidenceFunction, tol: f64) -> Result<EquilibriumReport> {
    params.validate()?;
    let (r0, _) = compute_r0(params, inc);
    let e0 = State::new(0.0, params.s0(), 0.0, 0.0);
    let endemic = match endemic_equilibrium(params, inc, tol) {
        Ok(e) => Some(e),
        Err(Error::NoEndemicEquilibrium { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut residual = steady_residual(params, inc, &e0).max_abs();
    if let Some(e) = &endemic {
        residual = residual.max(steady_residual(params, inc, &e.as_state(0.0)).max_abs());
    }
    Ok(EquilibriumReport {
        r0,
        e0,
        endemic,
        residual,
        k: params.k(),
    })
}

fn inverse(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

fn matmul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

/// Largest eigenvalue modulus of a 2x2 matrix from its trace and determinant.
pub fn spectral_radius(m: &Mat2) -> f64 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let half = 0.5 * tr;
    let disc = half * half - det;
    if disc >= 0.0 {
        let root = disc.sqrt();
        // avoid cancellation in the smaller root
        let big = half + root.copysign(half);
        let small = if big != 0.0 { det / big } else { 0.0 };
        big.abs().max(small.abs())
    } else {
        det.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent evaluations of the closed-form expressions, see module tests
    const R0_FIG1: f64 = 0.8405797101449275;
    const R0_FIG2: f64 = 2.5788930646808192;
    const E_STAR_FIG2: (f64, f64, f64) = (10.738059701492537, 5.131402460212662, 5.744107231581338);

    fn bilinear() -> IncidenceFunction {
        IncidenceFunction::bilinear()
    }

    #[test]
    fn r0_fig1_matches_quoted_value() {
        let (r0, ngm) = compute_r0(&ModelParams::fig1(), &bilinear());
        assert!((r0 - 0.8406).abs() < 1e-4);
        assert!((r0 - R0_FIG1).abs() < 1e-14);
        assert!((ngm.spectral_radius - r0).abs() < 1e-10 * r0);
    }

    #[test]
    fn r0_fig2_from_formula() {
        let (r0, ngm) = compute_r0(&ModelParams::fig2(), &bilinear());
        assert!((r0 - 2.5789).abs() < 1e-3);
        assert!((r0 - R0_FIG2).abs() < 1e-13);
        assert!((ngm.spectral_radius - r0).abs() < 1e-10 * r0);
    }

    #[test]
    fn r0_vanishes_without_transmission() {
        let mut p = ModelParams::fig1();
        p.beta = 0.0;
        let (r0, ngm) = compute_r0(&p, &bilinear());
        assert_eq!(r0, 0.0);
        assert_eq!(ngm.spectral_radius, 0.0);
    }

    #[test]
    fn v_times_inverse_is_identity() {
        let (_, ngm) = compute_r0(&ModelParams::fig2(), &bilinear());
        let id = matmul(&ngm.v, &ngm.v_inv);
        assert!((id[0][0] - 1.0).abs() < 1e-12 && (id[1][1] - 1.0).abs() < 1e-12);
        assert!(id[0][1].abs() < 1e-12 && id[1][0].abs() < 1e-12);
    }

    #[test]
    fn h_endpoints() {
        let p = ModelParams::fig2();
        let inc = bilinear();
        assert!(h_of_i(&p, &inc, 1e-9).unwrap() > 0.0);
        let right = h_of_i(&p, &inc, i_upper(&p)).unwrap();
        let want = p.delta * p.gamma / (p.mu + p.delta) - p.infective_outflow();
        assert!((right - want).abs() < 1e-12);
        assert!(h_of_i(&p, &inc, 5.1313).unwrap().abs() < 1e-3);
        assert!(h_of_i(&p, &inc, 0.0).is_err());
        assert!(h_of_i(&p, &inc, i_upper(&p) * 1.01).is_err());
    }

    #[test]
    fn fig2_endemic_equilibrium() {
        let p = ModelParams::fig2();
        let e = endemic_equilibrium(&p, &bilinear(), DEFAULT_TOL).unwrap();
        assert!((e.s - E_STAR_FIG2.0).abs() < 1e-9);
        assert!((e.i - E_STAR_FIG2.1).abs() < 1e-9);
        assert!((e.r - E_STAR_FIG2.2).abs() < 1e-9);
        // bilinear: beta s* = k
        assert!((p.beta * e.s - p.k()).abs() < 1e-10);
    }

    #[test]
    fn fig1_has_no_endemic_equilibrium() {
        let err = endemic_equilibrium(&ModelParams::fig1(), &bilinear(), DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NoEndemicEquilibrium { r0 } if (r0 - R0_FIG1).abs() < 1e-14));
        let report = equilibrium_report(&ModelParams::fig1(), &bilinear(), DEFAULT_TOL).unwrap();
        assert!(report.endemic.is_none());
        assert_eq!(report.e0.s, 50.0);
    }

    #[test]
    fn report_residual_is_small() {
        let report = equilibrium_report(&ModelParams::fig2(), &bilinear(), DEFAULT_TOL).unwrap();
        assert!(report.endemic.is_some());
        assert!(report.residual < 10.0 * DEFAULT_TOL * 18.0, "{}", report.residual);
    }

    #[test]
    fn saturated_equilibrium_satisfies_steady_relations() {
        let p = ModelParams::fig2();
        let inc = IncidenceFunction::saturated(0.05).unwrap();
        let e = endemic_equilibrium(&p, &inc, DEFAULT_TOL).unwrap();
        let infl = p.beta * inc.f(e.s, e.i);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
        assert!(rel(infl, p.lambda - p.mu * e.s) < 1e-9);
        assert!(rel(infl, p.infective_outflow() * e.i - p.delta * e.r) < 1e-9);
        assert!(rel(p.gamma * e.i, (p.mu + p.delta) * e.r) < 1e-9);
    }

    #[test]
    fn spectral_radius_of_complex_pair() {
        // rotation by 90 degrees scaled by 2
        assert!((spectral_radius(&[[0.0, -2.0], [2.0, 0.0]]) - 2.0).abs() < 1e-15);
        assert!((spectral_radius(&[[1.0, 0.0], [0.0, -3.0]]) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(endemic_equilibrium(&ModelParams::fig2(), &bilinear(), 0.0).is_err());
    }
}
