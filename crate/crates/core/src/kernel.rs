//! Incubation-period kernels on `[0, h]` and the quadrature that evaluates
//! the distributed-delay integral.
//!
//! Nodes are uniformly spaced and carry composite-trapezoid weights, so the
//! node spacing can be matched to an integrator step and every delayed value
//! `i(t - tau_j)` lands on a stored grid point. Densities are renormalized
//! numerically; the raw integral is kept in [`DelayKernel::normalization_factor`]
//! so callers can rescale the transmission coefficient when they supply an
//! unnormalized density. Order-2 accuracy assumes a twice-differentiable
//! density.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// `g(tau) = exp(-tau) / (1 - exp(-h))`.
    TruncatedExponential,
    /// `g(tau) = 1 / h`.
    Uniform,
    /// Dirac mass at `tau = 0`; requires `h = 0` and yields an un-delayed model.
    PointMass,
    /// User-supplied density, see [`DelayKernel::from_density`].
    Custom,
}

impl KernelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelFamily::TruncatedExponential => "truncated-exponential",
            KernelFamily::Uniform => "uniform",
            KernelFamily::PointMass => "point-mass",
            KernelFamily::Custom => "custom",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncated-exponential" => Ok(KernelFamily::TruncatedExponential),
            "uniform" => Ok(KernelFamily::Uniform),
            "point-mass" => Ok(KernelFamily::PointMass),
            other => Err(Error::InvalidKernel(format!("unknown kernel family `{other}`"))),
        }
    }
}

/// A normalized delay density with its quadrature rule.
#[derive(Clone)]
pub struct DelayKernel {
    family: KernelFamily,
    h: f64,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `weights[j] * density(nodes[j])` after renormalization.
    masses: Vec<f64>,
    normalization_factor: f64,
    raw_density: DensityFn,
}

impl fmt::Debug for DelayKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DelayKernel")
            .field("family", &self.family)
            .field("h", &self.h)
            .field("n_nodes", &self.nodes.len())
            .field("normalization_factor", &self.normalization_factor)
            .finish()
    }
}

impl DelayKernel {
    /// Builds a builtin kernel with `n_nodes` uniformly spaced nodes on `[0, h]`.
    pub fn new(family: KernelFamily, h: f64, n_nodes: usize) -> Result<Self> {
        match family {
            KernelFamily::PointMass => {
                if h != 0.0 {
                    return Err(Error::InvalidKernel(format!(
                        "point-mass kernel requires h = 0, got {h}"
                    )));
                }
                Ok(Self::point_mass())
            }
            KernelFamily::TruncatedExponential => {
                check_continuous(h)?;
                let scale = 1.0 / (-(-h).exp_m1());
                Self::build(family, h, n_nodes, Arc::new(move |tau: f64| (-tau).exp() * scale))
            }
            KernelFamily::Uniform => {
                check_continuous(h)?;
                Self::build(family, h, n_nodes, Arc::new(move |_| 1.0 / h))
            }
            KernelFamily::Custom => Err(Error::InvalidKernel(
                "custom kernels are built with DelayKernel::from_density".into(),
            )),
        }
    }

    /// Builds a kernel whose node spacing equals `step`, so `h` must be an
    /// integer multiple of `step`.
    pub fn with_step(family: KernelFamily, h: f64, step: f64) -> Result<Self> {
        if family == KernelFamily::PointMass {
            return Self::new(family, h, 1);
        }
        let intervals = lag_intervals(h, step)?;
        Self::new(family, h, intervals + 1)
    }

    /// Builds a kernel from an arbitrary non-negative density, renormalizing
    /// it so the quadrature integrates it to one.
    pub fn from_density<F>(h: f64, n_nodes: usize, density: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_continuous(h)?;
        Self::build(KernelFamily::Custom, h, n_nodes, Arc::new(density))
    }

    fn point_mass() -> Self {
        DelayKernel {
            family: KernelFamily::PointMass,
            h: 0.0,
            spacing: 0.0,
            nodes: vec![0.0],
            weights: vec![1.0],
            masses: vec![1.0],
            normalization_factor: 1.0,
            raw_density: Arc::new(|tau| if tau == 0.0 { 1.0 } else { 0.0 }),
        }
    }

    fn build(family: KernelFamily, h: f64, n_nodes: usize, raw_density: DensityFn) -> Result<Self> {
        if n_nodes < 2 {
            return Err(Error::InvalidKernel(format!(
                "a continuous kernel needs at least 2 nodes, got {n_nodes}"
            )));
        }
        let intervals = n_nodes - 1;
        let spacing = h / intervals as f64;
        let nodes: Vec<f64> = (0..n_nodes)
            .map(|j| if j == intervals { h } else { j as f64 * spacing })
            .collect();
        let mut weights = vec![spacing; n_nodes];
        weights[0] = 0.5 * spacing;
        weights[intervals] = 0.5 * spacing;

        let mut masses = Vec::with_capacity(n_nodes);
        for (&tau, &w) in nodes.iter().zip(&weights) {
            let g = raw_density(tau);
            if !g.is_finite() || g < 0.0 {
                return Err(Error::InvalidKernel(format!(
                    "density must be finite and non-negative, got g({tau}) = {g}"
                )));
            }
            masses.push(w * g);
        }
        let normalization_factor: f64 = masses.iter().sum();
        if normalization_factor <= 0.0 {
            return Err(Error::InvalidKernel("density integrates to zero".into()));
        }
        for m in &mut masses {
            *m /= normalization_factor;
        }

        Ok(DelayKernel {
            family,
            h,
            spacing,
            nodes,
            weights,
            masses,
            normalization_factor,
            raw_density,
        })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// Maximum delay.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Distance between consecutive nodes (zero for the point mass).
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Quadrature masses `w_j * g(tau_j)`; they are non-negative and sum to one.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Number of lag intervals `m = h / spacing`.
    pub fn lag_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Quadrature integral of the density as supplied, before renormalization.
    pub fn normalization_factor(&self) -> f64 {
        self.normalization_factor
    }

    /// The renormalized density `g(tau)`.
    pub fn density(&self, tau: f64) -> f64 {
        (self.raw_density)(tau) / self.normalization_factor
    }

    /// `sum_j w_j g(tau_j) evaluand(tau_j)`.
    pub fn convolve<F: Fn(f64) -> f64>(&self, evaluand: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.masses)
            .map(|(&tau, &m)| m * evaluand(tau))
            .sum()
    }

    /// Same as [`convolve`](Self::convolve) with the evaluand already sampled
    /// at the nodes.
    pub fn convolve_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.masses.len());
        self.masses.iter().zip(values).map(|(m, v)| m * v).sum()
    }
}

fn check_continuous(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidKernel(format!(
            "a continuous kernel needs a finite h > 0, got {h}"
        )));
    }
    Ok(())
}

/// Returns `m` with `h = m * step`, or an error when `step` does not divide `h`.
pub(crate) fn lag_intervals(h: f64, step: f64) -> Result<usize> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidIntegration(format!("step must be positive, got {step}")));
    }
    if h == 0.0 {
        return Ok(0);
    }
    let ratio = h / step;
    let m = ratio.round();
    if m < 1.0 || (ratio - m).abs() > 1e-9 * m {
        return Err(Error::StepMismatch { step, h });
    }
    Ok(m as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Closed form of the mean of exp(-tau)/(1-exp(-h)) on [0, 2]:
    // (1 - 3 e^-2) / (1 - e^-2).
    const TRUNC_EXP_MEAN_H2: f64 = 0.6869647145006686;

    #[test]
    fn truncated_exponential_integrates_to_one() {
        let k = DelayKernel::new(KernelFamily::TruncatedExponential, 2.0, 201).unwrap();
        assert!((k.convolve(|_| 1.0) - 1.0).abs() < 1e-12);
        // the analytic density is already normalized, so the raw factor is
        // the trapezoid error only
        assert!((k.normalization_factor() - 1.0).abs() < 1e-4);
        assert_eq!(k.nodes()[0], 0.0);
        assert_eq!(*k.nodes().last().unwrap(), 2.0);
        assert!(k.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn uniform_density_is_one_on_unit_interval() {
        let k = DelayKernel::new(KernelFamily::Uniform, 1.0, 11).unwrap();
        for &tau in k.nodes() {
            assert!((k.density(tau) - 1.0).abs() < 1e-12);
        }
        assert!((k.convolve(|_| 1.0) - 1.0).abs() < 1e-12);
        assert!((k.convolve(|tau| tau) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn mean_error_drops_by_second_order() {
        let err = |n| {
            let k = DelayKernel::new(KernelFamily::TruncatedExponential, 2.0, n).unwrap();
            (k.convolve(|tau| tau) - TRUNC_EXP_MEAN_H2).abs()
        };
        let ratio = err(101) / err(201);
        assert!(ratio >= 3.5, "error ratio {ratio}");
    }

    #[test]
    fn convolve_mean_matches_closed_form() {
        let k = DelayKernel::new(KernelFamily::TruncatedExponential, 2.0, 2001).unwrap();
        assert!((k.convolve(|tau| tau) - TRUNC_EXP_MEAN_H2).abs() < 1e-6);
    }

    #[test]
    fn point_mass_is_single_node() {
        let k = DelayKernel::new(KernelFamily::PointMass, 0.0, 7).unwrap();
        assert_eq!(k.nodes(), &[0.0]);
        assert_eq!(k.masses(), &[1.0]);
        assert_eq!(k.lag_count(), 0);
        assert_eq!(k.convolve(|tau| 3.0 + tau), 3.0);
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(DelayKernel::new(KernelFamily::Uniform, 0.0, 11).is_err());
        assert!(DelayKernel::new(KernelFamily::TruncatedExponential, -1.0, 11).is_err());
        assert!(DelayKernel::new(KernelFamily::Uniform, 1.0, 1).is_err());
        assert!(DelayKernel::new(KernelFamily::PointMass, 1.0, 11).is_err());
        assert!(DelayKernel::from_density(1.0, 11, |t| t - 0.5).is_err());
        assert!(DelayKernel::from_density(1.0, 11, |_| 0.0).is_err());
    }

    #[test]
    fn with_step_ties_spacing_to_step() {
        let k = DelayKernel::with_step(KernelFamily::TruncatedExponential, 2.0, 0.01).unwrap();
        assert_eq!(k.lag_count(), 200);
        assert!((k.spacing() - 0.01).abs() < 1e-15);
        assert!(matches!(
            DelayKernel::with_step(KernelFamily::Uniform, 2.0, 0.03),
            Err(Error::StepMismatch { .. })
        ));
    }

    #[test]
    fn unnormalized_density_keeps_raw_factor() {
        let k = DelayKernel::from_density(1.0, 101, |_| 4.0).unwrap();
        assert!((k.normalization_factor() - 4.0).abs() < 1e-12);
        assert!((k.density(0.3) - 1.0).abs() < 1e-12);
        assert!((k.convolve(|_| 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn family_tags_round_trip() {
        for fam in [
            KernelFamily::TruncatedExponential,
            KernelFamily::Uniform,
            KernelFamily::PointMass,
        ] {
            assert_eq!(fam.as_str().parse::<KernelFamily>().unwrap(), fam);
        }
        assert!("gamma".parse::<KernelFamily>().is_err());
    }
}
