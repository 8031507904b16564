//! Nonlinear incidence functions `f(s, i)` and grid-based checks of the
//! monotonicity hypotheses the stability results rely on.
//!
//! The hypotheses are:
//! - H1: `f` strictly increasing in `s` for fixed `i > 0`, non-decreasing in `i`;
//! - H2: `phi(s, i) = f(s, i) / i` bounded and non-increasing in `i > 0`;
//! - H3: `f(0, i) = f(s, 0) = 0`.
//!
//! A passing [`HypothesisReport`] is evidence on the sampled grid, not a proof.
//! Analysis routines additionally assume `phi0(s) > 0` for `s > 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Bilinear,
    Saturated { alpha: f64 },
    Custom { f: Fn2, phi0: Fn1, d2f_at_dfe: Fn1 },
}

/// An incidence function together with its analytic companions.
#[derive(Clone)]
pub struct IncidenceFunction {
    tag: String,
    kind: Kind,
}

impl fmt::Debug for IncidenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Saturated { alpha } => write!(f, "IncidenceFunction({}, alpha = {alpha})", self.tag),
            _ => write!(f, "IncidenceFunction({})", self.tag),
        }
    }
}

impl IncidenceFunction {
    /// `f(s, i) = s * i`.
    pub fn bilinear() -> Self {
        IncidenceFunction {
            tag: "bilinear".into(),
            kind: Kind::Bilinear,
        }
    }

    /// `f(s, i) = s * i / (1 + alpha * i)`.
    pub fn saturated(alpha: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "saturation",
                value: alpha,
                reason: "must be finite and non-negative",
            });
        }
        Ok(IncidenceFunction {
            tag: "saturated".into(),
            kind: Kind::Saturated { alpha },
        })
    }

    /// Looks up a builtin family by tag. `saturation` is ignored by `bilinear`.
    pub fn builtin(tag: &str, saturation: f64) -> Result<Self> {
        match tag {
            "bilinear" => Ok(Self::bilinear()),
            "saturated" => Self::saturated(saturation),
            other => Err(Error::UnknownIncidence(other.to_string())),
        }
    }

    /// A user-supplied incidence. The small-`i` slope must be given analytically
    /// as both `phi0(s)` and `d2f_at_dfe(s)`; no numerical limit is taken.
    pub fn custom<F, P, D>(tag: impl Into<String>, f: F, phi0: P, d2f_at_dfe: D) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        IncidenceFunction {
            tag: tag.into(),
            kind: Kind::Custom {
                f: Arc::new(f),
                phi0: Arc::new(phi0),
                d2f_at_dfe: Arc::new(d2f_at_dfe),
            },
        }
    }

    pub fn family_tag(&self) -> &str {
        &self.tag
    }

    /// Saturation constant for the saturated family, `None` otherwise.
    pub fn saturation(&self) -> Option<f64> {
        match self.kind {
            Kind::Saturated { alpha } => Some(alpha),
            _ => None,
        }
    }

    #[inline]
    pub fn f(&self, s: f64, i: f64) -> f64 {
        match &self.kind {
            Kind::Bilinear => s * i,
            Kind::Saturated { alpha } => s * i / (1.0 + alpha * i),
            Kind::Custom { f, .. } => f(s, i),
        }
    }

    /// `f(s, i) / i` for `i > 0`.
    pub fn phi(&self, s: f64, i: f64) -> f64 {
        match &self.kind {
            Kind::Bilinear => s,
            Kind::Saturated { alpha } => s / (1.0 + alpha * i),
            Kind::Custom { f, .. } => f(s, i) / i,
        }
    }

    /// `lim_{i -> 0+} phi(s, i)`.
    pub fn phi0(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Bilinear | Kind::Saturated { .. } => s,
            Kind::Custom { phi0, .. } => phi0(s),
        }
    }

    /// `df/di` at `(s, 0)`.
    pub fn d2f_at_dfe(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Bilinear | Kind::Saturated { .. } => s,
            Kind::Custom { d2f_at_dfe, .. } => d2f_at_dfe(s),
        }
    }

    /// True when `f(s, i) = a(s) b(i)` with `a(s) = s`, which makes the
    /// `sigma`-integrals of the Lyapunov functionals logarithmic.
    pub(crate) fn is_linear_in_s(&self) -> bool {
        matches!(self.kind, Kind::Bilinear | Kind::Saturated { .. })
    }
}

/// Hypothesis clause identifiers used in [`HypothesisReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    H1IncreasingInS,
    H1IncreasingInI,
    H2Bounded,
    H2Decreasing,
    H3Boundary,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::H1IncreasingInS => "H1 (strictly increasing in s)",
            Clause::H1IncreasingInI => "H1 (increasing in i)",
            Clause::H2Bounded => "H2 (phi bounded)",
            Clause::H2Decreasing => "H2 (phi decreasing in i)",
            Clause::H3Boundary => "H3 (f vanishes on the boundary)",
        })
    }
}

/// A grid pair on which a clause failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub clause: Clause,
    pub s: f64,
    pub i: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisReport {
    pub h1_increasing_in_s: bool,
    pub h1_increasing_in_i: bool,
    pub h2_bounded: bool,
    pub h2_decreasing: bool,
    pub h3_boundary: bool,
    /// Largest `phi(s, i)` seen on the grid.
    pub phi_sup: f64,
    pub first_violation: Option<Witness>,
}

impl HypothesisReport {
    pub fn all_pass(&self) -> bool {
        self.h1_increasing_in_s
            && self.h1_increasing_in_i
            && self.h2_bounded
            && self.h2_decreasing
            && self.h3_boundary
    }

    fn fail(&mut self, clause: Clause, s: f64, i: f64) {
        let flag = match clause {
            Clause::H1IncreasingInS => &mut self.h1_increasing_in_s,
            Clause::H1IncreasingInI => &mut self.h1_increasing_in_i,
            Clause::H2Bounded => &mut self.h2_bounded,
            Clause::H2Decreasing => &mut self.h2_decreasing,
            Clause::H3Boundary => &mut self.h3_boundary,
        };
        *flag = false;
        if self.first_violation.is_none() {
            self.first_violation = Some(Witness { clause, s, i });
        }
    }
}

impl fmt::Display for HypothesisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "{}: {}", Clause::H1IncreasingInS, mark(self.h1_increasing_in_s))?;
        writeln!(f, "{}: {}", Clause::H1IncreasingInI, mark(self.h1_increasing_in_i))?;
        writeln!(f, "{}: {} (grid sup {})", Clause::H2Bounded, mark(self.h2_bounded), self.phi_sup)?;
        writeln!(f, "{}: {}", Clause::H2Decreasing, mark(self.h2_decreasing))?;
        writeln!(f, "{}: {}", Clause::H3Boundary, mark(self.h3_boundary))?;
        if let Some(w) = &self.first_violation {
            writeln!(f, "first violation: {} at s = {}, i = {}", w.clause, w.s, w.i)?;
        }
        Ok(())
    }
}

/// Samples the hypotheses on `s_grid x i_grid`.
///
/// Both grids must be strictly increasing and non-negative, with every
/// `i_grid` entry positive.
pub fn check_hypotheses(inc: &IncidenceFunction, s_grid: &[f64], i_grid: &[f64]) -> Result<HypothesisReport> {
    validate_grid("s", s_grid, false)?;
    validate_grid("i", i_grid, true)?;

    let mut report = HypothesisReport {
        h1_increasing_in_s: true,
        h1_increasing_in_i: true,
        h2_bounded: true,
        h2_decreasing: true,
        h3_boundary: true,
        phi_sup: f64::NEG_INFINITY,
        first_violation: None,
    };

    for &i in i_grid {
        for pair in s_grid.windows(2) {
            if !(inc.f(pair[1], i) > inc.f(pair[0], i)) {
                report.fail(Clause::H1IncreasingInS, pair[1], i);
            }
        }
    }

    for &s in s_grid {
        let phi0 = inc.phi0(s);
        for pair in i_grid.windows(2) {
            if !(inc.f(s, pair[1]) >= inc.f(s, pair[0])) {
                report.fail(Clause::H1IncreasingInI, s, pair[1]);
            }
        }
        for (k, &i) in i_grid.iter().enumerate() {
            let phi = inc.phi(s, i);
            if !phi.is_finite() {
                report.fail(Clause::H2Bounded, s, i);
            } else {
                report.phi_sup = report.phi_sup.max(phi);
            }
            if !(phi <= phi0) {
                report.fail(Clause::H2Decreasing, s, i);
            }
            if k > 0 && !(phi <= inc.phi(s, i_grid[k - 1])) {
                report.fail(Clause::H2Decreasing, s, i);
            }
        }
        if inc.f(s, 0.0) != 0.0 {
            report.fail(Clause::H3Boundary, s, 0.0);
        }
    }
    for &i in i_grid {
        if inc.f(0.0, i) != 0.0 {
            report.fail(Clause::H3Boundary, 0.0, i);
        }
    }

    Ok(report)
}

fn validate_grid(name: &str, grid: &[f64], positive: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} grid is empty")));
    }
    for &x in grid {
        if !x.is_finite() || x < 0.0 || (positive && x == 0.0) {
            return Err(Error::InvalidGrid(format!("{name} grid entry {x} out of range")));
        }
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!("{name} grid must be strictly increasing")));
    }
    Ok(())
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| if k == n - 1 { end } else { start + (end - start) * k as f64 / (n - 1) as f64 })
            .collect(),
    }
}
