//! Simulation and stability analysis of a SIRI epidemic model with a
//! distributed incubation delay and relapse.
//!
//! The crate integrates the delayed system by the method of steps, computes
//! R0 and the equilibria, and evaluates the Lyapunov functionals of the
//! disease-free and endemic steady states along computed trajectories.

pub mod analysis;
pub mod diagnostics;
pub mod error;
pub mod incidence;
pub mod integrator;
pub mod kernel;
pub mod model;
pub mod scenario;

pub use analysis::{compute_r0, endemic_equilibrium, equilibrium_report, EndemicEquilibrium, EquilibriumReport};
pub use error::{Error, Result};
pub use incidence::IncidenceFunction;
pub use integrator::{integrate, HistoryFunction, Trajectory};
pub use kernel::{DelayKernel, KernelFamily};
pub use model::{Derivative, Model, ModelParams, State};
