//! Explicit hypocoercive convergence rates and lift lower bounds for kinetic
//! Langevin-type samplers, checked against exact Gaussian spectral theory and
//! stochastic simulation.
//!
//! * [`model`]: targets, potentials, the dynamics catalogue and drift matrices.
//! * [`spectral`]: eigenvalues, gaps, semigroup norms, relaxation times.
//! * [`rates`]: the abstract rate and the adaptive Langevin constants.
//! * [`dynamics`]: exact OU, splitting and event-driven simulation.
//! * [`analysis`]: Gaussian laws, χ² decay curves, autocovariances.
//! * [`io`], [`cli`]: file formats and the command line front end.

pub mod analysis;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod rates;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{
    build_drift_system, validate_assumptions, DriftSystem, DynamicsKind, GaussianTarget, GeneralPotential, Potential,
    QuadraticPotential,
};
