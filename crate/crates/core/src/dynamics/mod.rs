//! Trajectory simulation of the six dynamics.
//!
//! State layout for spatial dimension `d` (block-major):
//!
//! | dynamics                  | state            |
//! |---------------------------|------------------|
//! | overdamped                | `x`              |
//! | kinetic Langevin, RHMC    | `x, v`           |
//! | Zig-Zag                   | `x, v ∈ {±1}^d`  |
//! | adaptive Langevin         | `q, v, z` (scalar `z`) |
//! | GLE                       | `x, v, z`        |

pub mod moments;
pub mod ou;
pub mod pdmp;
pub mod rng;
pub mod splitting;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::linalg;
use crate::model::{build_drift_block, DynamicsKind, Potential};

pub use moments::{check_gaussian_moments, gaussian_moments_exact, MomentCheck};
pub use ou::{exact_ou_step, step_euler_maruyama, BlockTransition, OuTransition};
pub use pdmp::{simulate_rhmc, simulate_zigzag, EventKind, PdmpEvent, PdmpPath, Rhmc, ZigZag};
pub use rng::trajectory_rng;
pub use splitting::{step_ald, step_baoab, step_gle_splitting, GleSplitting};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExactOu,
    EulerMaruyama,
    SplittingBaoab,
    SplittingAld,
    SplittingGle,
    EventRhmc,
    EventZigZag,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ExactOu => "exact_ou",
            Scheme::EulerMaruyama => "euler_maruyama",
            Scheme::SplittingBaoab => "splitting_baoab",
            Scheme::SplittingAld => "splitting_ald",
            Scheme::SplittingGle => "splitting_gle",
            Scheme::EventRhmc => "event_rhmc",
            Scheme::EventZigZag => "event_zig_zag",
        }
    }

    /// Exact OU for linear-drift dynamics, otherwise the natural scheme.
    pub fn default_for(kind: &DynamicsKind) -> Self {
        match kind {
            DynamicsKind::Overdamped | DynamicsKind::KineticLangevin { .. } | DynamicsKind::Gle { .. } => Scheme::ExactOu,
            DynamicsKind::Rhmc { .. } => Scheme::EventRhmc,
            DynamicsKind::ZigZag { .. } => Scheme::EventZigZag,
            DynamicsKind::AdaptiveLangevin { .. } => Scheme::SplittingAld,
        }
    }

    pub fn compatible_with(&self, kind: &DynamicsKind) -> bool {
        matches!(
            (self, kind),
            (Scheme::ExactOu, DynamicsKind::Overdamped | DynamicsKind::KineticLangevin { .. } | DynamicsKind::Gle { .. })
                | (Scheme::EulerMaruyama, DynamicsKind::Overdamped)
                | (Scheme::SplittingBaoab, DynamicsKind::KineticLangevin { .. })
                | (Scheme::SplittingAld, DynamicsKind::AdaptiveLangevin { .. })
                | (Scheme::SplittingGle, DynamicsKind::Gle { .. })
                | (Scheme::EventRhmc, DynamicsKind::Rhmc { .. })
                | (Scheme::EventZigZag, DynamicsKind::ZigZag { .. })
        )
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Integration scheme and its step. `h` is the maximal sub-step of the
/// time-stepping schemes (leapfrog step for RHMC on general potentials);
/// exact and event-driven schemes ignore it otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    pub h: f64,
    /// Lipschitz bound of `∇U` for Zig-Zag thinning on general potentials.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_lipschitz: Option<f64>,
}

impl SchemeSpec {
    pub fn new(scheme: Scheme, h: f64) -> Self {
        Self {
            scheme,
            h,
            gradient_lipschitz: None,
        }
    }

    pub fn exact() -> Self {
        Self::new(Scheme::ExactOu, 1.0)
    }

    pub fn with_lipschitz(mut self, k: f64) -> Self {
        self.gradient_lipschitz = Some(k);
        self
    }

    pub fn validate(&self, kind: &DynamicsKind) -> Result<()> {
        ensure_positive("h", self.h)?;
        if !self.scheme.compatible_with(kind) {
            return Err(Error::IncompatibleScheme {
                scheme: self.scheme.name().into(),
                kind: kind.name().into(),
            });
        }
        Ok(())
    }
}

/// Law of the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// The invariant measure; needs a quadratic potential.
    Stationary,
    Fixed(Vec<f64>),
    Gaussian { mean: Vec<f64>, cov: DMatrix<f64> },
}

/// `n_traj` trajectories sampled on a common time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub kind: DynamicsKind,
    pub scheme: SchemeSpec,
    pub n_traj: usize,
    pub times: Vec<f64>,
    pub n_coords: usize,
    pub master_seed: u64,
    /// Row-major `n_traj × n_times × n_coords`.
    pub states: Vec<f64>,
}

impl Ensemble {
    pub fn state(&self, traj: usize, time_index: usize) -> &[f64] {
        let nt = self.times.len();
        let k = self.n_coords;
        let o = (traj * nt + time_index) * k;
        &self.states[o..o + k]
    }

    pub fn trajectory(&self, traj: usize) -> &[f64] {
        let len = self.times.len() * self.n_coords;
        &self.states[traj * len..(traj + 1) * len]
    }
}

enum Stepper<'a> {
    Exact(Vec<(f64, BlockTransition)>),
    Euler { pot: &'a dyn Potential, h: f64 },
    Baoab { pot: &'a dyn Potential, gamma: f64, h: f64 },
    Ald { pot: &'a dyn Potential, eps: f64, gamma: f64, h: f64 },
    Gle { pot: &'a dyn Potential, steps: Vec<(f64, usize, GleSplitting)> },
    Rhmc(Rhmc<'a>),
    ZigZag(ZigZag<'a>),
}

fn substeps(dt: f64, h: f64) -> (usize, f64) {
    let n = ((dt / h) - 1e-9).ceil().max(1.0) as usize;
    (n, dt / n as f64)
}

fn distinct_steps(times: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        if !out.contains(&dt) {
            out.push(dt);
        }
    }
    out
}

impl<'a> Stepper<'a> {
    fn build(kind: &DynamicsKind, spec: &SchemeSpec, pot: &'a dyn Potential, times: &[f64]) -> Result<Self> {
        spec.validate(kind)?;
        let h = spec.h;
        Ok(match (spec.scheme, *kind) {
            (Scheme::ExactOu, _) => {
                let m = pot.as_quadratic().ok_or_else(|| Error::IncompatibleScheme {
                    scheme: "exact_ou".into(),
                    kind: format!("{} with a non-quadratic potential", kind.name()),
                })?;
                let systems = m.iter().map(|&mi| build_drift_block(kind, mi)).collect::<Result<Vec<_>>>()?;
                let table = distinct_steps(times)
                    .into_iter()
                    .map(|dt| Ok((dt, BlockTransition::new(&systems, dt)?)))
                    .collect::<Result<Vec<_>>>()?;
                Stepper::Exact(table)
            }
            (Scheme::EulerMaruyama, _) => Stepper::Euler { pot, h },
            (Scheme::SplittingBaoab, DynamicsKind::KineticLangevin { gamma }) => Stepper::Baoab { pot, gamma, h },
            (Scheme::SplittingAld, DynamicsKind::AdaptiveLangevin { epsilon, gamma }) => Stepper::Ald { pot, eps: epsilon, gamma, h },
            (Scheme::SplittingGle, DynamicsKind::Gle { lambda, gamma }) => {
                let steps = distinct_steps(times)
                    .into_iter()
                    .map(|dt| {
                        let (n, hs) = substeps(dt, h);
                        Ok((dt, n, GleSplitting::new(lambda, gamma, hs, pot.dim())?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Stepper::Gle { pot, steps }
            }
            (Scheme::EventRhmc, DynamicsKind::Rhmc { gamma }) => Stepper::Rhmc(Rhmc::new(pot, gamma, h)?),
            (Scheme::EventZigZag, DynamicsKind::ZigZag { gamma }) => {
                Stepper::ZigZag(ZigZag::new(pot, gamma, spec.gradient_lipschitz)?)
            }
            _ => unreachable!("compatibility checked by SchemeSpec::validate"),
        })
    }

    fn advance<R: Rng + ?Sized>(&self, state: &mut [f64], t0: f64, dt: f64, grad: &mut [f64], rng: &mut R) -> Result<()> {
        match self {
            Stepper::Exact(table) => {
                let tr = &table.iter().find(|(s, _)| *s == dt).expect("transition for every grid step").1;
                tr.sample(state, rng);
            }
            Stepper::Euler { pot, h } => {
                let (n, hs) = substeps(dt, *h);
                for _ in 0..n {
                    step_euler_maruyama(*pot, hs, state, grad, rng);
                }
            }
            Stepper::Baoab { pot, gamma, h } => {
                let (n, hs) = substeps(dt, *h);
                for _ in 0..n {
                    step_baoab(*pot, *gamma, hs, state, grad, rng);
                }
            }
            Stepper::Ald { pot, eps, gamma, h } => {
                let (n, hs) = substeps(dt, *h);
                for _ in 0..n {
                    step_ald(*pot, *eps, *gamma, hs, state, grad, rng);
                }
            }
            Stepper::Gle { pot, steps } => {
                let (_, n, stepper) = steps.iter().find(|(s, _, _)| *s == dt).expect("splitting for every grid step");
                for _ in 0..*n {
                    stepper.step(*pot, state, grad, rng);
                }
            }
            Stepper::Rhmc(s) => s.advance(state, dt, t0, rng, None),
            Stepper::ZigZag(s) => s.advance(state, dt, t0, rng, None)?,
        }
        Ok(())
    }
}

/// Draw an initial state. Stationary draws use the invariant measure of the
/// quadratic potential `Σ m_i x_i²/2`.
pub fn sample_initial<R: Rng + ?Sized>(kind: &DynamicsKind, pot: &dyn Potential, init: &InitialCondition, rng: &mut R) -> Result<Vec<f64>> {
    let d = pot.dim();
    let n = kind.state_dim(d);
    let state = match init {
        InitialCondition::Stationary => {
            let m = pot.as_quadratic().ok_or_else(|| {
                Error::invalid("init", "stationary sampling needs a quadratic potential")
            })?;
            let mut s: Vec<f64> = m.iter().map(|mi| rng::normal(rng) / mi.sqrt()).collect();
            match kind {
                DynamicsKind::Overdamped => {}
                DynamicsKind::ZigZag { .. } => s.extend((0..d).map(|_| rng::sign(rng))),
                _ => s.extend((0..n - d).map(|_| rng::normal(rng))),
            }
            s
        }
        InitialCondition::Fixed(x) => x.clone(),
        InitialCondition::Gaussian { mean, cov } => {
            if cov.shape() != (mean.len(), mean.len()) {
                return Err(Error::DimensionMismatch("initial mean and covariance differ in size".into()));
            }
            let l = linalg::cholesky_factor(cov)?;
            let xi = DVector::from_fn(mean.len(), |_, _| rng::normal(rng));
            (DVector::from_column_slice(mean) + l * xi).iter().copied().collect()
        }
    };
    if state.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial state has {} coordinates, {} needs {}",
            state.len(),
            kind.name(),
            n
        )));
    }
    if matches!(kind, DynamicsKind::ZigZag { .. }) {
        pdmp::check_signs(&state[d..])?;
    }
    Ok(state)
}

/// Simulate `n_traj` independent trajectories on `times`.
///
/// Trajectory `j` draws its initial state and all noise from
/// [`trajectory_rng`]`(master_seed, j)`, so the result is identical for any
/// number of worker threads.
pub fn run_ensemble(
    kind: &DynamicsKind,
    scheme: &SchemeSpec,
    pot: &dyn Potential,
    init: &InitialCondition,
    n_traj: usize,
    times: &[f64],
    master_seed: u64,
) -> Result<Ensemble> {
    kind.validate()?;
    if n_traj == 0 {
        return Err(Error::invalid("n_traj", "need at least one trajectory"));
    }
    if times.is_empty() || times[0] != 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("times", "grid must start at 0 and be strictly increasing"));
    }
    let stepper = Stepper::build(kind, scheme, pot, times)?;
    let d = pot.dim();
    let k = kind.state_dim(d);
    let nt = times.len();

    let trajectories: Vec<Vec<f64>> = (0..n_traj)
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            let mut rng = trajectory_rng(master_seed, j as u64);
            let mut state = sample_initial(kind, pot, init, &mut rng)?;
            let mut grad = vec![0.0; d];
            let mut out = Vec::with_capacity(nt * k);
            out.extend_from_slice(&state);
            for w in times.windows(2) {
                stepper.advance(&mut state, w[0], w[1] - w[0], &mut grad, &mut rng)?;
                out.extend_from_slice(&state);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Ensemble {
        kind: *kind,
        scheme: *scheme,
        n_traj,
        times: times.to_vec(),
        n_coords: k,
        master_seed,
        states: trajectories.concat(),
    })
}

/// `n` equally spaced points on `[0, t_end]` (inclusive).
pub fn uniform_grid(t_end: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| t_end * i as f64 / (n - 1) as f64).collect()
}
