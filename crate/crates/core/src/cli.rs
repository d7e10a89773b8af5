//! Command line front end.
//!
//! Parameters come from flags and from an optional JSON config file
//! (`--config`). A flag always overrides the config value, which overrides
//! the built-in default. Every run writes the effective configuration to
//! `<out>/config.json` next to its reports.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure (including a
//! failed `verify` check).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    self, decay_curve, ensemble_moments, relaxation_sweep, stationarity_checks, time_averaged_energy, GaussianLaw,
    MomentTest,
};
use crate::dynamics::{self, run_ensemble, uniform_grid, InitialCondition, MomentCheck, Scheme, SchemeSpec};
use crate::error::{Error, Result};
use crate::io::{self, RateRow};
use crate::model::{build_drift_block, validate_assumptions, DynamicsKind, GaussianTarget, QuadraticPotential};
use crate::rates::{self, AldConfig, PrefactorConvention, RateInputs};
use crate::spectral;

#[derive(Debug, Parser)]
#[command(name = "liftrate", version, about = "Hypocoercive rates, lift bounds and Gaussian spectral checks")]
pub struct Cli {
    /// Master seed of all random streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory (default: `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON run configuration; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues, gap, relaxation time and lift bounds of a linear drift.
    Spectral(SpectralArgs),
    /// Abstract and adaptive Langevin rate formulas.
    Rates(RatesArgs),
    /// Simulate an ensemble of trajectories.
    Simulate(SimulateArgs),
    /// Exact decay curves or ensemble statistics.
    Estimate(EstimateArgs),
    /// Moment identity and stationarity suites.
    Verify(VerifyArgs),
}

/// Configuration file layout. Unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<RatesArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateArgs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyArgs>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
    }
}

macro_rules! merge {
    ($dst:ident, $src:ident; opt: $($o:ident),* ; flag: $($f:ident),*) => {{
        $( if $dst.$o.is_none() { $dst.$o = $src.$o.clone(); } )*
        $( $dst.$f = $dst.$f || $src.$f; )*
    }};
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DynamicsArg {
    Overdamped,
    Kinetic,
    Rhmc,
    Zigzag,
    Ald,
    Gle,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectralArgs {
    /// overdamped, kinetic or gle.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsArg>,
    /// Precision of the Gaussian target.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// GLE coupling.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Friction.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Use the gap-optimal GLE parameters (default when λ and γ are absent).
    #[arg(long)]
    pub optimal: bool,
    /// Use the gap-optimal (critical) kinetic Langevin friction; the
    /// relaxation-time minimising friction is reported alongside.
    #[arg(long)]
    pub optimize_friction: bool,
    /// End of the norm curve grid (default 10 m^{-1/2}).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Points of the norm curve grid (default 1001).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
}

impl SpectralArgs {
    fn merge(mut self, c: &Self) -> Self {
        merge!(self, c; opt: dynamics, m, lambda, gamma, t_max, n_points; flag: optimal, optimize_friction);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatesMode {
    /// Abstract rate from P_v, R, C0T, C1T, T.
    Theorem,
    /// Kinetic Langevin constants minimised over the window T.
    Langevin,
    /// Adaptive Langevin constants and bound at (ε, γ).
    Ald,
    /// Adaptive Langevin optimal (ε, γ) and closed-form rate.
    AldOptimal,
    /// Adaptive Langevin bound along a log grid of ε or γ.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Epsilon,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Theorem,
    Norm,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<RatesMode>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_v: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0t: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1t: Option<f64>,
    /// Averaging window T.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Prefactor convention: C = exp(Tλ) (theorem) or exp(Tλ/2) (norm).
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convention: Option<ConventionArg>,
    /// Absolute constant C0 of the Langevin window constants (default 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Absolute constant C1 of the Langevin window constants (default 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_x: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_q: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Hessian lower bound M.
    #[arg(long = "hessian-bound")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hessian_bound: Option<f64>,
    /// Laplacian growth constant L.
    #[arg(long = "laplacian-growth")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub laplacian_growth: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_param: Option<SweepParam>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_lo: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_hi: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_n: Option<usize>,
}

impl RatesArgs {
    fn merge(mut self, c: &Self) -> Self {
        merge!(self, c; opt: mode, p_v, r, c0t, c1t, t, convention, c0, c1, p_x, gamma, p_q, d, epsilon,
            hessian_bound, laplacian_growth, sweep_param, sweep_lo, sweep_hi, sweep_n; flag:);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeArg {
    Exact,
    Euler,
    Baoab,
    Ald,
    GleSplitting,
    Rhmc,
    Zigzag,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Exact => Scheme::ExactOu,
            SchemeArg::Euler => Scheme::EulerMaruyama,
            SchemeArg::Baoab => Scheme::SplittingBaoab,
            SchemeArg::Ald => Scheme::SplittingAld,
            SchemeArg::GleSplitting => Scheme::SplittingGle,
            SchemeArg::Rhmc => Scheme::EventRhmc,
            SchemeArg::Zigzag => Scheme::EventZigZag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialArg {
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitArg {
    Stationary,
    Fixed,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsArg>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Integration scheme (default: exact for linear drifts, else the natural one).
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeArg>,
    /// Maximal step of time-stepping schemes (default 0.01).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Grid points including t = 0 (default 101).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_times: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_traj: Option<usize>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<InitArg>,
    /// Initial state for `--init fixed`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    /// Also write a CSV of all states.
    #[arg(long)]
    pub csv: bool,
}

impl SimulateArgs {
    fn merge(mut self, c: &Self) -> Self {
        merge!(self, c; opt: dynamics, potential, m, d, gamma, lambda, epsilon, scheme, h, t_end, n_times, n_traj, init, x0; flag: csv);
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimateArgs {
    /// Exact χ² decay of a Gaussian law instead of ensemble statistics.
    #[arg(long)]
    pub exact: bool,
    /// Ensemble header written by `simulate` (default `<out>/ensemble.json`).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsArg>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Use the gap-optimal GLE parameters.
    #[arg(long)]
    pub optimal: bool,
    /// Initial mean, comma separated (default 0.5 on x, 0 elsewhere).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<f64>>,
    /// End of the exact curve grid (default 40 m^{-1/2}).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    /// Window T of the time-averaged energy H(t) (default 1).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    /// Number of random directions of the relaxation sweep (default 0: off).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<usize>,
    /// Weights of the linear observable for the autocovariance (default: first coordinate).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<Vec<f64>>,
    /// Largest autocovariance lag in grid steps (default: half the grid).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_lag: Option<usize>,
}

impl EstimateArgs {
    fn merge(mut self, c: &Self) -> Self {
        merge!(self, c; opt: input, dynamics, m, lambda, gamma, shift, t_max, n_points, window, sweep, observable, max_lag;
            flag: exact, optimal);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Moments,
    Stationarity,
    All,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    /// Dimension (default 3 for moments, 1 for stationarity).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Monte Carlo samples of the moment suite (default 10^6).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_samples: Option<usize>,
    /// Trajectories per dynamics in the stationarity suite (default 4000).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_traj: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Step of the splitting schemes (default 0.01).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
}

impl VerifyArgs {
    fn merge(mut self, c: &Self) -> Self {
        merge!(self, c; opt: suite, d, n_samples, n_traj, t_end, h; flag:);
        self
    }
}

/// Map an error to the process exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoCrossing { .. } | Error::NonPsd | Error::NotSquareIntegrable | Error::EnvelopeViolation { .. } => 3,
        _ => 2,
    }
}

/// Parse the process arguments, run and return the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(Failure::Checks(summary)) => {
            println!("{summary}");
            eprintln!("error: verification failed");
            3
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Error(Error),
    /// `verify` ran but some checks failed.
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

struct Globals {
    seed: u64,
    out: PathBuf,
}

/// Execute a parsed command line. Returns a one-line summary.
pub fn run(cli: Cli) -> std::result::Result<String, Failure> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let globals = Globals {
        seed: cli.seed.or(cfg.seed).unwrap_or(0),
        out: cli.out.clone().or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
    };
    let threads = cli.threads.or(cfg.threads);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::invalid("threads", "must be at least 1").into());
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::invalid("threads", e.to_string()))?;
    std::fs::create_dir_all(&globals.out).map_err(|e| Error::Io(format!("{}: {e}", globals.out.display())))?;

    let mut effective = RunConfig {
        seed: Some(globals.seed),
        threads,
        out: Some(globals.out.clone()),
        ..RunConfig::default()
    };
    pool.install(|| match cli.command {
        Command::Spectral(a) => {
            let a = a.merge(&cfg.spectral.clone().unwrap_or_default());
            effective.spectral = Some(a.clone());
            io::write_json(&globals.out.join("config.json"), &effective)?;
            Ok(cmd_spectral(&a, &globals)?)
        }
        Command::Rates(a) => {
            let a = a.merge(&cfg.rates.clone().unwrap_or_default());
            effective.rates = Some(a.clone());
            io::write_json(&globals.out.join("config.json"), &effective)?;
            Ok(cmd_rates(&a, &globals)?)
        }
        Command::Simulate(a) => {
            let a = a.merge(&cfg.simulate.clone().unwrap_or_default());
            effective.simulate = Some(a.clone());
            io::write_json(&globals.out.join("config.json"), &effective)?;
            Ok(cmd_simulate(&a, &globals)?)
        }
        Command::Estimate(a) => {
            let a = a.merge(&cfg.estimate.clone().unwrap_or_default());
            effective.estimate = Some(a.clone());
            io::write_json(&globals.out.join("config.json"), &effective)?;
            Ok(cmd_estimate(&a, &globals)?)
        }
        Command::Verify(a) => {
            let a = a.merge(&cfg.verify.clone().unwrap_or_default());
            effective.verify = Some(a.clone());
            io::write_json(&globals.out.join("config.json"), &effective)?;
            cmd_verify(&a, &globals)
        }
    })
}

fn linear_kind(dynamics: DynamicsArg, m: f64, lambda: Option<f64>, gamma: Option<f64>, optimal: bool) -> Result<DynamicsKind> {
    Ok(match dynamics {
        DynamicsArg::Overdamped => DynamicsKind::Overdamped,
        DynamicsArg::Kinetic => DynamicsKind::KineticLangevin {
            gamma: gamma.unwrap_or(2.0 * m.sqrt()),
        },
        DynamicsArg::Gle => {
            if optimal || (lambda.is_none() && gamma.is_none()) {
                let o = spectral::optimal_gle_params(m)?;
                DynamicsKind::Gle {
                    lambda: o.lambda,
                    gamma: o.gamma,
                }
            } else {
                DynamicsKind::Gle {
                    lambda: lambda.ok_or_else(|| Error::invalid("lambda", "required with --gamma"))?,
                    gamma: gamma.ok_or_else(|| Error::invalid("gamma", "required with --lambda"))?,
                }
            }
        }
        other => {
            return Err(Error::UnsupportedDynamics(format!(
                "{other:?} has no linear drift; use overdamped, kinetic or gle"
            )))
        }
    })
}

#[derive(Serialize)]
struct SpectralOutput {
    dynamics: DynamicsKind,
    m: f64,
    eigenvalues: Vec<[f64; 2]>,
    gap: f64,
    t_rel: Option<f64>,
    lower_bound_remark: f64,
    lower_bound_corollary: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    friction_optimum: Option<spectral::FrictionOptimum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trel_optimal_friction: Option<spectral::FrictionOptimum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closed_form_roots: Option<Vec<[f64; 2]>>,
    rate_formula_available: bool,
}

fn cmd_spectral(a: &SpectralArgs, g: &Globals) -> Result<String> {
    let m = a.m.unwrap_or(1.0);
    crate::error::ensure_positive("m", m)?;
    let dynamics = a.dynamics.unwrap_or(DynamicsArg::Gle);
    let mut friction_optimum = None;
    let mut trel_optimal = None;
    let kind = if a.optimize_friction {
        if dynamics != DynamicsArg::Kinetic {
            return Err(Error::invalid("optimize_friction", "only applies to --dynamics kinetic"));
        }
        let opt = spectral::gap_optimal_friction(m)?;
        friction_optimum = Some(opt);
        trel_optimal = Some(spectral::trel_optimal_friction(m)?);
        DynamicsKind::KineticLangevin { gamma: opt.gamma }
    } else {
        linear_kind(dynamics, m, a.lambda, a.gamma, a.optimal)?
    };
    let sys = build_drift_block(&kind, m)?;
    let t_max = a.t_max.unwrap_or(10.0 / m.sqrt());
    let n = a.n_points.unwrap_or(1001);
    if n < 2 {
        return Err(Error::invalid("n_points", "need at least two points"));
    }
    let times = uniform_grid(t_max, n);
    let report = spectral::spectral_report(&sys, Some(&times))?;
    let closed_form_roots = match kind {
        DynamicsKind::Gle { lambda, gamma } => Some(
            spectral::gle_eigenvalues_closed_form(m, lambda / m.sqrt(), gamma / m.sqrt())?
                .roots
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        ),
        _ => None,
    };
    let target = GaussianTarget::new(m, 1)?;
    let out = SpectralOutput {
        dynamics: kind,
        m,
        eigenvalues: report.eigenvalues.clone(),
        gap: report.gap,
        t_rel: report.t_rel.is_finite().then_some(report.t_rel),
        lower_bound_remark: report.lower_bound_remark,
        lower_bound_corollary: report.lower_bound_corollary,
        friction_optimum,
        trel_optimal_friction: trel_optimal,
        closed_form_roots,
        rate_formula_available: validate_assumptions(&kind, &target).rate_available(),
    };
    io::write_json(&g.out.join("spectral.json"), &out)?;
    if let Some(curve) = &report.norm_curve {
        io::write_norm_curve_csv(&g.out.join("norm_curve.csv"), curve)?;
    }
    Ok(format!(
        "spectral {}: gap {} t_rel {}",
        kind.name(),
        report.gap,
        out.t_rel.map_or("inf".to_string(), |t| t.to_string())
    ))
}

fn ald_config(a: &RatesArgs) -> Result<AldConfig> {
    let p_q = a.p_q.unwrap_or(1.0);
    let d = a.d.unwrap_or(1);
    let m = a.hessian_bound.unwrap_or(0.0);
    let l = a.laplacian_growth.unwrap_or(1.0);
    let opt = rates::ald_optimal_params(p_q, d, m, l)?;
    let cfg = AldConfig {
        p_q,
        d,
        epsilon: a.epsilon.unwrap_or(opt.eps_sq.sqrt()),
        gamma: a.gamma.unwrap_or(opt.gamma),
        m,
        l,
        t: a.t,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_rates(a: &RatesArgs, g: &Globals) -> Result<String> {
    let convention = match a.convention.unwrap_or(ConventionArg::Theorem) {
        ConventionArg::Theorem => PrefactorConvention::TheoremStatement,
        ConventionArg::Norm => PrefactorConvention::NormLevel,
    };
    let mode = a.mode.unwrap_or(RatesMode::AldOptimal);
    let prefactor = |t: f64, lambda: f64| match convention {
        PrefactorConvention::TheoremStatement => (t * lambda).exp(),
        PrefactorConvention::NormLevel => (0.5 * t * lambda).exp(),
    };
    let (rows, detail): (Vec<RateRow>, serde_json::Value) = match mode {
        RatesMode::Theorem => {
            let inputs = RateInputs {
                p_v: a.p_v.unwrap_or(1.0),
                r: a.r.unwrap_or(1.0),
                c0t: a.c0t.unwrap_or(0.0),
                c1t: a.c1t.unwrap_or(0.0),
                t: a.t.unwrap_or(1.0),
            };
            let r = rates::theorem_rate_with(&inputs, convention)?;
            let row = RateRow {
                param: "T".into(),
                value: inputs.t,
                lambda_lower: r.lambda,
                t_star: inputs.t,
                c: r.c,
            };
            (vec![row], serde_json::json!({ "inputs": inputs, "rate": r }))
        }
        RatesMode::Langevin => {
            let (c0, c1) = (a.c0.unwrap_or(1.0), a.c1.unwrap_or(1.0));
            let p_x = a.p_x.unwrap_or(1.0);
            let gamma = a.gamma.unwrap_or(1.0);
            crate::error::ensure_positive("P_x", p_x)?;
            let opt = rates::minimize_over_t(
                |t| rates::langevin_window_constants(c0, c1, p_x, t).0,
                |t| rates::langevin_window_constants(c0, c1, p_x, t).1,
                gamma,
                gamma,
                (1e-3 / p_x.sqrt(), 1e3 / p_x.sqrt()),
            )?;
            let row = RateRow {
                param: "P_x".into(),
                value: p_x,
                lambda_lower: opt.lambda,
                t_star: opt.t_star,
                c: prefactor(opt.t_star, opt.lambda),
            };
            (vec![row], serde_json::json!({ "c0": c0, "c1": c1, "gamma": gamma, "optimum": opt }))
        }
        RatesMode::Ald => {
            let cfg = ald_config(a)?;
            let k = rates::ald_constants(&cfg)?;
            let bound = rates::ald_rate_bound(&cfg)?;
            let theorem = rates::ald_theorem_rate(&cfg)?;
            let t = cfg.window();
            let row = RateRow {
                param: "epsilon".into(),
                value: cfg.epsilon,
                lambda_lower: bound,
                t_star: t,
                c: prefactor(t, bound),
            };
            (
                vec![row],
                serde_json::json!({ "config": cfg, "constants": k, "rate_bound": bound, "theorem_rate": theorem }),
            )
        }
        RatesMode::AldOptimal => {
            let p_q = a.p_q.unwrap_or(1.0);
            let d = a.d.unwrap_or(1);
            let m = a.hessian_bound.unwrap_or(0.0);
            let l = a.laplacian_growth.unwrap_or(1.0);
            let opt = rates::ald_optimal_params(p_q, d, m, l)?;
            let cfg = opt.config(p_q, d, m, l);
            let bound = rates::ald_rate_bound(&cfg)?;
            let t = cfg.window();
            let row = RateRow {
                param: "d".into(),
                value: d as f64,
                lambda_lower: opt.lambda_closed,
                t_star: t,
                c: prefactor(t, opt.lambda_closed),
            };
            (
                vec![row],
                serde_json::json!({ "optimum": opt, "config": cfg, "rate_bound_at_optimum": bound }),
            )
        }
        RatesMode::Sweep => {
            let base = ald_config(a)?;
            let param = a.sweep_param.unwrap_or(SweepParam::Epsilon);
            let (lo, hi, n) = (a.sweep_lo.unwrap_or(1e-2), a.sweep_hi.unwrap_or(1e2), a.sweep_n.unwrap_or(41));
            crate::error::ensure_positive("sweep_lo", lo)?;
            if !(hi > lo) || n < 2 {
                return Err(Error::invalid("sweep", "need 0 < lo < hi and at least two points"));
            }
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let v = (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp();
                let mut cfg = base;
                let name = match param {
                    SweepParam::Epsilon => {
                        cfg.epsilon = v;
                        "epsilon"
                    }
                    SweepParam::Gamma => {
                        cfg.gamma = v;
                        "gamma"
                    }
                };
                let bound = rates::ald_rate_bound(&cfg)?;
                let t = cfg.window();
                rows.push(RateRow {
                    param: name.into(),
                    value: v,
                    lambda_lower: bound,
                    t_star: t,
                    c: prefactor(t, bound),
                });
            }
            (rows, serde_json::json!({ "base": base, "param": param }))
        }
    };
    io::write_rates_csv(&g.out.join("rates.csv"), &rows)?;
    io::write_json(&g.out.join("rates.json"), &serde_json::json!({ "mode": mode, "detail": detail, "rows": rows }))?;
    Ok(format!("rates {:?}: {} row(s), lambda {}", mode, rows.len(), rows[0].lambda_lower))
}

fn sim_kind(a: &SimulateArgs, m: f64) -> Result<DynamicsKind> {
    let gamma = a.gamma.unwrap_or(1.0);
    Ok(match a.dynamics.unwrap_or(DynamicsArg::Gle) {
        DynamicsArg::Overdamped => DynamicsKind::Overdamped,
        DynamicsArg::Kinetic => DynamicsKind::KineticLangevin { gamma },
        DynamicsArg::Rhmc => DynamicsKind::Rhmc { gamma },
        DynamicsArg::Zigzag => DynamicsKind::ZigZag { gamma },
        DynamicsArg::Ald => DynamicsKind::AdaptiveLangevin {
            epsilon: a.epsilon.unwrap_or(1.0),
            gamma,
        },
        DynamicsArg::Gle => linear_kind(DynamicsArg::Gle, m, a.lambda, a.gamma, false)?,
    })
}

#[derive(Serialize)]
struct CoordinateSummary {
    coord: usize,
    mean: f64,
    mean_se: f64,
    variance: f64,
    variance_se: f64,
}

fn terminal_summary(ens: &dynamics::Ensemble) -> Result<Vec<CoordinateSummary>> {
    let mom = ensemble_moments(ens, ens.times.len() - 1)?;
    Ok((0..ens.n_coords)
        .map(|c| CoordinateSummary {
            coord: c,
            mean: mom.mean[c],
            mean_se: mom.mean_se[c],
            variance: mom.cov[(c, c)],
            variance_se: mom.cov_se[(c, c)],
        })
        .collect())
}

fn cmd_simulate(a: &SimulateArgs, g: &Globals) -> Result<String> {
    let m = a.m.unwrap_or(1.0);
    let d = a.d.unwrap_or(1);
    let _ = a.potential.unwrap_or(PotentialArg::Quadratic);
    let pot = QuadraticPotential::new(vec![m; d])?;
    let kind = sim_kind(a, m)?;
    let scheme = SchemeSpec::new(
        a.scheme.map(Scheme::from).unwrap_or_else(|| Scheme::default_for(&kind)),
        a.h.unwrap_or(0.01),
    );
    let t_end = a.t_end.unwrap_or(10.0);
    crate::error::ensure_positive("t_end", t_end)?;
    let n_times = a.n_times.unwrap_or(101);
    if n_times < 2 {
        return Err(Error::invalid("n_times", "need at least two grid points"));
    }
    let init = match a.init.unwrap_or(InitArg::Stationary) {
        InitArg::Stationary => InitialCondition::Stationary,
        InitArg::Fixed => InitialCondition::Fixed(
            a.x0.clone().ok_or_else(|| Error::invalid("x0", "required with --init fixed"))?,
        ),
    };
    let n_traj = a.n_traj.unwrap_or(1000);
    let ens = run_ensemble(&kind, &scheme, &pot, &init, n_traj, &uniform_grid(t_end, n_times), g.seed)?;
    io::write_ensemble(&g.out, "ensemble", &ens)?;
    if a.csv {
        io::write_ensemble_csv(&g.out.join("ensemble.csv"), &ens)?;
    }
    let summary = if n_traj >= 2 { Some(terminal_summary(&ens)?) } else { None };
    io::write_json(
        &g.out.join("simulate.json"),
        &serde_json::json!({ "kind": kind, "scheme": scheme, "m": m, "d": d, "n_traj": n_traj, "terminal": summary }),
    )?;
    Ok(format!("simulate {} with {}: {} trajectories x {} times", kind.name(), scheme.scheme, n_traj, n_times))
}

fn cmd_estimate(a: &EstimateArgs, g: &Globals) -> Result<String> {
    if a.exact {
        return estimate_exact(a, g);
    }
    let input = a.input.clone().unwrap_or_else(|| g.out.join("ensemble.json"));
    let ens = io::read_ensemble(&input)?;
    let weights = a.observable.clone().unwrap_or_else(|| {
        let mut w = vec![0.0; ens.n_coords];
        w[0] = 1.0;
        w
    });
    if weights.len() != ens.n_coords {
        return Err(Error::DimensionMismatch(format!(
            "observable has {} weights, ensemble has {} coordinates",
            weights.len(),
            ens.n_coords
        )));
    }
    let max_lag = a.max_lag.unwrap_or((ens.times.len() - 1) / 2);
    let lags: Vec<usize> = (0..=max_lag).collect();
    let obs = |y: &[f64]| y.iter().zip(&weights).map(|(a, b)| a * b).sum::<f64>();
    let curve = analysis::empirical_autocov(&ens, obs, &lags)?;
    io::write_decay_curve(&g.out.join("autocov.csv"), &curve)?;
    let terminal = terminal_summary(&ens)?;
    io::write_json(
        &g.out.join("estimate.json"),
        &serde_json::json!({
            "input": input,
            "kind": ens.kind,
            "observable": weights,
            "fitted_rate": io::CurveFit::of(&curve).fitted_rate,
            "terminal": terminal,
        }),
    )?;
    Ok(format!(
        "estimate ensemble: variance(coord 0) {} fitted rate {}",
        terminal[0].variance, curve.fitted_rate
    ))
}

fn estimate_exact(a: &EstimateArgs, g: &Globals) -> Result<String> {
    let m = a.m.unwrap_or(1.0);
    crate::error::ensure_positive("m", m)?;
    let kind = linear_kind(a.dynamics.unwrap_or(DynamicsArg::Gle), m, a.lambda, a.gamma, a.optimal)?;
    let sys = build_drift_block(&kind, m)?;
    let target = GaussianLaw::stationary(&sys)?;
    let shift = a.shift.clone().unwrap_or_else(|| {
        let mut s = vec![0.0; sys.dim()];
        s[0] = 0.5;
        s
    });
    let law0 = GaussianLaw::mean_shift(&sys, &shift)?;
    let t_max = a.t_max.unwrap_or(40.0 / m.sqrt());
    let n = a.n_points.unwrap_or(801);
    if n < 2 {
        return Err(Error::invalid("n_points", "need at least two points"));
    }
    let times = uniform_grid(t_max, n);
    let curve = decay_curve(&sys, &law0, &target, &times)?;
    io::write_decay_curve(&g.out.join("decay.csv"), &curve)?;
    let energy = time_averaged_energy(&curve, a.window.unwrap_or(1.0))?;
    io::write_decay_curve(&g.out.join("energy.csv"), &energy)?;
    let gap = spectral::spectral_gap(&sys);
    let sweep = match a.sweep.unwrap_or(0) {
        0 => None,
        k => Some(relaxation_sweep(&sys, k, 1e-3, g.seed, &uniform_grid(t_max.min(10.0 / m.sqrt()), 2001))?),
    };
    io::write_json(
        &g.out.join("estimate.json"),
        &serde_json::json!({
            "kind": kind,
            "m": m,
            "initial_mean": DVector::from_vec(shift),
            "gap": gap,
            "fit": io::CurveFit::of(&curve),
            "rate_over_gap": curve.fitted_rate / gap,
            "energy_nonincreasing": energy.values.windows(2).all(|w| w[1] <= w[0] + 1e-9),
            "relaxation_sweep": sweep,
        }),
    )?;
    Ok(format!("estimate exact {}: fitted rate {} gap {}", kind.name(), curve.fitted_rate, gap))
}

#[derive(Serialize)]
struct VerifyOutput {
    all_pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    moments: Vec<MomentCheck>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    stationarity: Vec<MomentTest>,
}

/// The six dynamics with their default schemes for the stationarity suite.
pub fn stationarity_catalogue(h: f64) -> Vec<(DynamicsKind, SchemeSpec)> {
    vec![
        (DynamicsKind::Overdamped, SchemeSpec::exact()),
        (DynamicsKind::KineticLangevin { gamma: 2.0 }, SchemeSpec::exact()),
        (DynamicsKind::Rhmc { gamma: 1.0 }, SchemeSpec::new(Scheme::EventRhmc, h)),
        (DynamicsKind::ZigZag { gamma: 1.0 }, SchemeSpec::new(Scheme::EventZigZag, h)),
        (
            DynamicsKind::AdaptiveLangevin { epsilon: 1.0, gamma: 1.0 },
            SchemeSpec::new(Scheme::SplittingAld, h),
        ),
        (
            DynamicsKind::Gle {
                lambda: 2.0 * 2f64.sqrt(),
                gamma: 3.0 * 3f64.sqrt(),
            },
            SchemeSpec::exact(),
        ),
        (DynamicsKind::KineticLangevin { gamma: 2.0 }, SchemeSpec::new(Scheme::SplittingBaoab, h)),
        (
            DynamicsKind::Gle {
                lambda: 2.0 * 2f64.sqrt(),
                gamma: 3.0 * 3f64.sqrt(),
            },
            SchemeSpec::new(Scheme::SplittingGle, h),
        ),
    ]
}

fn cmd_verify(a: &VerifyArgs, g: &Globals) -> std::result::Result<String, Failure> {
    let suite = a.suite.unwrap_or(Suite::All);
    let mut out = VerifyOutput {
        all_pass: true,
        moments: Vec::new(),
        stationarity: Vec::new(),
    };
    if matches!(suite, Suite::Moments | Suite::All) {
        let dims = match a.d {
            Some(d) => vec![d],
            None => vec![1, 3],
        };
        for d in dims {
            out.moments.extend(dynamics::check_gaussian_moments(d, a.n_samples.unwrap_or(1_000_000), g.seed, 5.0)?);
        }
    }
    if matches!(suite, Suite::Stationarity | Suite::All) {
        let h = a.h.unwrap_or(0.01);
        let d = a.d.unwrap_or(1);
        for (i, (kind, scheme)) in stationarity_catalogue(h).iter().enumerate() {
            out.stationarity.extend(stationarity_checks(
                kind,
                scheme,
                1.0,
                d,
                a.n_traj.unwrap_or(4000),
                a.t_end.unwrap_or(10.0),
                g.seed.wrapping_add(i as u64),
                4.0,
            )?);
        }
    }
    out.all_pass = out.moments.iter().all(|c| c.pass) && out.stationarity.iter().all(|c| c.pass);
    io::write_json(&g.out.join("verify.json"), &out)?;
    let n = out.moments.len() + out.stationarity.len();
    let failed = out.moments.iter().filter(|c| !c.pass).count() + out.stationarity.iter().filter(|c| !c.pass).count();
    let line = format!("verify {suite:?}: {} of {n} checks passed", n - failed);
    if out.all_pass {
        Ok(line)
    } else {
        Err(Failure::Checks(line))
    }
}
