//! Domain types: targets, potentials, the catalogue of dynamics and their
//! linear drift representation on Gaussian targets.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::linalg;

/// Centred Gaussian target `N(0, diag(precisions)^{-1})`.
///
/// The isotropic case `N(0, m^{-1} I_d)` is the common one; anisotropic
/// targets are handled coordinate by coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianTarget {
    precisions: Vec<f64>,
}

impl GaussianTarget {
    pub fn new(m: f64, d: usize) -> Result<Self> {
        ensure_positive("m", m)?;
        if d == 0 {
            return Err(Error::invalid("d", "dimension must be at least 1"));
        }
        Ok(Self {
            precisions: vec![m; d],
        })
    }

    pub fn anisotropic(precisions: Vec<f64>) -> Result<Self> {
        if precisions.is_empty() {
            return Err(Error::invalid("d", "dimension must be at least 1"));
        }
        for &m in &precisions {
            ensure_positive("m", m)?;
        }
        Ok(Self { precisions })
    }

    pub fn dim(&self) -> usize {
        self.precisions.len()
    }

    pub fn precisions(&self) -> &[f64] {
        &self.precisions
    }

    /// Scalar precision when isotropic.
    pub fn isotropic_precision(&self) -> Option<f64> {
        let m0 = self.precisions[0];
        self.precisions.iter().all(|&m| m == m0).then_some(m0)
    }

    /// Poincaré constant of the target, the smallest precision.
    pub fn poincare_constant(&self) -> f64 {
        self.precisions.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn potential(&self) -> QuadraticPotential {
        QuadraticPotential {
            precisions: self.precisions.clone(),
        }
    }
}

/// A potential `U` on `R^d` with `mu ∝ exp(-U)`.
pub trait Potential: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);

    /// Diagonal precisions when `U(x) = Σ m_i x_i² / 2`; enables exact flows.
    fn as_quadratic(&self) -> Option<&[f64]> {
        None
    }
}

/// `U(x) = Σ m_i x_i² / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticPotential {
    precisions: Vec<f64>,
}

impl QuadraticPotential {
    pub fn new(precisions: Vec<f64>) -> Result<Self> {
        Ok(GaussianTarget::anisotropic(precisions)?.potential())
    }
}

impl Potential for QuadraticPotential {
    fn dim(&self) -> usize {
        self.precisions.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x
            .iter()
            .zip(&self.precisions)
            .map(|(xi, m)| m * xi * xi)
            .sum::<f64>()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), m) in out.iter_mut().zip(x).zip(&self.precisions) {
            *o = m * xi;
        }
    }

    fn as_quadratic(&self) -> Option<&[f64]> {
        Some(&self.precisions)
    }
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Potential given by user closures together with the structural constants
/// of the adaptive Langevin analysis.
#[derive(Clone)]
pub struct GeneralPotential {
    dim: usize,
    value: ScalarFn,
    gradient: GradientFn,
    /// `∇²U ≥ -M Id`.
    pub hessian_lower_bound: f64,
    /// `ΔU ≤ L d + a |∇U|²`.
    pub laplacian_growth: f64,
    pub laplacian_growth_a: f64,
    /// Spectral gap of `∇_q^* ∇_q`.
    pub poincare_gap: f64,
}

impl GeneralPotential {
    pub fn new(
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        hessian_lower_bound: f64,
        laplacian_growth: f64,
        laplacian_growth_a: f64,
        poincare_gap: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("d", "dimension must be at least 1"));
        }
        if !(hessian_lower_bound.is_finite() && hessian_lower_bound >= 0.0) {
            return Err(Error::invalid("M", format!("must be >= 0, got {hessian_lower_bound}")));
        }
        ensure_positive("L", laplacian_growth)?;
        if !(laplacian_growth_a > 0.0 && laplacian_growth_a < 0.5) {
            return Err(Error::invalid("a", format!("must lie in (0, 1/2), got {laplacian_growth_a}")));
        }
        ensure_positive("P_q", poincare_gap)?;
        Ok(Self {
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian_lower_bound,
            laplacian_growth,
            laplacian_growth_a,
            poincare_gap,
        })
    }

    /// The Gaussian target as a general potential: `M = 0`, `L = max m_i`,
    /// `P_q = min m_i`; `a` is free and set to 1/4.
    pub fn from_gaussian(target: &GaussianTarget) -> Self {
        let q = target.potential();
        let q2 = q.clone();
        let lmax = target.precisions().iter().copied().fold(0.0, f64::max);
        Self::new(
            target.dim(),
            move |x| q.value(x),
            move |x, g| q2.gradient(x, g),
            0.0,
            lmax,
            0.25,
            target.poincare_constant(),
        )
        .expect("Gaussian targets satisfy the structural assumptions")
    }
}

impl fmt::Debug for GeneralPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralPotential")
            .field("dim", &self.dim)
            .field("M", &self.hessian_lower_bound)
            .field("L", &self.laplacian_growth)
            .field("a", &self.laplacian_growth_a)
            .field("P_q", &self.poincare_gap)
            .finish_non_exhaustive()
    }
}

impl Potential for GeneralPotential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        (self.gradient)(x, out)
    }
}

/// The six dynamics of the catalogue. `Gle::lambda` is the coupling between
/// velocity and the auxiliary variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DynamicsKind {
    Overdamped,
    KineticLangevin { gamma: f64 },
    Rhmc { gamma: f64 },
    ZigZag { gamma: f64 },
    AdaptiveLangevin { epsilon: f64, gamma: f64 },
    Gle { lambda: f64, gamma: f64 },
}

impl DynamicsKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DynamicsKind::Overdamped => Ok(()),
            DynamicsKind::KineticLangevin { gamma }
            | DynamicsKind::Rhmc { gamma }
            | DynamicsKind::ZigZag { gamma } => ensure_positive("gamma", gamma),
            DynamicsKind::AdaptiveLangevin { epsilon, gamma } => {
                ensure_positive("epsilon", epsilon)?;
                ensure_positive("gamma", gamma)
            }
            DynamicsKind::Gle { lambda, gamma } => {
                ensure_positive("lambda", lambda)?;
                ensure_positive("gamma", gamma)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DynamicsKind::Overdamped => "overdamped",
            DynamicsKind::KineticLangevin { .. } => "kinetic_langevin",
            DynamicsKind::Rhmc { .. } => "rhmc",
            DynamicsKind::ZigZag { .. } => "zig_zag",
            DynamicsKind::AdaptiveLangevin { .. } => "adaptive_langevin",
            DynamicsKind::Gle { .. } => "gle",
        }
    }

    /// Number of state coordinates for spatial dimension `d`.
    pub fn state_dim(&self, d: usize) -> usize {
        match self {
            DynamicsKind::Overdamped => d,
            DynamicsKind::KineticLangevin { .. }
            | DynamicsKind::Rhmc { .. }
            | DynamicsKind::ZigZag { .. } => 2 * d,
            DynamicsKind::AdaptiveLangevin { .. } => 2 * d + 1,
            DynamicsKind::Gle { .. } => 3 * d,
        }
    }

    pub fn has_linear_drift(&self) -> bool {
        matches!(
            self,
            DynamicsKind::Overdamped | DynamicsKind::KineticLangevin { .. } | DynamicsKind::Gle { .. }
        )
    }
}

impl fmt::Display for DynamicsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Label of a coordinate block of a drift system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    X,
    V,
    Z,
}

/// Linear SDE `dY = A Y dt + Σ dW` for one coordinate of a Gaussian target.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSystem {
    pub a: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
    pub blocks: Vec<Block>,
    /// Precision of the position coordinate.
    pub m: f64,
}

impl DriftSystem {
    /// Assemble a system from raw matrices. Used for parameter regimes outside
    /// the catalogue, e.g. the frictionless GLE.
    pub fn from_parts(a: DMatrix<f64>, sigma: DMatrix<f64>, blocks: Vec<Block>, m: f64) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() || sigma.nrows() != n || blocks.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, Σ has {} rows, {} block labels",
                a.nrows(),
                a.ncols(),
                sigma.nrows(),
                blocks.len()
            )));
        }
        ensure_positive("m", m)?;
        Ok(Self { a, sigma, blocks, m })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// `Σ Σᵀ`.
    pub fn diffusion(&self) -> DMatrix<f64> {
        &self.sigma * self.sigma.transpose()
    }

    /// Solves `A S + S Aᵀ + Σ Σᵀ = 0`.
    pub fn stationary_covariance(&self) -> Result<DMatrix<f64>> {
        linalg::solve_lyapunov(&self.a, &self.diffusion())
    }

    /// `block-diag(m^{-1}, 1[, 1])`, the covariance of the invariant measure.
    pub fn expected_stationary_covariance(&self) -> DMatrix<f64> {
        let diag: Vec<f64> = self
            .blocks
            .iter()
            .map(|b| if *b == Block::X { 1.0 / self.m } else { 1.0 })
            .collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
    }
}

/// Drift system for a coordinate with precision `m`.
pub fn build_drift_block(kind: &DynamicsKind, m: f64) -> Result<DriftSystem> {
    ensure_positive("m", m)?;
    kind.validate()?;
    let sys = match *kind {
        DynamicsKind::Overdamped => DriftSystem {
            a: DMatrix::from_element(1, 1, -m),
            sigma: DMatrix::from_element(1, 1, 2f64.sqrt()),
            blocks: vec![Block::X],
            m,
        },
        DynamicsKind::KineticLangevin { gamma } => DriftSystem {
            a: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -m, -gamma]),
            sigma: DMatrix::from_column_slice(2, 1, &[0.0, (2.0 * gamma).sqrt()]),
            blocks: vec![Block::X, Block::V],
            m,
        },
        DynamicsKind::Gle { lambda, gamma } => DriftSystem {
            a: DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -m, 0.0, lambda, 0.0, -lambda, -gamma]),
            sigma: DMatrix::from_column_slice(3, 1, &[0.0, 0.0, (2.0 * gamma).sqrt()]),
            blocks: vec![Block::X, Block::V, Block::Z],
            m,
        },
        other => return Err(Error::UnsupportedDynamics(other.name().into())),
    };
    Ok(sys)
}

/// Drift system of an isotropic Gaussian target. The `d`-dimensional process
/// factorises into identical one-dimensional blocks, so the 1-D block is
/// returned.
pub fn build_drift_system(kind: &DynamicsKind, target: &GaussianTarget) -> Result<DriftSystem> {
    if !kind.has_linear_drift() {
        return Err(Error::UnsupportedDynamics(kind.name().into()));
    }
    let m = target.isotropic_precision().ok_or_else(|| {
        Error::DimensionMismatch("anisotropic target: use build_coordinate_systems".into())
    })?;
    build_drift_block(kind, m)
}

/// One drift system per coordinate of a possibly anisotropic target.
pub fn build_coordinate_systems(kind: &DynamicsKind, target: &GaussianTarget) -> Result<Vec<DriftSystem>> {
    if !kind.has_linear_drift() {
        return Err(Error::UnsupportedDynamics(kind.name().into()));
    }
    target
        .precisions()
        .iter()
        .map(|&m| build_drift_block(kind, m))
        .collect()
}

/// Microscopic coercivity `P_v`, the H^{-1} constant `R` and macroscopic
/// coercivity `P_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    pub p_v: f64,
    pub r: f64,
    pub p_x: f64,
}

/// Whether the abstract hypocoercive rate formula may be applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RateApplicability {
    Applicable,
    RateFormulaInapplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub constants: AssumptionConstants,
    pub applicability: RateApplicability,
}

impl AssumptionReport {
    pub fn rate_available(&self) -> bool {
        self.applicability == RateApplicability::Applicable
    }
}

fn assumption_report(kind: &DynamicsKind, p_q: f64, d: usize) -> AssumptionReport {
    let applicable = |p_v: f64, p_x: f64| AssumptionReport {
        constants: AssumptionConstants { p_v, r: p_v, p_x },
        applicability: RateApplicability::Applicable,
    };
    match *kind {
        DynamicsKind::KineticLangevin { gamma }
        | DynamicsKind::Rhmc { gamma }
        | DynamicsKind::ZigZag { gamma } => applicable(gamma, p_q),
        DynamicsKind::AdaptiveLangevin { epsilon, gamma } => {
            applicable(gamma, ald_macroscopic_coercivity(p_q, d, epsilon))
        }
        DynamicsKind::Gle { gamma, .. } => AssumptionReport {
            constants: AssumptionConstants {
                p_v: gamma,
                r: gamma,
                p_x: p_q,
            },
            applicability: RateApplicability::RateFormulaInapplicable {
                reason: "dissipation acts on z only: ker(L_v) differs from Im(Π), so microscopic coercivity fails"
                    .into(),
            },
        },
        // reversible diffusion: its gap is P_x itself, no lift structure
        DynamicsKind::Overdamped => AssumptionReport {
            constants: AssumptionConstants {
                p_v: p_q,
                r: p_q,
                p_x: p_q,
            },
            applicability: RateApplicability::RateFormulaInapplicable {
                reason: "overdamped diffusion is not a kinetic lift".into(),
            },
        },
    }
}

/// `P_x = min(P_q, 2d / ε²)` for adaptive Langevin in the joint `(q, z)` variables.
pub fn ald_macroscopic_coercivity(p_q: f64, d: usize, epsilon: f64) -> f64 {
    p_q.min(2.0 * d as f64 / (epsilon * epsilon))
}

/// Structural constants on a Gaussian target (`P_q = min m_i`).
pub fn validate_assumptions(kind: &DynamicsKind, target: &GaussianTarget) -> AssumptionReport {
    assumption_report(kind, target.poincare_constant(), target.dim())
}

/// Structural constants on a general potential.
pub fn validate_assumptions_general(kind: &DynamicsKind, potential: &GeneralPotential) -> AssumptionReport {
    assumption_report(kind, potential.poincare_gap, potential.dim)
}
