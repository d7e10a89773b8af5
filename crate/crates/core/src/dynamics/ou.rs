//! Exact Ornstein–Uhlenbeck transitions and Euler–Maruyama for overdamped
//! dynamics with a general potential.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::rng::normal;
use crate::error::Result;
use crate::linalg;
use crate::model::{DriftSystem, Potential};

/// Exact transition `Y_h ~ N(e^{hA} y, Q_h)` of `dY = A Y dt + Σ dW`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuTransition {
    pub h: f64,
    pub f: DMatrix<f64>,
    pub q: DMatrix<f64>,
    chol: DMatrix<f64>,
}

impl OuTransition {
    pub fn new(sys: &DriftSystem, h: f64) -> Result<Self> {
        Self::from_matrices(&sys.a, &sys.diffusion(), h)
    }

    /// From the drift and the diffusion matrix `Σ Σᵀ`.
    pub fn from_matrices(a: &DMatrix<f64>, diffusion: &DMatrix<f64>, h: f64) -> Result<Self> {
        crate::error::ensure_positive("h", h)?;
        let (f, q) = linalg::van_loan(a, diffusion, h);
        let chol = noise_factor(&q)?;
        Ok(Self { h, f, q, chol })
    }

    pub fn dim(&self) -> usize {
        self.f.nrows()
    }

    pub fn mean(&self, state: &[f64]) -> DVector<f64> {
        &self.f * DVector::from_column_slice(state)
    }

    /// Draw one transition in place.
    pub fn sample<R: Rng + ?Sized>(&self, state: &mut [f64], rng: &mut R) {
        let n = self.dim();
        assert!(n <= 8, "per-coordinate OU blocks have at most 8 coordinates, got {n}");
        let mut xi = [0.0f64; 8];
        for v in xi[..n].iter_mut() {
            *v = normal(rng);
        }
        let mut next = [0.0f64; 8];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.f[(i, j)] * state[j];
            }
            for j in 0..=i {
                acc += self.chol[(i, j)] * xi[j];
            }
            next[i] = acc;
        }
        state.copy_from_slice(&next[..n]);
    }
}

/// Lower Cholesky factor of a noise covariance; the zero matrix (no noise)
/// maps to zero instead of a regularised factor.
pub fn noise_factor(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if q.amax() == 0.0 {
        return Ok(q.clone());
    }
    linalg::cholesky_factor(q)
}

/// One exact OU step of a single coordinate block.
pub fn exact_ou_step<R: Rng + ?Sized>(sys: &DriftSystem, h: f64, state: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    let tr = OuTransition::new(sys, h)?;
    let mut out = state.to_vec();
    tr.sample(&mut out, rng);
    Ok(out)
}

/// Exact transitions of a `d`-dimensional state built from independent
/// per-coordinate blocks. The state is stored block-major: all `x`, then
/// all `v`, then all `z`.
#[derive(Debug, Clone)]
pub struct BlockTransition {
    pub d: usize,
    pub per_coord: Vec<OuTransition>,
}

impl BlockTransition {
    pub fn new(systems: &[DriftSystem], h: f64) -> Result<Self> {
        let per_coord = systems.iter().map(|s| OuTransition::new(s, h)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d: systems.len(),
            per_coord,
        })
    }

    /// The same block for every coordinate.
    pub fn uniform(tr: OuTransition, d: usize) -> Self {
        Self {
            d,
            per_coord: vec![tr; d],
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, state: &mut [f64], rng: &mut R) {
        let d = self.d;
        let mut local = [0.0f64; 8];
        for (i, tr) in self.per_coord.iter().enumerate() {
            let k = tr.dim();
            for b in 0..k {
                local[b] = state[b * d + i];
            }
            tr.sample(&mut local[..k], rng);
            for b in 0..k {
                state[b * d + i] = local[b];
            }
        }
    }
}

/// `x ← x − h ∇U(x) + √(2h) ξ`.
pub fn step_euler_maruyama<R: Rng + ?Sized>(pot: &dyn Potential, h: f64, x: &mut [f64], grad: &mut [f64], rng: &mut R) {
    pot.gradient(x, grad);
    let s = (2.0 * h).sqrt();
    for (xi, gi) in x.iter_mut().zip(grad.iter()) {
        *xi += -h * gi + s * normal(rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rng::trajectory_rng;
    use crate::model::{build_drift_block, DynamicsKind};

    #[test]
    fn zero_state_gives_zero_mean() {
        let sys = build_drift_block(&DynamicsKind::KineticLangevin { gamma: 2.0 }, 1.0).unwrap();
        let tr = OuTransition::new(&sys, 0.3).unwrap();
        assert_eq!(tr.mean(&[0.0, 0.0]), DVector::zeros(2));
    }

    #[test]
    fn long_step_reaches_stationary_covariance() {
        let sys = build_drift_block(&DynamicsKind::Gle { lambda: 2.0 * 2f64.sqrt(), gamma: 3.0 * 3f64.sqrt() }, 1.0).unwrap();
        let tr = OuTransition::new(&sys, 60.0).unwrap();
        let s = sys.stationary_covariance().unwrap();
        assert!((tr.q.clone() - s).amax() < 1e-10);
        assert!((tr.q.clone() - DMatrix::identity(3, 3)).amax() < 1e-10);
    }

    #[test]
    fn block_layout_matches_single_block() {
        let sys = build_drift_block(&DynamicsKind::KineticLangevin { gamma: 1.0 }, 2.0).unwrap();
        let tr = OuTransition::new(&sys, 0.1).unwrap();
        let block = BlockTransition::uniform(tr.clone(), 1);
        let mut a = vec![0.4, -0.2];
        let mut b = a.clone();
        tr.sample(&mut a, &mut trajectory_rng(3, 0));
        block.sample(&mut b, &mut trajectory_rng(3, 0));
        assert_eq!(a, b);
    }
}
