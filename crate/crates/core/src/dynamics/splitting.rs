//! Splitting integrators: BAOAB for kinetic Langevin, a Strang splitting for
//! adaptive Langevin and a force/linear-block splitting for the GLE.
//!
//! States are block-major: `[x; v]`, `[q; v; z]` (scalar `z`) and `[x; v; z]`.

use nalgebra::DMatrix;
use rand::Rng;

use super::ou::{BlockTransition, OuTransition};
use super::rng::normal;
use crate::error::Result;
use crate::model::Potential;

fn kick(pot: &dyn Potential, t: f64, x: &[f64], v: &mut [f64], grad: &mut [f64]) {
    pot.gradient(x, grad);
    for (vi, gi) in v.iter_mut().zip(grad.iter()) {
        *vi -= t * gi;
    }
}

fn drift(t: f64, x: &mut [f64], v: &[f64]) {
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi += t * vi;
    }
}

/// `v ← e^{−γh} v + √(1 − e^{−2γh}) ξ`.
fn ou_velocity<R: Rng + ?Sized>(gamma: f64, h: f64, v: &mut [f64], rng: &mut R) {
    let c = (-gamma * h).exp();
    let s = (-(-2.0 * gamma * h).exp_m1()).sqrt();
    for vi in v.iter_mut() {
        *vi = c * *vi + s * normal(rng);
    }
}

/// One BAOAB step of `dX = V dt`, `dV = −∇U dt − γ V dt + √(2γ) dW`.
pub fn step_baoab<R: Rng + ?Sized>(pot: &dyn Potential, gamma: f64, h: f64, state: &mut [f64], grad: &mut [f64], rng: &mut R) {
    let d = pot.dim();
    let (x, v) = state.split_at_mut(d);
    kick(pot, 0.5 * h, x, v, grad);
    drift(0.5 * h, x, v);
    ou_velocity(gamma, h, v, rng);
    drift(0.5 * h, x, v);
    kick(pot, 0.5 * h, x, v, grad);
}

/// Exact flow over time `t` of the force kick together with the Nosé–Hoover
/// update of `z`: `v(s) = v − s∇U(q)` and
/// `z += ε⁻¹ ∫₀ᵗ (|v(s)|² − d) ds`.
fn kick_nose_hoover(pot: &dyn Potential, eps: f64, t: f64, q: &[f64], v: &mut [f64], z: &mut f64, grad: &mut [f64]) {
    pot.gradient(q, grad);
    let d = q.len() as f64;
    let vv: f64 = v.iter().map(|a| a * a).sum();
    let vg: f64 = v.iter().zip(grad.iter()).map(|(a, b)| a * b).sum();
    let gg: f64 = grad.iter().map(|a| a * a).sum();
    *z += (vv * t - vg * t * t + gg * t * t * t / 3.0 - d * t) / eps;
    for (vi, gi) in v.iter_mut().zip(grad.iter()) {
        *vi -= t * gi;
    }
}

/// One step of adaptive Langevin dynamics,
/// `dQ = V dt`, `dV = −∇U dt − (Z/ε) V dt − γ V dt + √(2γ) dW`,
/// `dZ = ε⁻¹ (|V|² − d) dt`.
///
/// Symmetric composition `[B+NH](h/2) A(h/2) O(h) A(h/2) [B+NH](h/2)`. The O
/// part freezes the total friction `γ + z/ε` and integrates the resulting
/// scalar OU process exactly. As `ε → ∞` this reduces to BAOAB and consumes
/// the same normal draws.
pub fn step_ald<R: Rng + ?Sized>(
    pot: &dyn Potential,
    eps: f64,
    gamma: f64,
    h: f64,
    state: &mut [f64],
    grad: &mut [f64],
    rng: &mut R,
) {
    let d = pot.dim();
    let (q, rest) = state.split_at_mut(d);
    let (v, z) = rest.split_at_mut(d);
    let z = &mut z[0];
    kick_nose_hoover(pot, eps, 0.5 * h, q, v, z, grad);
    drift(0.5 * h, q, v);

    let total = gamma + *z / eps;
    let c = (-total * h).exp();
    let var = if (total * h).abs() < 1e-12 {
        2.0 * gamma * h
    } else {
        gamma * (-(-2.0 * total * h).exp_m1()) / total
    };
    let s = var.max(0.0).sqrt();
    for vi in v.iter_mut() {
        *vi = c * *vi + s * normal(rng);
    }

    drift(0.5 * h, q, v);
    kick_nose_hoover(pot, eps, 0.5 * h, q, v, z, grad);
}

/// Reusable GLE splitting: `B(h/2) L(h) B(h/2)` where `B` is the force kick
/// `v ← v − (h/2)∇U(x)` and `L` is the exact law of the force-free linear
/// part `dx = v`, `dv = λ z`, `dz = −λ v − γ z + √(2γ) dW`.
#[derive(Debug, Clone)]
pub struct GleSplitting {
    pub h: f64,
    linear: BlockTransition,
}

impl GleSplitting {
    pub fn new(lambda: f64, gamma: f64, h: f64, d: usize) -> Result<Self> {
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, lambda, 0.0, -lambda, -gamma]);
        let mut q = DMatrix::zeros(3, 3);
        q[(2, 2)] = 2.0 * gamma;
        let tr = OuTransition::from_matrices(&a, &q, h)?;
        Ok(Self {
            h,
            linear: BlockTransition::uniform(tr, d),
        })
    }

    pub fn step<R: Rng + ?Sized>(&self, pot: &dyn Potential, state: &mut [f64], grad: &mut [f64], rng: &mut R) {
        let d = pot.dim();
        {
            let (x, rest) = state.split_at_mut(d);
            kick(pot, 0.5 * self.h, x, &mut rest[..d], grad);
        }
        self.linear.sample(state, rng);
        let (x, rest) = state.split_at_mut(d);
        kick(pot, 0.5 * self.h, x, &mut rest[..d], grad);
    }
}

/// One GLE splitting step; builds the linear transition on every call, use
/// [`GleSplitting`] in loops.
pub fn step_gle_splitting<R: Rng + ?Sized>(
    pot: &dyn Potential,
    lambda: f64,
    gamma: f64,
    h: f64,
    state: &mut [f64],
    rng: &mut R,
) -> Result<()> {
    let stepper = GleSplitting::new(lambda, gamma, h, pot.dim())?;
    let mut grad = vec![0.0; pot.dim()];
    stepper.step(pot, state, &mut grad, rng);
    Ok(())
}
