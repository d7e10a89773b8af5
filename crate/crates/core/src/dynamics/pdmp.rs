//! Event-driven simulation of randomised HMC and the Zig-Zag process.
//!
//! Both processes are Markov in `(x, v)` and their event clocks are
//! memoryless, so advancing over consecutive intervals and redrawing clocks
//! at interval ends leaves the law unchanged.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{exponential, normal, sign};
use crate::error::{ensure_positive, Error, Result};
use crate::model::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Refresh,
    Flip(usize),
    /// Zig-Zag thinning proposal that was rejected.
    Rejected(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdmpEvent {
    pub t: f64,
    pub kind: EventKind,
    /// State right after the event.
    pub state: Vec<f64>,
}

/// Event skeleton of one run together with its final state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PdmpPath {
    pub events: Vec<PdmpEvent>,
    pub final_state: Vec<f64>,
    pub t_end: f64,
}

impl PdmpPath {
    pub fn count(&self, pred: impl Fn(&EventKind) -> bool) -> usize {
        self.events.iter().filter(|e| pred(&e.kind)).count()
    }

    pub fn n_refresh(&self) -> usize {
        self.count(|k| matches!(k, EventKind::Refresh))
    }

    pub fn n_flips(&self) -> usize {
        self.count(|k| matches!(k, EventKind::Flip(_)))
    }
}

type Recorder<'a> = Option<&'a mut Vec<PdmpEvent>>;

fn record(rec: &mut Recorder<'_>, t: f64, kind: EventKind, state: &[f64]) {
    if let Some(r) = rec.as_deref_mut() {
        r.push(PdmpEvent {
            t,
            kind,
            state: state.to_vec(),
        });
    }
}

/// Randomised HMC: Hamiltonian flow with full Gaussian velocity refreshment
/// at rate `γ`. Quadratic potentials use the exact rotation, others leapfrog
/// with step at most `h`.
#[derive(Clone, Copy)]
pub struct Rhmc<'a> {
    pub pot: &'a dyn Potential,
    pub gamma: f64,
    pub h: f64,
}

impl<'a> Rhmc<'a> {
    pub fn new(pot: &'a dyn Potential, gamma: f64, h: f64) -> Result<Self> {
        ensure_positive("gamma", gamma)?;
        if pot.as_quadratic().is_none() {
            ensure_positive("h", h)?;
        }
        Ok(Self { pot, gamma, h })
    }

    fn flow(&self, state: &mut [f64], t: f64, grad: &mut [f64]) {
        let d = self.pot.dim();
        let (x, v) = state.split_at_mut(d);
        if let Some(m) = self.pot.as_quadratic() {
            for i in 0..d {
                let w = m[i].sqrt();
                let (c, s) = ((w * t).cos(), (w * t).sin());
                let (xi, vi) = (x[i], v[i]);
                x[i] = xi * c + vi * s / w;
                v[i] = -xi * w * s + vi * c;
            }
            return;
        }
        let n = (t / self.h).ceil().max(1.0);
        let dt = t / n;
        self.pot.gradient(x, grad);
        for _ in 0..n as usize {
            for i in 0..d {
                v[i] -= 0.5 * dt * grad[i];
                x[i] += dt * v[i];
            }
            self.pot.gradient(x, grad);
            for i in 0..d {
                v[i] -= 0.5 * dt * grad[i];
            }
        }
    }

    /// Advance `state = [x; v]` by `duration`.
    pub fn advance<R: Rng + ?Sized>(&self, state: &mut [f64], duration: f64, t0: f64, rng: &mut R, mut rec: Recorder<'_>) {
        let d = self.pot.dim();
        let mut grad = vec![0.0; d];
        let mut t = 0.0;
        loop {
            let tau = exponential(rng) / self.gamma;
            if t + tau >= duration {
                self.flow(state, duration - t, &mut grad);
                return;
            }
            self.flow(state, tau, &mut grad);
            t += tau;
            for vi in state[d..].iter_mut() {
                *vi = normal(rng);
            }
            record(&mut rec, t0 + t, EventKind::Refresh, state);
        }
    }
}

pub fn simulate_rhmc<R: Rng + ?Sized>(
    pot: &dyn Potential,
    gamma: f64,
    h: f64,
    t_end: f64,
    state: &[f64],
    rng: &mut R,
) -> Result<PdmpPath> {
    let sampler = Rhmc::new(pot, gamma, h)?;
    check_state(pot, state)?;
    let mut s = state.to_vec();
    let mut events = Vec::new();
    sampler.advance(&mut s, t_end, 0.0, rng, Some(&mut events));
    Ok(PdmpPath {
        events,
        final_state: s,
        t_end,
    })
}

fn check_state(pot: &dyn Potential, state: &[f64]) -> Result<()> {
    if state.len() != 2 * pot.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} entries, expected {}",
            state.len(),
            2 * pot.dim()
        )));
    }
    Ok(())
}

/// First arrival of a Poisson process with rate `(a + b s)_+`, `b ≥ 0`,
/// for a standard exponential `e`: solves `∫₀^τ (a + b s)_+ ds = e`.
pub fn linear_rate_arrival(a: f64, b: f64, e: f64) -> f64 {
    if b <= 0.0 {
        return if a > 0.0 { e / a } else { f64::INFINITY };
    }
    let ap = a.max(0.0);
    (-a + (ap * ap + 2.0 * b * e).sqrt()) / b
}

/// Zig-Zag process with flip rates `(v_k ∂_k U)_+` and full uniform velocity
/// redraw at rate `γ`.
///
/// Quadratic potentials invert the linear-in-time rates exactly. Other
/// potentials use thinning with the envelope `(v_k ∂_k U(x))_+ + K √d s`,
/// where `K` bounds the Lipschitz constant of `∇U` (an upper Hessian bound).
#[derive(Clone, Copy)]
pub struct ZigZag<'a> {
    pub pot: &'a dyn Potential,
    pub gamma: f64,
    pub gradient_lipschitz: Option<f64>,
}

impl<'a> ZigZag<'a> {
    pub fn new(pot: &'a dyn Potential, gamma: f64, gradient_lipschitz: Option<f64>) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("gamma", format!("refresh rate must be >= 0, got {gamma}")));
        }
        if pot.as_quadratic().is_none() {
            match gradient_lipschitz {
                Some(k) if k >= 0.0 && k.is_finite() => {}
                _ => {
                    return Err(Error::invalid(
                        "gradient_lipschitz",
                        "thinning for a general potential needs a finite gradient Lipschitz bound",
                    ))
                }
            }
        }
        Ok(Self {
            pot,
            gamma,
            gradient_lipschitz,
        })
    }

    fn refresh_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.gamma > 0.0 {
            exponential(rng) / self.gamma
        } else {
            f64::INFINITY
        }
    }

    /// Advance `state = [x; v]`, `v ∈ {±1}^d`, by `duration`.
    pub fn advance<R: Rng + ?Sized>(&self, state: &mut [f64], duration: f64, t0: f64, rng: &mut R, mut rec: Recorder<'_>) -> Result<()> {
        let d = self.pot.dim();
        let mut grad = vec![0.0; d];
        let mut t = 0.0;
        loop {
            let mut best = (self.refresh_time(rng), usize::MAX);
            let (x, v) = state.split_at(d);
            let envelope_slope = match self.pot.as_quadratic() {
                Some(_) => 0.0,
                None => self.gradient_lipschitz.unwrap_or(0.0) * (d as f64).sqrt(),
            };
            let mut a0 = vec![0.0; d];
            match self.pot.as_quadratic() {
                Some(m) => {
                    for k in 0..d {
                        let tau = linear_rate_arrival(v[k] * m[k] * x[k], m[k], exponential(rng));
                        if tau < best.0 {
                            best = (tau, k);
                        }
                    }
                }
                None => {
                    self.pot.gradient(x, &mut grad);
                    for k in 0..d {
                        a0[k] = (v[k] * grad[k]).max(0.0);
                        let tau = linear_rate_arrival(a0[k], envelope_slope, exponential(rng));
                        if tau < best.0 {
                            best = (tau, k);
                        }
                    }
                }
            }
            let (tau, k) = best;
            if t + tau >= duration {
                move_straight(state, d, duration - t);
                return Ok(());
            }
            move_straight(state, d, tau);
            t += tau;
            if k == usize::MAX {
                for vi in state[d..].iter_mut() {
                    *vi = sign(rng);
                }
                record(&mut rec, t0 + t, EventKind::Refresh, state);
                continue;
            }
            if self.pot.as_quadratic().is_some() {
                state[d + k] = -state[d + k];
                record(&mut rec, t0 + t, EventKind::Flip(k), state);
                continue;
            }
            self.pot.gradient(&state[..d], &mut grad);
            let rate = (state[d + k] * grad[k]).max(0.0);
            let bound = a0[k] + envelope_slope * tau;
            if rate > bound * (1.0 + 1e-12) + 1e-12 {
                return Err(Error::EnvelopeViolation { rate, bound });
            }
            if rng.random::<f64>() * bound < rate {
                state[d + k] = -state[d + k];
                record(&mut rec, t0 + t, EventKind::Flip(k), state);
            } else {
                record(&mut rec, t0 + t, EventKind::Rejected(k), state);
            }
        }
    }
}

fn move_straight(state: &mut [f64], d: usize, t: f64) {
    let (x, v) = state.split_at_mut(d);
    for (xi, vi) in x.iter_mut().zip(v.iter()) {
        *xi += t * vi;
    }
}

pub fn simulate_zigzag<R: Rng + ?Sized>(
    pot: &dyn Potential,
    gamma: f64,
    gradient_lipschitz: Option<f64>,
    t_end: f64,
    state: &[f64],
    rng: &mut R,
) -> Result<PdmpPath> {
    let sampler = ZigZag::new(pot, gamma, gradient_lipschitz)?;
    check_state(pot, state)?;
    check_signs(&state[pot.dim()..])?;
    let mut s = state.to_vec();
    let mut events = Vec::new();
    sampler.advance(&mut s, t_end, 0.0, rng, Some(&mut events))?;
    Ok(PdmpPath {
        events,
        final_state: s,
        t_end,
    })
}

pub(crate) fn check_signs(v: &[f64]) -> Result<()> {
    if v.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(Error::invalid("v", "Zig-Zag velocities must be +1 or -1"));
    }
    Ok(())
}
