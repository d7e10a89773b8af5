//! Explicit hypocoercive rate formulas.
//!
//! The abstract rate combines the microscopic coercivity `P_v`, the H^{-1}
//! constant `R` and the averaging constants `C_{0,T}`, `C_{1,T}`:
//!
//! ```text
//! λ_T = 2 P_v / (1 + (C_{1,T} + C_{0,T} √(R P_v))²)
//! ```
//!
//! For adaptive Langevin dynamics the constants are explicit in terms of the
//! potential's structure (`P_q`, `M`, `L`), the dimension and `(ε, γ)`. The
//! integer constants below are used as stated, without tightening.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::model::ald_macroscopic_coercivity;
use crate::optimize;

/// Inputs of the abstract rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    pub p_v: f64,
    pub r: f64,
    pub c0t: f64,
    pub c1t: f64,
    /// Averaging window `T`.
    pub t: f64,
}

impl RateInputs {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("P_v", self.p_v)?;
        ensure_positive("R", self.r)?;
        ensure_positive("T", self.t)?;
        for (name, v) in [("C0T", self.c0t), ("C1T", self.c1t)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// How the prefactor `C` relates to `T` and `λ`.
///
/// The theorem states `C = exp(T λ)`; the energy argument behind it gives
/// `‖f_t‖² ≤ e^{−λ(t−T)} ‖f_0‖²`, i.e. `C = exp(λT/2)` on the norm level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorConvention {
    #[default]
    TheoremStatement,
    NormLevel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremRate {
    pub lambda: f64,
    pub c: f64,
}

/// `λ_T` and the prefactor `C` under the given convention.
pub fn theorem_rate_with(inputs: &RateInputs, convention: PrefactorConvention) -> Result<TheoremRate> {
    inputs.validate()?;
    let lambda = rate_from_objective(inputs.p_v, inputs.c1t + inputs.c0t * (inputs.r * inputs.p_v).sqrt());
    let c = match convention {
        PrefactorConvention::TheoremStatement => (inputs.t * lambda).exp(),
        PrefactorConvention::NormLevel => (0.5 * inputs.t * lambda).exp(),
    };
    Ok(TheoremRate { lambda, c })
}

pub fn theorem_rate(inputs: &RateInputs) -> Result<TheoremRate> {
    theorem_rate_with(inputs, PrefactorConvention::default())
}

fn rate_from_objective(p_v: f64, objective: f64) -> f64 {
    2.0 * p_v / (1.0 + objective * objective)
}

/// Minimiser of `C_{1,T} + C_{0,T} √(R P_v)` over the averaging window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowOptimum {
    pub t_star: f64,
    pub lambda: f64,
    pub objective: f64,
    /// The pre-scan saw several local minima; the global grid minimum was refined.
    pub non_unimodal_warning: bool,
}

/// Golden-section minimisation of the window objective after a 101-point
/// log-spaced pre-scan of `t_range`.
pub fn minimize_over_t(
    c0t: impl Fn(f64) -> f64,
    c1t: impl Fn(f64) -> f64,
    p_v: f64,
    r: f64,
    t_range: (f64, f64),
) -> Result<WindowOptimum> {
    ensure_positive("P_v", p_v)?;
    ensure_positive("R", r)?;
    let (lo, hi) = t_range;
    ensure_positive("T_min", lo)?;
    if !(hi > lo && hi.is_finite()) {
        return Err(Error::invalid("T_range", format!("need 0 < lo < hi, got ({lo}, {hi})")));
    }
    let k = (r * p_v).sqrt();
    let objective = |t: f64| c1t(t) + c0t(t) * k;
    let best = optimize::grid_then_golden(&objective, lo, hi, 101, true, 1e-8);
    Ok(WindowOptimum {
        t_star: best.x,
        lambda: rate_from_objective(p_v, best.value),
        objective: best.value,
        non_unimodal_warning: best.multimodal,
    })
}

/// Averaging constants for kinetic Langevin with a convex potential:
/// `C_{0,T} = C_0 (T + P_x^{-1/2})`, `C_{1,T} = C_1 (1 + 1/(T √P_x))`.
///
/// `c0` and `c1` are the absolute constants of that estimate; they are not
/// known numerically and default to 1 in the command line front end.
pub fn langevin_window_constants(c0: f64, c1: f64, p_x: f64, t: f64) -> (f64, f64) {
    let sp = p_x.sqrt();
    (c0 * (t + 1.0 / sp), c1 * (1.0 + 1.0 / (t * sp)))
}

/// Parameters of the adaptive Langevin estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AldConfig {
    /// Spectral gap of `∇_q^* ∇_q`.
    pub p_q: f64,
    pub d: usize,
    pub epsilon: f64,
    pub gamma: f64,
    /// Hessian lower bound `∇²U ≥ −M`.
    pub m: f64,
    /// Laplacian growth `ΔU ≤ L d + a |∇U|²`.
    pub l: f64,
    /// Averaging window; `None` selects `T² = π² / P_x`.
    #[serde(default)]
    pub t: Option<f64>,
}

impl AldConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("P_q", self.p_q)?;
        if self.d == 0 {
            return Err(Error::invalid("d", "dimension must be at least 1"));
        }
        ensure_positive("epsilon", self.epsilon)?;
        ensure_positive("gamma", self.gamma)?;
        ensure_positive("L", self.l)?;
        if !(self.m.is_finite() && self.m >= 0.0) {
            return Err(Error::invalid("M", format!("must be >= 0, got {}", self.m)));
        }
        if let Some(t) = self.t {
            ensure_positive("T", t)?;
        }
        Ok(())
    }

    pub fn p_x(&self) -> f64 {
        ald_macroscopic_coercivity(self.p_q, self.d, self.epsilon)
    }

    /// The configured window, or `π / √P_x`.
    pub fn window(&self) -> f64 {
        self.t.unwrap_or_else(|| std::f64::consts::PI / self.p_x().sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AldConstants {
    pub p_x: f64,
    pub c0: f64,
    pub c1: f64,
    pub c0t_sq: f64,
    pub c1t_sq: f64,
}

/// Divergence-equation constants `c₀`, `c₁` and the averaging constants
/// `C_{0,T}² = 2 c₀`, `C_{1,T}² = 314 (c₁ + (ε^{-2} + L) c₀)`.
pub fn ald_constants(cfg: &AldConfig) -> Result<AldConstants> {
    cfg.validate()?;
    let p_x = cfg.p_x();
    let t = cfg.window();
    let t2 = t * t;
    let inv_px = 1.0 / p_x;
    let c0 = 2.0 * t2 + 43.0 * inv_px;
    let c1 = 290.0 + 991.0 / t2 * inv_px + 43.0 * inv_px.max(t2 / (std::f64::consts::PI * std::f64::consts::PI)) * cfg.m;
    let eps2 = cfg.epsilon * cfg.epsilon;
    Ok(AldConstants {
        p_x,
        c0,
        c1,
        c0t_sq: 2.0 * c0,
        c1t_sq: 314.0 * (c1 + (1.0 / eps2 + cfg.l) * c0),
    })
}

/// The abstract rate with `P_v = R = γ` and the adaptive Langevin constants
/// at the configured window.
pub fn ald_theorem_rate(cfg: &AldConfig) -> Result<TheoremRate> {
    let k = ald_constants(cfg)?;
    theorem_rate(&RateInputs {
        p_v: cfg.gamma,
        r: cfg.gamma,
        c0t: k.c0t_sq.sqrt(),
        c1t: k.c1t_sq.sqrt(),
        t: cfg.window(),
    })
}

/// Closed-form lower bound at `T² = π² / P_x`:
///
/// ```text
/// λ ≥ 2γ / (61388 + (P_q^{-1} + ε²/(2d)) (378γ² + 6751M + 9891(ε^{-2} + L)))
/// ```
///
/// `cfg.t` is ignored.
pub fn ald_rate_bound(cfg: &AldConfig) -> Result<f64> {
    cfg.validate()?;
    let g = cfg.gamma;
    let eps2 = cfg.epsilon * cfg.epsilon;
    let weight = 1.0 / cfg.p_q + eps2 / (2.0 * cfg.d as f64);
    let denom = 61388.0 + weight * (378.0 * g * g + 6751.0 * cfg.m + 9891.0 * (1.0 / eps2 + cfg.l));
    Ok(2.0 * g / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AldOptimum {
    pub eps_sq: f64,
    pub gamma: f64,
    /// `P_q / (66334 √(P_q + M + L))`, dimension independent.
    pub lambda_closed: f64,
}

/// `γ = √(P_q + M + L)`, `ε² = √(d / (P_q (M + L + γ²)))`.
pub fn ald_optimal_params(p_q: f64, d: usize, m: f64, l: f64) -> Result<AldOptimum> {
    ensure_positive("P_q", p_q)?;
    ensure_positive("L", l)?;
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be at least 1"));
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::invalid("M", format!("must be >= 0, got {m}")));
    }
    let gamma = (p_q + m + l).sqrt();
    let eps_sq = (d as f64 / (p_q * (m + l + gamma * gamma))).sqrt();
    Ok(AldOptimum {
        eps_sq,
        gamma,
        lambda_closed: p_q / (66334.0 * (p_q + m + l).sqrt()),
    })
}

impl AldOptimum {
    /// Configuration at the optimal `(ε, γ)`, window unset.
    pub fn config(&self, p_q: f64, d: usize, m: f64, l: f64) -> AldConfig {
        AldConfig {
            p_q,
            d,
            epsilon: self.eps_sq.sqrt(),
            gamma: self.gamma,
            m,
            l,
            t: None,
        }
    }
}
