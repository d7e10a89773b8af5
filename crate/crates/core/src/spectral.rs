//! Exact spectral and semigroup analysis of Gaussian-target drift systems.
//!
//! On a Gaussian target the transition semigroup of a linear drift system
//! acts on `L²_0(μ̂)` with operator norm `‖exp(tÃ)‖₂`, where `Ã` is the drift
//! written in coordinates whose stationary covariance is the identity. All
//! relaxation times below are first crossings of that norm curve.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::analysis::DecayCurve;
use crate::error::{ensure_positive, Error, Result};
use crate::linalg;
use crate::model::{build_drift_block, Block, DriftSystem, DynamicsKind, GaussianTarget};
use crate::optimize;

/// Eigenvalues, gap, relaxation time and the two lift lower bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<[f64; 2]>,
    pub gap: f64,
    /// `+∞` (serialised as `null`) when the norm never crosses `e^{-1}`.
    pub t_rel: f64,
    pub lower_bound_remark: f64,
    pub lower_bound_corollary: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_curve: Option<DecayCurve>,
}

/// Drift conjugated so that the stationary covariance is the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDrift {
    pub a_tilde: DMatrix<f64>,
}

/// The auxiliary scalars of the cubic `y³ + 3βy + 2α = 0` whose roots are
/// the rescaled GLE eigenvalues `μ/√m + b/3`.
pub fn gle_alpha_beta(a: f64, b: f64) -> (f64, f64) {
    let alpha = b / 2.0 + b.powi(3) / 27.0 - b * (a * a + 1.0) / 6.0;
    let beta = a * a / 3.0 - b * b / 9.0 + 1.0 / 3.0;
    (alpha, beta)
}

/// Closed-form GLE roots, or `None` at the triple-root point where the
/// Cardano radicand `−α − sign(α)√(α²+β³)` vanishes.
///
/// The cube root is the real one for a real radicand and the principal
/// branch otherwise.
pub fn gle_roots_cardano(m: f64, a: f64, b: f64) -> Option<[Complex<f64>; 3]> {
    let (alpha, beta) = gle_alpha_beta(a, b);
    let disc = alpha * alpha + beta.powi(3);
    let c: Complex<f64> = if disc >= 0.0 {
        // u³ and v³ = −β³/u³ are the two roots of t² + 2αt − β³; take the
        // one without cancellation, the root set is symmetric in (u, v)
        let w = -alpha - alpha.signum() * disc.sqrt();
        if w.abs() <= 1e-10 * (alpha.abs() + disc.sqrt()) || w == 0.0 {
            return None;
        }
        Complex::new(w.cbrt(), 0.0)
    } else {
        let w = Complex::new(-alpha, (-disc).sqrt());
        w.powf(1.0 / 3.0)
    };
    if c.norm() < 1e-100 {
        return None;
    }
    let sm = m.sqrt();
    let i3 = Complex::new(0.0, 3f64.sqrt());
    let one = Complex::new(1.0, 0.0);
    let shift = Complex::new(-b / 3.0, 0.0);
    let mu1 = (shift - beta / c + c) * sm;
    let mu2 = (shift + (one - i3) * beta / (c * 2.0) - (one + i3) * c / 2.0) * sm;
    let mu3 = (shift + (one + i3) * beta / (c * 2.0) - (one - i3) * c / 2.0) * sm;
    Some([mu1, mu2, mu3])
}

/// Closed-form roots together with a flag telling whether the numeric
/// eigensolver had to be used instead.
#[derive(Debug, Clone, PartialEq)]
pub struct GleRoots {
    pub roots: [Complex<f64>; 3],
    pub branch_ambiguity: bool,
}

/// GLE spectrum at `λ = a√m`, `γ = b√m`. Falls back to the eigensolver when
/// the radicand underflows or the closed form disagrees with it by more
/// than `1e-6` (relative).
pub fn gle_eigenvalues_closed_form(m: f64, a: f64, b: f64) -> Result<GleRoots> {
    ensure_positive("m", m)?;
    ensure_positive("a", a)?;
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::invalid("b", format!("must be >= 0, got {b}")));
    }
    let sm = m.sqrt();
    let a_mat = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -m, 0.0, a * sm, 0.0, -a * sm, -b * sm]);
    let numeric = linalg::clustered_eigenvalues(&a_mat);
    let numeric = [numeric[0], numeric[1], numeric[2]];
    match gle_roots_cardano(m, a, b) {
        Some(roots) if multiset_distance(&roots, &numeric) <= 1e-6 => Ok(GleRoots {
            roots,
            branch_ambiguity: false,
        }),
        _ => Ok(GleRoots {
            roots: numeric,
            branch_ambiguity: true,
        }),
    }
}

/// Largest relative mismatch of a greedy nearest matching between two
/// equally sized multisets of complex numbers.
pub fn multiset_distance(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d / x.norm().max(b[j].norm()).max(1e-300));
    }
    worst
}

/// `min(−Re λ)` over the spectrum of `A`, clamped at zero.
///
/// Numerically coincident eigenvalues are merged first; see
/// [`linalg::clustered_eigenvalues`].
pub fn spectral_gap(sys: &DriftSystem) -> f64 {
    gap_of(&sys.a)
}

fn gap_of(a: &DMatrix<f64>) -> f64 {
    linalg::clustered_eigenvalues(a)
        .iter()
        .map(|z| -z.re)
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// Gap of an anisotropic target: the smallest per-coordinate gap.
pub fn spectral_gap_coordinates(systems: &[DriftSystem]) -> f64 {
    systems.iter().map(spectral_gap).fold(f64::INFINITY, f64::min)
}

/// Conjugates the position block by `√m`.
pub fn normalize_drift(sys: &DriftSystem) -> NormalizedDrift {
    let scale: Vec<f64> = sys
        .blocks
        .iter()
        .map(|b| if *b == Block::X { sys.m.sqrt() } else { 1.0 })
        .collect();
    let n = sys.dim();
    let a_tilde = DMatrix::from_fn(n, n, |i, j| sys.a[(i, j)] * scale[i] / scale[j]);
    NormalizedDrift { a_tilde }
}

impl NormalizedDrift {
    pub fn gap(&self) -> f64 {
        gap_of(&self.a_tilde)
    }
}

/// `‖exp(tÃ)‖₂`, the `L²_0(μ̂)` operator norm of the transition semigroup.
pub fn semigroup_norm(nd: &NormalizedDrift, t: f64) -> f64 {
    assert!(t >= 0.0, "semigroup_norm needs t >= 0");
    linalg::spectral_norm(&linalg::expm(&(&nd.a_tilde * t)))
}

/// `p(s) = 1 + s² + s⁴/8 + (2s + s³/2) √(s²/16 + 1/2)`.
///
/// This is the squared spectral norm of the unipotent factor
/// `[[1, s, s²/2], [0, 1, s], [0, 0, 1]]` of `exp(tÃ)` at the optimal GLE
/// parameters. It is not the norm of `exp(tÃ)` itself: the similarity that
/// brings `Ã` to Jordan form is not orthogonal.
pub fn p_closed_form(s: f64) -> f64 {
    let s2 = s * s;
    1.0 + s2 + s2 * s2 / 8.0 + (2.0 * s + 0.5 * s2 * s) * (s2 / 16.0 + 0.5).sqrt()
}

/// First-crossing search options for [`relaxation_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationOptions {
    pub threshold: f64,
    /// Coarse grid step; `0.01 / gap` by default.
    pub step: f64,
    pub horizon: f64,
    /// Absolute tolerance of the bisection.
    pub tolerance: f64,
}

impl RelaxationOptions {
    /// Defaults scaled to the asymptotic time scale `1 / gap`.
    pub fn for_gap(gap: f64) -> Self {
        let scale = if gap > 0.0 { 1.0 / gap } else { 1.0 };
        Self {
            threshold: (-1f64).exp(),
            step: 0.01 * scale,
            horizon: 1e3,
            tolerance: 1e-10 * scale,
        }
    }
}

/// First time the norm curve drops to `threshold`.
///
/// Grid search with step `opts.step`, a sixteen-fold finer rescan of the
/// bracketing interval, then bisection. No monotonicity is assumed.
pub fn relaxation_time(norm_fn: impl Fn(f64) -> f64, opts: &RelaxationOptions) -> Result<f64> {
    ensure_positive("step", opts.step)?;
    let below = |t: f64| norm_fn(t) <= opts.threshold;
    if below(0.0) {
        return Err(Error::invalid("norm_fn", "starts below the threshold"));
    }
    let mut prev = 0.0;
    let mut k = 1u64;
    let hit = loop {
        let t = k as f64 * opts.step;
        if t > opts.horizon {
            return Err(Error::NoCrossing { horizon: opts.horizon });
        }
        if below(t) {
            break t;
        }
        prev = t;
        k += 1;
    };
    let (mut lo, mut hi) = (prev, hit);
    let fine = opts.step / 16.0;
    for i in 1..16 {
        let t = prev + i as f64 * fine;
        if below(t) {
            hi = t;
            break;
        }
        lo = t;
    }
    while hi - lo > opts.tolerance {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Operator-norm relaxation time of a normalised drift.
pub fn relaxation_time_of(nd: &NormalizedDrift) -> Result<f64> {
    let opts = RelaxationOptions::for_gap(nd.gap());
    relaxation_time(|t| semigroup_norm(nd, t), &opts)
}

/// Closed-form optimum of the GLE spectral gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GleOptimum {
    pub lambda: f64,
    pub gamma: f64,
    pub gap: f64,
}

/// `λ = 2√(2m)`, `γ = 3√(3m)`, gap `√(3m)`: the triple-root point `α = β = 0`.
pub fn optimal_gle_params(m: f64) -> Result<GleOptimum> {
    ensure_positive("m", m)?;
    Ok(GleOptimum {
        lambda: 2.0 * (2.0 * m).sqrt(),
        gamma: 3.0 * (3.0 * m).sqrt(),
        gap: (3.0 * m).sqrt(),
    })
}

/// Numeric maximiser of the GLE gap over `(a, b)` by Nelder–Mead from
/// `(1, 1)`. Returns `(a, b, gap)` with the gap at precision `m`.
pub fn numeric_gle_optimum(m: f64) -> Result<(f64, f64, f64)> {
    ensure_positive("m", m)?;
    let neg_gap = |p: &[f64]| {
        if p[0] <= 0.0 || p[1] <= 0.0 {
            return f64::INFINITY;
        }
        let kind = DynamicsKind::Gle {
            lambda: p[0],
            gamma: p[1],
        };
        -spectral_gap(&build_drift_block(&kind, 1.0).expect("positive parameters"))
    };
    let (x, v) = optimize::nelder_mead(neg_gap, &[1.0, 1.0], 0.5, 1e-10, 20_000);
    Ok((x[0], x[1], -v * m.sqrt()))
}

/// A kinetic Langevin friction together with its operator-norm relaxation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionOptimum {
    pub gamma: f64,
    pub t_rel: f64,
}

/// Critical damping `γ = 2√m`, the friction maximising the spectral gap
/// (gap `γ/2` below it, `γ/2 − √(γ²/4 − m)` above).
pub fn gap_optimal_friction(m: f64) -> Result<FrictionOptimum> {
    ensure_positive("m", m)?;
    let gamma = 2.0 * m.sqrt();
    let sys = build_drift_block(&DynamicsKind::KineticLangevin { gamma }, m)?;
    Ok(FrictionOptimum {
        gamma,
        t_rel: relaxation_time_of(&normalize_drift(&sys))?,
    })
}

/// Friction minimising the relaxation time itself. It sits below critical
/// damping: the underdamped oscillation drops the norm to `e^{-1}` earlier
/// even though the asymptotic rate is smaller.
pub fn trel_optimal_friction(m: f64) -> Result<FrictionOptimum> {
    ensure_positive("m", m)?;
    let sm = m.sqrt();
    let t_rel = |gamma: f64| -> f64 {
        let sys = build_drift_block(&DynamicsKind::KineticLangevin { gamma }, m).expect("positive friction");
        relaxation_time_of(&normalize_drift(&sys)).unwrap_or(f64::INFINITY)
    };
    // first crossings are evaluated to 1e-10 / gap, so a bracket of 1e-7
    // resolves the minimum far below the reported precision
    let best = optimize::grid_then_golden(t_rel, 0.05 * sm, 20.0 * sm, 61, true, 1e-7);
    if !best.value.is_finite() {
        return Err(Error::NoCrossing { horizon: 1e3 });
    }
    Ok(FrictionOptimum {
        gamma: best.x,
        t_rel: best.value,
    })
}

/// `t_rel ≥ P_x^{-1/2} / √2` for any second-order lift.
pub fn lift_lower_bound_remark(p_x: f64) -> f64 {
    1.0 / (2.0 * p_x).sqrt()
}

/// `t_rel ≥ P_x^{-1/2} / 2` for the generalised Langevin equation.
pub fn gle_lower_bound_corollary(p_x: f64) -> f64 {
    0.5 / p_x.sqrt()
}

/// `λ ≤ (1 + log C) √P_x` for a decay `‖P_t f‖ ≤ C e^{−λt} ‖f‖`.
pub fn decay_rate_upper_bound(c: f64, p_x: f64) -> Result<f64> {
    if !(c.is_finite() && c > 1.0) {
        return Err(Error::invalid("C", format!("must be > 1, got {c}")));
    }
    ensure_positive("P_x", p_x)?;
    Ok((1.0 + c.ln()) * p_x.sqrt())
}

/// Number of singular values above `tol`.
pub fn numerical_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    linalg::singular_values(a).iter().filter(|&&s| s > tol).count()
}

/// Operator-norm curve on a time grid, with the default exponential fit.
pub fn norm_curve(nd: &NormalizedDrift, times: &[f64]) -> Result<DecayCurve> {
    let values: Vec<f64> = times.iter().map(|&t| semigroup_norm(nd, t)).collect();
    DecayCurve::with_default_fit(times.to_vec(), values, None)
}

/// Full spectral report of one drift system.
pub fn spectral_report(sys: &DriftSystem, curve_times: Option<&[f64]>) -> Result<SpectralReport> {
    let nd = normalize_drift(sys);
    let eigenvalues = linalg::clustered_eigenvalues(&sys.a)
        .iter()
        .map(|z| [z.re, z.im])
        .collect();
    let t_rel = match relaxation_time_of(&nd) {
        Ok(t) => t,
        Err(Error::NoCrossing { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let norm_curve = curve_times.map(|ts| norm_curve(&nd, ts)).transpose()?;
    Ok(SpectralReport {
        eigenvalues,
        gap: spectral_gap(sys),
        t_rel,
        lower_bound_remark: lift_lower_bound_remark(sys.m),
        lower_bound_corollary: gle_lower_bound_corollary(sys.m),
        norm_curve,
    })
}

/// Report for a possibly anisotropic target. The product semigroup has gap
/// `min` and `L²_0` norm `max` over coordinates, so `t_rel` is the largest
/// per-coordinate relaxation time; `P_x` is the smallest precision.
pub fn spectral_report_target(kind: &DynamicsKind, target: &GaussianTarget) -> Result<SpectralReport> {
    let mut precisions: Vec<f64> = target.precisions().to_vec();
    precisions.sort_by(f64::total_cmp);
    precisions.dedup();
    let mut eigenvalues = Vec::new();
    let mut gap = f64::INFINITY;
    let mut t_rel = 0.0f64;
    for &m in &precisions {
        let r = spectral_report(&build_drift_block(kind, m)?, None)?;
        gap = gap.min(r.gap);
        t_rel = t_rel.max(r.t_rel);
        eigenvalues.extend(r.eigenvalues);
    }
    let p_x = target.poincare_constant();
    Ok(SpectralReport {
        eigenvalues,
        gap,
        t_rel,
        lower_bound_remark: lift_lower_bound_remark(p_x),
        lower_bound_corollary: gle_lower_bound_corollary(p_x),
        norm_curve: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const R2: f64 = std::f64::consts::SQRT_2;

    fn r3() -> f64 {
        3f64.sqrt()
    }

    fn gle(m: f64, lambda: f64, gamma: f64) -> DriftSystem {
        build_drift_block(&DynamicsKind::Gle { lambda, gamma }, m).unwrap()
    }

    /// Independent norm curve: nalgebra's own matrix exponential.
    fn oracle_norm(a: &DMatrix<f64>, t: f64) -> f64 {
        linalg::spectral_norm(&(a * t).exp())
    }

    /// Brute-force first crossing on a fine uniform grid.
    fn oracle_trel(a: &DMatrix<f64>, dt: f64) -> f64 {
        let e1 = (-1f64).exp();
        let mut t = 0.0;
        while oracle_norm(a, t) > e1 {
            t += dt;
        }
        let (mut lo, mut hi) = (t - dt, t);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if oracle_norm(a, mid) > e1 {
                lo = mid
            } else {
                hi = mid
            }
        }
        hi
    }

    #[test]
    fn alpha_beta_values() {
        let (a0, b0) = gle_alpha_beta(2.0 * R2, 3.0 * r3());
        assert!(a0.abs() < 1e-14 && b0.abs() < 1e-14);
        assert_eq!(gle_alpha_beta(1.0, 0.0), (0.0, 2.0 / 3.0));
        let (a1, b1) = gle_alpha_beta(1.0, 1.0);
        assert!((a1 - (0.5 + 1.0 / 27.0 - 2.0 / 6.0)).abs() < 1e-15);
        assert!((a1 - 0.203_703_703_703_703_7).abs() < 1e-15);
        assert!((b1 - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_frictionless_and_unit_case() {
        let roots = gle_roots_cardano(1.0, 1.0, 0.0).unwrap();
        let expect = [Complex::new(0.0, 0.0), Complex::new(0.0, R2), Complex::new(0.0, -R2)];
        assert!(multiset_distance(&roots, &expect) < 1e-12, "{roots:?}");
        let roots = gle_roots_cardano(1.0, 1.0, 1.0).unwrap();
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, -1.0]);
        assert!(multiset_distance(&roots, &linalg::eigenvalues(&a)) < 1e-9);
    }

    #[test]
    fn closed_form_at_triple_root_falls_back() {
        let r = gle_eigenvalues_closed_form(1.0, 2.0 * R2, 3.0 * r3()).unwrap();
        assert!(r.branch_ambiguity);
        for z in r.roots {
            assert!((z.re + r3()).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn gaps() {
        let opt = optimal_gle_params(1.0).unwrap();
        assert!((spectral_gap(&gle(1.0, opt.lambda, opt.gamma)) - r3()).abs() < 1e-9);
        let m = 2.5;
        let skew = DriftSystem::from_parts(
            DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -m, 0.0, m.sqrt(), 0.0, -m.sqrt(), 0.0]),
            DMatrix::zeros(3, 1),
            vec![Block::X, Block::V, Block::Z],
            m,
        )
        .unwrap();
        assert!(spectral_gap(&skew) < 1e-12);
        let kl = build_drift_block(&DynamicsKind::KineticLangevin { gamma: 2.0 }, 1.0).unwrap();
        assert!((spectral_gap(&kl) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalisation() {
        let opt = optimal_gle_params(1.0).unwrap();
        let nd = normalize_drift(&gle(1.0, opt.lambda, opt.gamma));
        assert_eq!(nd.a_tilde, gle(1.0, opt.lambda, opt.gamma).a);
        let od = build_drift_block(&DynamicsKind::Overdamped, 4.0).unwrap();
        assert_eq!(normalize_drift(&od).a_tilde, DMatrix::from_element(1, 1, -4.0));
        let kl = build_drift_block(&DynamicsKind::KineticLangevin { gamma: 1.0 }, 4.0).unwrap();
        assert_eq!(normalize_drift(&kl).a_tilde, DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, -1.0]));
    }

    #[test]
    fn semigroup_norm_values() {
        let od = normalize_drift(&build_drift_block(&DynamicsKind::Overdamped, 1.0).unwrap());
        assert_eq!(semigroup_norm(&od, 0.0), 1.0);
        assert!((semigroup_norm(&od, 1.0) - (-1f64).exp()).abs() < 1e-15);
        let opt = optimal_gle_params(1.0).unwrap();
        let nd = normalize_drift(&gle(1.0, opt.lambda, opt.gamma));
        for t in [0.1, 0.5, 1.0, 2.0, 5.0] {
            assert!((semigroup_norm(&nd, t) - oracle_norm(&nd.a_tilde, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn p_is_the_jordan_factor_norm() {
        assert_eq!(p_closed_form(0.0), 1.0);
        assert!((p_closed_form(2.0) - (7.0 + 8.0 * 0.75f64.sqrt())).abs() < 1e-12);
        assert!((p_closed_form(2.0) - 13.928_203_230_275_509).abs() < 1e-9);
        for s in [0.3, 1.0, 2.5] {
            let j = DMatrix::from_row_slice(3, 3, &[1.0, s, s * s / 2.0, 0.0, 1.0, s, 0.0, 0.0, 1.0]);
            assert!((linalg::spectral_norm(&j).powi(2) - p_closed_form(s)).abs() < 1e-10);
        }
    }

    #[test]
    fn relaxation_times() {
        let od = normalize_drift(&build_drift_block(&DynamicsKind::Overdamped, 1.0).unwrap());
        assert!((relaxation_time_of(&od).unwrap() - 1.0).abs() < 1e-9);

        let opt = optimal_gle_params(1.0).unwrap();
        let nd = normalize_drift(&gle(1.0, opt.lambda, opt.gamma));
        let ours = relaxation_time_of(&nd).unwrap();
        let oracle = oracle_trel(&nd.a_tilde, 1e-3);
        assert!((ours - oracle).abs() < 1e-8, "{ours} vs {oracle}");
        // frozen from an independent scipy computation: 2.626064415764
        assert!((ours - 2.626_064_415_764).abs() < 1e-6);

        let opt4 = optimal_gle_params(4.0).unwrap();
        let t4 = relaxation_time_of(&normalize_drift(&gle(4.0, opt4.lambda, opt4.gamma))).unwrap();
        assert!((t4 - ours / 2.0).abs() < 1e-8);
    }

    #[test]
    fn relaxation_no_crossing() {
        let opts = RelaxationOptions {
            horizon: 5.0,
            ..RelaxationOptions::for_gap(1.0)
        };
        assert!(matches!(relaxation_time(|_| 1.0, &opts), Err(Error::NoCrossing { .. })));
    }

    #[test]
    fn gle_optimum_closed_form_and_numeric() {
        let o = optimal_gle_params(1.0).unwrap();
        assert!((o.lambda - 2.828_427_124_746_19).abs() < 1e-12);
        assert!((o.gamma - 5.196_152_422_706_632).abs() < 1e-12);
        assert!((o.gap - r3()).abs() < 1e-15);
        let o4 = optimal_gle_params(4.0).unwrap();
        assert!((o4.lambda - 4.0 * R2).abs() < 1e-12 && (o4.gamma - 6.0 * r3()).abs() < 1e-12);
        assert!((o4.gap - 2.0 * r3()).abs() < 1e-12);
        let (a, b, g) = numeric_gle_optimum(1.0).unwrap();
        assert!((a - 2.0 * R2).abs() < 1e-3 && (b - 3.0 * r3()).abs() < 1e-3, "({a}, {b})");
        assert!((g - r3()).abs() < 1e-4);
    }

    #[test]
    fn langevin_friction() {
        let best = trel_optimal_friction(1.0).unwrap();
        // scipy bounded minimisation of the same first-crossing functional
        assert!((best.t_rel - 2.617_65).abs() < 2e-3, "{best:?}");
        assert!((best.gamma - 1.49).abs() < 0.02, "{best:?}");
        let critical = relaxation_time_of(&normalize_drift(
            &build_drift_block(&DynamicsKind::KineticLangevin { gamma: 2.0 }, 1.0).unwrap(),
        ))
        .unwrap();
        assert!(critical >= 1.0);
        assert!((critical - 2.729_116_898).abs() < 1e-6);
        let quarter = trel_optimal_friction(0.25).unwrap();
        assert!((quarter.t_rel - 2.0 * best.t_rel).abs() < 1e-5);
        let crit = gap_optimal_friction(4.0).unwrap();
        assert_eq!(crit.gamma, 4.0);
        assert!((crit.t_rel - 0.5 * critical).abs() < 1e-6);
        for gamma in [3.5, 3.9, 4.1, 5.0] {
            let sys = build_drift_block(&DynamicsKind::KineticLangevin { gamma }, 4.0).unwrap();
            assert!(spectral_gap(&sys) < 2.0 - 1e-3);
        }
    }

    #[test]
    fn lower_and_upper_bounds() {
        assert!((lift_lower_bound_remark(1.0) - 0.707_106_781_186_547_5).abs() < 1e-15);
        assert_eq!(gle_lower_bound_corollary(1.0), 0.5);
        assert!((lift_lower_bound_remark(4.0) - 0.353_553_390_593_273_8).abs() < 1e-15);
        assert_eq!(gle_lower_bound_corollary(4.0), 0.25);
        assert!((decay_rate_upper_bound(std::f64::consts::E, 1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((decay_rate_upper_bound(1.0 + 1e-15, 9.0).unwrap() - 3.0).abs() < 1e-12);
        assert!(decay_rate_upper_bound(1.0, 1.0).is_err());
        assert!(decay_rate_upper_bound(0.5, 1.0).is_err());
    }

    #[test]
    fn triple_root_has_one_jordan_block() {
        for m in [1.0, 4.0] {
            let o = optimal_gle_params(m).unwrap();
            let nd = normalize_drift(&gle(m, o.lambda, o.gamma));
            let shifted = &nd.a_tilde + DMatrix::<f64>::identity(3, 3) * (3.0 * m).sqrt();
            assert_eq!(numerical_rank(&shifted, 1e-8), 2);
        }
    }

    #[test]
    fn anisotropic_report_takes_worst_coordinate() {
        let target = GaussianTarget::anisotropic(vec![1.0, 4.0]).unwrap();
        let kind = DynamicsKind::Overdamped;
        let r = spectral_report_target(&kind, &target).unwrap();
        assert!((r.gap - 1.0).abs() < 1e-12);
        assert!((r.t_rel - 1.0).abs() < 1e-9);
        assert_eq!(r.eigenvalues.len(), 2);
    }
}
