//! Gaussian law propagation, χ² decay curves, the time-averaged energy and
//! empirical autocovariances of simulated ensembles.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{run_ensemble, uniform_grid, Ensemble, InitialCondition, Scheme, SchemeSpec};
use crate::error::{ensure_positive, Error, Result};
use crate::linalg;
use crate::model::{Block, DriftSystem, DynamicsKind, QuadraticPotential};

/// A Gaussian law `N(mean, cov)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianLaw {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianLaw {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if cov.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "mean has {} entries, covariance is {}x{}",
                n,
                cov.nrows(),
                cov.ncols()
            )));
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > 1e-12 * scale {
            return Err(Error::invalid("cov", "not symmetric"));
        }
        let min_eig = linalg::symmetrize(&cov)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if n > 0 && min_eig < -1e-12 * scale {
            return Err(Error::invalid("cov", format!("negative eigenvalue {min_eig}")));
        }
        Ok(Self { mean, cov })
    }

    /// The invariant law of `sys`.
    pub fn stationary(sys: &DriftSystem) -> Result<Self> {
        let cov = sys.stationary_covariance()?;
        Self::new(DVector::zeros(sys.dim()), cov)
    }

    /// The invariant law of `sys` translated by `shift`.
    pub fn mean_shift(sys: &DriftSystem, shift: &[f64]) -> Result<Self> {
        if shift.len() != sys.dim() {
            return Err(Error::DimensionMismatch(format!(
                "shift has {} entries, system has {}",
                shift.len(),
                sys.dim()
            )));
        }
        let mut law = Self::stationary(sys)?;
        law.mean = DVector::from_column_slice(shift);
        Ok(law)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Sampled decay functional with an exponential fit `Ĉ e^{−λ̂ t}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
    /// NaN when the window holds fewer than two positive values.
    pub fitted_rate: f64,
    pub fitted_prefactor: f64,
    pub fit_window: (f64, f64),
}

impl DecayCurve {
    /// Build a curve and fit it on `fit_window` (default: last half of the grid).
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        stderr: Option<Vec<f64>>,
        fit_window: Option<(f64, f64)>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times, {} values",
                times.len(),
                values.len()
            )));
        }
        if let Some(se) = &stderr {
            if se.len() != times.len() {
                return Err(Error::DimensionMismatch(format!("{} times, {} stderr", times.len(), se.len())));
            }
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("times", "grid must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "non-finite entry"));
        }
        let mut curve = Self {
            times,
            values,
            stderr,
            fitted_rate: f64::NAN,
            fitted_prefactor: f64::NAN,
            fit_window: (0.0, 0.0),
        };
        let window = fit_window.unwrap_or_else(|| curve.default_window());
        curve.refit(window)?;
        Ok(curve)
    }

    pub fn with_default_fit(times: Vec<f64>, values: Vec<f64>, stderr: Option<Vec<f64>>) -> Result<Self> {
        Self::new(times, values, stderr, None)
    }

    /// The last half of the grid.
    pub fn default_window(&self) -> (f64, f64) {
        let (t0, t1) = (self.times[0], *self.times.last().unwrap());
        (t0 + 0.5 * (t1 - t0), t1)
    }

    pub fn refit(&mut self, window: (f64, f64)) -> Result<()> {
        let (t0, t1) = (self.times[0], *self.times.last().unwrap());
        let slack = 1e-12 * t1.abs().max(1.0);
        if !(window.0 <= window.1 && window.0 >= t0 - slack && window.1 <= t1 + slack) {
            return Err(Error::WindowOutOfRange {
                start: window.0,
                end: window.1,
            });
        }
        let (rate, prefactor) = fit_exponential(&self.times, &self.values, window);
        self.fitted_rate = rate;
        self.fitted_prefactor = prefactor;
        self.fit_window = window;
        Ok(())
    }

    /// First time the curve drops to `fraction · value(0)`, interpolating
    /// log-linearly between grid points.
    pub fn first_crossing(&self, fraction: f64) -> Option<f64> {
        let level = fraction * self.values[0];
        if self.values[0] <= level {
            return Some(self.times[0]);
        }
        for i in 1..self.values.len() {
            let (a, b) = (self.values[i - 1], self.values[i]);
            if b <= level {
                let (ta, tb) = (self.times[i - 1], self.times[i]);
                let s = if b > 0.0 { (a / level).ln() / (a / b).ln() } else { (a - level) / (a - b) };
                return Some(ta + s.clamp(0.0, 1.0) * (tb - ta));
            }
        }
        None
    }
}

/// Least squares fit of `ln v = ln Ĉ − λ̂ t` over the positive values in `window`.
/// Returns `(λ̂, Ĉ)`, NaN when fewer than two points qualify.
pub fn fit_exponential(times: &[f64], values: &[f64], window: (f64, f64)) -> (f64, f64) {
    let slack = 1e-12 * window.1.abs().max(1.0);
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, v)| **t >= window.0 - slack && **t <= window.1 + slack && **v > 0.0)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    if sxx == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let slope = sxy / sxx;
    (-slope, (ym - slope * tm).exp())
}

/// Law at time `t` of the linear SDE started from `law0`.
pub fn propagate_law(sys: &DriftSystem, law0: &GaussianLaw, t: f64) -> Result<GaussianLaw> {
    check_dims(sys, law0)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", format!("must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(law0.clone());
    }
    let (f, q) = linalg::van_loan(&sys.a, &sys.diffusion(), t);
    let cov = linalg::symmetrize(&(&f * &law0.cov * f.transpose() + q));
    Ok(GaussianLaw {
        mean: &f * &law0.mean,
        cov,
    })
}

fn check_dims(sys: &DriftSystem, law: &GaussianLaw) -> Result<()> {
    if law.dim() != sys.dim() {
        return Err(Error::DimensionMismatch(format!(
            "law has dimension {}, system has {}",
            law.dim(),
            sys.dim()
        )));
    }
    Ok(())
}

/// `‖p/q − 1‖²_{L²(q)}` for `p = law`, `q = target`.
pub fn chi_square_norm(law: &GaussianLaw, target: &GaussianLaw) -> Result<f64> {
    if law.dim() != target.dim() {
        return Err(Error::DimensionMismatch("law and target differ in dimension".into()));
    }
    let whitener = Whitener::new(target)?;
    whitener.chi_square(&(&law.mean - &target.mean), &(&law.cov - &target.cov))
}

/// Coordinates in which the target is `N(0, I)`.
struct Whitener {
    l: DMatrix<f64>,
}

impl Whitener {
    fn new(target: &GaussianLaw) -> Result<Self> {
        let l = linalg::symmetrize(&target.cov)
            .cholesky()
            .ok_or_else(|| Error::invalid("target", "covariance is not positive definite"))?
            .l();
        Ok(Self { l })
    }

    /// χ² from the mean offset and covariance deviation relative to the target.
    ///
    /// With `E = L⁻¹ (cov − cov_q) L⁻ᵀ = U diag(e) Uᵀ` and `η = Uᵀ L⁻¹ δ`,
    /// `ln(1 + χ²) = Σ −½ ln(1 − e_i²) + η_i² / (1 − e_i)`. Working with the
    /// deviations keeps χ² relatively accurate when it is tiny.
    fn chi_square(&self, delta: &DVector<f64>, dev: &DMatrix<f64>) -> Result<f64> {
        let lt = self.l.transpose();
        let half = self
            .l
            .solve_lower_triangular(dev)
            .ok_or(Error::NotSquareIntegrable)?;
        let e = lt
            .solve_upper_triangular(&half.transpose())
            .ok_or(Error::NotSquareIntegrable)?;
        let eig = linalg::symmetrize(&e).symmetric_eigen();
        let w = self.l.solve_lower_triangular(delta).ok_or(Error::NotSquareIntegrable)?;
        let eta = eig.eigenvectors.transpose() * w;
        let mut log1p_chi = 0.0;
        for (ei, etai) in eig.eigenvalues.iter().zip(eta.iter()) {
            // e ≥ 1: 2 cov⁻¹ − cov_q⁻¹ fails to be positive definite;
            // e ≤ −1: degenerate law, not absolutely continuous.
            if !(*ei < 1.0 && *ei > -1.0) {
                return Err(Error::NotSquareIntegrable);
            }
            log1p_chi += -0.5 * (-ei * ei).ln_1p() + etai * etai / (1.0 - ei);
        }
        Ok(log1p_chi.exp_m1().max(0.0))
    }
}

/// `‖f_t − 1‖_{L²(target)}` on `times` for the law started at `law0`, with
/// the default fit window.
///
/// The covariance is carried as the deviation `e^{tA}(Σ₀ − S_∞)e^{tAᵀ}` from
/// stationarity, so late-time values remain accurate relative to their size.
pub fn decay_curve(sys: &DriftSystem, law0: &GaussianLaw, target: &GaussianLaw, times: &[f64]) -> Result<DecayCurve> {
    check_dims(sys, law0)?;
    check_dims(sys, target)?;
    if times.is_empty() || times[0] < 0.0 {
        return Err(Error::invalid("times", "grid must be non-empty and start at t >= 0"));
    }
    let whitener = Whitener::new(target)?;
    let s_inf = sys.stationary_covariance().ok();
    let n = sys.dim();
    let mut f = DMatrix::<f64>::identity(n, n);
    let mut prev = 0.0;
    let mut step_cache: Option<(f64, DMatrix<f64>)> = None;
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let dt = t - prev;
        if dt < 0.0 {
            return Err(Error::invalid("times", "grid must be increasing"));
        }
        if dt > 0.0 {
            let step = match &step_cache {
                Some((h, e)) if *h == dt => e.clone(),
                _ => {
                    let e = linalg::expm(&(&sys.a * dt));
                    step_cache = Some((dt, e.clone()));
                    e
                }
            };
            f = step * f;
        }
        prev = t;
        let mean = &f * &law0.mean;
        let dev = match &s_inf {
            Some(s) => linalg::symmetrize(&(&f * (&law0.cov - s) * f.transpose())) + (s - &target.cov),
            None => propagate_law(sys, law0, t)?.cov - &target.cov,
        };
        let chi2 = whitener.chi_square(&(mean - &target.mean), &dev)?;
        values.push(chi2.sqrt());
    }
    DecayCurve::with_default_fit(times.to_vec(), values, None)
}

/// `H(t) = T⁻¹ ∫_t^{t+T} value(s)² ds` at every grid time whose window fits
/// inside the grid (trapezoidal rule, linear interpolation of `value²` at the
/// right end).
pub fn time_averaged_energy(curve: &DecayCurve, window: f64) -> Result<DecayCurve> {
    ensure_positive("T", window)?;
    let ts = &curve.times;
    let sq: Vec<f64> = curve.values.iter().map(|v| v * v).collect();
    let t_last = *ts.last().unwrap();
    let slack = 1e-12 * t_last.abs().max(1.0);
    let mut out_t = Vec::new();
    let mut out_v = Vec::new();
    for i in 0..ts.len() {
        let end = ts[i] + window;
        if end > t_last + slack {
            break;
        }
        let mut acc = 0.0;
        let mut j = i;
        while j + 1 < ts.len() && ts[j + 1] <= end + slack {
            acc += 0.5 * (sq[j] + sq[j + 1]) * (ts[j + 1] - ts[j]);
            j += 1;
        }
        if ts[j] < end - slack && j + 1 < ts.len() {
            let s = (end - ts[j]) / (ts[j + 1] - ts[j]);
            let at_end = sq[j] + s * (sq[j + 1] - sq[j]);
            acc += 0.5 * (sq[j] + at_end) * (end - ts[j]);
        }
        out_t.push(ts[i]);
        out_v.push(acc / window);
    }
    if out_t.is_empty() {
        return Err(Error::WindowOutOfRange {
            start: ts[0],
            end: ts[0] + window,
        });
    }
    DecayCurve::with_default_fit(out_t, out_v, None)
}

/// `Cov(Y_{t+s}, Y_t) = e^{sA} S_∞` in stationarity.
pub fn stationary_cross_covariance(sys: &DriftSystem, s: f64) -> Result<DMatrix<f64>> {
    Ok(linalg::expm(&(&sys.a * s)) * sys.stationary_covariance()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationSweep {
    pub seed: u64,
    pub amplitude: f64,
    /// Curve-based relaxation time per draw; `None` when the grid is too short.
    pub t_rel: Vec<Option<f64>>,
    pub t_rel_max: f64,
}

/// Relaxation times read off χ-decay curves for `n_draws` small mean shifts
/// in uniformly random directions of the whitened stationary coordinates.
pub fn relaxation_sweep(sys: &DriftSystem, n_draws: usize, amplitude: f64, seed: u64, times: &[f64]) -> Result<RelaxationSweep> {
    ensure_positive("amplitude", amplitude)?;
    let target = GaussianLaw::stationary(sys)?;
    let l = linalg::cholesky_factor(&target.cov)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sys.dim();
    let mut t_rel = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        let mut u = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        u /= u.norm();
        let law0 = GaussianLaw {
            mean: &l * u * amplitude,
            cov: target.cov.clone(),
        };
        let curve = decay_curve(sys, &law0, &target, times)?;
        t_rel.push(curve.first_crossing((-1f64).exp()));
    }
    let t_rel_max = t_rel.iter().flatten().copied().fold(f64::NAN, f64::max);
    Ok(RelaxationSweep {
        seed,
        amplitude,
        t_rel,
        t_rel_max,
    })
}

/// Pairwise summation; fixed reduction order independent of threading.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Across-trajectory moments of an ensemble at one grid time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMoments {
    pub time: f64,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub mean_se: DVector<f64>,
    /// Standard error of each covariance entry.
    pub cov_se: DMatrix<f64>,
}

pub fn ensemble_moments(ens: &Ensemble, time_index: usize) -> Result<EnsembleMoments> {
    if time_index >= ens.times.len() {
        return Err(Error::invalid("time_index", "outside the ensemble grid"));
    }
    let n = ens.n_traj;
    if n < 2 {
        return Err(Error::InsufficientData("need at least two trajectories".into()));
    }
    let k = ens.n_coords;
    let nf = n as f64;
    let column = |c: usize| -> Vec<f64> { (0..n).map(|j| ens.state(j, time_index)[c]).collect() };
    let cols: Vec<Vec<f64>> = (0..k).map(column).collect();
    let mean = DVector::from_iterator(k, cols.iter().map(|c| pairwise_sum(c) / nf));
    let mut cov = DMatrix::zeros(k, k);
    let mut cov_se = DMatrix::zeros(k, k);
    let mut mean_se = DVector::zeros(k);
    for a in 0..k {
        for b in a..k {
            let prods: Vec<f64> = (0..n).map(|j| (cols[a][j] - mean[a]) * (cols[b][j] - mean[b])).collect();
            let c = pairwise_sum(&prods) / (nf - 1.0);
            let dev: Vec<f64> = prods.iter().map(|p| (p - c).powi(2)).collect();
            let se = (pairwise_sum(&dev) / (nf - 1.0) / nf).sqrt();
            cov[(a, b)] = c;
            cov[(b, a)] = c;
            cov_se[(a, b)] = se;
            cov_se[(b, a)] = se;
        }
        mean_se[a] = (cov[(a, a)] / nf).sqrt();
    }
    Ok(EnsembleMoments {
        time: ens.times[time_index],
        mean,
        cov,
        mean_se,
        cov_se,
    })
}

/// `Cov(g(X_{t+s}), g(X_t))` averaged over trajectories and time origins.
///
/// `lags` are in grid steps; the grid must be uniform. Standard errors are
/// delete-one-block jackknife estimates over blocks of trajectories (or of
/// time origins when there are few trajectories).
pub fn empirical_autocov(ens: &Ensemble, observable: impl Fn(&[f64]) -> f64 + Sync, lags: &[usize]) -> Result<DecayCurve> {
    empirical_cross_cov(ens, &observable, &observable, lags)
}

/// `Cov(f(X_{t+s}), g(X_t))`, see [`empirical_autocov`].
pub fn empirical_cross_cov(
    ens: &Ensemble,
    f: &(impl Fn(&[f64]) -> f64 + Sync),
    g: &(impl Fn(&[f64]) -> f64 + Sync),
    lags: &[usize],
) -> Result<DecayCurve> {
    let nt = ens.times.len();
    if lags.is_empty() {
        return Err(Error::InsufficientData("no lags requested".into()));
    }
    if nt >= 3 {
        let dt = ens.times[1] - ens.times[0];
        if ens.times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0)) {
            return Err(Error::invalid("times", "autocovariance needs a uniform grid"));
        }
    }
    let max_lag = *lags.iter().max().unwrap();
    if max_lag >= nt || ens.n_traj * (nt - max_lag) < 100 {
        return Err(Error::InsufficientData(format!(
            "{} trajectories x {} origins at lag {}",
            ens.n_traj,
            nt.saturating_sub(max_lag),
            max_lag
        )));
    }
    let fv: Vec<f64> = (0..ens.n_traj * nt).map(|i| f(ens.state(i / nt, i % nt))).collect();
    let gv: Vec<f64> = (0..ens.n_traj * nt).map(|i| g(ens.state(i / nt, i % nt))).collect();

    let segments = if ens.n_traj >= 20 { 1 } else { 20usize.div_ceil(ens.n_traj) };
    let n_blocks = if segments == 1 { ens.n_traj.min(50) } else { ens.n_traj * segments };
    let dt = if nt > 1 { ens.times[1] - ens.times[0] } else { 0.0 };

    let rows: Vec<(f64, f64)> = lags
        .par_iter()
        .map(|&lag| {
            let n_orig = nt - lag;
            // per block: [count, Σf(t+s), Σg(t), Σ f(t+s) g(t)]
            let mut blocks = vec![[0.0f64; 4]; n_blocks];
            for j in 0..ens.n_traj {
                for o in 0..n_orig {
                    let b = if segments == 1 { j % n_blocks } else { j * segments + o * segments / n_orig };
                    let a = fv[j * nt + o + lag];
                    let c = gv[j * nt + o];
                    let blk = &mut blocks[b];
                    blk[0] += 1.0;
                    blk[1] += a;
                    blk[2] += c;
                    blk[3] += a * c;
                }
            }
            let total = blocks.iter().fold([0.0; 4], |mut acc, b| {
                for i in 0..4 {
                    acc[i] += b[i];
                }
                acc
            });
            let estimate = |s: &[f64; 4]| s[3] / s[0] - (s[1] / s[0]) * (s[2] / s[0]);
            let full = estimate(&total);
            let used: Vec<&[f64; 4]> = blocks.iter().filter(|b| b[0] > 0.0).collect();
            let k = used.len() as f64;
            let loo: Vec<f64> = used
                .iter()
                .map(|b| {
                    let mut s = total;
                    for i in 0..4 {
                        s[i] -= b[i];
                    }
                    estimate(&s)
                })
                .collect();
            let loo_mean = loo.iter().sum::<f64>() / k;
            let var = (k - 1.0) / k * loo.iter().map(|x| (x - loo_mean).powi(2)).sum::<f64>();
            (full, var.sqrt())
        })
        .collect();
    let times: Vec<f64> = lags.iter().map(|&l| l as f64 * dt).collect();
    let (values, stderr): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    DecayCurve::with_default_fit(times, values, Some(stderr))
}

/// One moment comparison against the invariant measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTest {
    pub kind: String,
    pub name: String,
    pub expected: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// Deterministic discretisation bias allowed on top of `n_se` standard errors.
    pub allowance: f64,
    pub pass: bool,
}

/// Bias allowance of a scheme at step `h`: zero for exact and event-driven
/// schemes, `10 h²` for the second order splittings, `h` for Euler–Maruyama.
pub fn bias_allowance(scheme: &SchemeSpec) -> f64 {
    match scheme.scheme {
        Scheme::ExactOu | Scheme::EventRhmc | Scheme::EventZigZag => 0.0,
        Scheme::SplittingBaoab | Scheme::SplittingAld | Scheme::SplittingGle => 10.0 * scheme.h * scheme.h,
        Scheme::EulerMaruyama => scheme.h,
    }
}

/// Start `n_traj` trajectories in the invariant measure of the isotropic
/// quadratic target with precision `m`, run to `t_end` and compare the means
/// and second moments of every coordinate with their stationary values.
#[allow(clippy::too_many_arguments)]
pub fn stationarity_checks(
    kind: &DynamicsKind,
    scheme: &SchemeSpec,
    m: f64,
    d: usize,
    n_traj: usize,
    t_end: f64,
    seed: u64,
    n_se: f64,
) -> Result<Vec<MomentTest>> {
    ensure_positive("t_end", t_end)?;
    let pot = QuadraticPotential::new(vec![m; d])?;
    let times = uniform_grid(t_end, 2);
    let ens = run_ensemble(kind, scheme, &pot, &InitialCondition::Stationary, n_traj, &times, seed)?;
    let allowance = bias_allowance(scheme);
    let n = n_traj as f64;
    let labels = coordinate_labels(kind, m, d);
    let mut out = Vec::new();
    for (c, (label, second)) in labels.into_iter().enumerate() {
        let ys: Vec<f64> = (0..n_traj).map(|j| ens.state(j, 1)[c]).collect();
        for (power, expected) in [(1, 0.0), (2, second)] {
            let vals: Vec<f64> = ys.iter().map(|y| y.powi(power)).collect();
            let mean = pairwise_sum(&vals) / n;
            let dev: Vec<f64> = vals.iter().map(|v| (v - mean).powi(2)).collect();
            let stderr = (pairwise_sum(&dev) / (n - 1.0) / n).sqrt();
            let slack = n_se * stderr + allowance + 1e-12;
            out.push(MomentTest {
                kind: kind.name().into(),
                name: format!("E[{label}^{power}]"),
                expected,
                estimate: mean,
                stderr,
                allowance,
                pass: (mean - expected).abs() <= slack,
            });
        }
    }
    Ok(out)
}

/// Coordinate names and stationary second moments.
fn coordinate_labels(kind: &DynamicsKind, m: f64, d: usize) -> Vec<(String, f64)> {
    let blocks: &[Block] = match kind {
        DynamicsKind::Overdamped => &[Block::X],
        DynamicsKind::Gle { .. } => &[Block::X, Block::V, Block::Z],
        _ => &[Block::X, Block::V],
    };
    let mut out = Vec::new();
    for b in blocks {
        let (name, second) = match b {
            Block::X => ("x", 1.0 / m),
            Block::V => ("v", 1.0),
            Block::Z => ("z", 1.0),
        };
        out.extend((0..d).map(|i| (format!("{name}{i}"), second)));
    }
    if matches!(kind, DynamicsKind::AdaptiveLangevin { .. }) {
        out.push(("z".into(), 1.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_drift_block, DynamicsKind};

    fn law1(mean: f64, var: f64) -> GaussianLaw {
        GaussianLaw::new(DVector::from_element(1, mean), DMatrix::from_element(1, 1, var)).unwrap()
    }

    #[test]
    fn chi_square_identities() {
        let q = law1(0.0, 1.0);
        assert_eq!(chi_square_norm(&q, &q).unwrap(), 0.0);
        let shifted = chi_square_norm(&law1(1.0, 1.0), &q).unwrap();
        assert!((shifted - (1f64.exp() - 1.0)).abs() < 1e-14);
        // variance ratio c: 1/√(2c − c²) − 1
        let c: f64 = 0.5;
        let v = chi_square_norm(&law1(0.0, c), &q).unwrap();
        assert!((v - (1.0 / (2.0 * c - c * c).sqrt() - 1.0)).abs() < 1e-14);
        assert_eq!(chi_square_norm(&law1(0.0, 2.0), &q), Err(Error::NotSquareIntegrable));
    }

    #[test]
    fn chi_square_by_quadrature() {
        let p = law1(0.3, 1.4);
        let q = law1(-0.1, 0.9);
        let dens = |x: f64, m: f64, v: f64| (-(x - m).powi(2) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt();
        let (a, b, n) = (-20.0, 20.0, 40_000);
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let x = a + h * i as f64;
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            acc += w * dens(x, 0.3, 1.4).powi(2) / dens(x, -0.1, 0.9);
        }
        let oracle = acc * h - 1.0;
        assert!((chi_square_norm(&p, &q).unwrap() - oracle).abs() < 1e-10);
    }

    #[test]
    fn propagate_keeps_stationary_law() {
        let sys = build_drift_block(&DynamicsKind::Gle { lambda: 1.0, gamma: 2.0 }, 2.0).unwrap();
        let s = GaussianLaw::stationary(&sys).unwrap();
        let p = propagate_law(&sys, &s, 1.7).unwrap();
        assert!((p.cov - &s.cov).amax() < 1e-12);
        assert_eq!(propagate_law(&sys, &s, 0.0).unwrap(), s);
    }

    #[test]
    fn overdamped_decay_rate_is_one() {
        let sys = build_drift_block(&DynamicsKind::Overdamped, 1.0).unwrap();
        let target = GaussianLaw::stationary(&sys).unwrap();
        let law0 = GaussianLaw::mean_shift(&sys, &[0.5]).unwrap();
        let times: Vec<f64> = (0..=100).map(|i| 0.1 * i as f64).collect();
        let c = decay_curve(&sys, &law0, &target, &times).unwrap();
        assert!((c.fitted_rate - 1.0).abs() < 1e-3);
        // χ = √(exp(δ² e^{−2t}) − 1) exactly
        for (t, v) in c.times.iter().zip(&c.values) {
            let exact = (0.25 * (-2.0 * t).exp()).exp_m1().sqrt();
            assert!((v - exact).abs() <= 1e-12 * exact.max(1e-300));
        }
    }

    #[test]
    fn energy_of_exponential() {
        let lam = 0.7;
        let times: Vec<f64> = (0..=4000).map(|i| 0.001 * i as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| (-lam * t).exp()).collect();
        let curve = DecayCurve::with_default_fit(times, values, None).unwrap();
        assert!((curve.fitted_rate - lam).abs() < 1e-12);
        let big_t = 1.0;
        let h = time_averaged_energy(&curve, big_t).unwrap();
        for (t, v) in h.times.iter().zip(&h.values) {
            let exact = (-2.0 * lam * t).exp() * (1.0 - (-2.0 * lam * big_t).exp()) / (2.0 * lam * big_t);
            assert!((v - exact).abs() < 1e-6);
        }
        assert!(matches!(time_averaged_energy(&curve, 10.0), Err(Error::WindowOutOfRange { .. })));
    }

    #[test]
    fn constant_curve_energy_unchanged() {
        let times: Vec<f64> = (0..=20).map(|i| 0.25 * i as f64).collect();
        let curve = DecayCurve::with_default_fit(times, vec![2.0; 21], None).unwrap();
        let h = time_averaged_energy(&curve, 1.3).unwrap();
        assert!(h.values.iter().all(|v| (v - 4.0).abs() < 1e-12));
    }

    #[test]
    fn crossing_interpolates() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let values: Vec<f64> = times.iter().map(|t| (-t).exp()).collect();
        let c = DecayCurve::with_default_fit(times, values, None).unwrap();
        assert!((c.first_crossing((-1f64).exp()).unwrap() - 1.0).abs() < 1e-12);
        assert!(c.first_crossing(1e-9).is_none());
    }

    #[test]
    fn pairwise_sum_matches() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }
}
