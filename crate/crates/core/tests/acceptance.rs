//! Acceptance criteria, one line each.
//!
//! Runs as a plain binary (`harness = false`) so every criterion reports
//! even when an earlier one fails. The process exits non-zero if any fails.

use std::f64::consts::PI;

use liftrate::analysis::{
    decay_curve, ensemble_moments, propagate_law, stationarity_checks, time_averaged_energy, GaussianLaw,
};
use liftrate::cli::stationarity_catalogue;
use liftrate::dynamics::moments::{check_gaussian_moments, gaussian_moments_exact};
use liftrate::dynamics::{run_ensemble, uniform_grid, InitialCondition, SchemeSpec};
use liftrate::linalg;
use liftrate::model::{build_drift_block, DynamicsKind, QuadraticPotential};
use liftrate::rates::{ald_constants, ald_optimal_params, ald_rate_bound, AldConfig};
use liftrate::spectral::{
    gap_optimal_friction, gle_lower_bound_corollary, gle_roots_cardano, lift_lower_bound_remark, multiset_distance,
    normalize_drift, optimal_gle_params, p_closed_form, relaxation_time_of, semigroup_norm, spectral_gap,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn gle_opt(m: f64) -> DynamicsKind {
    let o = optimal_gle_params(m).unwrap();
    DynamicsKind::Gle {
        lambda: o.lambda,
        gamma: o.gamma,
    }
}

fn t_rel(kind: &DynamicsKind, m: f64) -> f64 {
    relaxation_time_of(&normalize_drift(&build_drift_block(kind, m).unwrap())).unwrap()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn criterion_1() -> Outcome {
    let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
    let sys = build_drift_block(
        &DynamicsKind::Gle {
            lambda: 2.0 * r2,
            gamma: 3.0 * r3,
        },
        1.0,
    )
    .unwrap();
    let gap_err = (spectral_gap(&sys) - r3).abs();

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut ambiguous) = (0.0f64, 0usize);
    for _ in 0..1000 {
        let m = log_uniform(&mut rng, 0.1, 10.0);
        let a = log_uniform(&mut rng, 0.1, 10.0);
        let b = log_uniform(&mut rng, 0.1, 10.0);
        let sm = m.sqrt();
        let mat = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -m, 0.0, a * sm, 0.0, -a * sm, -b * sm]);
        let numeric = linalg::eigenvalues(&mat);
        match gle_roots_cardano(m, a, b) {
            Some(roots) => worst = worst.max(multiset_distance(&roots, &numeric)),
            None => ambiguous += 1,
        }
    }
    outcome(
        gap_err <= 1e-9 && worst <= 1e-8 && ambiguous == 0,
        format!("|gap - sqrt3| = {gap_err:.2e}; 1000 random roots: max rel err {worst:.2e}, {ambiguous} without closed form"),
    )
}

fn criterion_2() -> Outcome {
    let nd = normalize_drift(&build_drift_block(&gle_opt(1.0), 1.0).unwrap());
    let r3 = 3f64.sqrt();
    let (mut worst, mut at) = (0.0f64, 0.0);
    for k in 1..=100 {
        let t = 0.1 * k as f64;
        let err = (semigroup_norm(&nd, t) - (-r3 * t).exp() * p_closed_form(t).sqrt()).abs();
        if err > worst {
            worst = err;
            at = t;
        }
    }
    outcome(worst <= 1e-8, format!("max |norm - e^(-sqrt3 t) p^(1/2)| = {worst:.4e} at t = {at:.1} (tol 1e-8)"))
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [0.25, 1.0, 4.0] {
        let scaled = t_rel(&gle_opt(m), m) * m.sqrt();
        pass &= (scaled - 0.964).abs() <= 0.005;
        parts.push(format!("gle m={m}: {scaled:.5}"));
    }
    let fric = gap_optimal_friction(1.0).unwrap();
    pass &= (fric.t_rel - 2.73).abs() <= 0.03;
    parts.push(format!("kinetic gamma={}: {:.5}", fric.gamma, fric.t_rel));
    for m in [0.25, 1.0, 4.0] {
        let od = t_rel(&DynamicsKind::Overdamped, m);
        pass &= (od - 1.0 / m).abs() <= 1e-9;
        parts.push(format!("overdamped m={m}: {od:.10}"));
    }
    outcome(
        pass,
        format!("{} (targets 0.964 +- 0.005, 2.73 +- 0.03, 1/m +- 1e-9)", parts.join(", ")),
    )
}

fn criterion_4() -> Outcome {
    let m = 1.0;
    let gle = t_rel(&gle_opt(m), m);
    let kin = gap_optimal_friction(m).unwrap().t_rel;
    let (lo, mid) = (gle_lower_bound_corollary(m), lift_lower_bound_remark(m));
    let ordered = lo <= mid && mid <= gle;
    let (r_gle, r_kin) = (gle / lo, kin / lo);
    let pass = ordered && (r_gle - 1.928).abs() <= 0.01 && (r_kin - 5.46).abs() <= 0.06;
    outcome(
        pass,
        format!("0.5 <= {mid:.4} <= {gle:.4}: {ordered}; gle ratio {r_gle:.4} (1.928 +- 0.01), kinetic ratio {r_kin:.4} (5.46 +- 0.06)"),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = 0usize;
    let n = 2000;
    for _ in 0..n {
        let cfg = AldConfig {
            p_q: log_uniform(&mut rng, 1e-2, 1e2),
            d: rng.random_range(1..=1000),
            epsilon: log_uniform(&mut rng, 1e-2, 1e2),
            gamma: log_uniform(&mut rng, 1e-2, 1e2),
            m: if rng.random::<f64>() < 0.2 { 0.0 } else { log_uniform(&mut rng, 1e-2, 1e2) },
            l: log_uniform(&mut rng, 1e-2, 1e2),
            t: None,
        };
        let k = ald_constants(&cfg).unwrap();
        let t2 = cfg.window().powi(2);
        let window_ok = (t2 - PI * PI / k.p_x).abs() <= 1e-12 * t2;
        if !(window_ok && k.c0 <= 63.0 / k.p_x && k.c1 <= 391.0 + 43.0 * cfg.m / k.p_x) {
            bad += 1;
        }
    }
    let mut worst_rel = 0.0f64;
    let mut d_spread = 0.0f64;
    for p_q in [0.1f64, 1.0, 10.0] {
        for m in [0.0, 0.1, 1.0, 10.0] {
            for l in [0.1, 1.0, 10.0] {
                let formula = p_q / (66334.0 * (p_q + m + l).sqrt());
                let lams: Vec<f64> = [1usize, 3, 100, 10_000]
                    .iter()
                    .map(|&d| ald_optimal_params(p_q, d, m, l).unwrap().lambda_closed)
                    .collect();
                worst_rel = worst_rel.max((lams[0] - formula).abs() / formula);
                d_spread = d_spread.max(lams.iter().map(|x| (x - lams[0]).abs() / lams[0]).fold(0.0, f64::max));
            }
        }
    }
    outcome(
        bad == 0 && worst_rel <= 1e-12 && d_spread == 0.0,
        format!("{bad} of {n} random configs violate c0 <= 63/P_x or c1 <= 391 + 43 M/P_x; closed-form rel err {worst_rel:.1e}; spread over d {d_spread:.1e}"),
    )
}

fn criterion_6() -> Outcome {
    let grid = [0.1, 1.0, 10.0];
    let (mut bad, mut n, mut min_ratio) = (0usize, 0usize, f64::INFINITY);
    for &p_q in &grid {
        for &m in &grid {
            for &l in &grid {
                for d in [1usize, 3, 100] {
                    let opt = ald_optimal_params(p_q, d, m, l).unwrap();
                    let bound = ald_rate_bound(&opt.config(p_q, d, m, l)).unwrap();
                    n += 1;
                    min_ratio = min_ratio.min(bound / opt.lambda_closed);
                    if bound < opt.lambda_closed {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(bad == 0, format!("{bad} of {n} grid points below the closed form; min bound / closed form = {min_ratio:.4}"))
}

/// Independent values: `(2k−1)!!` for `E v₁^{2k}` and central moments of
/// `χ²_d` from its cumulants `κ_n = 2^{n−1} (n−1)! d`.
fn moment_oracle(d: usize) -> [f64; 7] {
    let dd = d as f64;
    let double_fact = |k: u32| (1..=k).map(|j| (2 * j - 1) as f64).product::<f64>();
    let kappa = |n: u32| 2f64.powi(n as i32 - 1) * (1..n).map(|j| j as f64).product::<f64>() * dd;
    [
        double_fact(1),
        double_fact(2),
        double_fact(3),
        double_fact(4),
        kappa(2),
        kappa(3),
        kappa(4) + 3.0 * kappa(2).powi(2),
    ]
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut worst_z = 0.0f64;
    for d in [1usize, 3] {
        let oracle = moment_oracle(d);
        for ((_, exact), o) in gaussian_moments_exact(d).iter().zip(oracle) {
            pass &= (exact - o).abs() <= 1e-12 * o;
        }
        for c in check_gaussian_moments(d, 1_000_000, 7, 5.0).unwrap() {
            pass &= c.pass;
            worst_z = worst_z.max(c.z);
        }
    }
    outcome(pass, format!("analytic values match the oracle; Monte Carlo 10^6 samples, worst |z| = {worst_z:.2} (limit 5)"))
}

fn criterion_8() -> Outcome {
    let sys = build_drift_block(&gle_opt(1.0), 1.0).unwrap();
    let target = GaussianLaw::stationary(&sys).unwrap();
    let law0 = GaussianLaw::mean_shift(&sys, &[0.5, 0.0, 0.0]).unwrap();
    let times = uniform_grid(40.0, 801);
    let curve = decay_curve(&sys, &law0, &target, &times).unwrap();
    let ratio = curve.fitted_rate / 3f64.sqrt();
    let nd = normalize_drift(&sys);
    let excess = times
        .iter()
        .zip(&curve.values)
        .map(|(&t, v)| v - semigroup_norm(&nd, t) * curve.values[0])
        .fold(f64::NEG_INFINITY, f64::max);
    outcome(
        (0.9..=1.0).contains(&ratio) && excess <= 1e-9,
        format!(
            "fitted rate / sqrt3 = {ratio:.4} on {:?}; max excess over operator-norm curve {excess:.2e}",
            curve.fit_window
        ),
    )
}

fn criterion_9() -> Outcome {
    let kind = gle_opt(1.0);
    let sys = build_drift_block(&kind, 1.0).unwrap();
    let pot = QuadraticPotential::new(vec![1.0]).unwrap();
    let mean0 = vec![1.0, -0.5, 0.25];
    let cov0 = DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, 0.5, 0.1]));
    let init = InitialCondition::Gaussian {
        mean: mean0.clone(),
        cov: cov0.clone(),
    };
    let times = [0.0, 0.5, 1.0, 2.0];
    let ens = run_ensemble(&kind, &SchemeSpec::exact(), &pot, &init, 10_000, &times, 9).unwrap();
    let law0 = GaussianLaw::new(DVector::from_vec(mean0), cov0).unwrap();
    let mut worst_ou = 0.0f64;
    for (ti, &t) in times.iter().enumerate() {
        let law = propagate_law(&sys, &law0, t).unwrap();
        let mom = ensemble_moments(&ens, ti).unwrap();
        for i in 0..3 {
            if mom.mean_se[i] > 0.0 {
                worst_ou = worst_ou.max((mom.mean[i] - law.mean[i]).abs() / mom.mean_se[i]);
            }
            for j in 0..3 {
                if mom.cov_se[(i, j)] > 0.0 {
                    worst_ou = worst_ou.max((mom.cov[(i, j)] - law.cov[(i, j)]).abs() / mom.cov_se[(i, j)]);
                }
            }
        }
    }

    let mut failed = Vec::new();
    let mut n = 0;
    for (i, (kind, scheme)) in stationarity_catalogue(0.01).iter().enumerate() {
        for c in stationarity_checks(kind, scheme, 1.0, 1, 10_000, 10.0, 100 + i as u64, 4.0).unwrap() {
            n += 1;
            if !c.pass {
                failed.push(format!("{} {}", c.kind, c.name));
            }
        }
    }
    outcome(
        worst_ou <= 4.0 && failed.is_empty(),
        format!(
            "exact OU vs propagated law: worst |z| = {worst_ou:.2} (limit 4); stationarity {} of {n} pass{}",
            n - failed.len(),
            if failed.is_empty() { String::new() } else { format!(", failing: {}", failed.join("; ")) }
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for kind in [gle_opt(1.0), DynamicsKind::KineticLangevin { gamma: 2.0 }, DynamicsKind::KineticLangevin { gamma: 0.5 }] {
        let sys = build_drift_block(&kind, 1.0).unwrap();
        let target = GaussianLaw::stationary(&sys).unwrap();
        let mut shift = vec![0.0; sys.dim()];
        shift[0] = 0.5;
        shift[1] = -0.3;
        let law0 = GaussianLaw::mean_shift(&sys, &shift).unwrap();
        let curve = decay_curve(&sys, &law0, &target, &uniform_grid(12.0, 1201)).unwrap();
        for window in [0.5, 1.0, 3.0] {
            let h = time_averaged_energy(&curve, window).unwrap();
            worst = worst.max(h.values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max));
        }
    }
    outcome(worst <= 1e-9, format!("largest increase of H(t) over GLE and kinetic curves: {worst:.2e} (tol 1e-9)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("GLE optimal spectrum and closed-form roots", criterion_1),
        ("operator-norm identity", criterion_2),
        ("relaxation times", criterion_3),
        ("lift bounds and optimality ratios", criterion_4),
        ("adaptive Langevin constants", criterion_5),
        ("rate bound dominates the closed form", criterion_6),
        ("Gaussian moment identities", criterion_7),
        ("exact-law decay", criterion_8),
        ("simulation fidelity", criterion_9),
        ("time-averaged energy monotone", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
