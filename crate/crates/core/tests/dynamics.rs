//! Integrators and samplers on quadratic and non-quadratic targets.

use liftrate::analysis::{ensemble_moments, stationarity_checks};
use liftrate::cli::stationarity_catalogue;
use liftrate::dynamics::pdmp::simulate_zigzag;
use liftrate::dynamics::rng::trajectory_rng;
use liftrate::dynamics::splitting::{step_ald, step_baoab};
use liftrate::dynamics::{run_ensemble, uniform_grid, InitialCondition, Scheme, SchemeSpec};
use liftrate::model::{DynamicsKind, GeneralPotential, QuadraticPotential};
use liftrate::Error;

#[test]
fn all_dynamics_stationary_in_two_dimensions() {
    for (i, (kind, scheme)) in stationarity_catalogue(0.01).iter().enumerate() {
        for c in stationarity_checks(kind, scheme, 2.0, 2, 5000, 5.0, 40 + i as u64, 4.0).unwrap() {
            assert!(c.pass, "{c:?}");
        }
    }
}

#[test]
fn baoab_position_marginal_is_exact_for_harmonic_potential() {
    // BAOAB samples N(0, 1/m) in position exactly, whatever the step
    let pot = QuadraticPotential::new(vec![1.0]).unwrap();
    let kind = DynamicsKind::KineticLangevin { gamma: 1.0 };
    let ens = run_ensemble(&kind, &SchemeSpec::new(Scheme::SplittingBaoab, 0.5), &pot, &InitialCondition::Stationary, 40_000, &[0.0, 30.0], 2).unwrap();
    let mom = ensemble_moments(&ens, 1).unwrap();
    assert!((mom.cov[(0, 0)] - 1.0).abs() <= 4.0 * mom.cov_se[(0, 0)], "{}", mom.cov[(0, 0)]);
}

#[test]
fn euler_maruyama_matches_its_discrete_stationary_variance() {
    // x ← (1 − hm) x + √(2h) ξ has variance 2 / (m (2 − hm))
    let (m, h) = (1.0, 0.2);
    let pot = QuadraticPotential::new(vec![m]).unwrap();
    let ens = run_ensemble(&DynamicsKind::Overdamped, &SchemeSpec::new(Scheme::EulerMaruyama, h), &pot, &InitialCondition::Stationary, 40_000, &[0.0, 20.0], 3).unwrap();
    let mom = ensemble_moments(&ens, 1).unwrap();
    let exact = 2.0 / (m * (2.0 - h * m));
    assert!((mom.cov[(0, 0)] - exact).abs() <= 4.0 * mom.cov_se[(0, 0)], "{} vs {exact}", mom.cov[(0, 0)]);
}

#[test]
fn adaptive_langevin_with_frozen_thermostat_is_baoab() {
    let pot = QuadraticPotential::new(vec![1.0, 3.0]).unwrap();
    let mut a = vec![0.4, -0.2, 1.0, 0.5, 0.0];
    let mut b = a[..4].to_vec();
    let (mut ga, mut gb) = (vec![0.0; 2], vec![0.0; 2]);
    let (mut ra, mut rb) = (trajectory_rng(5, 0), trajectory_rng(5, 0));
    for _ in 0..200 {
        step_ald(&pot, 1e12, 0.7, 0.05, &mut a, &mut ga, &mut ra);
        step_baoab(&pot, 0.7, 0.05, &mut b, &mut gb, &mut rb);
    }
    for i in 0..4 {
        assert!((a[i] - b[i]).abs() < 1e-9, "coord {i}: {} vs {}", a[i], b[i]);
    }
}

#[test]
fn ensembles_do_not_depend_on_thread_count() {
    let pot = QuadraticPotential::new(vec![1.0, 2.0]).unwrap();
    let run = |threads: usize, kind: DynamicsKind, scheme: SchemeSpec| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_ensemble(&kind, &scheme, &pot, &InitialCondition::Stationary, 64, &uniform_grid(3.0, 31), 99).unwrap())
    };
    for (kind, scheme) in stationarity_catalogue(0.05) {
        assert_eq!(run(1, kind, scheme), run(4, kind, scheme), "{kind:?}");
    }
}

fn double_well() -> GeneralPotential {
    GeneralPotential::new(
        1,
        |x| 0.25 * (x[0] * x[0] - 1.0).powi(2),
        |x, g| g[0] = x[0] * (x[0] * x[0] - 1.0),
        1.0,
        1.0,
        0.25,
        0.5,
    )
    .unwrap()
}

#[test]
fn zigzag_thinning_reports_a_bad_lipschitz_bound() {
    // U'' = 3x² − 1 is unbounded, so any fixed constant fails far out
    let pot = double_well();
    let mut rng = trajectory_rng(1, 0);
    let res = simulate_zigzag(&pot, 0.1, Some(0.01), 50.0, &[3.0, 1.0], &mut rng);
    assert!(matches!(res, Err(Error::EnvelopeViolation { .. })), "{res:?}");
}

#[test]
fn zigzag_on_double_well_with_valid_bound() {
    // |U''| ≤ 3·3.5² − 1 < 36 on |x| ≤ 3.5, where the density is already e^{-32}
    let pot = double_well();
    let kind = DynamicsKind::ZigZag { gamma: 0.5 };
    let scheme = SchemeSpec::new(Scheme::EventZigZag, 0.1).with_lipschitz(36.0);
    let ens = run_ensemble(&kind, &scheme, &pot, &InitialCondition::Fixed(vec![1.0, 1.0]), 2000, &[0.0, 40.0], 6).unwrap();
    let mom = ensemble_moments(&ens, 1).unwrap();
    // E[x] = 0 by symmetry; E[x²] under exp(−(x²−1)²/4) by quadrature
    let (mut z, mut m2) = (0.0, 0.0);
    for i in 0..=8000 {
        let x = -4.0 + 8.0 * i as f64 / 8000.0;
        let w = (-0.25 * (x * x - 1.0f64).powi(2)).exp();
        z += w;
        m2 += w * x * x;
    }
    let second = m2 / z;
    assert!(mom.mean[0].abs() <= 4.0 * mom.mean_se[0]);
    let ex2 = mom.cov[(0, 0)] + mom.mean[0].powi(2);
    assert!((ex2 - second).abs() <= 4.0 * mom.cov_se[(0, 0)] + 1e-3, "{ex2} vs {second}");
}

#[test]
fn adaptive_langevin_thermostat_on_double_well() {
    let pot = double_well();
    let kind = DynamicsKind::AdaptiveLangevin { epsilon: 1.0, gamma: 1.0 };
    let ens = run_ensemble(&kind, &SchemeSpec::new(Scheme::SplittingAld, 0.01), &pot, &InitialCondition::Fixed(vec![1.0, 0.0, 2.0]), 2000, &[0.0, 40.0], 8).unwrap();
    let mom = ensemble_moments(&ens, 1).unwrap();
    // p ~ N(0, 1) and z ~ N(0, 1) under the invariant measure
    let bias = 10.0 * 0.01f64.powi(2);
    assert!((mom.cov[(1, 1)] - 1.0).abs() <= 4.0 * mom.cov_se[(1, 1)] + bias);
    assert!(mom.mean[2].abs() <= 4.0 * mom.mean_se[2] + bias);
    assert!((mom.cov[(2, 2)] - 1.0).abs() <= 4.0 * mom.cov_se[(2, 2)] + bias);
}

#[test]
fn exact_scheme_rejects_nonlinear_dynamics() {
    let pot = QuadraticPotential::new(vec![1.0]).unwrap();
    let res = run_ensemble(&DynamicsKind::Rhmc { gamma: 1.0 }, &SchemeSpec::exact(), &pot, &InitialCondition::Stationary, 2, &[0.0, 1.0], 0);
    assert!(matches!(res, Err(Error::IncompatibleScheme { .. })));
}
