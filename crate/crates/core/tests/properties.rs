use liftrate::analysis::{chi_square_norm, time_averaged_energy, DecayCurve, GaussianLaw};
use liftrate::cli::{RunConfig, SimulateArgs, SpectralArgs};
use liftrate::dynamics::pdmp::linear_rate_arrival;
use liftrate::linalg::{expm, is_positive_definite, van_loan};
use liftrate::model::{build_drift_block, DynamicsKind};
use liftrate::rates::{ald_rate_bound, theorem_rate, AldConfig, RateInputs};
use liftrate::spectral::{gle_eigenvalues_closed_form, multiset_distance, normalize_drift, semigroup_norm};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn linear_kind() -> impl Strategy<Value = DynamicsKind> {
    prop_oneof![
        Just(DynamicsKind::Overdamped),
        (0.1f64..5.0).prop_map(|gamma| DynamicsKind::KineticLangevin { gamma }),
        (0.1f64..5.0, 0.1f64..8.0).prop_map(|(lambda, gamma)| DynamicsKind::Gle { lambda, gamma }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expm_inverse(entries in prop::collection::vec(-2.0f64..2.0, 9)) {
        let a = DMatrix::from_row_slice(3, 3, &entries);
        let prod = expm(&a) * expm(&(-&a));
        prop_assert!((prod - DMatrix::identity(3, 3)).abs().max() < 1e-10);
    }

    #[test]
    fn van_loan_covariance_is_symmetric_psd(kind in linear_kind(), m in 0.2f64..5.0, h in 0.01f64..20.0) {
        let sys = build_drift_block(&kind, m).unwrap();
        let (f, q) = van_loan(&sys.a, &sys.diffusion(), h);
        prop_assert!((&q - q.transpose()).abs().max() < 1e-12);
        // Q = S∞ − F S∞ Fᵀ for the stationary covariance S∞
        let s = sys.stationary_covariance().unwrap();
        let resid = &q - (&s - &f * &s * f.transpose());
        prop_assert!(resid.abs().max() < 1e-9, "residual {}", resid.abs().max());
        let eig = q.symmetric_eigen().eigenvalues;
        prop_assert!(eig.iter().all(|e| *e > -1e-10));
    }

    #[test]
    fn semigroup_is_a_contraction(kind in linear_kind(), m in 0.2f64..5.0, t1 in 0.0f64..5.0, dt in 0.0f64..5.0) {
        let nd = normalize_drift(&build_drift_block(&kind, m).unwrap());
        let (n1, n2) = (semigroup_norm(&nd, t1), semigroup_norm(&nd, t1 + dt));
        prop_assert!(n1 <= 1.0 + 1e-12);
        prop_assert!(n2 <= n1 + 1e-12);
    }

    #[test]
    fn chi_square_nonnegative_and_zero_at_target(shift in prop::collection::vec(-1.0f64..1.0, 2), scale in 0.55f64..1.5) {
        let target = GaussianLaw::new(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])).unwrap();
        prop_assert!(chi_square_norm(&target, &target).unwrap().abs() < 1e-14);
        let law = GaussianLaw::new(DVector::from_vec(shift), &target.cov * scale).unwrap();
        prop_assert!(chi_square_norm(&law, &target).unwrap() >= 0.0);
    }

    #[test]
    fn closed_form_roots_match_eigensolver(m in 0.1f64..10.0, a in 0.1f64..10.0, b in 0.0f64..10.0) {
        let roots = gle_eigenvalues_closed_form(m, a, b).unwrap();
        let sm = m.sqrt();
        let mat = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, -m, 0.0, a * sm, 0.0, -a * sm, -b * sm]);
        let numeric = liftrate::linalg::eigenvalues(&mat);
        prop_assert!(multiset_distance(&roots.roots, &numeric) < 1e-6);
    }

    #[test]
    fn theorem_rate_decreases_with_constants(p_v in 0.1f64..10.0, c0 in 0.0f64..10.0, c1 in 0.0f64..10.0, t in 0.1f64..10.0, extra in 0.01f64..5.0) {
        let base = RateInputs { p_v, r: p_v, c0t: c0, c1t: c1, t };
        let r0 = theorem_rate(&base).unwrap().lambda;
        prop_assert!(r0 > 0.0 && r0 <= 2.0 * p_v + 1e-12);
        let more_c0 = theorem_rate(&RateInputs { c0t: c0 + extra, ..base }).unwrap().lambda;
        let more_c1 = theorem_rate(&RateInputs { c1t: c1 + extra, ..base }).unwrap().lambda;
        prop_assert!(more_c0 <= r0 && more_c1 <= r0);
    }

    #[test]
    fn ald_bound_decreases_with_m_and_l(p_q in 0.1f64..10.0, d in 1usize..100, eps in 0.1f64..10.0, gamma in 0.1f64..10.0, m in 0.0f64..10.0, l in 0.1f64..10.0, extra in 0.01f64..5.0) {
        let cfg = AldConfig { p_q, d, epsilon: eps, gamma, m, l, t: None };
        let b = ald_rate_bound(&cfg).unwrap();
        prop_assert!(b > 0.0);
        let more_m = ald_rate_bound(&AldConfig { m: m + extra, ..cfg }).unwrap();
        let more_l = ald_rate_bound(&AldConfig { l: l + extra, ..cfg }).unwrap();
        prop_assert!(more_m < b && more_l < b);
    }

    #[test]
    fn arrival_time_integrates_to_the_exponential_draw(a in -5.0f64..5.0, b in 0.0f64..5.0, e in 0.01f64..10.0) {
        let tau = linear_rate_arrival(a, b, e);
        prop_assume!(tau.is_finite());
        // ∫_0^τ (a + b s)_+ ds
        let integral = if b == 0.0 {
            a.max(0.0) * tau
        } else {
            let s0 = (-a / b).max(0.0).min(tau);
            let f = |s: f64| a * s + 0.5 * b * s * s;
            f(tau) - f(s0)
        };
        prop_assert!((integral - e).abs() < 1e-8 * e.max(1.0), "{integral} vs {e}");
    }

    #[test]
    fn energy_of_decreasing_curve_is_nonincreasing(rates in prop::collection::vec(0.0f64..3.0, 40), window in 0.05f64..1.0) {
        let times: Vec<f64> = (0..=40).map(|i| 0.05 * i as f64).collect();
        let mut values = vec![1.0];
        for (i, r) in rates.iter().enumerate() {
            let dt = times[i + 1] - times[i];
            values.push(values[i] * (-r * dt).exp());
        }
        let curve = DecayCurve::with_default_fit(times, values, None).unwrap();
        let h = time_averaged_energy(&curve, window).unwrap();
        prop_assert!(h.values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn config_json_round_trip(seed in any::<u64>(), m in prop::option::of(0.1f64..10.0), n in prop::option::of(2usize..5000), optimal in any::<bool>()) {
        let cfg = RunConfig {
            seed: Some(seed),
            spectral: Some(SpectralArgs { m, n_points: n, optimal, ..Default::default() }),
            simulate: Some(SimulateArgs { n_traj: n, x0: m.map(|v| vec![v, -v]), ..Default::default() }),
            ..Default::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn stationary_covariance_is_positive_definite(kind in linear_kind(), m in 0.2f64..5.0) {
        let s = build_drift_block(&kind, m).unwrap().stationary_covariance().unwrap();
        prop_assert!(is_positive_definite(&s));
    }
}
