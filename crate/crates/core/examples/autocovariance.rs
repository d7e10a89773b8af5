//! Stationary autocovariance of x + v from a simulated ensemble,
//! against the closed form e^{sA} S∞ and the spectral gap.

use liftrate::analysis::{empirical_autocov, stationary_cross_covariance};
use liftrate::dynamics::{run_ensemble, uniform_grid, InitialCondition, SchemeSpec};
use liftrate::model::{build_drift_block, DynamicsKind, QuadraticPotential};
use liftrate::spectral::spectral_gap;

fn main() -> liftrate::Result<()> {
    let kind = DynamicsKind::KineticLangevin { gamma: 2.0 };
    let sys = build_drift_block(&kind, 1.0)?;
    let pot = QuadraticPotential::new(vec![1.0])?;
    let ens = run_ensemble(&kind, &SchemeSpec::exact(), &pot, &InitialCondition::Stationary, 2000, &uniform_grid(20.0, 201), 1)?;
    let lags: Vec<usize> = (0..=40).collect();
    let curve = empirical_autocov(&ens, |y| y[0] + y[1], &lags)?;
    let se = curve.stderr.as_ref().expect("jackknife errors");
    for i in (0..lags.len()).step_by(5) {
        let c = stationary_cross_covariance(&sys, curve.times[i])?;
        let exact = c.sum();
        println!("s = {:4.1}  C(s) = {:+.4} ± {:.4}  exact {:+.4}", curve.times[i], curve.values[i], se[i], exact);
    }
    println!("fitted rate {:.3}, gap {:.3}", curve.fitted_rate, spectral_gap(&sys));
    Ok(())
}
