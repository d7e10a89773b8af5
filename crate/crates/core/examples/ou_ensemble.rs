//! Exact Ornstein-Uhlenbeck sampling: an ensemble started from a fixed point
//! against the propagated Gaussian law.

use liftrate::analysis::{ensemble_moments, propagate_law, GaussianLaw};
use liftrate::dynamics::{run_ensemble, InitialCondition, SchemeSpec};
use liftrate::model::{build_drift_block, DynamicsKind, QuadraticPotential};
use nalgebra::{DMatrix, DVector};

fn main() -> liftrate::Result<()> {
    let kind = DynamicsKind::KineticLangevin { gamma: 1.0 };
    let sys = build_drift_block(&kind, 1.0)?;
    let pot = QuadraticPotential::new(vec![1.0])?;
    let x0 = vec![2.0, -1.0];
    let ens = run_ensemble(&kind, &SchemeSpec::exact(), &pot, &InitialCondition::Fixed(x0.clone()), 10_000, &[0.0, 0.5, 1.0, 2.0], 11)?;
    let law0 = GaussianLaw::new(DVector::from_vec(x0), DMatrix::zeros(2, 2))?;
    for (ti, &t) in ens.times.iter().enumerate().skip(1) {
        let law = propagate_law(&sys, &law0, t)?;
        let mom = ensemble_moments(&ens, ti)?;
        println!("t = {t}");
        for c in 0..2 {
            println!(
                "  mean[{c}] {:+.4} vs {:+.4} (z = {:+.2})   var[{c}] {:.4} vs {:.4} (z = {:+.2})",
                mom.mean[c],
                law.mean[c],
                (mom.mean[c] - law.mean[c]) / mom.mean_se[c],
                mom.cov[(c, c)],
                law.cov[(c, c)],
                (mom.cov[(c, c)] - law.cov[(c, c)]) / mom.cov_se[(c, c)]
            );
        }
    }
    Ok(())
}
