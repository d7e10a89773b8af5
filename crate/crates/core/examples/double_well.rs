//! Adaptive Langevin on a non-Gaussian potential through user closures. The
//! thermostat variable settles around zero when the kinetic temperature is
//! right.

use liftrate::analysis::ensemble_moments;
use liftrate::dynamics::{run_ensemble, uniform_grid, InitialCondition, Scheme, SchemeSpec};
use liftrate::model::{validate_assumptions_general, DynamicsKind, GeneralPotential};
use liftrate::rates::{ald_rate_bound, AldConfig};

fn main() -> liftrate::Result<()> {
    // U(q) = (q² - 1)² / 4, so U'' = 3q² - 1 ≥ -1
    let pot = GeneralPotential::new(
        1,
        |x| 0.25 * (x[0] * x[0] - 1.0).powi(2),
        |x, g| g[0] = x[0] * (x[0] * x[0] - 1.0),
        1.0,
        1.0,
        0.25,
        0.5,
    )?;
    let kind = DynamicsKind::AdaptiveLangevin { epsilon: 1.0, gamma: 1.0 };
    let report = validate_assumptions_general(&kind, &pot);
    println!("assumptions: {:?}", report.applicability);
    let cfg = AldConfig { p_q: pot.poincare_gap, d: 1, epsilon: 1.0, gamma: 1.0, m: pot.hessian_lower_bound, l: pot.laplacian_growth, t: None };
    println!("rate bound: {:.4e}", ald_rate_bound(&cfg)?);

    let ens = run_ensemble(&kind, &SchemeSpec::new(Scheme::SplittingAld, 0.01), &pot, &InitialCondition::Fixed(vec![1.0, 0.0, 3.0]), 2000, &uniform_grid(50.0, 6), 17)?;
    for ti in 0..ens.times.len() {
        let mom = ensemble_moments(&ens, ti)?;
        println!("t = {:4.0}: E[q^2] = {:.3}  E[p^2] = {:.3}  E[z] = {:+.3}", ens.times[ti], mom.cov[(0, 0)] + mom.mean[0].powi(2), mom.cov[(1, 1)] + mom.mean[1].powi(2), mom.mean[2]);
    }
    Ok(())
}
