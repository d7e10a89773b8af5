//! Randomised HMC and Zig-Zag as piecewise deterministic processes: event
//! counts along one path, and ensemble moments on a 2-D anisotropic Gaussian.

use liftrate::analysis::ensemble_moments;
use liftrate::dynamics::pdmp::{simulate_rhmc, simulate_zigzag};
use liftrate::dynamics::rng::trajectory_rng;
use liftrate::dynamics::{run_ensemble, uniform_grid, InitialCondition, Scheme, SchemeSpec};
use liftrate::model::{DynamicsKind, QuadraticPotential};

fn main() -> liftrate::Result<()> {
    let pot = QuadraticPotential::new(vec![1.0, 4.0])?;
    let mut rng = trajectory_rng(3, 0);
    let path = simulate_rhmc(&pot, 1.0, 0.05, 100.0, &[1.0, 0.0, 0.0, 1.0], &mut rng)?;
    println!("rhmc over t = 100: {} refreshments", path.n_refresh());
    let path = simulate_zigzag(&pot, 1.0, None, 100.0, &[1.0, 0.0, 1.0, -1.0], &mut rng)?;
    println!("zig-zag over t = 100: {} flips, {} refreshments", path.n_flips(), path.n_refresh());

    for (kind, scheme) in [
        (DynamicsKind::Rhmc { gamma: 1.0 }, Scheme::EventRhmc),
        (DynamicsKind::ZigZag { gamma: 1.0 }, Scheme::EventZigZag),
    ] {
        let ens = run_ensemble(&kind, &SchemeSpec::new(scheme, 0.05), &pot, &InitialCondition::Fixed(vec![1.0, 0.0, 1.0, 1.0]), 4000, &uniform_grid(20.0, 2), 9)?;
        let mom = ensemble_moments(&ens, 1)?;
        println!(
            "{}: var(x) = [{:.3}, {:.3}] (exact [1, 0.25]), var(v) = [{:.3}, {:.3}]",
            kind.name(),
            mom.cov[(0, 0)],
            mom.cov[(1, 1)],
            mom.cov[(2, 2)],
            mom.cov[(3, 3)]
        );
    }
    Ok(())
}
