//! Stationary position variance of BAOAB, adaptive Langevin and the GLE
//! splitting as the step shrinks. The exact value is 1/m = 1.

use liftrate::analysis::ensemble_moments;
use liftrate::dynamics::{run_ensemble, uniform_grid, InitialCondition, Scheme, SchemeSpec};
use liftrate::model::{DynamicsKind, QuadraticPotential};

fn main() -> liftrate::Result<()> {
    let pot = QuadraticPotential::new(vec![1.0])?;
    let cases = [
        (DynamicsKind::KineticLangevin { gamma: 1.0 }, Scheme::SplittingBaoab),
        (DynamicsKind::AdaptiveLangevin { epsilon: 1.0, gamma: 1.0 }, Scheme::SplittingAld),
        (DynamicsKind::Gle { lambda: 2.0, gamma: 2.0 }, Scheme::SplittingGle),
        (DynamicsKind::Overdamped, Scheme::EulerMaruyama),
    ];
    println!("{:<20}{:>8}{:>12}{:>10}", "dynamics", "h", "var(x)", "se");
    for (kind, scheme) in cases {
        for h in [0.2, 0.1, 0.05] {
            let ens = run_ensemble(&kind, &SchemeSpec::new(scheme, h), &pot, &InitialCondition::Stationary, 20_000, &uniform_grid(20.0, 2), 5)?;
            let mom = ensemble_moments(&ens, 1)?;
            println!("{:<20}{h:>8}{:>12.4}{:>10.4}", kind.name(), mom.cov[(0, 0)], mom.cov_se[(0, 0)]);
        }
    }
    Ok(())
}
