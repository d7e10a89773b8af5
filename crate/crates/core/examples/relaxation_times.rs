//! Operator-norm relaxation times of overdamped, kinetic and GLE dynamics
//! and how far each sits above the lift lower bounds.

use liftrate::model::{build_drift_block, DynamicsKind};
use liftrate::spectral::{self, lift_lower_bound_remark, normalize_drift, relaxation_time_of};

fn main() -> liftrate::Result<()> {
    let m = 1.0;
    let gle = spectral::optimal_gle_params(m)?;
    let fric = spectral::trel_optimal_friction(m)?;
    let cases = [
        ("overdamped", DynamicsKind::Overdamped),
        ("kinetic, critical", DynamicsKind::KineticLangevin { gamma: 2.0 }),
        ("kinetic, t_rel-optimal", DynamicsKind::KineticLangevin { gamma: fric.gamma }),
        ("gle, gap-optimal", DynamicsKind::Gle { lambda: gle.lambda, gamma: gle.gamma }),
    ];
    let bound = lift_lower_bound_remark(m);
    println!("lift lower bound on t_rel: {bound:.6}");
    println!("{:<24}{:>12}{:>12}{:>14}", "dynamics", "gap", "t_rel", "t_rel / bound");
    for (name, kind) in cases {
        let sys = build_drift_block(&kind, m)?;
        let nd = normalize_drift(&sys);
        let t = relaxation_time_of(&nd)?;
        println!("{name:<24}{:>12.6}{t:>12.6}{:>14.4}", nd.gap(), t / bound);
    }

    // the norm curve itself, coarse
    let sys = build_drift_block(&DynamicsKind::Gle { lambda: gle.lambda, gamma: gle.gamma }, m)?;
    let nd = normalize_drift(&sys);
    println!("\nGLE semigroup norm");
    for k in 0..=10 {
        let t = 0.5 * k as f64;
        println!("  t = {t:4.1}  |exp(tA)| = {:.6}", spectral::semigroup_norm(&nd, t));
    }
    Ok(())
}
