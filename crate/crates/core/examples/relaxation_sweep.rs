//! Worst-case relaxation over random initial mean directions, compared with
//! the operator-norm relaxation time that bounds it.

use liftrate::analysis::relaxation_sweep;
use liftrate::dynamics::uniform_grid;
use liftrate::model::{build_drift_block, DynamicsKind};
use liftrate::spectral::{self, normalize_drift, relaxation_time_of};

fn main() -> liftrate::Result<()> {
    let m = 1.0;
    let opt = spectral::optimal_gle_params(m)?;
    let sys = build_drift_block(&DynamicsKind::Gle { lambda: opt.lambda, gamma: opt.gamma }, m)?;
    let sweep = relaxation_sweep(&sys, 100, 1e-3, 2024, &uniform_grid(10.0, 4001))?;
    let crossed = sweep.t_rel.iter().flatten().count();
    println!("seed {}: {crossed} of {} directions crossed e^-1", sweep.seed, sweep.t_rel.len());
    println!("worst-direction t_rel  {:.5}", sweep.t_rel_max);
    println!("operator-norm t_rel    {:.5}", relaxation_time_of(&normalize_drift(&sys))?);
    Ok(())
}
