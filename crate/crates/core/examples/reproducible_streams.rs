//! Ensembles depend only on the master seed: the same run on one and on four
//! worker threads is bit-identical, and each trajectory owns its stream.

use liftrate::dynamics::{run_ensemble, uniform_grid, Ensemble, InitialCondition, SchemeSpec};
use liftrate::model::{DynamicsKind, QuadraticPotential};

fn run(threads: usize) -> Ensemble {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
    let pot = QuadraticPotential::new(vec![1.0, 2.0]).expect("valid precisions");
    pool.install(|| {
        run_ensemble(&DynamicsKind::Gle { lambda: 1.0, gamma: 1.0 }, &SchemeSpec::exact(), &pot, &InitialCondition::Stationary, 500, &uniform_grid(5.0, 51), 77)
            .expect("ensemble")
    })
}

fn main() {
    let a = run(1);
    let b = run(4);
    println!("1 vs 4 threads identical: {}", a == b);
    let first = &a.trajectory(0)[..3];
    let second = &a.trajectory(1)[..3];
    println!("trajectory 0 starts at {first:?}\ntrajectory 1 starts at {second:?}");
}
