//! Adaptive Langevin: explicit constants, the optimal (ε, γ) and the shape
//! of the rate bound along ε at fixed γ.

use liftrate::rates::{ald_constants, ald_optimal_params, ald_rate_bound};

fn main() -> liftrate::Result<()> {
    let (p_q, m, l) = (1.0, 0.0, 1.0);
    for d in [1, 10, 1000] {
        let opt = ald_optimal_params(p_q, d, m, l)?;
        println!("d = {d:5}: eps^2 = {:.4}, gamma = {:.4}, lambda = {:.6e}", opt.eps_sq, opt.gamma, opt.lambda_closed);
    }

    let base = ald_optimal_params(p_q, 1, m, l)?.config(p_q, 1, m, l);
    let k = ald_constants(&base)?;
    println!("\nat the optimum: P_x = {:.4}, c0 = {:.4}, c1 = {:.4}", k.p_x, k.c0, k.c1);

    println!("\n{:>10}{:>14}", "epsilon", "bound");
    for i in 0..=12 {
        let eps = 10f64.powf(-2.0 + i as f64 / 3.0);
        let mut cfg = base;
        cfg.epsilon = eps;
        println!("{eps:>10.4}{:>14.4e}", ald_rate_bound(&cfg)?);
    }
    Ok(())
}
