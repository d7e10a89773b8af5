//! The abstract hypocoercive rate from its five inputs, under both prefactor
//! conventions, and the window T minimising it for kinetic Langevin.

use liftrate::rates::{langevin_window_constants, minimize_over_t, theorem_rate_with, PrefactorConvention, RateInputs};

fn main() -> liftrate::Result<()> {
    let inputs = RateInputs { p_v: 2.0, r: 2.0, c0t: 3.0, c1t: 5.0, t: 1.5 };
    for conv in [PrefactorConvention::TheoremStatement, PrefactorConvention::NormLevel] {
        let r = theorem_rate_with(&inputs, conv)?;
        println!("{conv:?}: lambda = {:.6e}, C = {:.6}", r.lambda, r.c);
    }

    let (c0, c1, gamma) = (1.0, 1.0, 2.0);
    for p_x in [0.25, 1.0, 4.0] {
        let opt = minimize_over_t(
            |t| langevin_window_constants(c0, c1, p_x, t).0,
            |t| langevin_window_constants(c0, c1, p_x, t).1,
            gamma,
            gamma,
            (1e-3, 1e3),
        )?;
        println!(
            "P_x = {p_x:5.2}: T* = {:.5}, lambda = {:.6e}{}",
            opt.t_star,
            opt.lambda,
            if opt.non_unimodal_warning { "  (objective not unimodal)" } else { "" }
        );
    }
    Ok(())
}
