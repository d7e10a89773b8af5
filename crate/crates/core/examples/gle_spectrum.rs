//! Spectrum of the quasi-Markovian GLE on a Gaussian target.
//!
//! Prints the gap-optimal coupling and friction, the closed-form roots next
//! to the numeric eigenvalues, and the gap on a small (λ, γ) grid around the
//! optimum.
//!
//! ```bash
//! cargo run --example gle_spectrum -- 4.0
//! ```

use liftrate::model::{build_drift_block, DynamicsKind};
use liftrate::spectral::{gle_eigenvalues_closed_form, optimal_gle_params, spectral_gap};

fn main() -> liftrate::Result<()> {
    let m: f64 = std::env::args().nth(1).map(|s| s.parse().expect("m must be a number")).unwrap_or(1.0);
    let opt = optimal_gle_params(m)?;
    println!("m = {m}: lambda* = {:.10}, gamma* = {:.10}, gap = {:.12} (sqrt(3m) = {:.12})", opt.lambda, opt.gamma, opt.gap, (3.0 * m).sqrt());

    let roots = gle_eigenvalues_closed_form(m, opt.lambda / m.sqrt(), opt.gamma / m.sqrt())?;
    println!("roots at the optimum (eigensolver fallback: {}):", roots.branch_ambiguity);
    for r in roots.roots {
        println!("  {:+.10} {:+.10}i", r.re, r.im);
    }

    println!("\ngap / sqrt(m) around the optimum");
    print!("{:>10}", "lam\\gam");
    let scales = [0.8, 0.9, 1.0, 1.1, 1.2];
    for s in scales {
        print!("{:>10.3}", s * opt.gamma);
    }
    println!();
    for sl in scales {
        let lambda = sl * opt.lambda;
        print!("{lambda:>10.3}");
        for sg in scales {
            let sys = build_drift_block(&DynamicsKind::Gle { lambda, gamma: sg * opt.gamma }, m)?;
            print!("{:>10.5}", spectral_gap(&sys) / m.sqrt());
        }
        println!();
    }
    Ok(())
}
