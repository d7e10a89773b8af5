//! The seven Gaussian moment identities used by the adaptive Langevin
//! constants, exactly and by Monte Carlo.

use liftrate::dynamics::moments::check_gaussian_moments;

fn main() -> liftrate::Result<()> {
    for d in [1, 3] {
        println!("d = {d}");
        for c in check_gaussian_moments(d, 1_000_000, 42, 5.0)? {
            println!("  {:<28} exact {:>9.4}  mc {:>9.4} ± {:.4}  {}", c.name, c.exact, c.estimate, c.stderr, if c.pass { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
