//! Gaussian moment identities for `v ~ N(0, I_d)` used in the adaptive
//! Langevin estimates.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{normal, trajectory_rng};
use crate::error::{Error, Result};

/// Exact values of `E v₁²`, `E v₁⁴`, `E v₁⁶`, `E v₁⁸`, `E(|v|²−d)²`,
/// `E(|v|²−d)³`, `E(|v|²−d)⁴`.
pub fn gaussian_moments_exact(d: usize) -> [(&'static str, f64); 7] {
    let d = d as f64;
    [
        ("v1^2", 1.0),
        ("v1^4", 3.0),
        ("v1^6", 15.0),
        ("v1^8", 105.0),
        ("(|v|^2-d)^2", 2.0 * d),
        ("(|v|^2-d)^3", 8.0 * d),
        ("(|v|^2-d)^4", 12.0 * d * d + 48.0 * d),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    pub name: String,
    pub d: usize,
    pub exact: f64,
    pub estimate: f64,
    pub stderr: f64,
    /// `|estimate − exact| / stderr`.
    pub z: f64,
    pub pass: bool,
}

const CHUNK: usize = 10_000;

/// Monte Carlo estimates of the seven identities from `n` samples; a check
/// passes when it lies within `n_se` standard errors.
///
/// Samples are drawn in chunks of 10⁴, chunk `c` from stream `c` of `seed`,
/// and reduced in chunk order.
pub fn check_gaussian_moments(d: usize, n: usize, seed: u64, n_se: f64) -> Result<Vec<MomentCheck>> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be at least 1"));
    }
    if n < 2 {
        return Err(Error::InsufficientData("need at least two samples".into()));
    }
    let n_chunks = n.div_ceil(CHUNK);
    let partial: Vec<[[f64; 2]; 7]> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = trajectory_rng(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut acc = [[0.0f64; 2]; 7];
            let mut v = vec![0.0; d];
            for _ in 0..len {
                for x in v.iter_mut() {
                    *x = normal(&mut rng);
                }
                let v1 = v[0] * v[0];
                let r = v.iter().map(|x| x * x).sum::<f64>() - d as f64;
                let obs = [v1, v1 * v1, v1 * v1 * v1, v1 * v1 * v1 * v1, r * r, r * r * r, r * r * r * r];
                for (a, o) in acc.iter_mut().zip(obs) {
                    a[0] += o;
                    a[1] += o * o;
                }
            }
            acc
        })
        .collect();
    let mut tot = [[0.0f64; 2]; 7];
    for p in &partial {
        for i in 0..7 {
            tot[i][0] += p[i][0];
            tot[i][1] += p[i][1];
        }
    }
    let nf = n as f64;
    Ok(gaussian_moments_exact(d)
        .iter()
        .zip(tot)
        .map(|((name, exact), [s, s2])| {
            let mean = s / nf;
            let var = (s2 / nf - mean * mean) * nf / (nf - 1.0);
            let stderr = (var.max(0.0) / nf).sqrt();
            let z = (mean - exact).abs() / stderr;
            MomentCheck {
                name: name.to_string(),
                d,
                exact: *exact,
                estimate: mean,
                stderr,
                z,
                pass: z <= n_se,
            }
        })
        .collect())
}
