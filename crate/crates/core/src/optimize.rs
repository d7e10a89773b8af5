//! Derivative-free minimisers used by the parameter searches.

/// Result of a one-dimensional bracketed minimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum1d {
    pub x: f64,
    pub value: f64,
    /// More than one interior local minimum was seen on the pre-scan grid.
    pub multimodal: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[lo, hi]` until the bracket is below
/// `rel_tol * max(1, |x|)`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(1.0) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Uniform (or log-uniform when `log_scale`) pre-scan over `n_grid` points,
/// then golden-section refinement around the best grid point.
///
/// A flat objective returns the midpoint of the range.
pub fn grid_then_golden(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    n_grid: usize,
    log_scale: bool,
    rel_tol: f64,
) -> Minimum1d {
    assert!(hi > lo && n_grid >= 3);
    let point = |i: usize| {
        let u = i as f64 / (n_grid - 1) as f64;
        if log_scale {
            (lo.ln() + u * (hi.ln() - lo.ln())).exp()
        } else {
            lo + u * (hi - lo)
        }
    };
    let xs: Vec<f64> = (0..n_grid).map(point).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let spread = fs.iter().copied().fold(f64::NEG_INFINITY, f64::max) - fs.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = fs.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    if spread <= 1e-14 * scale {
        let mid = 0.5 * (lo + hi);
        return Minimum1d {
            x: mid,
            value: f(mid),
            multimodal: false,
        };
    }

    let interior_minima = (1..n_grid - 1)
        .filter(|&i| fs[i] < fs[i - 1] && fs[i] <= fs[i + 1])
        .count();
    let best = fs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let a = xs[best.saturating_sub(1)];
    let b = xs[(best + 1).min(n_grid - 1)];
    let (x, value) = golden_section(&f, a, b, rel_tol);
    let (x, value) = if value <= fs[best] { (x, value) } else { (xs[best], fs[best]) };
    Minimum1d {
        x,
        value,
        multimodal: interior_minima > 1,
    }
}

/// Nelder–Mead simplex minimisation. Stops when the spread of simplex values
/// and the simplex diameter both fall below `tol`.
pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let diameter = simplex[1..]
            .iter()
            .map(|p| p.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (values[n] - values[0]).abs() <= tol && diameter <= tol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&contracted);
            if fc < values[n].min(fr) {
                simplex[n] = contracted;
                values[n] = fc;
            } else {
                let best = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = simplex[i].iter().zip(&best).map(|(p, b)| b + 0.5 * (p - b)).collect();
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    (simplex[best].clone(), values[best])
}
