//! Small dense linear algebra on top of `nalgebra`.
//!
//! Every matrix handled here is a per-coordinate block (1x1 up to 3x3, or
//! the doubled Van Loan block), so the routines favour accuracy over cost.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Numerator coefficients of the diagonal [13/13] Padé approximant of exp.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled [13/13] approximant reaches double
/// precision backward error.
const THETA13: f64 = 5.371_920_351_148_152;

fn norm1(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a [13/13] Padé approximant.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = norm1(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = a / 2f64.powi(squarings);

    let id = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &id * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &id * b[0];

    let p = &v + &u;
    let q = &v - &u;
    let mut r = q
        .lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// Solve `A S + S Aᵀ + Q = 0` for `S` by vectorisation.
pub fn solve_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !a.is_square() || q.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "Lyapunov solve needs square A and Q of equal size".into(),
        ));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let kron = id.kronecker(a) + a.kronecker(&id);
    let rhs = DVector::from_iterator(n * n, q.iter().map(|x| -x));
    let sol = kron
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::invalid("drift", "A has eigenvalues summing to zero; no stationary covariance"))?;
    let s = DMatrix::from_column_slice(n, n, sol.as_slice());
    Ok(symmetrize(&s))
}

pub fn symmetrize(s: &DMatrix<f64>) -> DMatrix<f64> {
    (s + s.transpose()) * 0.5
}

/// Returns `(exp(hA), ∫₀ʰ e^{sA} Q e^{sAᵀ} ds)`.
///
/// The Van Loan block exponential is evaluated on `h / 2^k` with
/// `‖A‖₁ h / 2^k ≤ 1`, then doubled `k` times through
/// `Q_{2s} = Q_s + F_s Q_s F_sᵀ`. For long steps the direct block exponential
/// cancels catastrophically; the doubling only adds PSD terms.
pub fn van_loan(a: &DMatrix<f64>, q: &DMatrix<f64>, h: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let scaled = norm1(a) * h.abs();
    let k = if scaled > 1.0 { scaled.log2().ceil() as i32 } else { 0 };
    let (mut f, mut qh) = van_loan_block(a, q, h / 2f64.powi(k));
    for _ in 0..k {
        qh = symmetrize(&(&qh + &f * &qh * f.transpose()));
        f = &f * &f;
    }
    (f, qh)
}

fn van_loan_block(a: &DMatrix<f64>, q: &DMatrix<f64>, h: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut block = DMatrix::<f64>::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(&(-a * h));
    block.view_mut((0, n), (n, n)).copy_from(&(q * h));
    block.view_mut((n, n), (n, n)).copy_from(&(a.transpose() * h));
    let e = expm(&block);
    let g12 = e.view((0, n), (n, n)).clone_owned();
    let f = e.view((n, n), (n, n)).transpose();
    let qh = &f * g12;
    (f, symmetrize(&qh))
}

/// Eigenvalues from the real Schur form.
pub fn eigenvalues(a: &DMatrix<f64>) -> Vec<Complex<f64>> {
    a.clone().complex_eigenvalues().iter().copied().collect()
}

/// Eigenvalues with numerically coincident clusters replaced by their centroid.
///
/// A k-fold defective eigenvalue is resolved by a backward stable solver
/// only to about `(eps |A|)^{1/k} |A|^{1-1/k}`, while the centroid of the
/// computed cluster stays accurate to `eps |A|`. Eigenvalues closer than
/// that resolution are indistinguishable from a multiple root and are merged.
pub fn clustered_eigenvalues(a: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let eig = eigenvalues(a);
    let n = eig.len();
    if n < 2 {
        return eig;
    }
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let k = n as f64;
    let radius = 10.0 * (f64::EPSILON * scale).powf(1.0 / k) * scale.powf(1.0 - 1.0 / k);

    // union-find over pairs within the resolution radius
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eig[i] - eig[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut out = eig.clone();
    for i in 0..n {
        let root = find(&mut parent, i);
        let members: Vec<usize> = (0..n).filter(|&j| find(&mut parent, j) == root).collect();
        if members.len() > 1 {
            let sum: Complex<f64> = members.iter().map(|&j| eig[j]).sum();
            out[i] = sum / members.len() as f64;
        }
    }
    out
}

pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Largest singular value.
pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Lower Cholesky factor, retrying once with a `1e-12`-relative diagonal shift.
pub fn cholesky_factor(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let q = symmetrize(q);
    if q.nrows() == 0 {
        return Ok(q);
    }
    if let Some(c) = q.clone().cholesky() {
        return Ok(c.l());
    }
    let scale = q.diagonal().iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let shifted = &q + DMatrix::<f64>::identity(q.nrows(), q.nrows()) * (1e-12 * scale);
    shifted.cholesky().map(|c| c.l()).ok_or(Error::NonPsd)
}

/// Symmetric positive definite check through Cholesky.
pub fn is_positive_definite(s: &DMatrix<f64>) -> bool {
    symmetrize(s).cholesky().is_some()
}
