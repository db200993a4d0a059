//! Small dense and tridiagonal eigensolvers.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below
/// `x` (Sturm sequence count).
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            q = -f64::EPSILON * (diag[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues of a symmetric tridiagonal matrix by bisection.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let k = k.min(n);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let span = (hi - lo).max(1.0);
    (0..k)
        .map(|i| {
            let (mut a, mut b) = (lo - 1e-3 * span, hi + 1e-3 * span);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, off, mid) > i {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Solves `(T - shift) x = rhs` for tridiagonal `T` by Gaussian elimination
/// with partial pivoting.
fn tridiagonal_solve(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // rows hold (a, b, c): main, first and second superdiagonal after pivoting
    let mut a: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut b: Vec<f64> = (0..n).map(|i| if i + 1 < n { off[i] } else { 0.0 }).collect();
    let mut c = vec![0.0; n];
    let mut sub: Vec<f64> = off.to_vec();
    let mut y = rhs.to_vec();
    let tiny = f64::EPSILON * diag.iter().fold(1.0f64, |m, d| m.max(d.abs()));
    for i in 0..n.saturating_sub(1) {
        if sub[i].abs() > a[i].abs() {
            // swap rows i and i+1
            let next_b = if i + 2 < n { off[i + 1] } else { 0.0 };
            let (ai, bi, ci) = (a[i], b[i], c[i]);
            a[i] = sub[i];
            b[i] = a[i + 1];
            c[i] = next_b;
            let lower_a = bi;
            let lower_b = ci;
            y.swap(i, i + 1);
            let m = ai / a[i];
            a[i + 1] = lower_a - m * b[i];
            b[i + 1] = lower_b - m * c[i];
            y[i + 1] -= m * y[i];
        } else {
            if a[i] == 0.0 {
                a[i] = tiny;
            }
            let m = sub[i] / a[i];
            a[i + 1] -= m * b[i];
            b[i + 1] -= m * c[i];
            y[i + 1] -= m * y[i];
        }
        sub[i] = 0.0;
    }
    if n > 0 && a[n - 1] == 0.0 {
        a[n - 1] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        if i + 1 < n {
            acc -= b[i] * x[i + 1];
        }
        if i + 2 < n {
            acc -= c[i] * x[i + 2];
        }
        x[i] = acc / a[i];
    }
    x
}

/// Lowest `k` eigenpairs of a symmetric tridiagonal matrix. Eigenvectors
/// come from inverse iteration and are orthonormalized in order.
pub fn tridiagonal_eigenpairs(diag: &[f64], off: &[f64], k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    let values = tridiagonal_eigenvalues(diag, off, k);
    let scale = diag.iter().chain(off.iter()).fold(1.0f64, |m, x| m.max(x.abs()));
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for &lambda in &values {
        let shift = lambda + 1e-13 * scale;
        // deterministic, non-degenerate start vector
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 97) as f64 / 97.0).collect();
        for _ in 0..4 {
            v = tridiagonal_solve(diag, off, shift, &v);
            for prev in &vectors {
                let overlap: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= overlap * p;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        vectors.push(v);
    }
    (values, vectors)
}

/// Ascending eigenvalues of a dense symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Lowest `k` eigenvalues of a symmetric operator of dimension `dim` given
/// by its action, via Lanczos with full reorthogonalization.
pub fn lanczos_lowest<F>(dim: usize, k: usize, apply: F) -> Vec<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let k = k.min(dim);
    if k == 0 {
        return Vec::new();
    }
    let max_steps = dim.min(600);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = DVector::from_fn(dim, |i, _| 1.0 + ((i * 104729) % 1009) as f64 / 1009.0);
    q /= q.norm();
    let mut previous: Vec<f64> = Vec::new();
    for step in 0..max_steps {
        let mut w = apply(&q);
        let alpha = q.dot(&w);
        w.axpy(-alpha, &q, 1.0);
        if let Some(prev) = basis.last() {
            w.axpy(-betas[betas.len() - 1], prev, 1.0);
        }
        basis.push(q.clone());
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let o = b.dot(&w);
                w.axpy(-o, b, 1.0);
            }
        }
        let beta = w.norm();
        let ritz = tridiagonal_eigenvalues(&alphas, &betas, k);
        let converged = ritz.len() == k
            && previous.len() == k
            && ritz
                .iter()
                .zip(&previous)
                .all(|(a, b)| (a - b).abs() <= 1e-13 * a.abs().max(1.0));
        if beta < 1e-12 || step + 1 == max_steps || (step >= 2 * k + 10 && converged) {
            if beta < 1e-12 && basis.len() < k && basis.len() < dim {
                // invariant subspace found early; fall back to dense
                break;
            }
            return ritz;
        }
        previous = ritz;
        betas.push(beta);
        q = w / beta;
    }
    let mut dense = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        let mut e = DVector::zeros(dim);
        e[j] = 1.0;
        dense.set_column(j, &apply(&e));
    }
    symmetric_eigenvalues(&dense).into_iter().take(k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_dense() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| ((i * 37) % 11) as f64 - 3.0).collect();
        let off: Vec<f64> = (0..n - 1).map(|i| 0.5 + ((i * 13) % 5) as f64 * 0.3).collect();
        let mut dense = DMatrix::zeros(n, n);
        for i in 0..n {
            dense[(i, i)] = diag[i];
            if i + 1 < n {
                dense[(i, i + 1)] = off[i];
                dense[(i + 1, i)] = off[i];
            }
        }
        let exact = symmetric_eigenvalues(&dense);
        let (values, vectors) = tridiagonal_eigenpairs(&diag, &off, 6);
        for (i, v) in values.iter().enumerate() {
            assert!((v - exact[i]).abs() < 1e-10);
            let x = DVector::from_vec(vectors[i].clone());
            assert!((&dense * &x - &x * *v).amax() < 1e-8);
        }
    }

    #[test]
    fn lanczos_finds_lowest() {
        let n = 300;
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                i as f64 * 0.5
            } else {
                1.0 / (1.0 + (i as f64 - j as f64).abs())
            }
        });
        let exact = symmetric_eigenvalues(&m);
        let got = lanczos_lowest(n, 3, |v| &m * v);
        for i in 0..3 {
            assert!((got[i] - exact[i]).abs() < 1e-9, "{} vs {}", got[i], exact[i]);
        }
    }
}
