use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{inner, vec_norm};
use super::Matrix;
use crate::scalar::Real;

/// Thin QR by modified Gram-Schmidt with one re-orthogonalization pass.
///
/// Returns `Q` (orthonormal columns) and the diagonal of `R`, which is real
/// and positive. `None` when the columns are numerically dependent.
pub fn orthonormalize<T: Real>(a: &Matrix<T>) -> Option<(Matrix<T>, Vec<Complex<T>>)> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut q = Matrix::zeros(rows, cols);
    let mut r_diag = Vec::with_capacity(cols);
    let scale = a.max_abs();
    let mut basis: Vec<Vec<Complex<T>>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = a.col(j);
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x = *x - c * *y;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm <= T::epsilon() * T::of(16.0) * scale || norm.is_zero() {
            return None;
        }
        for x in v.iter_mut() {
            *x = *x / norm;
        }
        q.set_col(j, &v);
        r_diag.push(Complex::new(norm, T::zero()));
        basis.push(v);
    }
    Some((q, r_diag))
}

/// Extends orthonormal columns to a full unitary by Gram-Schmidt against the standard basis.
pub fn complete_unitary<T: Real>(cols: &[Vec<Complex<T>>], n: usize) -> Matrix<T> {
    let mut basis: Vec<Vec<Complex<T>>> = cols.to_vec();
    let mut e = 0;
    while basis.len() < n && e < n {
        let mut v = vec![Complex::zero(); n];
        v[e] = Complex::new(T::one(), T::zero());
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x = *x - c * *y;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > T::of(0.5) / T::of(n as f64).sqrt() {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
        e += 1;
    }
    let mut u = Matrix::zeros(n, n);
    for (j, b) in basis.iter().enumerate().take(n) {
        u.set_col(j, b);
    }
    u
}
