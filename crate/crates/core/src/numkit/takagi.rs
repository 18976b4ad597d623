use num_complex::Complex;

use super::{complete_unitary, hermitian_eig, Matrix};
use crate::error::{dim_err, invalid, Result};
use crate::scalar::Real;

/// Takagi (Autonne) factorization `S = U diag(values) U^T` of a complex symmetric matrix.
#[derive(Clone, Debug)]
pub struct Takagi<T = f64> {
    pub u: Matrix<T>,
    /// Singular values of `S`, descending.
    pub values: Vec<T>,
}

/// Factors a complex symmetric matrix.
///
/// Writing `S = A + iB`, a Takagi vector `w = x + iy` (with `S w = σ w*`)
/// is an eigenvector `(x, y)` of the real symmetric matrix
/// `[[A, -B], [-B, -A]]` with eigenvalue `σ`. Eigenvalues come in `±σ`
/// pairs, so the top half of the real spectrum gives the singular values and
/// their eigenvectors are orthonormal as complex vectors. Columns for
/// vanishing singular values are completed to a unitary.
pub fn takagi<T: Real>(s: &Matrix<T>) -> Result<Takagi<T>> {
    if !s.is_square() {
        return dim_err(format!("Takagi factorization of a {}x{} matrix", s.rows(), s.cols()));
    }
    if !s.is_finite() {
        return invalid("non-finite entry in symmetric matrix");
    }
    let n = s.rows();
    let scale = s.max_abs().max(T::one());
    if s.symmetric_defect() > T::tol(1e-10) * scale {
        return invalid(format!("matrix is not symmetric (defect {})", s.symmetric_defect()));
    }
    let half = T::of(0.5);
    let sym = Matrix::from_fn(n, n, |i, j| (s[(i, j)] + s[(j, i)]) * half);

    let big = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        let z = sym[(ii, jj)];
        let v = match (bi, bj) {
            (0, 0) => z.re,
            (0, 1) | (1, 0) => -z.im,
            _ => -z.re,
        };
        Complex::new(v, T::zero())
    });
    let eig = hermitian_eig(&big)?;

    let cutoff = T::tol(1e-13) * sym.frobenius().max(T::min_positive_value());
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let sigma = eig.values[k];
        if sigma <= cutoff {
            break;
        }
        // u = conj(w) = x - i y
        let col: Vec<Complex<T>> = (0..n)
            .map(|i| Complex::new(eig.vectors[(i, k)].re, -eig.vectors[(n + i, k)].re))
            .collect();
        cols.push(col);
        values.push(sigma);
    }
    values.resize(n, T::zero());
    let u = complete_unitary(&cols, n);
    Ok(Takagi { u, values })
}

impl<T: Real> Takagi<T> {
    pub fn reconstruct(&self) -> Matrix<T> {
        let d = Matrix::from_real_diag(&self.values);
        self.u.matmul(&d).matmul(&self.u.transpose())
    }
}
