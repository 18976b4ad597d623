use num_complex::Complex;
use num_traits::{One, Zero};

use super::Matrix;
use crate::error::{dim_err, Result};
use crate::scalar::Real;

/// Determinant by LU factorization with partial pivoting.
pub fn determinant<T: Real>(m: &Matrix<T>) -> Result<Complex<T>> {
    if !m.is_square() {
        return dim_err(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        ));
    }
    let n = m.rows();
    if n == 0 {
        return dim_err("determinant of an empty matrix");
    }
    let mut a = m.clone();
    let mut det = Complex::<T>::one();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[(i, k)].norm().partial_cmp(&a[(j, k)].norm()).unwrap())
            .unwrap();
        let p = a[(pivot, k)];
        if p.is_zero() {
            return Ok(Complex::zero());
        }
        if pivot != k {
            for j in 0..n {
                let tmp = a[(k, j)];
                a[(k, j)] = a[(pivot, j)];
                a[(pivot, j)] = tmp;
            }
            det = -det;
        }
        det = det * p;
        for i in k + 1..n {
            let f = a[(i, k)] / p;
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = a[(k, j)];
                a[(i, j)] = a[(i, j)] - f * v;
            }
        }
    }
    Ok(det)
}
