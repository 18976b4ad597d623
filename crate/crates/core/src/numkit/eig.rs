use num_complex::Complex;
use num_traits::Zero;

use super::Matrix;
use crate::error::{dim_err, invalid, Result};
use crate::scalar::Real;

/// Spectral decomposition `H = V diag(values) V^†` with values sorted descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T = f64> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// The input is symmetrized as `(H + H^†)/2` after checking the defect
/// against `1e-10` (relative to `max(1, max|H|)`).
pub fn hermitian_eig<T: Real>(h: &Matrix<T>) -> Result<HermitianEigen<T>> {
    if !h.is_square() {
        return dim_err(format!("eigenproblem of a {}x{} matrix", h.rows(), h.cols()));
    }
    if !h.is_finite() {
        return invalid("non-finite entry in Hermitian matrix");
    }
    let n = h.rows();
    let scale = h.max_abs().max(T::one());
    if h.hermitian_defect() > T::tol(1e-10) * scale {
        return invalid(format!(
            "matrix is not Hermitian (defect {})",
            h.hermitian_defect()
        ));
    }
    let half = T::of(0.5);
    let mut a = Matrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * half);
    let mut v = Matrix::<T>::identity(n);

    let total = a.frobenius();
    let mut previous = T::infinity();
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= T::epsilon() * T::of(1e-2) * total || off.is_zero() || off >= previous {
            break;
        }
        previous = off;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate<T: Real>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g.is_zero() {
        return;
    }
    let n = a.rows();
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let zeta = (aqq - app) / (T::of(2.0) * g);
    let t = if zeta >= T::zero() {
        T::one() / (zeta + (T::one() + zeta * zeta).sqrt())
    } else {
        -T::one() / (-zeta + (T::one() + zeta * zeta).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane.
    let e = phase.conj();
    let jpp = Complex::new(c, T::zero());
    let jpq = Complex::new(s, T::zero());
    let jqp = e * (-s);
    let jqq = e * c;
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * jpp.conj() + aqj * jqp.conj();
        a[(q, j)] = apj * jpq.conj() + aqj * jqq.conj();
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
}

impl<T: Real> HermitianEigen<T> {
    /// `V diag(f(values)) V^†`.
    pub fn compose(&self, f: impl Fn(T) -> T) -> Matrix<T> {
        let n = self.values.len();
        let d: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        Matrix::from_fn(n, n, |i, j| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + self.vectors[(i, k)] * self.vectors[(j, k)].conj() * d[k]
            })
        })
    }
}
