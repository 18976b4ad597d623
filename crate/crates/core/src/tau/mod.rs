//! Completely symmetric rank-`d` tensors attached to ensembles.
//!
//! For an ensemble `|phi_k> = Σ_ij a^k_ij |i>|j>` of sub-normalized `d x d`
//! states, the tensor entry at `(k_1, ..., k_d)` is
//! `d^{d/2}/d! Σ_σ det B_σ`, where row `i` of `B_σ` is row `i` of
//! `a^{k_σ(i)}`. The coefficients `a^k` are the complex conjugates of the
//! stored amplitudes. Diagonal entries satisfy `|τ_{k...k}|^{2/d} = G(phi_k)`
//! and a change of decomposition `chi_l = Σ_k conj(U_lk) phi_k` acts as
//! `τ'_{l_1...l_d} = Σ U_{l_1 k_1} ... U_{l_d k_d} τ_{k_1...k_d}`.

mod diag;
mod phase;

pub use diag::{diagonalize, DiagonalForm, MEMBERSHIP_THRESHOLD};
pub use phase::{cancellation_decomposition, phase_unitary};

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{dim_err, invalid, Error, Result};
use crate::numkit::{determinant, Matrix};
use crate::scalar::Real;
use crate::states::Ensemble;

/// Largest number of stored entries `m^d`.
pub const CAPACITY: usize = 10_000_000;

/// Dense symmetric tensor with `d` indices ranging over `0..m`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauTensor<T = f64> {
    d: usize,
    m: usize,
    entries: Vec<Complex<T>>,
}

pub(crate) fn checked_size(m: usize, d: usize) -> Result<usize> {
    match u32::try_from(d).ok().and_then(|e| m.checked_pow(e)) {
        Some(n) if n <= CAPACITY => Ok(n),
        _ => Err(Error::Capacity(format!(
            "tensor with {m}^{d} entries exceeds the limit of {CAPACITY}"
        ))),
    }
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).expect("successor exists");
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Advances a non-decreasing tuple over `0..m`; false after the last one.
fn next_multiset(idx: &mut [usize], m: usize) -> bool {
    let d = idx.len();
    for p in (0..d).rev() {
        if idx[p] + 1 < m {
            let v = idx[p] + 1;
            for q in idx[p..].iter_mut() {
                *q = v;
            }
            return true;
        }
    }
    false
}

/// `out[l, a, r] = Σ_b u[a, b] data[l, b, r]` along `mode`.
pub(crate) fn mode_product<T: Real>(
    data: &[Complex<T>],
    dims: &[usize],
    mode: usize,
    u: &Matrix<T>,
) -> Vec<Complex<T>> {
    let left: usize = dims[..mode].iter().product();
    let mid = dims[mode];
    let right: usize = dims[mode + 1..].iter().product();
    let out_mid = u.rows();
    debug_assert_eq!(u.cols(), mid);
    let mut out = vec![Complex::zero(); left * out_mid * right];
    for l in 0..left {
        for a in 0..out_mid {
            let dst = &mut out[(l * out_mid + a) * right..(l * out_mid + a + 1) * right];
            for b in 0..mid {
                let c = u[(a, b)];
                if c.is_zero() {
                    continue;
                }
                let src = &data[(l * mid + b) * right..(l * mid + b + 1) * right];
                for (o, &x) in dst.iter_mut().zip(src) {
                    *o = *o + c * x;
                }
            }
        }
    }
    out
}

impl<T: Real> TauTensor<T> {
    /// Wraps raw entries in mixed-radix order (first index most significant).
    pub fn from_entries(d: usize, m: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if d < 2 || m == 0 {
            return dim_err(format!("tensor rank {d} with index range {m}"));
        }
        let n = checked_size(m, d)?;
        if entries.len() != n {
            return dim_err(format!("{} entries for a tensor of size {n}", entries.len()));
        }
        Ok(Self { d, m, entries })
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn range(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.d);
        idx.iter().fold(0, |acc, &k| acc * self.m + k)
    }

    pub fn index_of(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.d];
        for p in (0..self.d).rev() {
            idx[p] = offset % self.m;
            offset /= self.m;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> Complex<T> {
        self.entries[self.offset(idx)]
    }

    pub fn frobenius(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    fn diagonal_offset(&self, k: usize) -> usize {
        let step = (0..self.d).fold(0, |acc, _| acc * self.m + 1);
        k * step
    }

    /// `τ_{k...k}` for each `k`.
    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.m).map(|k| self.entries[self.diagonal_offset(k)]).collect()
    }

    /// Frobenius norm of the entries off the main diagonal.
    pub fn off_diagonal_norm(&self) -> T {
        let step = self.diagonal_offset(1);
        self.entries
            .iter()
            .enumerate()
            .filter(|(o, _)| o % step != 0 || o / step >= self.m)
            .map(|(_, z)| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Largest change of any entry under a swap of two adjacent indices.
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for (o, &z) in self.entries.iter().enumerate() {
            let idx = self.index_of(o);
            for p in 0..self.d - 1 {
                let mut swapped = idx.clone();
                swapped.swap(p, p + 1);
                worst = worst.max((z - self.get(&swapped)).norm());
            }
        }
        worst
    }

    /// The `m x m` matrix of a rank-2 tensor.
    pub fn to_matrix(&self) -> Result<Matrix<T>> {
        if self.d != 2 {
            return dim_err(format!("rank-{} tensor viewed as a matrix", self.d));
        }
        Matrix::from_vec(self.m, self.m, self.entries.clone())
    }

    /// Entries with modulus above `threshold`, as `(indices, value)`.
    pub fn nonzero_entries(&self, threshold: T) -> Vec<(Vec<usize>, Complex<T>)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > threshold)
            .map(|(o, &z)| (self.index_of(o), z))
            .collect()
    }
}

/// Builds the symmetric tensor of an ensemble of square states.
pub fn build_tau<T: Real>(e: &Ensemble<T>) -> Result<TauTensor<T>> {
    let d = e.local_dim()?;
    if d < 2 {
        return dim_err("tensor needs local dimension at least 2");
    }
    let m = e.len();
    let size = checked_size(m, d)?;
    let coeffs: Vec<Matrix<T>> = e.members().iter().map(|phi| phi.amp().conj()).collect();
    let perms = permutations(d);
    let factorial: f64 = (1..=d).map(|k| k as f64).product();
    let scale = T::of((d as f64).powf(d as f64 / 2.0) / factorial);

    let mut t = TauTensor {
        d,
        m,
        entries: vec![Complex::zero(); size],
    };
    let mut idx = vec![0usize; d];
    let mut blend = Matrix::zeros(d, d);
    loop {
        let mut sum = Complex::zero();
        for sigma in &perms {
            for (i, &s) in sigma.iter().enumerate() {
                let src = &coeffs[idx[s]];
                for j in 0..d {
                    blend[(i, j)] = src[(i, j)];
                }
            }
            sum = sum + determinant(&blend)?;
        }
        let value = sum * scale;
        for pi in &perms {
            let permuted: Vec<usize> = pi.iter().map(|&p| idx[p]).collect();
            let o = t.offset(&permuted);
            t.entries[o] = value;
        }
        if !next_multiset(&mut idx, m) {
            break;
        }
    }
    Ok(t)
}

/// `τ'_{l_1...l_d} = Σ U_{l_1 k_1} ... U_{l_d k_d} τ_{k_1...k_d}` for an isometry `U`.
pub fn contract_tau<T: Real>(t: &TauTensor<T>, u: &Matrix<T>) -> Result<TauTensor<T>> {
    if u.cols() != t.m || u.rows() < u.cols() {
        return dim_err(format!(
            "isometry of shape {}x{} for a tensor with index range {}",
            u.rows(),
            u.cols(),
            t.m
        ));
    }
    if u.isometry_defect() > T::tol(1e-10) {
        return invalid(format!("transformation is not an isometry (defect {})", u.isometry_defect()));
    }
    checked_size(u.rows(), t.d)?;
    Ok(contract_unchecked(t, u))
}

pub(crate) fn contract_unchecked<T: Real>(t: &TauTensor<T>, u: &Matrix<T>) -> TauTensor<T> {
    let mut dims = vec![t.m; t.d];
    let mut data = t.entries.clone();
    for mode in 0..t.d {
        data = mode_product(&data, &dims, mode, u);
        dims[mode] = u.rows();
    }
    TauTensor {
        d: t.d,
        m: u.rows(),
        entries: data,
    }
}
