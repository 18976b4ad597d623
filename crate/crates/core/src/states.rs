//! Pure bipartite and tripartite states, density matrices, sub-normalized
//! ensembles and rank-one POVMs.
//!
//! Product bases are ordered i-major: the A index is the most significant,
//! so `|i>|j>` sits at position `i * d_B + j` and `|i>|j>|s>` at
//! `(i * d_B + j) * n_S + s`.
//!
//! Ensemble members carry their probability as their squared norm. Nothing
//! stores probabilities separately.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{dim_err, invalid, Result};
use crate::numkit::matrix::inner;
use crate::numkit::{complete_unitary, hermitian_eig, Matrix};
use crate::scalar::Real;

/// `Σ a_ij |i>|j>`, possibly sub-normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct PureBipartite<T = f64> {
    amp: Matrix<T>,
}

impl<T: Real> PureBipartite<T> {
    /// Wraps a coefficient matrix without normalization checks.
    pub fn new(amp: Matrix<T>) -> Result<Self> {
        if !amp.is_finite() {
            return invalid("non-finite amplitude");
        }
        if amp.rows() == 0 || amp.cols() == 0 {
            return dim_err("empty local dimension");
        }
        Ok(Self { amp })
    }

    /// Wraps a coefficient matrix and requires unit norm within `1e-10`.
    pub fn normalized(amp: Matrix<T>) -> Result<Self> {
        let s = Self::new(amp)?;
        let n = s.norm_sqr();
        if (n - T::one()).abs() > T::tol(1e-10) {
            return invalid(format!("state norm^2 is {n}, expected 1"));
        }
        Ok(s)
    }

    /// From an i-major amplitude vector of length `d_a * d_b`.
    pub fn from_vector(d_a: usize, d_b: usize, v: Vec<Complex<T>>) -> Result<Self> {
        Self::new(Matrix::from_vec(d_a, d_b, v)?)
    }

    pub fn amp(&self) -> &Matrix<T> {
        &self.amp
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.amp.rows(), self.amp.cols())
    }

    /// Local dimension for square states.
    pub fn local_dim(&self) -> Result<usize> {
        if !self.amp.is_square() {
            return dim_err(format!(
                "local dimensions {}x{} differ",
                self.amp.rows(),
                self.amp.cols()
            ));
        }
        Ok(self.amp.rows())
    }

    pub fn norm_sqr(&self) -> T {
        self.amp.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn to_vector(&self) -> Vec<Complex<T>> {
        self.amp.as_slice().to_vec()
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self { amp: self.amp.scale(c) }
    }

    /// Unit-norm copy; `None` for the zero vector.
    pub fn normalize(&self) -> Option<Self> {
        let n = self.norm_sqr().sqrt();
        if n.is_zero() {
            return None;
        }
        Some(self.scaled(Complex::new(T::one() / n, T::zero())))
    }

    /// `|psi><psi|` (unnormalized if the state is).
    pub fn outer(&self) -> Matrix<T> {
        let v = self.to_vector();
        Matrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn projector(&self) -> Result<DensityMatrix<T>> {
        let (a, b) = self.dims();
        DensityMatrix::new(a, b, self.outer())
    }
}

/// Schmidt form `Σ_k c_k |u_k>|v_k>`.
#[derive(Clone, Debug)]
pub struct Schmidt<T = f64> {
    pub coeffs: Vec<T>,
    /// Columns are the `u_k`.
    pub left: Matrix<T>,
    /// Columns are the `v_k`.
    pub right: Matrix<T>,
}

impl<T: Real> Schmidt<T> {
    pub fn reconstruct(&self) -> Matrix<T> {
        let (da, db) = (self.left.rows(), self.right.rows());
        Matrix::from_fn(da, db, |i, j| {
            self.coeffs.iter().enumerate().fold(Complex::zero(), |acc, (k, &c)| {
                acc + self.left[(i, k)] * self.right[(j, k)] * c
            })
        })
    }
}

/// Schmidt decomposition of a normalized pure state.
pub fn schmidt<T: Real>(psi: &PureBipartite<T>) -> Result<Schmidt<T>> {
    let n = psi.norm_sqr();
    if (n - T::one()).abs() > T::tol(1e-10) {
        return invalid(format!("Schmidt decomposition needs a normalized state (norm^2 {n})"));
    }
    let a = psi.amp();
    let (da, db) = psi.dims();
    let r = da.min(db);
    let eig = hermitian_eig(&a.matmul(&a.adjoint()))?;
    let a_adj = a.adjoint();
    let cutoff = T::tol(1e-14);
    let mut coeffs = Vec::with_capacity(r);
    let mut left_cols = Vec::with_capacity(r);
    let mut right_cols = Vec::with_capacity(r);
    for k in 0..r {
        let c = eig.values[k].max(T::zero()).sqrt();
        let u = eig.vectors.col(k);
        coeffs.push(c);
        if c > cutoff {
            // A^† u_k = c_k conj(v_k)
            let v: Vec<Complex<T>> = a_adj.mul_vec(&u).into_iter().map(|z| z.conj() / c).collect();
            right_cols.push(v);
        }
        left_cols.push(u);
    }
    let left = complete_unitary(&left_cols, da);
    let right = complete_unitary(&right_cols, db);
    Ok(Schmidt { coeffs, left, right })
}

/// Normalized pure state on `A ⊗ B ⊗ S`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureTripartite<T = f64> {
    dims: (usize, usize, usize),
    amp: Vec<Complex<T>>,
}

impl<T: Real> PureTripartite<T> {
    pub fn new(dims: (usize, usize, usize), amp: Vec<Complex<T>>) -> Result<Self> {
        let (a, b, s) = dims;
        if a == 0 || b == 0 || s == 0 {
            return dim_err("empty subsystem");
        }
        if amp.len() != a * b * s {
            return dim_err(format!("{} amplitudes for dims {a}x{b}x{s}", amp.len()));
        }
        if amp.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return invalid("non-finite amplitude");
        }
        let n: T = amp.iter().map(|z| z.norm_sqr()).sum();
        if (n - T::one()).abs() > T::tol(1e-10) {
            return invalid(format!("tripartite state norm^2 is {n}, expected 1"));
        }
        Ok(Self { dims, amp })
    }

    /// `Σ_k |phi_k>|k>_S` from sub-normalized members.
    pub fn from_ensemble(e: &Ensemble<T>) -> Result<Self> {
        let (a, b) = e.dims();
        let s = e.len();
        let mut amp = vec![Complex::zero(); a * b * s];
        for (k, m) in e.members().iter().enumerate() {
            for (ij, z) in m.amp().as_slice().iter().enumerate() {
                amp[ij * s + k] = *z;
            }
        }
        Self::new((a, b, s), amp)
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amp
    }

    pub fn at(&self, i: usize, j: usize, s: usize) -> Complex<T> {
        let (_, b, n) = self.dims;
        self.amp[(i * b + j) * n + s]
    }

    /// Unnormalized AB vector `(<w|_S) |psi>` for a vector `w` on S.
    pub fn project_s(&self, w: &[Complex<T>]) -> PureBipartite<T> {
        let (a, b, n) = self.dims;
        let amp = Matrix::from_fn(a, b, |i, j| {
            (0..n).fold(Complex::zero(), |acc, s| acc + w[s].conj() * self.at(i, j, s))
        });
        PureBipartite { amp }
    }

    /// Applies an operator on A: `(F ⊗ I ⊗ I)|psi>`, unnormalized.
    pub fn apply_on_a(&self, f: &Matrix<T>) -> Result<Vec<Complex<T>>> {
        let (a, b, n) = self.dims;
        if f.cols() != a {
            return dim_err("operator does not act on subsystem A");
        }
        let out_a = f.rows();
        let mut out = vec![Complex::zero(); out_a * b * n];
        for r in 0..out_a {
            for i in 0..a {
                let c = f[(r, i)];
                if c.is_zero() {
                    continue;
                }
                for jb in 0..b * n {
                    out[r * b * n + jb] = out[r * b * n + jb] + c * self.amp[i * b * n + jb];
                }
            }
        }
        Ok(out)
    }
}

/// Subsystem pair kept by [`partial_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    AB,
    AS,
    BS,
}

/// Density matrix on `A ⊗ B`, i-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T = f64> {
    dim_a: usize,
    dim_b: usize,
    mat: Matrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity (1e-10), unit trace (1e-10) and positivity (-1e-10).
    pub fn new(dim_a: usize, dim_b: usize, mat: Matrix<T>) -> Result<Self> {
        Self::with_tolerance(dim_a, dim_b, mat, T::tol(1e-10))
    }

    pub fn with_tolerance(dim_a: usize, dim_b: usize, mat: Matrix<T>, tol: T) -> Result<Self> {
        let n = dim_a * dim_b;
        if n == 0 || mat.rows() != n || mat.cols() != n {
            return dim_err(format!(
                "{}x{} matrix for local dims {dim_a}x{dim_b}",
                mat.rows(),
                mat.cols()
            ));
        }
        if !mat.is_finite() {
            return invalid("non-finite density matrix entry");
        }
        if mat.hermitian_defect() > tol {
            return invalid(format!("density matrix not Hermitian (defect {})", mat.hermitian_defect()));
        }
        let tr = mat.trace().re;
        if (tr - T::one()).abs() > tol {
            return invalid(format!("density matrix trace {tr}"));
        }
        let eig = hermitian_eig(&mat)?;
        let min = *eig.values.last().unwrap();
        if min < -tol {
            return invalid(format!("density matrix has eigenvalue {min}"));
        }
        Ok(Self { dim_a, dim_b, mat })
    }

    pub(crate) fn from_parts_unchecked(dim_a: usize, dim_b: usize, mat: Matrix<T>) -> Self {
        Self { dim_a, dim_b, mat }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn local_dim(&self) -> Result<usize> {
        if self.dim_a != self.dim_b {
            return dim_err(format!("local dimensions {}x{} differ", self.dim_a, self.dim_b));
        }
        Ok(self.dim_a)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.mat
    }

    /// Reduced state on A.
    pub fn reduce_to_a(&self) -> Matrix<T> {
        let (a, b) = (self.dim_a, self.dim_b);
        Matrix::from_fn(a, a, |i, k| {
            (0..b).fold(Complex::zero(), |acc, j| acc + self.mat[(i * b + j, k * b + j)])
        })
    }

    /// Mixture `Σ w_k rho_k` of density matrices with equal dims.
    pub fn mixture(parts: &[(T, &DensityMatrix<T>)]) -> Result<Self> {
        let (a, b) = parts.first().map(|p| p.1.dims()).ok_or_else(|| {
            crate::Error::Validation("empty mixture".into())
        })?;
        let mut m = Matrix::zeros(a * b, a * b);
        for (w, r) in parts {
            if r.dims() != (a, b) {
                return dim_err("mixture of density matrices with different dims");
            }
            m = &m + &r.mat.scale_real(*w);
        }
        Self::new(a, b, m)
    }
}

/// Reduced density matrix of a tripartite pure state.
pub fn partial_trace<T: Real>(psi: &PureTripartite<T>, keep: Keep) -> DensityMatrix<T> {
    let (a, b, s) = psi.dims();
    let (d1, d2) = match keep {
        Keep::AB => (a, b),
        Keep::AS => (a, s),
        Keep::BS => (b, s),
    };
    let traced = match keep {
        Keep::AB => s,
        Keep::AS => b,
        Keep::BS => a,
    };
    let amp = |x: usize, y: usize, t: usize| match keep {
        Keep::AB => psi.at(x, y, t),
        Keep::AS => psi.at(x, t, y),
        Keep::BS => psi.at(t, x, y),
    };
    let n = d1 * d2;
    let mat = Matrix::from_fn(n, n, |r, c| {
        let (x, y) = (r / d2, r % d2);
        let (x2, y2) = (c / d2, c % d2);
        (0..traced).fold(Complex::zero(), |acc, t| acc + amp(x, y, t) * amp(x2, y2, t).conj())
    });
    DensityMatrix::from_parts_unchecked(d1, d2, mat)
}

/// Decomposition `rho = Σ_l |chi_l><chi_l|` into sub-normalized pure states.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<T = f64> {
    members: Vec<PureBipartite<T>>,
}

impl<T: Real> Ensemble<T> {
    /// Requires equal member dims and total weight `1 ± 1e-9`.
    pub fn new(members: Vec<PureBipartite<T>>) -> Result<Self> {
        let Some(first) = members.first() else {
            return dim_err("ensemble with no members");
        };
        let dims = first.dims();
        if members.iter().any(|m| m.dims() != dims) {
            return dim_err("ensemble members with different dims");
        }
        let total: T = members.iter().map(|m| m.norm_sqr()).sum();
        if (total - T::one()).abs() > T::tol(1e-9) {
            return invalid(format!("ensemble weights sum to {total}"));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[PureBipartite<T>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.members[0].dims()
    }

    pub fn local_dim(&self) -> Result<usize> {
        self.members[0].local_dim()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.members.iter().map(|m| m.norm_sqr()).collect()
    }

    /// `Σ_l |chi_l><chi_l|` without the density-matrix validation.
    pub fn density_matrix_raw(&self) -> Matrix<T> {
        let (a, b) = self.dims();
        let n = a * b;
        let mut m = Matrix::zeros(n, n);
        for member in &self.members {
            m = &m + &member.outer();
        }
        m
    }

    pub fn density_matrix(&self) -> Result<DensityMatrix<T>> {
        let (a, b) = self.dims();
        DensityMatrix::new(a, b, self.density_matrix_raw())
    }

    /// Appends zero members up to `m` total.
    pub fn padded(&self, m: usize) -> Self {
        let (a, b) = self.dims();
        let mut members = self.members.clone();
        while members.len() < m {
            members.push(PureBipartite { amp: Matrix::zeros(a, b) });
        }
        Self { members }
    }
}

/// Spectral ensemble: eigenvectors scaled by the square root of their eigenvalue.
///
/// Eigenvalues below `1e-12 * trace` are dropped.
pub fn eigen_ensemble<T: Real>(rho: &DensityMatrix<T>) -> Result<Ensemble<T>> {
    let (a, b) = rho.dims();
    let eig = hermitian_eig(rho.matrix())?;
    let cutoff = T::tol(1e-12) * rho.matrix().trace().re;
    let mut members = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= cutoff {
            break;
        }
        let s = lam.sqrt();
        let v: Vec<Complex<T>> = eig.vectors.col(k).into_iter().map(|z| z * s).collect();
        members.push(PureBipartite::from_vector(a, b, v)?);
    }
    if members.is_empty() {
        return invalid("density matrix has no eigenvalue above the rank cutoff");
    }
    Ok(Ensemble { members })
}

/// `|chi_l> = Σ_k conj(U_lk) |phi_k>` for an `m' x m` isometry `U`.
pub fn transform_ensemble<T: Real>(e: &Ensemble<T>, u: &Matrix<T>) -> Result<Ensemble<T>> {
    if u.cols() != e.len() || u.rows() < u.cols() {
        return dim_err(format!(
            "isometry of shape {}x{} for an ensemble of {} members",
            u.rows(),
            u.cols(),
            e.len()
        ));
    }
    if u.isometry_defect() > T::tol(1e-10) {
        return invalid(format!("transformation is not an isometry (defect {})", u.isometry_defect()));
    }
    Ok(mix_members(e, u))
}

/// `Σ_k conj(U_lk) phi_k` for every row `l`, unchecked.
pub(crate) fn mix_members<T: Real>(e: &Ensemble<T>, u: &Matrix<T>) -> Ensemble<T> {
    let (a, b) = e.dims();
    let members = (0..u.rows())
        .map(|l| {
            let mut amp = Matrix::zeros(a, b);
            for (k, phi) in e.members.iter().enumerate() {
                let c = u[(l, k)].conj();
                if c.is_zero() {
                    continue;
                }
                amp = &amp + &phi.amp.scale(c);
            }
            PureBipartite { amp }
        })
        .collect();
    Ensemble { members }
}

/// Rank-one POVM `E_l = |v_l><v_l|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<T = f64> {
    dim: usize,
    vectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> Povm<T> {
    /// Requires `Σ_l |v_l><v_l| = I` within `1e-10`.
    pub fn new(dim: usize, vectors: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if dim == 0 || vectors.is_empty() || vectors.iter().any(|v| v.len() != dim) {
            return dim_err("POVM vectors must be non-empty and share the support dimension");
        }
        let p = Self { dim, vectors };
        let defect = p.completeness().max_abs_diff(&Matrix::identity(dim));
        if defect > T::tol(1e-10) {
            return invalid(format!("POVM elements do not sum to identity (defect {defect})"));
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<Complex<T>>] {
        &self.vectors
    }

    pub fn element(&self, l: usize) -> Matrix<T> {
        let v = &self.vectors[l];
        Matrix::from_fn(self.dim, self.dim, |i, j| v[i] * v[j].conj())
    }

    pub fn completeness(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for l in 0..self.len() {
            m = &m + &self.element(l);
        }
        m
    }
}

/// POVM with vectors `|v_l> = Σ_{k<n} U_lk |k>`.
pub fn povm_from_unitary<T: Real>(u: &Matrix<T>, n: usize) -> Result<Povm<T>> {
    if !u.is_square() {
        return dim_err("POVM construction needs a square unitary");
    }
    if n == 0 || n > u.rows() {
        return dim_err(format!("support dimension {n} exceeds unitary size {}", u.rows()));
    }
    if u.isometry_defect() > T::tol(1e-10) {
        return invalid("POVM construction needs a unitary matrix");
    }
    let vectors = (0..u.rows())
        .map(|l| (0..n).map(|k| u[(l, k)]).collect())
        .collect();
    Povm::new(n, vectors)
}

/// One measurement outcome on S.
#[derive(Clone, Debug)]
pub struct Outcome<T = f64> {
    pub probability: T,
    /// Normalized post-measurement AB state; zero when the probability is zero.
    pub state: PureBipartite<T>,
}

/// Measures S with a rank-one POVM.
pub fn apply_povm<T: Real>(psi: &PureTripartite<T>, povm: &Povm<T>) -> Result<Vec<Outcome<T>>> {
    let (_, _, n) = psi.dims();
    if povm.dim() != n {
        return dim_err(format!("POVM on {} dims, S has {n}", povm.dim()));
    }
    Ok(povm
        .vectors()
        .iter()
        .map(|v| {
            let raw = psi.project_s(v);
            let probability = raw.norm_sqr();
            let state = raw.normalize().unwrap_or(raw);
            Outcome { probability, state }
        })
        .collect())
}

/// `|<a|b>|` for equal-shape states; used by callers comparing outcomes up to phase.
pub fn overlap<T: Real>(a: &PureBipartite<T>, b: &PureBipartite<T>) -> T {
    inner(a.amp.as_slice(), b.amp.as_slice()).norm()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::numkit::{gaussian_matrix, haar_unitary, random_unit_vector, Seed};
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn basis_state(d: usize, i: usize, j: usize) -> PureBipartite<f64> {
        let mut m = Matrix::zeros(d, d);
        m[(i, j)] = c(1.0);
        PureBipartite::normalized(m).unwrap()
    }

    fn bell() -> PureBipartite<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureBipartite::normalized(Matrix::from_real_diag(&[s, s])).unwrap()
    }

    fn ghz() -> PureTripartite<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amp = vec![c(0.0); 8];
        amp[0] = c(s);
        amp[7] = c(s);
        PureTripartite::new((2, 2, 2), amp).unwrap()
    }

    pub(crate) fn random_density(d: usize, rank: usize, seed: u64) -> DensityMatrix<f64> {
        let g = gaussian_matrix::<f64, _>(d * d, rank, &mut Seed(seed).rng());
        let m = g.matmul(&g.adjoint());
        let tr = m.trace().re;
        DensityMatrix::new(d, d, m.scale_real(1.0 / tr)).unwrap()
    }

    #[test]
    fn schmidt_product_and_bell() {
        let s = schmidt(&basis_state(2, 0, 0)).unwrap();
        assert_abs_diff_eq!(s.coeffs[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.coeffs[1], 0.0, epsilon = 1e-14);
        let s = schmidt(&bell()).unwrap();
        for &x in &s.coeffs {
            assert_abs_diff_eq!(x, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        }
    }

    #[test]
    fn schmidt_random_reconstruction() {
        for seed in 0..10 {
            let v = random_unit_vector::<f64, _>(16, &mut Seed(seed).rng());
            let psi = PureBipartite::from_vector(4, 4, v).unwrap();
            let s = schmidt(&psi).unwrap();
            assert_abs_diff_eq!(s.coeffs.iter().map(|x| x * x).sum::<f64>(), 1.0, epsilon = 1e-9);
            assert!(s.reconstruct().max_abs_diff(psi.amp()) <= 1e-9);
            assert!(s.left.isometry_defect() < 1e-10 && s.right.isometry_defect() < 1e-10);
        }
        // non-square local dims and rank deficiency
        let v = random_unit_vector::<f64, _>(6, &mut Seed(3).rng());
        let psi = PureBipartite::from_vector(2, 3, v).unwrap();
        assert!(schmidt(&psi).unwrap().reconstruct().max_abs_diff(psi.amp()) <= 1e-9);
    }

    #[test]
    fn schmidt_rejects_unnormalized() {
        let psi = bell().scaled(c(0.5));
        assert!(matches!(schmidt(&psi), Err(crate::Error::Validation(_))));
    }

    #[test]
    fn partial_trace_ghz() {
        let rho = partial_trace(&ghz(), Keep::AB);
        let mut expect = Matrix::zeros(4, 4);
        expect[(0, 0)] = c(0.5);
        expect[(3, 3)] = c(0.5);
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn partial_trace_product_factor() {
        let v = random_unit_vector::<f64, _>(9, &mut Seed(8).rng());
        let psi = PureBipartite::from_vector(3, 3, v).unwrap();
        let mut amp = vec![c(0.0); 9 * 2];
        for (ij, z) in psi.to_vector().into_iter().enumerate() {
            amp[ij * 2] = z;
        }
        let t = PureTripartite::new((3, 3, 2), amp).unwrap();
        assert!(partial_trace(&t, Keep::AB).matrix().max_abs_diff(&psi.outer()) < 1e-15);
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity() {
        for seed in 0..10 {
            let v = random_unit_vector::<f64, _>(2 * 3 * 4, &mut Seed(seed).rng());
            let t = PureTripartite::new((2, 3, 4), v).unwrap();
            for keep in [Keep::AB, Keep::AS, Keep::BS] {
                let r = partial_trace(&t, keep);
                assert_abs_diff_eq!(r.matrix().trace().re, 1.0, epsilon = 1e-12);
                let (a, b) = r.dims();
                DensityMatrix::new(a, b, r.matrix().clone()).unwrap();
            }
        }
    }

    #[test]
    fn eigen_ensemble_of_pure_state() {
        let e = eigen_ensemble(&bell().projector().unwrap()).unwrap();
        assert_eq!(e.len(), 1);
        assert_abs_diff_eq!(e.members()[0].norm_sqr(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigen_ensemble_example_two_state() {
        // rho = p |chi><chi| + (1 - p)|01><01| at p = 0.5, d = 3
        let chi = PureBipartite::normalized(Matrix::<f64>::identity(3).scale_real(1.0 / 3f64.sqrt())).unwrap();
        let rho = DensityMatrix::mixture(&[
            (0.5, &chi.projector().unwrap()),
            (0.5, &basis_state(3, 0, 1).projector().unwrap()),
        ])
        .unwrap();
        let e = eigen_ensemble(&rho).unwrap();
        assert_eq!(e.len(), 2);
        for m in e.members() {
            assert_abs_diff_eq!(m.norm_sqr(), 0.5, epsilon = 1e-12);
            let o1 = overlap(m, &chi);
            let o2 = overlap(m, &basis_state(3, 0, 1));
            assert!((o1 - 0.5f64.sqrt()).abs() < 1e-12 || (o2 - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn eigen_ensemble_weights_and_orthogonality() {
        for seed in 0..10 {
            let rho = random_density(3, 1 + (seed as usize % 9), seed);
            let e = eigen_ensemble(&rho).unwrap();
            assert_abs_diff_eq!(e.probabilities().iter().sum::<f64>(), 1.0, epsilon = 1e-10);
            for i in 0..e.len() {
                for j in 0..i {
                    let o = inner(e.members()[i].amp().as_slice(), e.members()[j].amp().as_slice());
                    assert!(o.norm() < 1e-9);
                }
            }
            assert!(e.density_matrix_raw().max_abs_diff(rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn transform_identity_and_split() {
        let rho = random_density(2, 3, 4);
        let e = eigen_ensemble(&rho).unwrap();
        let same = transform_ensemble(&e, &Matrix::identity(e.len())).unwrap();
        assert_eq!(same, e);

        let one = Ensemble::new(vec![bell()]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let iso = Matrix::from_vec(2, 1, vec![c(s), c(s)]).unwrap();
        let split = transform_ensemble(&one, &iso).unwrap();
        assert_eq!(split.len(), 2);
        for m in split.members() {
            assert!(m.amp().max_abs_diff(&bell().amp().scale_real(s)) < 1e-15);
        }
    }

    #[test]
    fn transform_reconstructs_density() {
        for seed in 0..20 {
            let d = 2 + (seed as usize % 2);
            let rho = random_density(d, 1 + seed as usize % (d * d), 100 + seed);
            let e = eigen_ensemble(&rho).unwrap();
            let m = e.len() + (seed as usize % 3);
            let u: Matrix<f64> = haar_unitary(m, Seed(seed)).unwrap();
            let iso = u.leading_cols(e.len());
            let t = transform_ensemble(&e, &iso).unwrap();
            assert_eq!(t.len(), m);
            assert!(t.density_matrix_raw().max_abs_diff(rho.matrix()) <= 1e-10);
        }
    }

    #[test]
    fn transform_rejects_non_isometry() {
        let e = Ensemble::new(vec![bell()]).unwrap();
        let bad = Matrix::from_vec(2, 1, vec![c(1.0), c(1.0)]).unwrap();
        assert!(matches!(transform_ensemble(&e, &bad), Err(crate::Error::Validation(_))));
    }

    #[test]
    fn povm_identity_and_balanced() {
        let p = povm_from_unitary(&Matrix::<f64>::identity(3), 3).unwrap();
        for l in 0..3 {
            let mut e = Matrix::zeros(3, 3);
            e[(l, l)] = c(1.0);
            assert!(p.element(l).max_abs_diff(&e) < 1e-15);
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = Matrix::from_vec(2, 2, vec![c(s), c(s), c(s), c(-s)]).unwrap();
        let p = povm_from_unitary(&h, 2).unwrap();
        let plus = Matrix::from_vec(2, 2, vec![c(0.5), c(0.5), c(0.5), c(0.5)]).unwrap();
        let minus = Matrix::from_vec(2, 2, vec![c(0.5), c(-0.5), c(-0.5), c(0.5)]).unwrap();
        assert!(p.element(0).max_abs_diff(&plus) < 1e-15);
        assert!(p.element(1).max_abs_diff(&minus) < 1e-15);
    }

    #[test]
    fn povm_from_haar_is_complete() {
        for seed in 0..10 {
            let u: Matrix<f64> = haar_unitary(5, Seed(seed)).unwrap();
            let p = povm_from_unitary(&u, 3).unwrap();
            assert_eq!(p.len(), 5);
            assert!(p.completeness().max_abs_diff(&Matrix::identity(3)) < 1e-10);
        }
        assert!(povm_from_unitary(&Matrix::<f64>::identity(2), 3).is_err());
    }

    #[test]
    fn ghz_balanced_measurement() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = Matrix::from_vec(2, 2, vec![c(s), c(s), c(s), c(-s)]).unwrap();
        let out = apply_povm(&ghz(), &povm_from_unitary(&h, 2).unwrap()).unwrap();
        let phi_minus = PureBipartite::normalized(Matrix::from_real_diag(&[s, -s])).unwrap();
        assert_abs_diff_eq!(out[0].probability, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1].probability, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(overlap(&out[0].state, &bell()), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(overlap(&out[1].state, &phi_minus), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn projective_schmidt_measurement() {
        let rho = random_density(2, 3, 77);
        let e = eigen_ensemble(&rho).unwrap();
        let psi = PureTripartite::from_ensemble(&e).unwrap();
        let out = apply_povm(&psi, &povm_from_unitary(&Matrix::identity(e.len()), e.len()).unwrap()).unwrap();
        for (o, m) in out.iter().zip(e.members()) {
            assert_abs_diff_eq!(o.probability, m.norm_sqr(), epsilon = 1e-14);
            assert_abs_diff_eq!(overlap(&o.state, &m.normalize().unwrap()), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn povm_mixture_reproduces_reduced_state() {
        for seed in 0..50 {
            let dims = (2 + seed as usize % 2, 2, 2 + seed as usize % 3);
            let v = random_unit_vector::<f64, _>(dims.0 * dims.1 * dims.2, &mut Seed(seed).rng());
            let psi = PureTripartite::new(dims, v).unwrap();
            let m = dims.2 + seed as usize % 2;
            let u: Matrix<f64> = haar_unitary(m, Seed(1000 + seed)).unwrap();
            let out = apply_povm(&psi, &povm_from_unitary(&u, dims.2).unwrap()).unwrap();
            assert_abs_diff_eq!(out.iter().map(|o| o.probability).sum::<f64>(), 1.0, epsilon = 1e-10);
            let n = dims.0 * dims.1;
            let mut mix = Matrix::zeros(n, n);
            for o in &out {
                mix = &mix + &o.state.outer().scale_real(o.probability);
            }
            assert!(mix.max_abs_diff(partial_trace(&psi, Keep::AB).matrix()) <= 1e-9);
        }
    }

    #[test]
    fn povm_dimension_mismatch() {
        let p = povm_from_unitary(&Matrix::<f64>::identity(3), 3).unwrap();
        assert!(matches!(apply_povm(&ghz(), &p), Err(crate::Error::Dimension(_))));
    }

    #[test]
    fn density_validation() {
        let mut m = Matrix::<f64>::identity(4).scale_real(0.25);
        assert!(DensityMatrix::new(2, 2, m.clone()).is_ok());
        m[(0, 0)] = c(0.5);
        assert!(DensityMatrix::new(2, 2, m.clone()).is_err());
        assert!(DensityMatrix::new(2, 3, Matrix::<f64>::identity(4)).is_err());
        let neg = Matrix::<f64>::from_real_diag(&[1.2, -0.2, 0.0, 0.0]);
        assert!(DensityMatrix::new(2, 2, neg).is_err());
    }
}
