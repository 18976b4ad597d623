//! G-concurrence of pure bipartite states and its d = 2 mixed-state closed form.
//!
//! For a `d x d` coefficient matrix `A`, `G = d |det A|^{2/d}`, the
//! geometric mean of the Schmidt numbers times `d`. The formula is applied
//! directly to sub-normalized vectors, which makes `G` homogeneous of degree
//! two in the amplitudes: `G(c psi) = |c|^2 G(psi)`.

use num_complex::Complex;

use crate::error::{dim_err, invalid, Result};
use crate::numkit::{determinant, hermitian_eig, takagi, Matrix};
use crate::scalar::Real;
use crate::states::{DensityMatrix, Ensemble, PureBipartite};

/// `d |det A|^{2/d}` for a square pure state.
pub fn g_pure<T: Real>(psi: &PureBipartite<T>) -> Result<T> {
    let d = psi.local_dim()?;
    Ok(g_of_amplitudes(psi.amp(), d))
}

pub(crate) fn g_of_amplitudes<T: Real>(amp: &Matrix<T>, d: usize) -> T {
    let det = determinant(amp).expect("square amplitude matrix");
    let modulus = det.norm();
    if modulus.is_zero() {
        return T::zero();
    }
    (T::of(d as f64) * modulus.powf(T::of(2.0 / d as f64))).max(T::zero())
}

/// `Σ_l G(chi_l)` over sub-normalized members.
pub fn ensemble_avg_g<T: Real>(e: &Ensemble<T>) -> Result<T> {
    let d = e.local_dim()?;
    Ok(e.members().iter().map(|m| g_of_amplitudes(m.amp(), d)).sum())
}

/// Result of a local filter `F_A ⊗ F_B`.
#[derive(Clone, Debug)]
pub struct Filtered<T = f64> {
    /// `(F_A ⊗ F_B)|psi>`, not renormalized.
    pub state: PureBipartite<T>,
    /// `|det F_A|^{2/d} |det F_B|^{2/d}`.
    pub gfactor: T,
}

/// Applies contractive local operators; `G` of the output equals `gfactor * G(psi)`.
pub fn apply_local_filter<T: Real>(
    psi: &PureBipartite<T>,
    fa: &Matrix<T>,
    fb: &Matrix<T>,
) -> Result<Filtered<T>> {
    let d = psi.local_dim()?;
    for (name, f) in [("F_A", fa), ("F_B", fb)] {
        if f.rows() != d || f.cols() != d {
            return dim_err(format!("{name} is {}x{}, state has d = {d}", f.rows(), f.cols()));
        }
        let top = hermitian_eig(&f.adjoint().matmul(f))?.values[0];
        if top > T::one() + T::tol(1e-10) {
            return invalid(format!("{name} has operator norm {} > 1", top.sqrt()));
        }
    }
    // (F_A ⊗ F_B) Σ a_ij |i>|j> has coefficient matrix F_A A F_B^T.
    let amp = fa.matmul(psi.amp()).matmul(&fb.transpose());
    let power = T::of(2.0 / d as f64);
    let gfactor = determinant(fa)?.norm().powf(power) * determinant(fb)?.norm().powf(power);
    Ok(Filtered {
        state: PureBipartite::new(amp)?,
        gfactor,
    })
}

/// `σ_y ⊗ σ_y` in the i-major two-qubit basis.
pub fn spin_flip<T: Real>() -> Matrix<T> {
    let one = Complex::new(T::one(), T::zero());
    let mut m = Matrix::zeros(4, 4);
    m[(0, 3)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 0)] = -one;
    m
}

/// Wootters concurrence `max(0, s1 - s2 - s3 - s4)` of a two-qubit state.
///
/// The `s_i` are the square roots of the eigenvalues of `rho rho~` with
/// `rho~ = (σ_y ⊗ σ_y) rho* (σ_y ⊗ σ_y)`. With `rho = W W^†` they are the
/// singular values of the symmetric matrix `W^T (σ_y ⊗ σ_y) W`.
pub fn wootters_concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    if rho.dims() != (2, 2) {
        let (a, b) = rho.dims();
        return dim_err(format!("Wootters concurrence needs a 2x2 state, got {a}x{b}"));
    }
    let eig = hermitian_eig(rho.matrix())?;
    let w = Matrix::from_fn(4, 4, |i, k| eig.vectors[(i, k)] * eig.values[k].max(T::zero()).sqrt());
    let tau = w.transpose().matmul(&spin_flip()).matmul(&w);
    let half = T::of(0.5);
    let tau = Matrix::from_fn(4, 4, |i, j| (tau[(i, j)] + tau[(j, i)]) * half);
    let s = takagi(&tau)?.values;
    Ok((s[0] - s[1] - s[2] - s[3]).max(T::zero()))
}
