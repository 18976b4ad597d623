use crate::error::{invalid, Result};
use crate::numkit::determinant;
use crate::scalar::Real;
use crate::states::DensityMatrix;
use crate::tau::DiagonalForm;

/// `Σ_k lam_k^{2/d}` of a diagonal form, whether or not it certifies membership.
///
/// For a diagonalizable tensor this is the G-concurrence of assistance; for
/// a non-member it is only the ensemble average of the best diagonal found.
pub fn diagonal_sum<T: Real>(df: &DiagonalForm<T>) -> T {
    let power = T::of(2.0 / df.d as f64);
    df.lam.iter().map(|l| l.powf(power)).sum()
}

fn require_member<T: Real>(df: &DiagonalForm<T>) -> Result<()> {
    if df.member {
        Ok(())
    } else {
        invalid(format!(
            "tensor not certified diagonal (residual {} of norm {}); use the optimizer",
            df.residual, df.norm
        ))
    }
}

/// G-concurrence of assistance `Σ_k lam_k^{2/d}` of a diagonalizable state.
pub fn gcoa_from_diag<T: Real>(df: &DiagonalForm<T>) -> Result<T> {
    require_member(df)?;
    Ok(diagonal_sum(df))
}

/// Bracket on the G-concurrence of a diagonalizable state.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport<T = f64> {
    pub lower: T,
    pub upper: T,
    /// `lam_1 <= Σ_{k>=2} lam_k`, in which case the state has `G = 0`.
    pub separable: bool,
    pub lam: Vec<T>,
}

/// `lam_1^{2/d} - Σ lam_k^{2/d} <= G <= |lam_1 - Σ lam_k|^{2/d}`, or `G = 0`
/// when `lam_1` does not exceed the rest.
pub fn gc_bounds<T: Real>(df: &DiagonalForm<T>) -> Result<BoundsReport<T>> {
    require_member(df)?;
    let power = T::of(2.0 / df.d as f64);
    let (first, rest) = match df.lam.split_first() {
        Some((&f, r)) => (f, r),
        None => (T::zero(), &[][..]),
    };
    let rest_sum: T = rest.iter().copied().sum();
    let separable = first <= rest_sum;
    let (lower, upper) = if separable {
        (T::zero(), T::zero())
    } else {
        let lower = first.powf(power) - rest.iter().map(|l| l.powf(power)).sum::<T>();
        let upper = (first - rest_sum).abs().powf(power);
        (lower.max(T::zero()).min(upper), upper)
    };
    Ok(BoundsReport {
        lower,
        upper,
        separable,
        lam: df.lam.clone(),
    })
}

/// `d det(rho_A)^{1/d}`, an upper bound on the G-concurrence of assistance of any state.
///
/// Every member of a decomposition has `G = d det(A A^†)^{1/d}` and the
/// Minkowski determinant inequality bounds the sum by the same function of
/// `rho_A = Σ A A^†`.
pub fn gcoa_ceiling<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let d = rho.local_dim()?;
    let det = determinant(&rho.reduce_to_a())?.re.max(T::zero());
    Ok(T::of(d as f64) * det.powf(T::one() / T::of(d as f64)))
}
