use num_complex::Complex;

use super::DiagonalForm;
use crate::error::{dim_err, invalid, Result};
use crate::numkit::Matrix;
use crate::scalar::Real;
use crate::states::{transform_ensemble, Ensemble};

/// `d^2 x d^2` unitary whose entries all satisfy `U_lk^d = d^{-d}`.
///
/// Row `(a, j)` and column `(b, j')` hold `ω^{(j+a)(j'+b) - ab} / d` with
/// `ω = e^{2πi/d}`.
pub fn phase_unitary<T: Real>(d: usize) -> Result<Matrix<T>> {
    if d < 2 {
        return dim_err(format!("phase-cancelling unitary needs d >= 2, got {d}"));
    }
    let n = d * d;
    let inv = T::one() / T::of(d as f64);
    let unit = T::of(2.0) * T::PI() / T::of(d as f64);
    Ok(Matrix::from_fn(n, n, |row, col| {
        let (a, j) = (row / d, row % d);
        let (b, jp) = (col / d, col % d);
        let e = ((j + a) * (jp + b) + d * d - (a * b) % d) % d;
        Complex::from_polar(inv, unit * T::of(e as f64))
    }))
}

/// Decomposition whose members all have `G = |Σ_k λ_k e^{iθ_k}|^{2/d} / d^2`.
///
/// `e` is the ensemble the diagonal form was computed for. Its members are
/// brought to diagonal form by `df.u`, padded with zero members to `d^2`,
/// rotated by `diag(e^{iθ_k/d})` and mixed by [`phase_unitary`].
pub fn cancellation_decomposition<T: Real>(
    e: &Ensemble<T>,
    df: &DiagonalForm<T>,
    thetas: &[T],
) -> Result<Ensemble<T>> {
    if !df.member {
        return invalid(format!(
            "tensor is not diagonalizable (residual {} of norm {})",
            df.residual, df.norm
        ));
    }
    let d = df.d;
    let n = d * d;
    if thetas.len() != n {
        return dim_err(format!("{} angles supplied, {n} required", thetas.len()));
    }
    let m = e.len();
    if df.u.rows() != m || e.local_dim()? != d {
        return dim_err("diagonal form does not match the ensemble");
    }
    if m > n {
        return dim_err(format!("ensemble of {m} members exceeds {n}"));
    }
    let inv_d = T::one() / T::of(d as f64);
    let l = phase_unitary::<T>(d)?;
    let phased = Matrix::from_fn(n, m, |i, k| {
        if i < m {
            df.u[(i, k)] * Complex::from_polar(T::one(), thetas[i] * inv_d)
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    transform_ensemble(e, &l.matmul(&phased))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gconc::g_pure;
    use crate::numkit::Seed;
    use crate::search::OptimizerConfig;
    use crate::states::{eigen_ensemble, PureBipartite};
    use crate::tau::{build_tau, diagonalize};
    use rand::Rng;

    #[test]
    fn unitary_with_flat_powers() {
        for d in 2..=5 {
            let u: Matrix<f64> = phase_unitary(d).unwrap();
            assert!(u.isometry_defect() <= 1e-12);
            let target = (d as f64).powi(-(d as i32));
            for z in u.as_slice() {
                assert!((z.norm() - 1.0 / d as f64).abs() <= 1e-14);
                assert!((z.powu(d as u32) - Complex::new(target, 0.0)).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn qubit_entries_are_real_halves() {
        let u: Matrix<f64> = phase_unitary(2).unwrap();
        for z in u.as_slice() {
            assert!((z.re.abs() - 0.5).abs() <= 1e-15 && z.im.abs() <= 1e-15);
        }
    }

    #[test]
    fn rejects_trivial_dimension() {
        assert!(phase_unitary::<f64>(1).is_err());
    }

    fn check(e: &crate::states::Ensemble<f64>, thetas: &[f64]) {
        let d = e.local_dim().unwrap();
        let df = diagonalize(&build_tau(e).unwrap(), &OptimizerConfig::default()).unwrap();
        let out = cancellation_decomposition(e, &df, thetas).unwrap();
        assert_eq!(out.len(), d * d);
        let sum = df
            .lam
            .iter()
            .zip(thetas)
            .fold(Complex::new(0.0, 0.0), |acc, (&l, &t)| acc + Complex::from_polar(l, t));
        let expect = sum.norm().powf(2.0 / d as f64) / (d * d) as f64;
        for chi in out.members() {
            assert!((g_pure(chi).unwrap() - expect).abs() <= 1e-9);
        }
        assert!(out.density_matrix_raw().max_abs_diff(&e.density_matrix_raw()) <= 1e-9);
    }

    #[test]
    fn opposite_phases_cancel() {
        // equal mixture of two Bell states: lam = (1/2, 1/2)
        let s: f64 = 0.5;
        let phi = PureBipartite::new(Matrix::from_real_diag(&[s, s])).unwrap();
        let psi = PureBipartite::new(Matrix::from_fn(2, 2, |i, j| Complex::new(if i != j { s } else { 0.0 }, 0.0))).unwrap();
        let e = crate::states::Ensemble::new(vec![phi, psi]).unwrap();
        let df = diagonalize(&build_tau(&e).unwrap(), &OptimizerConfig::default()).unwrap();
        assert!((df.lam[0] - 0.5).abs() <= 1e-12 && (df.lam[1] - 0.5).abs() <= 1e-12);
        let out = cancellation_decomposition(&e, &df, &[0.0, std::f64::consts::PI, 0.0, 0.0]).unwrap();
        for chi in out.members() {
            assert!(g_pure(chi).unwrap() <= 1e-12);
        }
        check(&e, &[0.0, std::f64::consts::PI, 0.0, 0.0]);
    }

    #[test]
    fn random_qubit_phases() {
        let mut rng = Seed(31).rng();
        for seed in 0..20 {
            let rank = 1 + seed as usize % 4;
            let rho = crate::states::tests::random_density(2, rank, 300 + seed);
            let e = eigen_ensemble(&rho).unwrap();
            let thetas: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
            check(&e, &thetas);
        }
    }

    #[test]
    fn non_member_rejected() {
        let e = crate::tau::tests::random_ensemble(3, 4, 77);
        let cfg = OptimizerConfig { restarts: 2, max_iters: 200, ..Default::default() };
        let df = diagonalize(&build_tau(&e).unwrap(), &cfg).unwrap();
        assert!(!df.member);
        assert!(cancellation_decomposition(&e, &df, &[0.0; 9]).is_err());
    }
}
