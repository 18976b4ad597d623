use num_complex::Complex;
use num_traits::Zero;

use super::bounds::gc_bounds;
use super::optimize::{optimize_avg_g, Direction};
use crate::error::{dim_err, Result};
use crate::gconc::wootters_concurrence;
use crate::numkit::{haar_unitary, Matrix};
use crate::scalar::Real;
use crate::search::OptimizerConfig;
use crate::states::{eigen_ensemble, DensityMatrix};
use crate::tau::{build_tau, diagonalize};

/// Assisted G-concurrence for the swapping configuration `rho_{AS1} ⊗ rho_{BS2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwapReport<T = f64> {
    pub d: usize,
    /// Best average G of AB reached by a projective measurement on `S1 S2`.
    pub protocol_max: T,
    /// Measurement bases tried: the generalized Bell basis and `cfg.restarts` Haar bases.
    pub bases: usize,
    /// Upper bound `G(rho_{AS1}) G(rho_{BS2})` (from upper brackets when `d > 2`).
    pub product_bound: T,
    /// Whether `product_bound` is the exact product (always at `d = 2`).
    pub bound_exact: bool,
    /// Optimizer maximum over decompositions of `rho_A ⊗ rho_B`, computed when both inputs are pure.
    pub optimizer_max: Option<T>,
    /// `product_bound` minus the larger achieved value.
    pub margin: T,
}

fn is_pure<T: Real>(rho: &DensityMatrix<T>) -> bool {
    let m = rho.matrix();
    let purity = m.matmul(m).trace().re;
    (purity - T::one()).abs() <= T::tol(1e-10)
}

/// Upper bracket on `G(rho)` and whether it is exact.
fn g_upper<T: Real>(rho: &DensityMatrix<T>, cfg: &OptimizerConfig) -> Result<(T, bool)> {
    if rho.local_dim()? == 2 {
        return Ok((wootters_concurrence(rho)?, true));
    }
    let df = diagonalize(&build_tau(&eigen_ensemble(rho)?)?, cfg)?;
    if df.member {
        let b = gc_bounds(&df)?;
        Ok((b.upper, b.upper - b.lower <= T::tol(1e-12)))
    } else {
        Ok((optimize_avg_g(rho, Direction::Min, cfg)?.value, false))
    }
}

/// Lower bound on `G(sigma)` for an unnormalized AB outcome.
fn g_lower<T: Real>(sigma: Matrix<T>, d: usize, cfg: &OptimizerConfig) -> Result<T> {
    let p = sigma.trace().re;
    if p <= T::tol(1e-14) {
        return Ok(T::zero());
    }
    let rho = DensityMatrix::with_tolerance(d, d, sigma.scale_real(T::one() / p), T::tol(1e-8))?;
    if d == 2 {
        return Ok(p * wootters_concurrence(&rho)?);
    }
    let df = diagonalize(&build_tau(&eigen_ensemble(&rho)?)?, cfg)?;
    Ok(if df.member { p * gc_bounds(&df)?.lower } else { T::zero() })
}

/// Generalized Bell basis `(1/√d) Σ_s ω^{js} |s>|s+k>` as rows of a `d^2 x d^2` unitary.
fn bell_basis<T: Real>(d: usize) -> Matrix<T> {
    let unit = T::of(2.0) * T::PI() / T::of(d as f64);
    let amp = T::one() / T::of(d as f64).sqrt();
    Matrix::from_fn(d * d, d * d, |row, col| {
        let (j, k) = (row / d, row % d);
        let (s, t) = (col / d, col % d);
        if t == (s + k) % d {
            Complex::from_polar(amp, unit * T::of((j * s % d) as f64))
        } else {
            Complex::zero()
        }
    })
}

/// AB block `Σ conj(v_st) v_s't' rho1[(a,s),(a',s')] rho2[(b,t),(b',t')]` for outcome `v` on `S1 S2`.
fn outcome<T: Real>(rho1: &Matrix<T>, rho2: &Matrix<T>, v: &[Complex<T>], d: usize) -> Matrix<T> {
    let n = d * d;
    Matrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / d, r % d);
        let (ap, bp) = (c / d, c % d);
        let mut acc = Complex::zero();
        for s in 0..d {
            for t in 0..d {
                let cv = v[s * d + t].conj();
                if cv.is_zero() {
                    continue;
                }
                for sp in 0..d {
                    let r1 = rho1[(a * d + s, ap * d + sp)];
                    if r1.is_zero() {
                        continue;
                    }
                    for tp in 0..d {
                        acc = acc + cv * v[sp * d + tp] * r1 * rho2[(b * d + t, bp * d + tp)];
                    }
                }
            }
        }
        acc
    })
}

/// Compares achievable assisted G for `rho1` on `A S1` and `rho2` on `B S2` with `G(rho1) G(rho2)`.
///
/// Achieved values come from projective measurements of `S1 S2`: the
/// generalized Bell basis plus `cfg.restarts` Haar-random bases. Outcomes
/// are scored by the exact concurrence at `d = 2` and by the closed-form
/// lower bound otherwise (zero for states outside the diagonalizable
/// class), so `protocol_max` is always an achieved value. When both inputs
/// are pure the optimizer also maximizes over decompositions of the
/// resulting `rho_A ⊗ rho_B`.
pub fn swap_bound<T: Real>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    cfg: &OptimizerConfig,
) -> Result<SwapReport<T>> {
    cfg.validate()?;
    let d = rho1.local_dim()?;
    if rho2.local_dim()? != d {
        return dim_err(format!("states on {d}x{d} and {:?} differ in dimension", rho2.dims()));
    }
    let (c1, e1) = g_upper(rho1, cfg)?;
    let (c2, e2) = g_upper(rho2, cfg)?;
    let product_bound = c1 * c2;

    let mut bases = vec![bell_basis::<T>(d)];
    for r in 0..cfg.restarts {
        bases.push(haar_unitary(d * d, cfg.seed.derive(r as u64))?);
    }
    let mut protocol_max = T::zero();
    for u in &bases {
        let mut total = T::zero();
        for l in 0..d * d {
            let sigma = outcome(rho1.matrix(), rho2.matrix(), u.row(l), d);
            total = total + g_lower(sigma, d, cfg)?;
        }
        protocol_max = protocol_max.max(total);
    }

    let optimizer_max = if is_pure(rho1) && is_pure(rho2) {
        let joint = rho1.reduce_to_a().kron(&rho2.reduce_to_a());
        let rho = DensityMatrix::with_tolerance(d, d, joint, T::tol(1e-8))?;
        Some(optimize_avg_g(&rho, Direction::Max, cfg)?.value)
    } else {
        None
    };
    let best = optimizer_max.map_or(protocol_max, |v| v.max(protocol_max));
    Ok(SwapReport {
        d,
        protocol_max,
        bases: bases.len(),
        product_bound,
        bound_exact: e1 && e2,
        optimizer_max,
        margin: product_bound - best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gconc::g_pure;
    use crate::numkit::{random_unit_vector, Seed};
    use crate::states::{tests::random_density, PureBipartite};

    fn pure(d: usize, seed: u64) -> (DensityMatrix<f64>, f64) {
        let v = random_unit_vector(d * d, &mut Seed(seed).rng());
        let psi = PureBipartite::from_vector(d, d, v).unwrap();
        (psi.projector().unwrap(), g_pure(&psi).unwrap())
    }

    #[test]
    fn bell_basis_is_unitary() {
        for d in 2..=4 {
            assert!(bell_basis::<f64>(d).isometry_defect() <= 1e-12);
        }
    }

    #[test]
    fn outcomes_sum_to_product_marginal() {
        let (r1, r2) = (random_density(2, 3, 4), random_density(2, 2, 5));
        let u: Matrix<f64> = haar_unitary(4, Seed(6)).unwrap();
        let mut total = Matrix::zeros(4, 4);
        for l in 0..4 {
            total = &total + &outcome(r1.matrix(), r2.matrix(), u.row(l), 2);
        }
        let expect = r1.reduce_to_a().kron(&r2.reduce_to_a());
        assert!(total.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn pure_pair_reaches_product() {
        for seed in 0..4 {
            let (r1, g1) = pure(2, 10 + seed);
            let (r2, g2) = pure(2, 20 + seed);
            let rep = swap_bound(&r1, &r2, &OptimizerConfig { restarts: 4, ..Default::default() }).unwrap();
            assert!((rep.product_bound - g1 * g2).abs() <= 1e-10);
            assert!((rep.optimizer_max.unwrap() - g1 * g2).abs() <= 1e-6);
            // Bell measurement swaps the entanglement exactly
            assert!((rep.protocol_max - g1 * g2).abs() <= 1e-9);
        }
    }

    #[test]
    fn separable_factor_forces_zero() {
        let mut a = Matrix::zeros(2, 2);
        a[(0, 1)] = Complex::new(1.0, 0.0);
        let prod = PureBipartite::new(a).unwrap().projector().unwrap();
        let other = random_density(2, 2, 3);
        let rep = swap_bound(&prod, &other, &OptimizerConfig { restarts: 6, ..Default::default() }).unwrap();
        assert!(rep.product_bound.abs() <= 1e-12);
        assert!(rep.protocol_max <= 1e-9);
    }

    #[test]
    fn mixed_pairs_respect_bound() {
        for seed in 0..10 {
            let r1 = random_density(2, 1 + seed as usize % 4, 100 + seed);
            let r2 = random_density(2, 1 + (seed as usize + 1) % 4, 200 + seed);
            let rep = swap_bound(&r1, &r2, &OptimizerConfig { restarts: 10, seed: Seed(seed), ..Default::default() }).unwrap();
            assert!(rep.bound_exact);
            assert!(rep.protocol_max <= rep.product_bound + 1e-9, "seed {seed}: {rep:?}");
        }
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        let (r1, _) = pure(2, 1);
        let (r2, _) = pure(3, 2);
        assert!(matches!(swap_bound(&r1, &r2, &OptimizerConfig::default()), Err(crate::Error::Dimension(_))));
    }
}
