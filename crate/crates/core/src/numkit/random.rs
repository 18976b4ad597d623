use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{orthonormalize, Matrix};
use crate::error::{dim_err, Result};
use crate::scalar::Real;

/// Explicit seed for every stochastic routine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed for an independent stream: `seed + stream`.
    pub fn derive(self, stream: u64) -> Seed {
        Seed(self.0.wrapping_add(stream))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Standard complex normal: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_normal<T: Real, R: rand::Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::of(re * s), T::of(im * s))
}

pub fn gaussian_matrix<T: Real, R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Uniformly random unit vector in `C^n`.
pub fn random_unit_vector<T: Real, R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex<T>> {
    loop {
        let v: Vec<Complex<T>> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = super::matrix::vec_norm(&v);
        if norm > T::zero() {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-distributed `m x m` unitary.
///
/// Gaussian matrix, Gram-Schmidt QR, then each column multiplied by the
/// phase of the corresponding diagonal entry of R.
pub fn haar_unitary<T: Real>(m: usize, seed: Seed) -> Result<Matrix<T>> {
    if m == 0 {
        return dim_err("Haar unitary of dimension 0");
    }
    let mut rng = seed.rng();
    loop {
        let z = gaussian_matrix::<T, _>(m, m, &mut rng);
        if let Some((mut q, r_diag)) = orthonormalize(&z) {
            for (j, r) in r_diag.iter().enumerate() {
                let phase = *r / r.norm();
                for i in 0..m {
                    q[(i, j)] = q[(i, j)] * phase;
                }
            }
            return Ok(q);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_within_tolerance() {
        for s in 0..20 {
            let u: Matrix<f64> = haar_unitary(5, Seed(s)).unwrap();
            assert!(u.isometry_defect() <= 1e-12);
            assert!(u.matmul(&u.adjoint()).max_abs_diff(&Matrix::identity(5)) <= 1e-12);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a: Matrix<f64> = haar_unitary(4, Seed(42)).unwrap();
        let b: Matrix<f64> = haar_unitary(4, Seed(42)).unwrap();
        assert_eq!(a, b);
        let c: Matrix<f64> = haar_unitary(4, Seed(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(haar_unitary::<f64>(0, Seed(1)).is_err());
    }

    #[test]
    fn first_moment_matches_haar() {
        // E|U_11|^2 = 1/m, Var = (m-1)/(m^2 (m+1)).
        let m = 4usize;
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|s| haar_unitary::<f64>(m, Seed(s)).unwrap()[(0, 0)].norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        let se = (var / n as f64).sqrt();
        assert!((mean - 0.25).abs() <= 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn phase_distribution_not_biased() {
        // Without the phase fix the diagonal of Gram-Schmidt Q is biased
        // toward the positive real axis; Haar has E[U_11] = 0.
        let n = 4000;
        let mean = (0..n)
            .map(|s| haar_unitary::<f64>(3, Seed(s)).unwrap()[(0, 0)])
            .fold(Complex::new(0.0, 0.0), |a, b| a + b)
            / n as f64;
        assert!(mean.norm() < 0.05, "{mean}");
    }
}
