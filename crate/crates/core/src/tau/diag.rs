use num_complex::Complex;
use num_traits::Zero;

use super::{contract_unchecked, mode_product, TauTensor};
use crate::error::Result;
use crate::numkit::{takagi, Matrix};
use crate::scalar::Real;
use crate::search::{descend, multi_start, Objective, OptimizerConfig, Stopping};

/// Relative off-diagonal residual below which a tensor counts as diagonalizable.
pub const MEMBERSHIP_THRESHOLD: f64 = 1e-8;

/// Best unitary found to bring a tensor to diagonal form.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalForm<T = f64> {
    /// Tensor rank, equal to the local dimension.
    pub d: usize,
    /// `m x m` unitary; contracting the tensor with it gives `diag(lam)` plus residual.
    pub u: Matrix<T>,
    /// Non-negative diagonal values, descending.
    pub lam: Vec<T>,
    /// Off-diagonal Frobenius norm after contraction.
    pub residual: T,
    /// Frobenius norm of the input tensor.
    pub norm: T,
    /// `residual <= 1e-8 * norm`.
    pub member: bool,
}

/// Sum of squared off-diagonal moduli after contraction.
struct OffDiagonal<'a, T> {
    tau: &'a TauTensor<T>,
    step: usize,
}

impl<'a, T: Real> OffDiagonal<'a, T> {
    fn new(tau: &'a TauTensor<T>) -> Self {
        let step = (0..tau.d).fold(0, |acc, _| acc * tau.m + 1);
        Self { tau, step }
    }

    fn is_diagonal(&self, o: usize) -> bool {
        o % self.step == 0
    }
}

impl<T: Real> Objective<T> for OffDiagonal<'_, T> {
    fn eval(&self, u: &Matrix<T>) -> (T, Matrix<T>) {
        let (d, m) = (self.tau.d, self.tau.m);
        // contract all modes except the last
        let mut dims = vec![m; d];
        let mut partial = self.tau.entries.clone();
        for mode in 0..d - 1 {
            partial = mode_product(&partial, &dims, mode, u);
            dims[mode] = m;
        }
        let mut full = mode_product(&partial, &dims, d - 1, u);
        let mut f = T::zero();
        for (o, z) in full.iter_mut().enumerate() {
            if self.is_diagonal(o) {
                *z = Complex::zero();
            } else {
                f = f + z.norm_sqr();
            }
        }
        // ∂f/∂U_ab = d Σ_l conj(R[l, a]) S[l, b]; gradient is twice its conjugate
        let rows = partial.len() / m;
        let two_d = T::of(2.0 * d as f64);
        let g = Matrix::from_fn(m, m, |a, b| {
            let mut acc = Complex::zero();
            for l in 0..rows {
                acc = acc + full[l * m + a].conj() * partial[l * m + b];
            }
            acc.conj() * two_d
        });
        (f, g)
    }

    fn value(&self, u: &Matrix<T>) -> T {
        contract_unchecked(self.tau, u)
            .entries
            .iter()
            .enumerate()
            .filter(|(o, _)| !self.is_diagonal(*o))
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Searches for a unitary making the tensor diagonal.
///
/// Rank 2 is solved exactly by the Takagi factorization `τ = W Λ W^T`,
/// giving `U = W^†`. Higher ranks minimize the off-diagonal mass over the
/// unitary group from the identity and Haar-random starts. Diagonal phases
/// are then absorbed into the rows of `U` and the values sorted.
pub fn diagonalize<T: Real>(t: &TauTensor<T>, cfg: &OptimizerConfig) -> Result<DiagonalForm<T>> {
    cfg.validate()?;
    let norm = t.frobenius();
    let u = if t.d == 2 {
        takagi(&t.to_matrix()?)?.u.adjoint()
    } else if t.off_diagonal_norm() <= T::of(0.1 * cfg.tol) * norm {
        Matrix::identity(t.m)
    } else {
        let obj = OffDiagonal::new(t);
        let target = T::of(0.1 * cfg.tol) * norm;
        let stop = Stopping {
            max_iters: cfg.max_iters,
            target: target * target,
            grad_tol: T::of(1e-3 * cfg.tol) * norm * norm,
            stall: 200,
        };
        multi_start(t.m, cfg.restarts, cfg.seed, stop.target, |u0| descend(&obj, u0, &stop))?
            .best
            .u
    };
    Ok(finish(t, u, norm))
}

fn finish<T: Real>(t: &TauTensor<T>, mut u: Matrix<T>, norm: T) -> DiagonalForm<T> {
    let d = t.d;
    let m = t.m;
    let contracted = contract_unchecked(t, &u);
    let residual = contracted.off_diagonal_norm();
    let diag = contracted.diagonal();
    let inv_d = T::one() / T::of(d as f64);
    for (k, z) in diag.iter().enumerate() {
        if z.is_zero() {
            continue;
        }
        let phase = Complex::from_polar(T::one(), -z.arg() * inv_d);
        for j in 0..m {
            u[(k, j)] = u[(k, j)] * phase;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| diag[b].norm().partial_cmp(&diag[a].norm()).unwrap_or(std::cmp::Ordering::Equal));
    let u = Matrix::from_fn(m, m, |i, j| u[(order[i], j)]);
    let lam = order.iter().map(|&k| diag[k].norm()).collect();
    let member = residual <= T::of(MEMBERSHIP_THRESHOLD) * norm;
    DiagonalForm {
        d,
        u,
        lam,
        residual,
        norm,
        member,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{haar_unitary, Seed};
    use crate::states::{eigen_ensemble, Ensemble, PureBipartite};
    use crate::tau::tests::{example_one, random_ensemble};
    use crate::tau::{build_tau, contract_tau};

    fn check_alignment(t: &TauTensor<f64>, df: &DiagonalForm<f64>) {
        let c = contract_tau(t, &df.u).unwrap();
        assert!((c.off_diagonal_norm() - df.residual).abs() <= 1e-12);
        for (z, &l) in c.diagonal().iter().zip(&df.lam) {
            assert!((z - Complex::new(l, 0.0)).norm() <= 1e-10, "{z} vs {l}");
        }
        assert!(df.lam.windows(2).all(|w| w[0] >= w[1]));
        assert!(df.lam.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn two_qubit_states_are_exact() {
        for seed in 0..30 {
            let rank = 1 + seed as usize % 4;
            let rho = crate::states::tests::random_density(2, rank, seed);
            let t = build_tau(&eigen_ensemble(&rho).unwrap()).unwrap();
            let df = diagonalize(&t, &OptimizerConfig::default()).unwrap();
            assert!(df.residual <= 1e-10);
            assert!(df.member);
            let values = takagi(&t.to_matrix().unwrap()).unwrap().values;
            for (a, b) in df.lam.iter().zip(&values) {
                assert!((a - b).abs() <= 1e-12);
            }
            check_alignment(&t, &df);
        }
    }

    #[test]
    fn example_one_is_not_diagonalizable() {
        // the tensor is proportional to the symmetrized monomial x1 x2 x3 x4,
        // whose Waring rank is 8, so no 4x4 unitary makes it diagonal; the
        // best residual leaves the diagonal flat at sqrt(p1 p2 p3 p4)
        let mut rng = Seed(40).rng();
        for _ in 0..5 {
            let raw: Vec<f64> = (0..4).map(|_| rand::Rng::gen_range(&mut rng, 0.05..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let p = [raw[0] / total, raw[1] / total, raw[2] / total, raw[3] / total];
            let e = example_one(&p);
            let u: Matrix<f64> = haar_unitary(4, Seed(12)).unwrap();
            let t = contract_tau(&build_tau(&e).unwrap(), &u).unwrap();
            let df = diagonalize(&t, &OptimizerConfig::default()).unwrap();
            let prod: f64 = p.iter().product();
            assert!(!df.member);
            assert!((df.residual - (20.0 / 3.0 * prod).sqrt()).abs() <= 1e-12 * df.norm, "residual {}", df.residual);
            let err = df.lam.iter().map(|l| (l - prod.sqrt()).abs()).fold(0.0, f64::max);
            assert!(err <= 1e-9 * prod.sqrt(), "lam error {err:e}");
            check_alignment(&t, &df);
        }
    }

    #[test]
    fn already_diagonal_rank_three() {
        // |chi> = I/sqrt(3) mixed with |01>
        let p: f64 = 0.7;
        let chi = PureBipartite::normalized(Matrix::identity(3).scale_real(1.0 / 3f64.sqrt())).unwrap();
        let mut a = Matrix::zeros(3, 3);
        a[(0, 1)] = Complex::new(1.0, 0.0);
        let prod = PureBipartite::normalized(a).unwrap();
        let e = Ensemble::new(vec![
            chi.scaled(Complex::new(p.sqrt(), 0.0)),
            prod.scaled(Complex::new((1.0 - p).sqrt(), 0.0)),
        ])
        .unwrap();
        let t = build_tau(&e).unwrap();
        let df = diagonalize(&t, &OptimizerConfig::default()).unwrap();
        assert!((df.lam[0] - p.powf(1.5)).abs() <= 1e-12);
        assert!(df.lam[1].abs() <= 1e-12);
        assert!(df.residual <= 1e-12);
        check_alignment(&t, &df);
    }

    #[test]
    fn generic_rank_three_is_not_diagonalizable() {
        // 16 complex off-diagonal conditions against 16 real unitary parameters
        let t = build_tau(&random_ensemble(3, 4, 77)).unwrap();
        let cfg = OptimizerConfig {
            restarts: 4,
            ..Default::default()
        };
        let df = diagonalize(&t, &cfg).unwrap();
        assert!(!df.member);
        assert!(df.residual > 0.0);
        check_alignment(&t, &df);
    }

    #[test]
    fn off_diagonal_gradient_matches_differences() {
        let t = build_tau(&random_ensemble(3, 3, 5)).unwrap();
        let obj = OffDiagonal::new(&t);
        let u: Matrix<f64> = haar_unitary(3, Seed(6)).unwrap();
        let (f, g) = obj.eval(&u);
        assert!((f - obj.value(&u)).abs() <= 1e-14);
        let h = 1e-6;
        for (a, b) in [(0, 0), (1, 2), (2, 1)] {
            for dir in [Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)] {
                let mut up = u.clone();
                up[(a, b)] += dir * h;
                let mut dn = u.clone();
                dn[(a, b)] -= dir * h;
                let fd = (obj.value(&up) - obj.value(&dn)) / (2.0 * h);
                let analytic = g[(a, b)].re * dir.re + g[(a, b)].im * dir.im;
                assert!((fd - analytic).abs() <= 1e-6, "{fd} vs {analytic}");
            }
        }
    }
}
