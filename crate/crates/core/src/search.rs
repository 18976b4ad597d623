//! Descent on the unitary group shared by tensor diagonalization and the
//! decomposition optimizer.
//!
//! Each iterate is a unitary `U`. The objective reports `f(U)` and a
//! Euclidean gradient `G` with `df = Re tr(G^† dU)`. The Riemannian
//! gradient in the Lie algebra is the skew-Hermitian part of `G U^†`;
//! steps follow `U <- qf((I + t P) U)` along Polak-Ribière directions `P`
//! with Armijo backtracking.

use crate::error::{invalid, Result};
use crate::numkit::{haar_unitary, orthonormalize, real_inner, Matrix, Seed};
use crate::scalar::Real;

/// Settings for every unitary search in the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Independent starts; start 0 is the identity, the rest are Haar-random.
    pub restarts: usize,
    /// Largest ensemble size tried by the decomposition optimizer (default `d^2`).
    pub max_m: Option<usize>,
    /// Relative convergence tolerance.
    pub tol: f64,
    pub max_iters: usize,
    pub seed: Seed,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            max_m: None,
            tol: 1e-13,
            max_iters: 3000,
            seed: Seed(0),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        if self.max_iters == 0 {
            return invalid("max_iters must be at least 1");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return invalid(format!("tolerance {} is not a positive number", self.tol));
        }
        Ok(())
    }
}

/// Smooth function on `U(n)`, minimized by [`descend`].
pub(crate) trait Objective<T: Real> {
    /// Value and Euclidean gradient.
    fn eval(&self, u: &Matrix<T>) -> (T, Matrix<T>);

    fn value(&self, u: &Matrix<T>) -> T {
        self.eval(u).0
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Stopping<T> {
    pub max_iters: usize,
    /// Stop once `f <= target`.
    pub target: T,
    /// Stop once the Riemannian gradient norm falls to this.
    pub grad_tol: T,
    /// Consecutive negligible improvements tolerated.
    pub stall: usize,
}

#[derive(Clone, Debug)]
pub(crate) struct Descent<T> {
    pub u: Matrix<T>,
    pub value: T,
    pub iterations: usize,
}

fn skew_part<T: Real>(a: &Matrix<T>) -> Matrix<T> {
    let half = T::of(0.5);
    let n = a.rows();
    Matrix::from_fn(n, n, |i, j| (a[(i, j)] - a[(j, i)].conj()) * half)
}

fn retract<T: Real>(u: &Matrix<T>, p: &Matrix<T>, t: T) -> Option<Matrix<T>> {
    let n = u.rows();
    let mut step = p.scale_real(t);
    for i in 0..n {
        step[(i, i)] = step[(i, i)] + T::one();
    }
    orthonormalize(&step.matmul(u)).map(|(q, _)| q)
}

/// Conjugate-gradient descent from `u0`.
pub(crate) fn descend<T: Real>(obj: &impl Objective<T>, u0: Matrix<T>, stop: &Stopping<T>) -> Descent<T> {
    let armijo = T::of(1e-4);
    let mut u = u0;
    let (mut f, g) = obj.eval(&u);
    let mut omega = skew_part(&g.matmul(&u.adjoint()));
    let mut dir = omega.scale_real(-T::one());
    let mut gg = real_inner(&omega, &omega);
    let mut t = T::one() / gg.sqrt().max(T::one());
    let mut steepest = true;
    let mut stalled = 0;
    let mut iterations = 0;

    while iterations < stop.max_iters {
        if f <= stop.target || gg.sqrt() <= stop.grad_tol {
            break;
        }
        iterations += 1;
        let mut slope = real_inner(&omega, &dir);
        if slope >= T::zero() {
            dir = omega.scale_real(-T::one());
            slope = -gg;
            steepest = true;
        }
        let mut accepted = None;
        for _ in 0..60 {
            if let Some(trial) = retract(&u, &dir, t) {
                let ft = obj.value(&trial);
                if ft.is_finite() && ft <= f + armijo * t * slope {
                    accepted = Some((trial, ft));
                    break;
                }
            }
            t = t * T::of(0.5);
        }
        let Some((next, f_next)) = accepted else {
            if steepest {
                break;
            }
            // retry along the plain gradient
            dir = omega.scale_real(-T::one());
            steepest = true;
            t = T::one() / gg.sqrt().max(T::one());
            continue;
        };
        if f - f_next <= T::epsilon() * T::of(10.0) * f.abs().max(T::min_positive_value()) {
            stalled += 1;
            if stalled >= stop.stall {
                u = next;
                f = f_next;
                break;
            }
        } else {
            stalled = 0;
        }
        u = next;
        let (fv, g) = obj.eval(&u);
        f = fv;
        let omega_next = skew_part(&g.matmul(&u.adjoint()));
        let gg_next = real_inner(&omega_next, &omega_next);
        let beta = if gg > T::zero() {
            ((gg_next - real_inner(&omega_next, &omega)) / gg).max(T::zero())
        } else {
            T::zero()
        };
        dir = &omega_next.scale_real(-T::one()) + &dir.scale_real(beta);
        steepest = beta == T::zero();
        omega = omega_next;
        gg = gg_next;
        t = t * T::of(2.0);
    }
    Descent { u, value: f, iterations }
}

/// Result of a multi-start search.
#[derive(Clone, Debug)]
pub(crate) struct MultiStart<T> {
    pub best: Descent<T>,
    /// Final objective value of each start, in start order.
    pub trace: Vec<T>,
}

/// Runs `restarts` searches and keeps the lowest value; ties go to the earlier start.
///
/// Start `r` depends only on `seed` and `r`, so adding starts never changes
/// earlier ones. The search ends early once a start reaches `target`.
pub(crate) fn multi_start<T: Real>(
    n: usize,
    restarts: usize,
    seed: Seed,
    target: T,
    mut run: impl FnMut(Matrix<T>) -> Descent<T>,
) -> Result<MultiStart<T>> {
    let mut best: Option<Descent<T>> = None;
    let mut trace = Vec::with_capacity(restarts);
    for r in 0..restarts {
        let u0 = if r == 0 {
            Matrix::identity(n)
        } else {
            haar_unitary(n, seed.derive(r as u64))?
        };
        let result = run(u0);
        trace.push(result.value);
        let better = best.as_ref().map_or(true, |b| result.value < b.value);
        let done = result.value <= target;
        if better {
            best = Some(result);
        }
        if done {
            break;
        }
    }
    Ok(MultiStart {
        best: best.expect("at least one restart"),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    /// `f(U) = ‖U - V‖_F^2` for a fixed unitary `V`; minimum 0 at `U = V`.
    struct Distance(Matrix<f64>);

    impl Objective<f64> for Distance {

        fn eval(&self, u: &Matrix<f64>) -> (f64, Matrix<f64>) {
            let diff = u - &self.0;
            (diff.frobenius().powi(2), diff.scale_real(2.0))
        }
    }

    fn stopping() -> Stopping<f64> {
        Stopping {
            max_iters: 2000,
            target: 1e-26,
            grad_tol: 0.0,
            stall: 200,
        }
    }

    #[test]
    fn reaches_target_unitary() {
        let v: Matrix<f64> = haar_unitary(4, Seed(3)).unwrap();
        let run = descend(&Distance(v.clone()), Matrix::identity(4), &stopping());
        assert!(run.value <= 1e-20, "value {}", run.value);
        assert!(run.u.max_abs_diff(&v) <= 1e-10);
        assert!(run.u.isometry_defect() <= 1e-12);
    }

    #[test]
    fn iterates_stay_unitary_and_values_decrease() {
        let v: Matrix<f64> = haar_unitary(3, Seed(9)).unwrap();
        let obj = Distance(v);
        let start: Matrix<f64> = haar_unitary(3, Seed(10)).unwrap();
        let f0 = obj.value(&start);
        let mut stop = stopping();
        stop.max_iters = 3;
        let run = descend(&obj, start, &stop);
        assert!(run.value < f0);
        assert!(run.u.isometry_defect() <= 1e-12);
    }

    #[test]
    fn multi_start_is_prefix_stable() {
        // phase-sensitive objective with several local minima
        struct Trace;
        impl Objective<f64> for Trace {
            fn eval(&self, u: &Matrix<f64>) -> (f64, Matrix<f64>) {
                let c = u[(0, 0)] * u[(1, 1)];
                let f = -(c.re * c.re) + (u[(2, 2)].re).powi(2);
                let mut g = Matrix::zeros(3, 3);
                // f = -(Re c)^2 + (Re u22)^2; holomorphic parts conjugated and doubled
                let dc = -2.0 * c.re;
                g[(0, 0)] = (u[(1, 1)] * dc).conj();
                g[(1, 1)] = (u[(0, 0)] * dc).conj();
                g[(2, 2)] = Complex::new(2.0 * u[(2, 2)].re, 0.0);
                (f, g)
            }
        }
        let stop = Stopping { target: f64::NEG_INFINITY, ..stopping() };
        let short = multi_start(3, 3, Seed(4), stop.target, |u0| descend(&Trace, u0, &stop)).unwrap();
        let long = multi_start(3, 6, Seed(4), stop.target, |u0| descend(&Trace, u0, &stop)).unwrap();
        assert_eq!(&long.trace[..3], &short.trace[..]);
        assert!(long.best.value <= short.best.value);
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::default().validate().is_ok());
        let bad = OptimizerConfig { restarts: 0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
