use num_complex::Complex;
use num_traits::Zero;

use super::bounds::{gc_bounds, gcoa_ceiling, gcoa_from_diag};
use crate::error::{invalid, Error, Result};
use crate::gconc::ensemble_avg_g;
use crate::numkit::Matrix;
use crate::scalar::Real;
use crate::search::{descend, multi_start, Descent, Objective, OptimizerConfig, Stopping};
use crate::states::{eigen_ensemble, transform_ensemble, DensityMatrix, Ensemble};
use crate::tau::{build_tau, diagonalize, TauTensor};

/// Smoothing levels for `|D|^{2/d}`, relative to the tensor norm.
const SMOOTHING: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-9];

/// Slack allowed on the internal consistency checks.
const CHECK_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Largest ensemble-average G: a lower bound on the G-concurrence of assistance.
    Max,
    /// Smallest ensemble-average G: an upper bound on the G-concurrence.
    Min,
}

/// Best decomposition found by the optimizer.
#[derive(Clone, Debug)]
pub struct OptimizerOutcome<T = f64> {
    /// Ensemble-average G of the witness decomposition.
    pub value: T,
    /// `m' x n` isometry applied to `basis` through [`transform_ensemble`].
    pub witness: Matrix<T>,
    /// Spectral ensemble of the input state.
    pub basis: Ensemble<T>,
    pub direction: Direction,
    /// Final value of every start, grouped by ensemble size `m'`.
    pub trace: Vec<(usize, Vec<T>)>,
    /// Upper bound on the G-concurrence of assistance used for the internal check.
    pub ceiling: T,
    /// Whether `ceiling` is the exact closed form for a diagonalizable state.
    pub ceiling_exact: bool,
    /// Lower bound on the G-concurrence, when the state is diagonalizable.
    pub floor: Option<T>,
}

/// `Σ_l ± (|D_l|^2 + ε^2)^{1/d}` with `D_l = τ(w_l, ..., w_l)` and `w_l` the
/// first `n` entries of row `l`.
struct AverageG<'a, T> {
    tau: &'a TauTensor<T>,
    rows: usize,
    sign: T,
    eps2: T,
}

/// `(D, S)` with `S_b = τ(w, ..., w, e_b)` and `D = Σ_b w_b S_b`.
fn contract_row<T: Real>(tau: &TauTensor<T>, w: &[Complex<T>]) -> (Complex<T>, Vec<Complex<T>>) {
    let n = tau.range();
    let mut v: Vec<Complex<T>> = tau.entries().to_vec();
    for _ in 0..tau.rank() - 1 {
        let len = v.len() / n;
        let mut next = vec![Complex::zero(); len];
        for (k, &wk) in w.iter().enumerate() {
            if wk.is_zero() {
                continue;
            }
            for (o, &x) in next.iter_mut().zip(&v[k * len..(k + 1) * len]) {
                *o = *o + wk * x;
            }
        }
        v = next;
    }
    let d = v.iter().zip(w).fold(Complex::zero(), |acc, (&s, &wb)| acc + s * wb);
    (d, v)
}

impl<T: Real> AverageG<'_, T> {
    fn power(&self) -> T {
        T::one() / T::of(self.tau.rank() as f64)
    }
}

impl<T: Real> Objective<T> for AverageG<'_, T> {
    fn eval(&self, u: &Matrix<T>) -> (T, Matrix<T>) {
        let n = self.tau.range();
        let p = self.power();
        let mut f = T::zero();
        let mut g = Matrix::zeros(self.rows, self.rows);
        let two = T::of(2.0);
        for l in 0..self.rows {
            let (dl, s) = contract_row(self.tau, &u.row(l)[..n]);
            let base = dl.norm_sqr() + self.eps2;
            if base <= T::zero() {
                continue;
            }
            f = f + self.sign * base.powf(p);
            // gradient entry is 2 conj(∂f/∂U_lb) = 2 sign base^{p-1} D conj(S_b)
            let factor = self.sign * two * base.powf(p - T::one());
            for (b, sb) in s.iter().enumerate() {
                g[(l, b)] = dl * sb.conj() * factor;
            }
        }
        (f, g)
    }

    fn value(&self, u: &Matrix<T>) -> T {
        let n = self.tau.range();
        let p = self.power();
        (0..self.rows)
            .map(|l| {
                let (dl, _) = contract_row(self.tau, &u.row(l)[..n]);
                self.sign * (dl.norm_sqr() + self.eps2).powf(p)
            })
            .sum()
    }
}

fn exact_average<T: Real>(tau: &TauTensor<T>, u: &Matrix<T>) -> T {
    let n = tau.range();
    let p = T::of(2.0 / tau.rank() as f64);
    (0..u.rows())
        .map(|l| contract_row(tau, &u.row(l)[..n]).0.norm().powf(p))
        .sum()
}

/// Searches decompositions of `rho` for the largest or smallest ensemble-average G.
///
/// Decompositions of size `m'` are parametrized by `m' x m'` unitaries whose
/// first `n` columns act on the spectral ensemble (rank `n`). Sizes from `n`
/// to `cfg.max_m` (default `d^2`) are searched, each from the identity and
/// Haar-random starts, and the non-smooth objective is approached through
/// decreasing smoothing levels. The result is a one-sided bound: a lower
/// bound on the G-concurrence of assistance for [`Direction::Max`] and an
/// upper bound on the G-concurrence for [`Direction::Min`].
///
/// The maximum is checked against `d det(rho_A)^{1/d}` and, for
/// diagonalizable states, against the closed form; the minimum against the
/// closed-form lower bound. Exceeding either by more than `1e-9` is an
/// internal-consistency error.
pub fn optimize_avg_g<T: Real>(
    rho: &DensityMatrix<T>,
    direction: Direction,
    cfg: &OptimizerConfig,
) -> Result<OptimizerOutcome<T>> {
    cfg.validate()?;
    let d = rho.local_dim()?;
    let basis = eigen_ensemble(rho)?;
    let n = basis.len();
    let max_m = cfg.max_m.unwrap_or(d * d);
    if max_m < n {
        return invalid(format!("max_m = {max_m} is below the rank {n} of the state"));
    }
    let tau = build_tau(&basis)?;
    let scale = tau.frobenius().max(T::min_positive_value());

    let df = diagonalize(&tau, cfg)?;
    let det_ceiling = gcoa_ceiling(rho)?;
    let (ceiling, ceiling_exact, floor) = if df.member {
        let closed = gcoa_from_diag(&df)?;
        (closed.min(det_ceiling), true, Some(gc_bounds(&df)?.lower))
    } else {
        (det_ceiling, false, None)
    };

    let sign = match direction {
        Direction::Max => -T::one(),
        Direction::Min => T::one(),
    };
    let tol = T::of(cfg.tol);
    let target = match direction {
        Direction::Max => -(ceiling - tol),
        Direction::Min => floor.unwrap_or(T::zero()) + tol,
    };

    let mut best: Option<(T, Matrix<T>)> = None;
    let mut trace = Vec::new();
    for m in n..=max_m {
        let run = |u0: Matrix<T>| {
            let mut u = u0;
            let mut iterations = 0;
            for &level in &SMOOTHING {
                let eps = T::of(level) * scale;
                let obj = AverageG {
                    tau: &tau,
                    rows: m,
                    sign,
                    eps2: eps * eps,
                };
                let stop = Stopping {
                    max_iters: cfg.max_iters,
                    target: T::neg_infinity(),
                    grad_tol: tol * scale,
                    stall: 200,
                };
                let step = descend(&obj, u, &stop);
                iterations += step.iterations;
                u = step.u;
            }
            let value = sign * exact_average(&tau, &u);
            Descent { u, value, iterations }
        };
        let search = multi_start(m, cfg.restarts, cfg.seed.derive((m as u64) << 20), target, run)?;
        trace.push((m, search.trace.iter().map(|&v| sign * v).collect()));
        let found = search.best;
        if best.as_ref().map_or(true, |(v, _)| found.value < *v) {
            best = Some((found.value, found.u));
        }
        if found.value <= target {
            break;
        }
    }
    let (_, u) = best.expect("at least one ensemble size");
    let witness = u.leading_cols(n);
    let value = ensemble_avg_g(&transform_ensemble(&basis, &witness)?)?;

    let slack = T::of(CHECK_SLACK);
    match direction {
        Direction::Max if value > ceiling + slack => {
            return Err(Error::Consistency(format!(
                "decomposition average {value} exceeds the assistance ceiling {ceiling}"
            )));
        }
        Direction::Min => {
            if let Some(lower) = floor {
                if value < lower - slack {
                    return Err(Error::Consistency(format!(
                        "decomposition average {value} is below the closed-form lower bound {lower}"
                    )));
                }
            }
        }
        _ => {}
    }
    Ok(OptimizerOutcome {
        value,
        witness,
        basis,
        direction,
        trace,
        ceiling,
        ceiling_exact,
        floor,
    })
}
