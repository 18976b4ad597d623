use super::bounds::{gc_bounds, gcoa_ceiling, gcoa_from_diag};
use super::optimize::{optimize_avg_g, Direction};
use crate::error::{dim_err, Result};
use crate::numkit::{random_unit_vector, Seed};
use crate::scalar::Real;
use crate::search::OptimizerConfig;
use crate::states::{eigen_ensemble, partial_trace, DensityMatrix, Keep, PureTripartite};
use crate::tau::{build_tau, diagonalize};

/// Slack before an inequality counts as violated.
const SLACK: f64 = 1e-9;

/// Interval known to contain a quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket<T = f64> {
    pub lower: T,
    pub upper: T,
    /// Whether the interval comes from a closed form (diagonalizable state).
    pub closed_form: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated,
    Indeterminate,
}

/// Terms of the two trade-off inequalities for a pure `d x d x d` state on `A B S`:
/// `G(AB)^d + G(AS)^d <= G(A|BS)^d` and `G_a(AB)^d + G_a(AS)^d >= G(A|BS)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonogamyTerms<T = f64> {
    pub d: usize,
    pub g_ab: Bracket<T>,
    pub g_as: Bracket<T>,
    pub ga_ab: Bracket<T>,
    pub ga_as: Bracket<T>,
    /// `d det(rho_A)^{1/d}`.
    pub g_a_bs: T,
    pub g_verdict: Verdict,
    pub ga_verdict: Verdict,
    /// `G(A|BS)^d - G(AB)^d - G(AS)^d` from the upper brackets.
    pub g_margin: T,
    /// `G_a(AB)^d + G_a(AS)^d - G(A|BS)^d` from the lower brackets.
    pub ga_margin: T,
}

fn brackets<T: Real>(rho: &DensityMatrix<T>, cfg: &OptimizerConfig) -> Result<(Bracket<T>, Bracket<T>)> {
    let df = diagonalize(&build_tau(&eigen_ensemble(rho)?)?, cfg)?;
    if df.member {
        let b = gc_bounds(&df)?;
        let ga = gcoa_from_diag(&df)?;
        return Ok((
            Bracket { lower: b.lower, upper: b.upper, closed_form: true },
            Bracket { lower: ga, upper: ga, closed_form: true },
        ));
    }
    let min = optimize_avg_g(rho, Direction::Min, cfg)?;
    let max = optimize_avg_g(rho, Direction::Max, cfg)?;
    Ok((
        Bracket { lower: T::zero(), upper: min.value, closed_form: false },
        Bracket { lower: max.value, upper: max.ceiling, closed_form: false },
    ))
}

/// Evaluates both inequalities for `psi`.
///
/// G brackets outside the diagonalizable class leave the first inequality
/// indeterminate; the brackets are still reported. For the second,
/// optimizer lower bounds on `G_a` can certify that it holds and the
/// determinant ceiling can certify a violation.
pub fn monogamy_terms<T: Real>(psi: &PureTripartite<T>, cfg: &OptimizerConfig) -> Result<MonogamyTerms<T>> {
    let (a, b, s) = psi.dims();
    if a != b || a != s {
        return dim_err(format!("monogamy terms need a d x d x d state, got {a}x{b}x{s}"));
    }
    let d = a;
    let (g_ab, ga_ab) = brackets(&partial_trace(psi, Keep::AB), cfg)?;
    let (g_as, ga_as) = brackets(&partial_trace(psi, Keep::AS), cfg)?;
    let g_a_bs = gcoa_ceiling(&partial_trace(psi, Keep::AB))?;

    let p = |x: T| x.powi(d as i32);
    let rhs = p(g_a_bs);
    let slack = T::of(SLACK);

    let g_margin = rhs - p(g_ab.upper) - p(g_as.upper);
    let g_verdict = if !(g_ab.closed_form && g_as.closed_form) {
        Verdict::Indeterminate
    } else if g_margin >= -slack {
        Verdict::Holds
    } else if p(g_ab.lower) + p(g_as.lower) > rhs + slack {
        Verdict::Violated
    } else {
        Verdict::Indeterminate
    };

    let ga_margin = p(ga_ab.lower) + p(ga_as.lower) - rhs;
    let ga_verdict = if ga_margin >= -slack {
        Verdict::Holds
    } else if p(ga_ab.upper) + p(ga_as.upper) < rhs - slack {
        Verdict::Violated
    } else {
        Verdict::Indeterminate
    };

    Ok(MonogamyTerms {
        d,
        g_ab,
        g_as,
        ga_ab,
        ga_as,
        g_a_bs,
        g_verdict,
        ga_verdict,
        g_margin,
        ga_margin,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub holds: usize,
    pub violated: usize,
    pub indeterminate: usize,
}

impl Tally {
    fn record(&mut self, v: Verdict) {
        match v {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Indeterminate => self.indeterminate += 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonogamyReport {
    pub d: usize,
    pub samples: usize,
    pub g: Tally,
    pub ga: Tally,
    /// Smallest margin among instances with a verdict of holds or violated.
    pub worst_g_margin: Option<f64>,
    pub worst_ga_margin: Option<f64>,
}

/// Samples Haar-random pure `d x d x d` states and tallies both inequalities.
///
/// Supports `d = 2` (every reduced state is diagonalizable, so both
/// inequalities are decided) and `d = 3` (searches use a light budget of
/// two restarts and 400 iterations).
pub fn monogamy_sample(d: usize, samples: usize, seed: Seed) -> Result<MonogamyReport> {
    if !(2..=3).contains(&d) {
        return dim_err(format!("monogamy sampling supports d = 2 or 3, got {d}"));
    }
    let cfg = OptimizerConfig {
        restarts: 2,
        max_iters: 400,
        seed: seed.derive(1 << 40),
        ..Default::default()
    };
    let mut report = MonogamyReport {
        d,
        samples,
        g: Tally::default(),
        ga: Tally::default(),
        worst_g_margin: None,
        worst_ga_margin: None,
    };
    let worst = |slot: &mut Option<f64>, v: Verdict, m: f64| {
        if v != Verdict::Indeterminate {
            *slot = Some(slot.map_or(m, |w: f64| w.min(m)));
        }
    };
    for i in 0..samples {
        let amp = random_unit_vector(d * d * d, &mut seed.derive(i as u64).rng());
        let psi = PureTripartite::new((d, d, d), amp)?;
        let t = monogamy_terms::<f64>(&psi, &cfg)?;
        report.g.record(t.g_verdict);
        report.ga.record(t.ga_verdict);
        worst(&mut report.worst_g_margin, t.g_verdict, t.g_margin);
        worst(&mut report.worst_ga_margin, t.ga_verdict, t.ga_margin);
    }
    Ok(report)
}
