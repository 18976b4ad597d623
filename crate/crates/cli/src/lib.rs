//! Command-line front end: state files in, JSON or text reports out.

pub mod report;
pub mod state_file;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gcq_core::assist::{
    diagonal_sum, gc_bounds, gcoa_ceiling, gcoa_from_diag, locc_assist_check, monogamy_sample, monogamy_terms,
    optimize_avg_g, swap_bound, Bracket, Direction, OptimizerConfig, Tally,
};
use gcq_core::gconc::{g_pure, wootters_concurrence};
use gcq_core::numkit::{Matrix, Seed};
use gcq_core::states::{eigen_ensemble, Ensemble};
use gcq_core::tau::{build_tau, diagonalize, DiagonalForm, MEMBERSHIP_THRESHOLD};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use report::Report;
use state_file::{State, StateFile};

/// Floating-point accuracy of direct evaluations.
const EXACT_TOL: f64 = 1e-12;
/// Accuracy of values read off a certified diagonal form.
const CLOSED_TOL: f64 = 1e-8;
/// Entries of smaller modulus are omitted from tensor dumps.
const DUMP_THRESHOLD: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] gcq_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(gcq_core::Error::Consistency(_)) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Independent starts per search.
    #[arg(long, global = true, default_value_t = 8)]
    restarts: usize,
    /// Convergence tolerance of the searches.
    #[arg(long, global = true, default_value_t = 1e-13)]
    tol: f64,
    /// Largest decomposition size searched (default d^2).
    #[arg(long = "max-m", global = true)]
    max_m: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// G-concurrence of a pure bipartite state.
    G { file: PathBuf },
    /// Bounds on the G-concurrence of a mixed state.
    Roof { file: PathBuf },
    /// G-concurrence of assistance.
    Gcoa { file: PathBuf },
    /// Nonzero entries of the symmetric tensor of an ensemble.
    Tau { file: PathBuf },
    /// Diagonal form of the symmetric tensor.
    Diag { file: PathBuf },
    /// Assisted G-concurrence for two states sharing the assistant.
    Swap { first: PathBuf, second: PathBuf },
    /// Trade-off inequalities for one d x d x d state, or sampled over random states.
    Monogamy {
        file: Option<PathBuf>,
        /// Local dimension for sampling.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Simulated assistance protocols on a pure tripartite state.
    Assist {
        file: PathBuf,
        /// Random measurements and instruments tried.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Parser, Debug)]
#[command(name = "gcq", version, about = "G-concurrence and G-concurrence of assistance of qudit states")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

struct Loaded {
    state: State,
    digest: String,
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
    let state = StateFile::parse(&text)
        .and_then(|f| f.to_state())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(Loaded { state, digest: hex::encode(Sha256::digest(&bytes)) })
}

fn matrix_json(m: &Matrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::from(m.row(i).iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>()))
        .collect();
    Value::from(rows)
}

fn ensemble_of(state: &State) -> Result<Ensemble, CliError> {
    Ok(match state {
        State::Ensemble(e) => e.clone(),
        other => eigen_ensemble(&other.density()?)?,
    })
}

fn form_of(state: &State, cfg: &OptimizerConfig) -> Result<DiagonalForm, CliError> {
    Ok(diagonalize(&build_tau(&ensemble_of(state)?)?, cfg)?)
}

fn bracket(r: &mut Report, key: &str, b: &Bracket, tol: f64) {
    r.result(&format!("{key}_lower"), b.lower, tol);
    r.result(&format!("{key}_upper"), b.upper, tol);
    r.diag(&format!("{key}_closed_form"), b.closed_form);
}

fn tally(r: &mut Report, key: &str, t: &Tally) {
    r.result(&format!("{key}_holds"), t.holds as f64, 0.0);
    r.result(&format!("{key}_violated"), t.violated as f64, 0.0);
    r.result(&format!("{key}_indeterminate"), t.indeterminate as f64, 0.0);
}

fn execute(cli: &Cli) -> Result<Report, CliError> {
    let g = &cli.global;
    let cfg = OptimizerConfig {
        restarts: g.restarts,
        max_m: g.max_m,
        tol: g.tol,
        seed: Seed(g.seed),
        ..Default::default()
    };
    cfg.validate()?;
    let opt_tol = g.tol;
    let report = |name: &str, inputs: &[&Loaded]| Report::new(name, inputs.iter().map(|l| l.digest.clone()).collect(), g.seed);

    match &cli.command {
        Command::G { file } => {
            let l = load(file)?;
            let State::Pure(psi) = &l.state else {
                return Err(CliError::Input(format!("g needs a pure-bipartite state, got {:?}", l.state.kind())));
            };
            let mut r = report("g", &[&l]);
            r.result("g", g_pure(psi)?, EXACT_TOL);
            Ok(r)
        }
        Command::Roof { file } => {
            let l = load(file)?;
            let rho = l.state.density()?;
            let d = rho.local_dim()?;
            let mut r = report("roof", &[&l]);
            let df = form_of(&State::Density(rho.clone()), &cfg)?;
            r.diag("diagonalizable", df.member);
            r.result("diagonal_residual", df.residual, EXACT_TOL);
            if df.member {
                let b = gc_bounds(&df)?;
                r.result("g_lower", b.lower, CLOSED_TOL);
                r.result("g_upper", b.upper, CLOSED_TOL);
                r.diag("separable", b.separable);
            }
            if d == 2 {
                r.result("concurrence", wootters_concurrence(&rho)?, EXACT_TOL);
            }
            let min = optimize_avg_g(&rho, Direction::Min, &cfg)?;
            r.result("g_upper_optimizer", min.value, opt_tol);
            let max = optimize_avg_g(&rho, Direction::Max, &cfg)?;
            r.result("gcoa_lower_optimizer", max.value, opt_tol);
            Ok(r)
        }
        Command::Gcoa { file } => {
            let l = load(file)?;
            let rho = l.state.density()?;
            let mut r = report("gcoa", &[&l]);
            let df = form_of(&State::Density(rho.clone()), &cfg)?;
            r.diag("diagonalizable", df.member);
            r.result("diagonal_residual", df.residual, EXACT_TOL);
            if df.member {
                r.result("gcoa", gcoa_from_diag(&df)?, CLOSED_TOL);
            } else {
                r.result("diagonal_sum_uncertified", diagonal_sum(&df), CLOSED_TOL);
            }
            r.result("gcoa_ceiling", gcoa_ceiling(&rho)?, EXACT_TOL);
            let max = optimize_avg_g(&rho, Direction::Max, &cfg)?;
            r.result("gcoa_lower_optimizer", max.value, opt_tol);
            r.diag("optimizer_ensemble_size", max.witness.rows());
            Ok(r)
        }
        Command::Tau { file } => {
            let l = load(file)?;
            let tau = build_tau(&ensemble_of(&l.state)?)?;
            let mut r = report("tau", &[&l]);
            r.result("frobenius", tau.frobenius(), EXACT_TOL);
            r.result("off_diagonal_norm", tau.off_diagonal_norm(), EXACT_TOL);
            r.result("symmetry_defect", tau.symmetry_defect(), EXACT_TOL);
            r.diag("rank", tau.rank());
            r.diag("range", tau.range());
            let entries: Vec<Value> = tau
                .nonzero_entries(DUMP_THRESHOLD)
                .into_iter()
                .map(|(idx, z)| json!({ "index": idx, "value": [z.re, z.im] }))
                .collect();
            r.diag("entries", entries);
            Ok(r)
        }
        Command::Diag { file } => {
            let l = load(file)?;
            let df = form_of(&l.state, &cfg)?;
            let mut r = report("diag", &[&l]);
            for (k, lam) in df.lam.iter().enumerate() {
                r.result(&format!("lam_{k}"), *lam, CLOSED_TOL);
            }
            r.result("residual", df.residual, EXACT_TOL);
            r.result("norm", df.norm, EXACT_TOL);
            r.diag("member", df.member);
            r.diag("membership_threshold", MEMBERSHIP_THRESHOLD);
            r.diag("unitary", matrix_json(&df.u));
            Ok(r)
        }
        Command::Swap { first, second } => {
            let (a, b) = (load(first)?, load(second)?);
            let rep = swap_bound(&a.state.density()?, &b.state.density()?, &cfg)?;
            let mut r = report("swap", &[&a, &b]);
            r.result("protocol_max", rep.protocol_max, EXACT_TOL);
            r.result("product_bound", rep.product_bound, if rep.bound_exact { EXACT_TOL } else { opt_tol });
            if let Some(v) = rep.optimizer_max {
                r.result("optimizer_max", v, opt_tol);
            }
            r.result("margin", rep.margin, opt_tol);
            r.diag("bound_exact", rep.bound_exact);
            r.diag("bases", rep.bases);
            Ok(r)
        }
        Command::Monogamy { file: Some(file), .. } => {
            let l = load(file)?;
            let State::Tripartite(psi) = &l.state else {
                return Err(CliError::Input(format!("monogamy needs a pure-tripartite state, got {:?}", l.state.kind())));
            };
            let t = monogamy_terms(psi, &cfg)?;
            let mut r = report("monogamy", &[&l]);
            bracket(&mut r, "g_ab", &t.g_ab, CLOSED_TOL);
            bracket(&mut r, "g_as", &t.g_as, CLOSED_TOL);
            bracket(&mut r, "gcoa_ab", &t.ga_ab, CLOSED_TOL);
            bracket(&mut r, "gcoa_as", &t.ga_as, CLOSED_TOL);
            r.result("g_a_bs", t.g_a_bs, EXACT_TOL);
            r.result("g_margin", t.g_margin, CLOSED_TOL);
            r.result("gcoa_margin", t.ga_margin, CLOSED_TOL);
            r.diag("g_verdict", format!("{:?}", t.g_verdict).to_lowercase());
            r.diag("gcoa_verdict", format!("{:?}", t.ga_verdict).to_lowercase());
            Ok(r)
        }
        Command::Monogamy { file: None, dim, samples } => {
            let rep = monogamy_sample(*dim, *samples, Seed(g.seed))?;
            let mut r = report("monogamy", &[]);
            tally(&mut r, "g", &rep.g);
            tally(&mut r, "gcoa", &rep.ga);
            r.diag("dim", rep.d);
            r.diag("samples", rep.samples);
            r.diag("worst_g_margin", rep.worst_g_margin);
            r.diag("worst_gcoa_margin", rep.worst_ga_margin);
            Ok(r)
        }
        Command::Assist { file, trials } => {
            let l = load(file)?;
            let State::Tripartite(psi) = &l.state else {
                return Err(CliError::Input(format!("assist needs a pure-tripartite state, got {:?}", l.state.kind())));
            };
            let rep = locc_assist_check(psi, *trials, &cfg)?;
            let mut r = report("assist", &[&l]);
            r.result("ceiling", rep.ceiling, if rep.ceiling_exact { CLOSED_TOL } else { EXACT_TOL });
            r.result("det_ceiling", rep.det_ceiling, EXACT_TOL);
            r.result("best_protocol", rep.best_protocol, EXACT_TOL);
            if let Some(x) = rep.instrument_ratio {
                r.result("instrument_ratio", x, CLOSED_TOL);
            }
            r.diag("ceiling_exact", rep.ceiling_exact);
            r.diag("protocols", rep.protocols);
            r.diag("instruments_checked", rep.instruments_checked);
            Ok(r)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, S>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = match cli.global.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
