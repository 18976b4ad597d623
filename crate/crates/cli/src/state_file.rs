use std::collections::BTreeMap;

use gcq_core::numkit::Matrix;
use gcq_core::states::{partial_trace, DensityMatrix, Ensemble, Keep, PureBipartite, PureTripartite};
use gcq_core::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Tolerance on norms and traces when loading a file.
pub const LOAD_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    PureBipartite,
    PureTripartite,
    DensityMatrix,
    Ensemble,
}

/// On-disk state: complex entries as `[re, im]` in i-major product order.
///
/// `dims` is `[d_A, d_B]` for bipartite kinds, `[d_A, d_B, d_S]` for a
/// tripartite state and `[d_A, d_B, m]` for an ensemble of `m`
/// sub-normalized members stored one after another.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: Kind,
    pub dims: Vec<usize>,
    pub data: Vec<[f64; 2]>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureBipartite),
    Tripartite(PureTripartite),
    Density(DensityMatrix),
    Ensemble(Ensemble),
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn check_unit(what: &str, value: f64) -> Result<(), CliError> {
    if (value - 1.0).abs() > LOAD_TOL {
        return Err(input(format!("{what} is {value}, expected 1 within {LOAD_TOL}")));
    }
    Ok(())
}

fn rescale(data: Vec<C64>, norm_sqr: f64) -> Vec<C64> {
    if norm_sqr == 1.0 {
        return data;
    }
    let s = 1.0 / norm_sqr.sqrt();
    data.into_iter().map(|z| z * s).collect()
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| input(format!("malformed state file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state file serializes")
    }

    fn expect_dims(&self, n: usize) -> Result<(), CliError> {
        if self.dims.len() != n || self.dims.contains(&0) {
            return Err(input(format!("{:?} needs {n} positive dims, got {:?}", self.kind, self.dims)));
        }
        let len: usize = self.dims.iter().product();
        let want = if self.kind == Kind::DensityMatrix { len * len } else { len };
        if self.data.len() != want {
            return Err(input(format!("dims {:?} need {want} entries, got {}", self.dims, self.data.len())));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(input("non-finite entry"));
        }
        Ok(())
    }

    fn complex(&self) -> Vec<C64> {
        self.data.iter().map(|&[re, im]| C64::new(re, im)).collect()
    }

    /// Validates invariants within [`LOAD_TOL`] and builds the state.
    pub fn to_state(&self) -> Result<State, CliError> {
        match self.kind {
            Kind::PureBipartite => {
                self.expect_dims(2)?;
                let data = self.complex();
                let n: f64 = data.iter().map(|z| z.norm_sqr()).sum();
                check_unit("norm^2", n)?;
                Ok(State::Pure(PureBipartite::from_vector(self.dims[0], self.dims[1], rescale(data, n))?))
            }
            Kind::PureTripartite => {
                self.expect_dims(3)?;
                let data = self.complex();
                let n: f64 = data.iter().map(|z| z.norm_sqr()).sum();
                check_unit("norm^2", n)?;
                let dims = (self.dims[0], self.dims[1], self.dims[2]);
                Ok(State::Tripartite(PureTripartite::new(dims, rescale(data, n))?))
            }
            Kind::DensityMatrix => {
                self.expect_dims(2)?;
                let n = self.dims[0] * self.dims[1];
                let m = Matrix::from_vec(n, n, self.complex())?;
                let tr = m.trace().re;
                check_unit("trace", tr)?;
                if m.hermitian_defect() > LOAD_TOL {
                    return Err(input(format!("density matrix not Hermitian (defect {})", m.hermitian_defect())));
                }
                let m = if tr == 1.0 { m } else { m.scale_real(1.0 / tr) };
                let rho = DensityMatrix::with_tolerance(self.dims[0], self.dims[1], m, LOAD_TOL)?;
                Ok(State::Density(rho))
            }
            Kind::Ensemble => {
                self.expect_dims(3)?;
                let (a, b, count) = (self.dims[0], self.dims[1], self.dims[2]);
                let data = self.complex();
                let n: f64 = data.iter().map(|z| z.norm_sqr()).sum();
                check_unit("total weight", n)?;
                let data = rescale(data, n);
                let members = data
                    .chunks(a * b)
                    .take(count)
                    .map(|c| PureBipartite::from_vector(a, b, c.to_vec()))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(State::Ensemble(Ensemble::new(members)?))
            }
        }
    }

    pub fn from_state(state: &State) -> Self {
        let pairs = |v: &[C64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        let (kind, dims, data) = match state {
            State::Pure(p) => {
                let (a, b) = p.dims();
                (Kind::PureBipartite, vec![a, b], pairs(p.amp().as_slice()))
            }
            State::Tripartite(t) => {
                let (a, b, s) = t.dims();
                (Kind::PureTripartite, vec![a, b, s], pairs(t.amplitudes()))
            }
            State::Density(r) => {
                let (a, b) = r.dims();
                (Kind::DensityMatrix, vec![a, b], pairs(r.matrix().as_slice()))
            }
            State::Ensemble(e) => {
                let (a, b) = e.dims();
                let data = e.members().iter().flat_map(|m| pairs(m.amp().as_slice())).collect();
                (Kind::Ensemble, vec![a, b, e.len()], data)
            }
        };
        let meta = BTreeMap::from([("basis".to_string(), "i-major".to_string())]);
        Self { kind, dims, data, meta }
    }
}

impl State {
    pub fn kind(&self) -> Kind {
        match self {
            State::Pure(_) => Kind::PureBipartite,
            State::Tripartite(_) => Kind::PureTripartite,
            State::Density(_) => Kind::DensityMatrix,
            State::Ensemble(_) => Kind::Ensemble,
        }
    }

    /// Bipartite density matrix: the AB reduction of a tripartite state.
    pub fn density(&self) -> Result<DensityMatrix, CliError> {
        Ok(match self {
            State::Pure(p) => p.projector()?,
            State::Tripartite(t) => partial_trace(t, Keep::AB),
            State::Density(r) => r.clone(),
            State::Ensemble(e) => e.density_matrix()?,
        })
    }
}
