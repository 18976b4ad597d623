#![allow(dead_code)]

use gcq_core::numkit::{gaussian_matrix, random_unit_vector, Matrix, Seed};
use gcq_core::states::{DensityMatrix, Ensemble, PureBipartite, PureTripartite};
use gcq_core::C64;
use rand::Rng;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn random_density(d: usize, rank: usize, seed: u64) -> DensityMatrix {
    let g: Matrix = gaussian_matrix(d * d, rank, &mut Seed(seed).rng());
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(d, d, m.scale_real(1.0 / tr)).unwrap()
}

pub fn random_pure(d: usize, seed: u64) -> PureBipartite {
    PureBipartite::from_vector(d, d, random_unit_vector(d * d, &mut Seed(seed).rng())).unwrap()
}

pub fn random_tripartite(dims: (usize, usize, usize), seed: u64) -> PureTripartite {
    let amp = random_unit_vector(dims.0 * dims.1 * dims.2, &mut Seed(seed).rng());
    PureTripartite::new(dims, amp).unwrap()
}

pub fn random_probabilities(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = Seed(seed).rng();
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `{ sqrt(p_k) |kk> }` on `4 x 4`.
pub fn four_level_ensemble(p: &[f64]) -> Ensemble {
    let members = (0..4)
        .map(|k| {
            let mut a = Matrix::zeros(4, 4);
            a[(k, k)] = c(p[k].sqrt());
            PureBipartite::new(a).unwrap()
        })
        .collect();
    Ensemble::new(members).unwrap()
}

/// `p |chi><chi| + (1 - p) |01><01|` with `chi` maximally entangled on `3 x 3`.
pub fn qutrit_mixture(p: f64) -> DensityMatrix {
    let chi = PureBipartite::normalized(Matrix::identity(3).scale_real(1.0 / 3f64.sqrt())).unwrap();
    let mut a = Matrix::zeros(3, 3);
    a[(0, 1)] = c(1.0);
    let prod = PureBipartite::normalized(a).unwrap();
    DensityMatrix::mixture(&[(p, &chi.projector().unwrap()), (1.0 - p, &prod.projector().unwrap())]).unwrap()
}
