//! Dense complex linear algebra: determinants, Hermitian eigenproblems,
//! Haar sampling and Takagi factorization.

mod det;
mod eig;
pub(crate) mod matrix;
mod qr;
mod random;
mod takagi;

pub use det::determinant;
pub use eig::{hermitian_eig, HermitianEigen};
pub use matrix::{real_inner, Matrix};
pub use qr::{complete_unitary, orthonormalize};
pub use random::{complex_normal, gaussian_matrix, haar_unitary, random_unit_vector, Seed};
pub use takagi::{takagi, Takagi};
