//! Generalized concurrence (G-concurrence) of bipartite qudit states and the
//! G-concurrence of assistance of tripartite states.
//!
//! All numerical code is generic over a [`Real`] scalar (`f32` or `f64`);
//! the aliases below fix the double-precision types used by the CLI and most
//! callers.

pub mod assist;
pub mod error;
pub mod gconc;
pub mod numkit;
pub mod scalar;
pub mod search;
pub mod states;
pub mod tau;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type CMatrix = numkit::Matrix<f64>;
pub type CMatrix32 = numkit::Matrix<f32>;
