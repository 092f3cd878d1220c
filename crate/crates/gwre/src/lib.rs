//! Left-tail density of the martingale limit of Galton-Watson branching
//! processes in finite random environments.
//!
//! The pipeline: offspring distributions and environments ([`model`]), the
//! environment-averaged transition coefficients q_nm ([`qmatrix`]), the
//! limiting rare-event ratio table phi_nj and its generating functions
//! ([`phi`]), pseudo-inverse coefficients b_j ([`pseudo_inverse`]), power-law
//! amplitude extraction and the closed-form density approximation
//! ([`asymptotics`]). Two independent oracles validate the result: a
//! brute-force composition + Fourier-inversion reference ([`reference`]) and
//! direct process simulation ([`montecarlo`]).
//!
//! All recurrence/series kernels are generic over [`Real`], with `f64`
//! (standard) and [`DoubleDouble`] (extended, ~32 significant digits)
//! implementations.

// guards written as `!(x > y)` deliberately fail closed on NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
mod curve;
mod dd;
mod error;
pub mod model;
pub mod montecarlo;
pub mod phi;
pub mod pseudo_inverse;
pub mod qmatrix;
mod real;
pub mod reference;

pub use curve::{CurveMeta, DensityCurve};
pub use dd::DoubleDouble;
pub use num_complex::Complex64;
pub use error::{Error, Result};
pub use model::{two_poly_family, Environment, OffspringPgf, Violation};
pub use phi::PhiTable;
pub use pseudo_inverse::BVector;
pub use qmatrix::QMatrix;
pub use real::Real;
