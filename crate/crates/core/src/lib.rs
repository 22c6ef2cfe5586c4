//! Weak-coupling open quantum system engine.
//!
//! Builds Lindblad and Redfield generators from a system Hamiltonian, coupling
//! operators and a bath spectral density, solves the scalar and matrix memory
//! kernel equations, and reports whether a Lindblad description is justified.
//!
//! Units are natural (hbar = k_B = 1). The bath normalization is fixed to
//! `G(t) = ∫ dω/2π J(ω) e^{-iωt}` throughout, with any coupling constant folded
//! into the amplitude of `J`.

pub mod error;
pub mod qops;
pub mod quad;
pub mod eigenops;
pub mod bath;
pub mod master;
pub mod memory;
pub mod diagnostics;
pub mod cli;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use qops::CMat;
