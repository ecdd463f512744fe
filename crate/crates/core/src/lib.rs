//! Radial multipliers on truncated free-product Fock spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`symbol`] – radial symbols `φ: ℕ₀ → ℂ` and the derived sequences `ψ₁`, `ψ₂`.
//! * [`hankel`] – truncated Hankel matrices of first and second differences, trace
//!   norms, the class norms and rank-one decompositions.
//! * [`sparse`] / [`fock`] – the word basis of a truncated free product of pointed
//!   Hilbert spaces and the creation, diagonal and projection operators acting on it.
//! * [`multiplier`] – the maps `Φ⁽¹⁾`, `Φ⁽²⁾`, the assembled multiplier
//!   `T = T₁ + T₂ + c·Id`, Christensen–Sinclair bounds and the u.c.p. maps `π₁`, `π₂`.
//! * [`integral`] – finitely atomic measures on the open unit disk and the
//!   measure-to-symbol direction of the integral representation.
//! * [`cli`] – the `radial-mult` command line front end.

pub mod cli;
pub mod error;
pub mod fock;
pub mod hankel;
pub mod integral;
pub mod linalg;
pub mod multiplier;
pub mod sparse;
pub mod symbol;
pub mod wire;

pub use error::{Error, Result};
pub use fock::{Case, FockOperator, FockSpace, FockSpec, Letter, Word};
pub use hankel::{CPrimeReport, HankelReport, RankOneDecomposition};
pub use integral::{Atom, DiscreteMeasure};
pub use multiplier::{EigenReport, MultiplierPlan};
pub use symbol::{RadialSymbol, Sequence};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Default numerical tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;
