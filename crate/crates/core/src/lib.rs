//! Cartan joint spectra of finite-dimensional representations of complex
//! solvable Lie algebras.
//!
//! The crate is layered bottom-up:
//!
//! * [`numkit`] - tolerance-controlled dense complex linear algebra.
//! * [`liealg`] - Lie algebras given by structure constants.
//! * [`cartan`] - Cartan subalgebras and root-space decompositions.
//! * [`rep`] - representations and the derived representations built from them.
//! * [`koszul`] - Chevalley-Eilenberg (Koszul) complexes and their homology.
//! * [`spectra`] - Cartan-Taylor, Cartan-Slodkowski, split and essential spectra.
//! * [`verify`] - executable identity checks and a seeded instance generator.

pub mod cartan;
pub mod koszul;
pub mod liealg;
pub mod numkit;
pub mod rep;
pub mod spectra;
pub mod verify;

use thiserror::Error;

pub use cartan::{find_cartan_subalgebra, is_cartan, root_decomposition, CartanDecomposition, Root};
pub use koszul::{build_complex, homology_dims, HomologyProfile, KoszulComplex, Side};
pub use liealg::{LieAlgebra, SubalgebraBasis, ValidationReport};
pub use numkit::{CMat, CVec, Subspace, Tolerance, C64};
pub use rep::{RepReport, Representation};
pub use spectra::{Character, SpectrumKind, SpectrumPoint, SpectrumSet};

/// Errors shared by every layer of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (shapes, non-finite entries,
    /// failed validation, caps exceeded).
    #[error("invalid input: {0}")]
    Input(String),
    /// A numerical procedure could not reach a consistent answer at the
    /// requested tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn numerical_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Numerical(msg.into()))
}
