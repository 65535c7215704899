//! Exact computations in spherical Hecke algebras of unramified groups.
//!
//! The crate computes, with exact rational arithmetic throughout:
//!
//! * basis changes between double-coset, orbit-sum, and dual-character bases
//!   of the spherical Hecke algebra (via an explicit coset-counting oracle),
//! * integral normalization exponents for Hecke operators acting on coherent
//!   cohomology, in closed form and through the generic pairing path,
//! * Newton point dominance, eigenvalue valuation bounds, and the
//!   Newton-above-Hodge inequality verifier,
//! * extended affine Weyl groups, Bruhat order, admissible sets, and the
//!   stratification data of parahoric local models, including brute-force
//!   finite-field censuses of the moduli chains.
//!
//! The primary interface is the `examples/` directory; each example is a
//! runnable tour of one capability:
//!
//! * `normalization_tables` - exponent tables for the shipped presets
//! * `satake_basis_change` - coset oracle and triangular basis changes
//! * `admissible_strata` - admissible sets and stratum dimensions
//! * `local_model_census` - strata, kernel ranks, finite-field censuses
//! * `newton_dominance` - Newton points, dominance, valuation inequalities
//! * `twisted_characters` - weight multiplicities and twisted traces
//!
//! A thin batch front end (`satake` binary) exposes the same operations as
//! subcommands producing deterministic JSON or TSV.

pub mod affine;
pub mod arith;
pub mod characters;
pub mod cli;
pub mod datum;
pub mod local_model;
pub mod newton;
pub mod normalize;

use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the public
/// operations; the CLI maps `Invalid`-class errors to exit code 2.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("not an integral point: {0}")]
    NotIntegral(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("not dominant: {0}")]
    NotDominant(String),
    #[error("bad rank parameter: {0}")]
    BadRank(String),
    #[error("instance exceeds budget: {0}")]
    Oversize(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
