//! Mutually unbiased bases and generalized Pauli algebra over finite rings and fields.
//!
//! This crate implements the discrete Weyl-Heisenberg toolbox for a Hilbert space
//! whose computational basis is labelled by a finite commutative structure `G`:
//! either the integers mod N or a Galois field GF(p^m), with N = |G| ≤ 256.
//!
//! On top of the label arithmetic ([`galois`]) it provides
//!
//! * additive characters and the dual (finite Fourier) transform,
//! * the family of N+1 bases built from quadratic character phases, which is a
//!   complete set of mutually unbiased bases whenever `G` is a field ([`bases`]),
//! * clock/shift error operators `V^j_i`, their composition law, the commuting
//!   subgroups of the generalized Pauli group and their joint eigenbases ([`weyl`]),
//! * generalized Bell states, their duality and re-pairing identities ([`bell`]),
//! * linear-inversion state tomography from the subgroup eigenbases ([`tomography`]).
//!
//! # Quick start
//!
//! ```
//! use mubkit::{bases, galois};
//!
//! let s = galois::FiniteStructure::galois_field(2, 2).unwrap();
//! let family = bases::mub_family(&s);
//! let report = bases::unbiasedness(&family, mubkit::DEFAULT_TOL).unwrap();
//! assert!(report.is_complete_mub);
//! ```
//!
//! All numerical checks compare against an absolute tolerance; [`DEFAULT_TOL`] is
//! used unless a caller passes its own. Randomized procedures (joint eigenbases,
//! sampled tomography) take explicit seeds and are deterministic; [`DEFAULT_SEED`]
//! is the default. The `parallel` feature (on by default) routes the large label
//! sweeps through rayon; disabling it yields a purely sequential build with
//! identical results.

// Loop indices here are algebraic labels fed back into the arithmetic, not
// mere positions.
#![allow(clippy::needless_range_loop)]

#[macro_use]
pub mod parallel;

pub mod bases;
pub mod bell;
pub mod cli;
mod error;
pub mod galois;
pub mod linalg;
pub mod tomography;
pub mod weyl;

pub use error::{Error, Result};

/// Absolute tolerance used by checks when the caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Seed for every randomized procedure unless overridden.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Largest supported structure size; add/mul tables are materialized as N×N arrays.
pub const MAX_DIM: usize = 256;
