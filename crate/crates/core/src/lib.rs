//! Reservoir engineering of quadratic bosonic lattices through generalized
//! chiral symmetry.
//!
//! A lattice with Hamiltonian matrix `H` whose single drain site is coupled to
//! a squeezed zero-temperature bath relaxes to a pure squeezed state whenever a
//! symmetric unitary `σ` that fixes the drain satisfies `σ†·H·σ = −H*` and no
//! eigenmode of `H` is dark. This crate runs that logic in both directions:
//!
//! * [`chiral`] checks a candidate `σ` and predicts the steady-state moments.
//! * [`constraint`] turns a target `σ` plus a template of allowed couplings into
//!   the affine family of admissible Hamiltonians.
//! * [`spectral`] measures dark-mode robustness and scans free parameters.
//! * [`exemplars`] builds the four-fold quadruplet lattice and the heralding
//!   chain in closed form.
//! * [`oracle`] integrates the dissipative dynamics of the second moments (and,
//!   for tiny systems, of the full truncated density matrix) to certify the
//!   prediction independently.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod chiral;
pub mod constraint;
mod error;
pub mod exemplars;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{GaussianMoments, Hamiltonian, LatticeSpec, SqueezeParams, SymmetryMatrix};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Dense column-major complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
