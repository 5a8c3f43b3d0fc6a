//! Closed-form lattices that realize two target correlation patterns.
//!
//! * [`fourfold`]: a `(2L+1)×(2L+1)` square grid, drain at the origin, whose
//!   steady state entangles each quadruplet of sites related by 90° rotations.
//! * [`herald`]: a drain, a primary chain `A` and a heralding register `B`,
//!   whose steady state two-mode squeezes every `B` site with one energy
//!   eigenmode of `A`.

pub mod fourfold;
pub mod herald;

pub use fourfold::{
    fourfold_hamiltonian, fourfold_nn_template, fourfold_sigma, plaquette_flux, FourfoldParams,
    PlaquetteId, PotentialPattern, QuadrantCouplings,
};
pub use herald::{herald_hamiltonian, herald_sigma, herald_template};
