use alloc::string::String;

use crate::constraint::Infeasible;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("not a valid chiral symmetry: {reason}")]
    InvalidSymmetry { reason: String },

    #[error("invalid Gaussian moments: {0}")]
    InvalidMoments(String),

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error("constraint system is infeasible: {0}")]
    Infeasible(Infeasible),

    #[error("expected {expected} coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },

    #[error("generated Hamiltonian leaves the symmetry class at parameter {parameter}: residual {residual:e}")]
    NonChiral { parameter: f64, residual: f64 },

    #[error("non-relaxing: dark mode or degeneracy suspected (smallest Sylvester pivot {smallest_pivot:e})")]
    NonRelaxing { smallest_pivot: f64 },

    #[error("step size underflow at t = {t}: h = {h:e} (stiff or diverging flow)")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("Fock truncation leak {leaked:e} exceeds tolerance {tolerance:e}")]
    TruncationLeak { leaked: f64, tolerance: f64 },

    #[error("plaquette flux undefined: zero hopping between sites {from} and {to}")]
    FluxUndefined { from: usize, to: usize },

    #[error("central fluxes incompatible with uniform hopping magnitude: {0}")]
    IncompatibleFluxes(String),
}
