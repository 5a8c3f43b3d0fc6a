//! Generalized chiral symmetry checks and the predicted steady state.
//!
//! A matrix `σ` is a valid symmetry candidate when it is symmetric, unitary
//! and fixes the drain (`σ_{m,n0} = δ_{m,n0}`). It is a chiral symmetry of `H`
//! when `σ†·H·σ = −H*`. In that case, and absent dark modes, the squeezed
//! drain stabilizes the pure state with `<a†_n a_m> = sinh²r δ_{mn}` and
//! `<a_m a_n> = e^{iφ} sinh r cosh r σ_{mn}`.

use alloc::format;

use crate::linalg::{conj, max_abs, max_abs_diff, symmetric_deviation};
use crate::model::{GaussianMoments, Hamiltonian, SqueezeParams, SymmetryMatrix};
use crate::{CMatrix, Error, Result, C64};

/// Tolerance on the three symmetry conditions.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// `max |σ − σᵀ|`
    pub symmetric_dev: f64,
    /// `max |σ†σ − 1|`
    pub unitary_dev: f64,
    /// `max_m |σ_{m,n0} − δ_{m,n0}|`
    pub drain_dev: f64,
    pub valid: bool,
}

impl SymmetryReport {
    pub fn max_deviation(&self) -> f64 {
        self.symmetric_dev.max(self.unitary_dev).max(self.drain_dev)
    }
}

pub fn is_valid_symmetry(sigma: &SymmetryMatrix) -> SymmetryReport {
    let s = sigma.matrix();
    let n = sigma.dim();
    let n0 = sigma.drain();

    let symmetric_dev = symmetric_deviation(s);
    let gram = s.adjoint() * s;
    let unitary_dev = max_abs_diff(&gram, &CMatrix::identity(n, n));
    let drain_dev = (0..n).fold(0.0f64, |acc, m| {
        let want = if m == n0 { 1.0 } else { 0.0 };
        acc.max((s[(m, n0)] - C64::new(want, 0.0)).norm())
    });
    let valid = symmetric_dev <= SYMMETRY_TOL && unitary_dev <= SYMMETRY_TOL && drain_dev <= SYMMETRY_TOL;
    SymmetryReport {
        symmetric_dev,
        unitary_dev,
        drain_dev,
        valid,
    }
}

/// The matrix `σ†·H·σ + H*`, which vanishes exactly when `σ` is a chiral
/// symmetry of `H`.
pub fn chiral_defect(h: &CMatrix, sigma: &CMatrix) -> CMatrix {
    sigma.adjoint() * h * sigma + conj(h)
}

/// `max |σ†·H·σ + H*|`.
pub fn chiral_residual(h: &Hamiltonian, sigma: &SymmetryMatrix) -> Result<f64> {
    if h.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: h.dim(),
        });
    }
    Ok(max_abs(&chiral_defect(h.matrix(), sigma.matrix())))
}

pub(crate) fn require_valid(sigma: &SymmetryMatrix) -> Result<SymmetryReport> {
    let report = is_valid_symmetry(sigma);
    if report.valid {
        Ok(report)
    } else {
        Err(Error::InvalidSymmetry {
            reason: format!(
                "symmetric dev {:e}, unitary dev {:e}, drain dev {:e}",
                report.symmetric_dev, report.unitary_dev, report.drain_dev
            ),
        })
    }
}

/// Moments of the pure squeezed steady state selected by `σ`.
pub fn predicted_steady_moments(sigma: &SymmetryMatrix, sq: &SqueezeParams) -> Result<GaussianMoments> {
    require_valid(sigma)?;
    let n = sigma.dim();
    let normal = CMatrix::identity(n, n).scale(sq.occupation());
    let anomalous = sigma.matrix() * sq.pairing();
    Ok(GaussianMoments::from_flow(normal, anomalous))
}

/// `max |M·M† − N·(N + 1)|`, zero for a pure zero-mean squeezed vacuum whose
/// normal and anomalous correlations share a mode basis.
pub fn purity_deviation(g: &GaussianMoments) -> f64 {
    let n = g.normal();
    let m = g.anomalous();
    let dim = g.dim();
    let lhs = m * m.adjoint();
    let rhs = n * (n + CMatrix::identity(dim, dim));
    max_abs_diff(&lhs, &rhs)
}
