//! Dark-mode diagnostics and one-parameter scans.
//!
//! A squeezed drain can only steer an eigenmode of `H` that has weight on the
//! drain site, and two degenerate modes can always be recombined into one that
//! avoids it. Both failure modes are tracked by a metric: the smallest drain
//! weight `min_i |ψ⁽ⁱ⁾_{n0}|` and the smallest level spacing.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use nalgebra::ComplexField;

use crate::chiral::{chiral_residual, require_valid};
use crate::constraint::CONSTRAINT_TOL;
use crate::exemplars::fourfold::{fourfold_hamiltonian, FourfoldParams, PotentialPattern};
use crate::linalg::hermitian_eigen;
use crate::model::{Hamiltonian, SymmetryMatrix};
use crate::{CMatrix, Error, Result};

/// Both metrics must exceed this for a lattice to count as relaxing.
pub const RELAXING_THRESHOLD: f64 = 1e-8;

/// Eigen-decomposition of a Hamiltonian, energies ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSet {
    pub energies: Vec<f64>,
    /// Column `i` is the mode of energy `energies[i]`.
    pub wavefunctions: CMatrix,
}

pub fn eigenmodes(h: &Hamiltonian) -> ModeSet {
    let (energies, wavefunctions) = hermitian_eigen(h.matrix());
    ModeSet { energies, wavefunctions }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkModeMetrics {
    /// `min_i |ψ⁽ⁱ⁾_{n0}|`
    pub min_drain_weight: f64,
    /// `min_{i<j} |ε_i − ε_j|`; infinite for a single site.
    pub min_gap: f64,
    pub relaxing: bool,
}

impl DarkModeMetrics {
    /// `min_drain_weight · min_gap`, the quantity scans maximize.
    pub fn combined(&self) -> f64 {
        if self.min_gap.is_infinite() {
            self.min_drain_weight
        } else {
            self.min_drain_weight * self.min_gap
        }
    }
}

pub fn dark_mode_metrics(h: &Hamiltonian, drain: usize) -> Result<DarkModeMetrics> {
    if drain >= h.dim() {
        return Err(Error::IndexOutOfRange {
            index: drain,
            dim: h.dim(),
        });
    }
    let modes = eigenmodes(h);
    Ok(metrics_from_modes(&modes, drain))
}

pub fn metrics_from_modes(modes: &ModeSet, drain: usize) -> DarkModeMetrics {
    let min_drain_weight = modes
        .wavefunctions
        .row(drain)
        .iter()
        .fold(f64::INFINITY, |a, z| a.min(z.norm()));
    let min_gap = modes
        .energies
        .windows(2)
        .fold(f64::INFINITY, |a, w| a.min(w[1] - w[0]));
    DarkModeMetrics {
        min_drain_weight,
        min_gap,
        relaxing: min_drain_weight > RELAXING_THRESHOLD && min_gap > RELAXING_THRESHOLD,
    }
}

/// Evenly spaced points `from, from + step, …` up to `to` (inclusive within a
/// relative slack of `1e-9` steps).
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite() && step > 0.0 && to >= from) {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("need finite from <= to and step > 0, got {from}..{to} step {step}"),
        });
    }
    let count = ComplexField::floor((to - from) / step + 1e-9) as usize;
    Ok((0..=count).map(|k| from + k as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub param: f64,
    pub min_drain_weight: f64,
    pub min_gap: f64,
}

impl ScanRow {
    pub fn combined(&self) -> f64 {
        DarkModeMetrics {
            min_drain_weight: self.min_drain_weight,
            min_gap: self.min_gap,
            relaxing: false,
        }
        .combined()
    }
}

/// Rows in grid order plus the location of each metric's maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    pub argmax_drain_weight: f64,
    pub argmax_gap: f64,
    pub argmax_combined: f64,
    /// Parameters of interior grid points where the combined metric is
    /// strictly larger than at both neighbours.
    pub combined_local_maxima: Vec<f64>,
}

fn argmax(rows: &[ScanRow], key: impl Fn(&ScanRow) -> f64) -> usize {
    let mut best = 0;
    for (i, r) in rows.iter().enumerate() {
        if key(r) > key(&rows[best]) {
            best = i;
        }
    }
    best
}

impl ScanTable {
    pub fn from_rows(rows: Vec<ScanRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "scan grid is empty".to_string(),
            });
        }
        let argmax_drain_weight = rows[argmax(&rows, |r| r.min_drain_weight)].param;
        let argmax_gap = rows[argmax(&rows, |r| r.min_gap)].param;
        let ic = argmax(&rows, ScanRow::combined);
        let combined_local_maxima = rows
            .windows(3)
            .filter(|w| w[1].combined() > w[0].combined() && w[1].combined() > w[2].combined())
            .map(|w| w[1].param)
            .collect();
        Ok(Self {
            argmax_combined: rows[ic].param,
            argmax_drain_weight,
            argmax_gap,
            combined_local_maxima,
            rows,
        })
    }

    /// Whether the combined metric peaks strictly inside the grid.
    pub fn has_interior_maximum(&self) -> bool {
        let first = self.rows[0].param;
        let last = self.rows[self.rows.len() - 1].param;
        self.argmax_combined != first && self.argmax_combined != last
    }
}

/// One scan point; rejects a Hamiltonian that left the symmetry class.
pub fn scan_point(h: &Hamiltonian, sigma: &SymmetryMatrix, param: f64) -> Result<ScanRow> {
    let residual = chiral_residual(h, sigma)?;
    if !(residual <= CONSTRAINT_TOL) {
        return Err(Error::NonChiral { parameter: param, residual });
    }
    let m = dark_mode_metrics(h, sigma.drain())?;
    Ok(ScanRow {
        param,
        min_drain_weight: m.min_drain_weight,
        min_gap: m.min_gap,
    })
}

/// Evaluates `family` on every grid point, in order.
pub fn scan<F>(family: F, grid: &[f64], sigma: &SymmetryMatrix) -> Result<ScanTable>
where
    F: Fn(f64) -> Result<Hamiltonian>,
{
    require_valid(sigma)?;
    let rows = grid
        .iter()
        .map(|&p| family(p).and_then(|h| scan_point(&h, sigma, p)))
        .collect::<Result<Vec<_>>>()?;
    ScanTable::from_rows(rows)
}

/// One-parameter potential families on the four-fold lattice with uniform
/// hopping `J = 1` and the default fluxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialFamily {
    /// `V_n = (−1)^{q_n} 𝒱`
    Alternating,
    /// `V_n = 𝒱 n_x n_y / L²`
    Saddle,
    /// Ignores the parameter; zero potential.
    Constant,
}

impl PotentialFamily {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "alternating" => Some(Self::Alternating),
            "saddle" => Some(Self::Saddle),
            "constant" => Some(Self::Constant),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Alternating => "alternating",
            Self::Saddle => "saddle",
            Self::Constant => "constant",
        }
    }

    pub fn pattern(&self, value: f64) -> PotentialPattern {
        match self {
            Self::Alternating => PotentialPattern::Alternating(value),
            Self::Saddle => PotentialPattern::Saddle(value),
            Self::Constant => PotentialPattern::Flat,
        }
    }

    pub fn hamiltonian(&self, l: usize, value: f64) -> Result<Hamiltonian> {
        fourfold_hamiltonian(&FourfoldParams::uniform(l, 1.0, self.pattern(value)))
    }
}
