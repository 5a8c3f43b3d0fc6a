//! Value types shared by every stage of the pipeline.

#[allow(unused_imports)] // float methods when std is absent
use nalgebra::ComplexField;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::linalg::{hermitian_deviation, hermitian_eigen, hermitian_part, symmetric_deviation};
use crate::{CMatrix, Error, Result, C64};

/// Hermiticity tolerance applied when a Hamiltonian is constructed.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Tolerance for the Hermiticity, positivity and symmetry of Gaussian moments.
pub const MOMENT_TOL: f64 = 1e-10;

/// Integer-coordinate lattice with a designated drain site.
///
/// One-dimensional lattices store their coordinate in `x` with `y = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    dim: usize,
    sites: Vec<[i64; 2]>,
    drain: usize,
    edges: Vec<(usize, usize)>,
    lookup: BTreeMap<[i64; 2], usize>,
}

impl LatticeSpec {
    pub fn new(
        dim: usize,
        sites: Vec<[i64; 2]>,
        drain: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidLattice(format!(
                "lattice dimension must be 1 or 2, got {dim}"
            )));
        }
        if sites.is_empty() {
            return Err(Error::InvalidLattice("lattice has no sites".to_string()));
        }
        if drain >= sites.len() {
            return Err(Error::IndexOutOfRange {
                index: drain,
                dim: sites.len(),
            });
        }
        let mut lookup = BTreeMap::new();
        for (i, s) in sites.iter().enumerate() {
            if dim == 1 && s[1] != 0 {
                return Err(Error::InvalidLattice(format!(
                    "site {i} has a y coordinate in a one-dimensional lattice"
                )));
            }
            if lookup.insert(*s, i).is_some() {
                return Err(Error::InvalidLattice(format!(
                    "duplicate coordinate {:?} at site {i}",
                    s
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for &(a, b) in &edges {
            if a >= sites.len() || b >= sites.len() {
                return Err(Error::InvalidLattice(format!(
                    "edge ({a}, {b}) references a missing site"
                )));
            }
            if a == b {
                return Err(Error::InvalidLattice(format!("self-loop at site {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidLattice(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self {
            dim,
            sites,
            drain,
            edges,
            lookup,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[[i64; 2]] {
        &self.sites
    }

    pub fn drain(&self) -> usize {
        self.drain
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, coord: [i64; 2]) -> Option<usize> {
        self.lookup.get(&coord).copied()
    }
}

/// Hermitian single-particle Hamiltonian matrix, in units of the reference
/// hopping `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    entries: CMatrix,
}

impl Hamiltonian {
    /// Accepts `entries` if `max |H - H†| <= HERMITIAN_TOL`, storing the exact
    /// Hermitian part; rejects it otherwise.
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let deviation = hermitian_deviation(&entries);
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        let entries = if deviation == 0.0 {
            entries
        } else {
            hermitian_part(&entries)
        };
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: CMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Entry `H_{m,n}`.
    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }
}

/// Candidate generalized chiral symmetry `σ` together with the drain index it
/// is meant to fix. Validity is checked by [`crate::chiral::is_valid_symmetry`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryMatrix {
    entries: CMatrix,
    drain: usize,
}

impl SymmetryMatrix {
    pub fn new(entries: CMatrix, drain: usize) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        if drain >= entries.nrows() {
            return Err(Error::IndexOutOfRange {
                index: drain,
                dim: entries.nrows(),
            });
        }
        Ok(Self { entries, drain })
    }

    pub fn identity(n: usize, drain: usize) -> Result<Self> {
        Self::new(CMatrix::identity(n, n), drain)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn drain(&self) -> usize {
        self.drain
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.entries[(m, n)]
    }
}

/// Drain bath parameters: squeezing strength `r`, squeezing angle `phi` and
/// drain coupling rate `gamma` (units of `J`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParams {
    r: f64,
    phi: f64,
    gamma: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, phi: f64, gamma: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("squeezing parameter must be finite and >= 0, got {r}"),
            });
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi",
                reason: format!("squeezing angle must be finite, got {phi}"),
            });
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("drain coupling must be finite and > 0, got {gamma}"),
            });
        }
        Ok(Self { r, phi, gamma })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Steady-state occupation `sinh² r` of every mode.
    pub fn occupation(&self) -> f64 {
        let s = self.r.sinh();
        s * s
    }

    /// Anomalous amplitude `e^{iφ} sinh r cosh r`.
    pub fn pairing(&self) -> C64 {
        C64::from_polar(self.r.sinh() * self.r.cosh(), self.phi)
    }
}

/// Zero-mean Gaussian state described by its normal correlations
/// `N_{mn} = <a†_n a_m>` and anomalous correlations `M_{mn} = <a_m a_n>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMoments {
    normal: CMatrix,
    anomalous: CMatrix,
}

impl GaussianMoments {
    pub fn new(normal: CMatrix, anomalous: CMatrix) -> Result<Self> {
        if !normal.is_square() {
            return Err(Error::NotSquare {
                rows: normal.nrows(),
                cols: normal.ncols(),
            });
        }
        if anomalous.shape() != normal.shape() {
            return Err(Error::DimensionMismatch {
                expected: normal.nrows(),
                found: anomalous.nrows(),
            });
        }
        let herm = hermitian_deviation(&normal);
        if !(herm <= MOMENT_TOL) {
            return Err(Error::InvalidMoments(format!(
                "normal correlations not Hermitian (deviation {herm:e})"
            )));
        }
        let (eigs, _) = hermitian_eigen(&hermitian_part(&normal));
        if let Some(&lowest) = eigs.first() {
            if lowest < -MOMENT_TOL {
                return Err(Error::InvalidMoments(format!(
                    "normal correlations not positive semidefinite (eigenvalue {lowest:e})"
                )));
            }
        }
        let sym = symmetric_deviation(&anomalous);
        if !(sym <= MOMENT_TOL) {
            return Err(Error::InvalidMoments(format!(
                "anomalous correlations not symmetric (deviation {sym:e})"
            )));
        }
        Ok(Self { normal, anomalous })
    }

    /// Projects onto the invariant manifold (Hermitian `N`, symmetric `M`)
    /// without checking positivity. For outputs of trusted linear flows.
    pub(crate) fn from_flow(normal: CMatrix, anomalous: CMatrix) -> Self {
        Self {
            normal: hermitian_part(&normal),
            anomalous: crate::linalg::symmetric_part(&anomalous),
        }
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            normal: CMatrix::zeros(n, n),
            anomalous: CMatrix::zeros(n, n),
        }
    }

    /// Uncorrelated thermal state with occupation `nbar` on every site.
    pub fn thermal(n: usize, nbar: f64) -> Result<Self> {
        Self::new(
            CMatrix::identity(n, n).scale(nbar),
            CMatrix::zeros(n, n),
        )
    }

    pub fn dim(&self) -> usize {
        self.normal.nrows()
    }

    pub fn normal(&self) -> &CMatrix {
        &self.normal
    }

    pub fn anomalous(&self) -> &CMatrix {
        &self.anomalous
    }
}
