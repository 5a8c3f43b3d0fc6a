//! Linear constraints that a target symmetry imposes on a Hamiltonian
//! template, and the affine family of Hamiltonians satisfying them.
//!
//! The chiral condition `σ†·H·σ + H* = 0` mixes `H` with its conjugate, so it
//! is linear over the reals but not over the complex numbers. Free entries are
//! therefore split into real and imaginary unknowns. Each unknown is attached
//! to a Hermitian unit matrix (`E_mm`, `(E_mn + E_nm)/√2` or
//! `i(E_mn − E_nm)/√2`), so that unknown vectors and Hamiltonians share the
//! entrywise inner product `Re Σ conj(a_ij) b_ij`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::chiral::{chiral_defect, require_valid};
use crate::linalg::sqrt;
use crate::model::{Hamiltonian, SymmetryMatrix, HERMITIAN_TOL};
use crate::{CMatrix, Error, Result, C64};

/// Rank cutoff relative to the largest singular value, and the largest
/// equation residual a solution may leave.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// What a template allows in one upper-triangle entry `(m, n)`, `m <= n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryTag {
    Fixed(C64),
    FreeComplex,
    FreeReal,
    Zero,
}

/// Pattern of admissible Hamiltonian entries. Entry `(n, m)` is always the
/// conjugate of `(m, n)`; unset entries are [`EntryTag::Zero`].
#[derive(Debug, Clone, PartialEq)]
pub struct HTemplate {
    dim: usize,
    tags: Vec<EntryTag>,
}

impl HTemplate {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            tags: vec![EntryTag::Zero; dim * dim],
        }
    }

    /// Every entry fixed to `h`.
    pub fn fixed(h: &Hamiltonian) -> Self {
        let n = h.dim();
        let mut t = Self::new(n);
        for m in 0..n {
            for k in m..n {
                t.tags[m * n + k] = EntryTag::Fixed(h.get(m, k));
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets the tag of `(m, n)`; for `m > n` the tag is stored on `(n, m)`
    /// with a conjugated value.
    pub fn set(&mut self, m: usize, n: usize, tag: EntryTag) -> Result<()> {
        for idx in [m, n] {
            if idx >= self.dim {
                return Err(Error::IndexOutOfRange { index: idx, dim: self.dim });
            }
        }
        let (a, b, tag) = if m <= n {
            (m, n, tag)
        } else {
            let flipped = match tag {
                EntryTag::Fixed(z) => EntryTag::Fixed(z.conj()),
                other => other,
            };
            (n, m, flipped)
        };
        if a == b {
            match tag {
                EntryTag::FreeComplex => {
                    return Err(Error::InvalidTemplate(format!(
                        "diagonal entry ({a},{a}) cannot be free_complex"
                    )))
                }
                EntryTag::Fixed(z) if !(z.im.abs() <= HERMITIAN_TOL) => {
                    return Err(Error::InvalidTemplate(format!(
                        "diagonal entry ({a},{a}) fixed to non-real value {z}"
                    )))
                }
                _ => {}
            }
        }
        if let EntryTag::Fixed(z) = tag {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidTemplate(format!("entry ({a},{b}) is not finite")));
            }
        }
        let tag = match tag {
            EntryTag::Fixed(z) if a == b => EntryTag::Fixed(C64::new(z.re, 0.0)),
            other => other,
        };
        self.tags[a * self.dim + b] = tag;
        Ok(())
    }

    /// Tag of `(m, n)` as seen from that entry (conjugated below the
    /// diagonal).
    pub fn get(&self, m: usize, n: usize) -> EntryTag {
        if m <= n {
            self.tags[m * self.dim + n]
        } else {
            match self.tags[n * self.dim + m] {
                EntryTag::Fixed(z) => EntryTag::Fixed(z.conj()),
                other => other,
            }
        }
    }

    /// Upper-triangle entries whose tag is not `Zero`, row by row.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, EntryTag)> + '_ {
        let n = self.dim;
        (0..n)
            .flat_map(move |m| (m..n).map(move |k| (m, k)))
            .map(move |(m, k)| (m, k, self.tags[m * n + k]))
            .filter(|(_, _, t)| *t != EntryTag::Zero)
    }

    /// Hermitian matrix holding the fixed entries, zero elsewhere.
    pub fn fixed_part(&self) -> CMatrix {
        let mut h = CMatrix::zeros(self.dim, self.dim);
        for (m, n, tag) in self.entries() {
            if let EntryTag::Fixed(z) = tag {
                h[(m, n)] = z;
                h[(n, m)] = z.conj();
            }
        }
        h
    }

    /// Real unknowns in assembly order.
    pub fn unknowns(&self) -> Vec<Unknown> {
        let mut out = Vec::new();
        for (m, n, tag) in self.entries() {
            match tag {
                EntryTag::FreeReal => out.push(Unknown { m, n, part: Part::Re }),
                EntryTag::FreeComplex => {
                    out.push(Unknown { m, n, part: Part::Re });
                    out.push(Unknown { m, n, part: Part::Im });
                }
                _ => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// One real unknown: the real or imaginary part of upper entry `(m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Unknown {
    pub m: usize,
    pub n: usize,
    pub part: Part,
}

impl Unknown {
    /// The Hermitian unit matrix this unknown multiplies.
    pub fn unit_matrix(&self, dim: usize) -> CMatrix {
        let mut e = CMatrix::zeros(dim, dim);
        let (m, n) = (self.m, self.n);
        if m == n {
            e[(m, m)] = C64::new(1.0, 0.0);
        } else {
            let z = match self.part {
                Part::Re => C64::new(FRAC_1_SQRT_2, 0.0),
                Part::Im => C64::new(0.0, FRAC_1_SQRT_2),
            };
            e[(m, n)] = z;
            e[(n, m)] = z.conj();
        }
        e
    }
}

/// `A·x = b` over the reals. Row `2(i·N + j)` is the real part and row
/// `2(i·N + j) + 1` the imaginary part of entry `(i, j)` of `σ†·H·σ + H*`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub unknowns: Vec<Unknown>,
    pub dim: usize,
}

impl LinearSystem {
    /// Matrix entry `(i, j)` and part that equation `e` constrains.
    pub fn equation_entry(&self, e: usize) -> (usize, usize, Part) {
        let part = if e % 2 == 0 { Part::Re } else { Part::Im };
        let k = e / 2;
        (k / self.dim, k % self.dim, part)
    }
}

fn flatten(m: &CMatrix, out: &mut [f64]) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            out[2 * (i * n + j)] = z.re;
            out[2 * (i * n + j) + 1] = z.im;
        }
    }
}

fn check_dims(template: &HTemplate, sigma: &SymmetryMatrix) -> Result<()> {
    if template.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: template.dim(),
        });
    }
    Ok(())
}

/// Builds the real linear system; fixed entries move to the right-hand side.
pub fn assemble(template: &HTemplate, sigma: &SymmetryMatrix) -> Result<LinearSystem> {
    check_dims(template, sigma)?;
    require_valid(sigma)?;
    let n = template.dim();
    let s = sigma.matrix();
    let unknowns = template.unknowns();
    let rows = 2 * n * n;
    let mut matrix = DMatrix::zeros(rows, unknowns.len());
    let mut col = vec![0.0; rows];
    for (k, u) in unknowns.iter().enumerate() {
        flatten(&chiral_defect(&u.unit_matrix(n), s), &mut col);
        matrix.set_column(k, &DVector::from_column_slice(&col));
    }
    flatten(&chiral_defect(&template.fixed_part(), s), &mut col);
    let rhs = DVector::from_iterator(rows, col.iter().map(|v| -v));
    Ok(LinearSystem {
        matrix,
        rhs,
        unknowns,
        dim: n,
    })
}

/// Why a template admits no chiral Hamiltonian: the least-squares solution
/// still violates equation `equation` by `residual`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Infeasible {
    pub residual: f64,
    pub equation: usize,
    pub row: usize,
    pub col: usize,
    pub part: Part,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = match self.part {
            Part::Re => "Re",
            Part::Im => "Im",
        };
        write!(
            f,
            "least-squares residual {:e} at equation {} ({} of entry ({}, {}) of sigma^dagger H sigma + H*)",
            self.residual, self.equation, part, self.row, self.col
        )
    }
}

/// Affine family `particular + span(basis)` of admissible Hamiltonians.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSolution {
    pub particular: Hamiltonian,
    /// Orthonormal in the entrywise inner product.
    pub basis: Vec<CMatrix>,
    pub n_free: usize,
}

/// Minimum-norm particular solution plus a canonical basis of the
/// homogeneous solutions.
///
/// The basis is obtained by projecting the unit unknown vectors, in assembly
/// order, onto the numerical nullspace and orthonormalizing them; it therefore
/// does not depend on how the SVD resolves degenerate singular values.
pub fn solve(template: &HTemplate, sigma: &SymmetryMatrix) -> Result<ConstraintSolution> {
    let sys = assemble(template, sigma)?;
    let n = sys.dim;
    let k = sys.unknowns.len();

    let (x, null) = if k == 0 {
        (DVector::zeros(0), DMatrix::zeros(0, 0))
    } else {
        min_norm_and_nullspace(&sys.matrix, &sys.rhs)
    };

    let defect = &sys.matrix * &x - &sys.rhs;
    let (equation, residual) = defect
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
    if !(residual <= CONSTRAINT_TOL) {
        let (row, col, part) = sys.equation_entry(equation);
        return Err(Error::Infeasible(Infeasible {
            residual,
            equation,
            row,
            col,
            part,
        }));
    }

    let combine = |coeffs: &[f64]| -> CMatrix {
        let mut h = CMatrix::zeros(n, n);
        for (u, &c) in sys.unknowns.iter().zip(coeffs) {
            if c != 0.0 {
                h += u.unit_matrix(n).scale(c);
            }
        }
        h
    };

    let particular = template.fixed_part() + combine(x.as_slice());
    let basis = canonical_basis(&null)
        .iter()
        .map(|v| combine(v.as_slice()))
        .collect::<Vec<_>>();
    Ok(ConstraintSolution {
        particular: Hamiltonian::new(particular)?,
        n_free: basis.len(),
        basis,
    })
}

/// Minimum-norm least-squares solution and an orthonormal nullspace basis
/// (as columns).
fn min_norm_and_nullspace(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let k = a.ncols();
    // Thin SVD of a tall matrix gives a square V; pad short systems with zero
    // rows so that V always spans the whole unknown space.
    let padded;
    let a = if a.nrows() < k {
        padded = a.clone().resize_vertically(k, 0.0);
        &padded
    } else {
        a
    };
    let b = b.clone().resize_vertically(a.nrows(), 0.0);
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = CONSTRAINT_TOL * s_max;

    let mut x = DVector::zeros(k);
    let mut null_cols = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let v = v_t.row(i).transpose();
        if s > cutoff && s > 0.0 {
            let coef = u.column(i).dot(&b) / s;
            x += v * coef;
        } else {
            null_cols.push(v);
        }
    }
    let null = if null_cols.is_empty() {
        DMatrix::zeros(k, 0)
    } else {
        DMatrix::from_columns(&null_cols)
    };
    (x, null)
}

fn canonical_basis(null: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let k = null.nrows();
    let dim = null.ncols();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(dim);
    for i in 0..k {
        if out.len() == dim {
            break;
        }
        // projection of e_i onto the nullspace
        let mut v = null * null.row(i).transpose();
        for q in &out {
            let c = q.dot(&v);
            v -= q * c;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= norm;
            if let Some(first) = v.iter().find(|c| c.abs() > 1e-12) {
                if *first < 0.0 {
                    v = -v;
                }
            }
            out.push(v);
        }
    }
    out
}

impl ConstraintSolution {
    /// `particular + Σ c_i basis_i`.
    pub fn sample(&self, coefficients: &[f64]) -> Result<Hamiltonian> {
        if coefficients.len() != self.n_free {
            return Err(Error::CoefficientCount {
                expected: self.n_free,
                found: coefficients.len(),
            });
        }
        let mut h = self.particular.matrix().clone();
        for (b, &c) in self.basis.iter().zip(coefficients) {
            h += b.scale(c);
        }
        Hamiltonian::new(h)
    }

    /// Coordinates of the closest family member to `h` and the Frobenius
    /// distance from `h` to the family.
    pub fn project(&self, h: &Hamiltonian) -> Result<(Vec<f64>, f64)> {
        let n = self.particular.dim();
        if h.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: h.dim() });
        }
        let mut d = h.matrix() - self.particular.matrix();
        let mut coeffs = Vec::with_capacity(self.n_free);
        for b in &self.basis {
            let c = real_inner(b, &d);
            d -= b.scale(c);
            coeffs.push(c);
        }
        Ok((coeffs, sqrt(real_inner(&d, &d))))
    }

    /// Frobenius distance from `h` to the affine family.
    pub fn distance_to_family(&self, h: &Hamiltonian) -> Result<f64> {
        self.project(h).map(|(_, d)| d)
    }
}

/// `Re Σ conj(a_ij) b_ij`.
pub fn real_inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Re => "re",
            Part::Im => "im",
        })
    }
}

impl EntryTag {
    pub fn name(&self) -> &'static str {
        match self {
            EntryTag::Fixed(_) => "fixed",
            EntryTag::FreeComplex => "free_complex",
            EntryTag::FreeReal => "free_real",
            EntryTag::Zero => "zero",
        }
    }

    pub fn parse(name: &str, value: Option<C64>) -> Result<Self> {
        match (name, value) {
            ("fixed", Some(z)) => Ok(EntryTag::Fixed(z)),
            ("fixed", None) => Err(Error::InvalidTemplate("fixed entry without a value".to_string())),
            ("free_complex", _) => Ok(EntryTag::FreeComplex),
            ("free_real", _) => Ok(EntryTag::FreeReal),
            ("zero", _) => Ok(EntryTag::Zero),
            (other, _) => Err(Error::InvalidTemplate(format!("unknown tag `{other}`"))),
        }
    }
}
