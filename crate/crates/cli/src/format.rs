//! JSON documents for matrices, symmetries, lattices, templates, moments and
//! constraint solutions.

use std::fs;
use std::io;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use squeezelat_core::constraint::{ConstraintSolution, EntryTag, HTemplate};
use squeezelat_core::{CMatrix, GaussianMoments, Hamiltonian, LatticeSpec, SqueezeParams, SymmetryMatrix, C64};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{source_name}: {error}")]
    Io { source_name: String, error: io::Error },
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{source_name}: {message}")]
    Shape { source_name: String, message: String },
}

/// serde_json formatter that prints floats as `{:.16e}`.
struct Canonical;

impl serde_json::ser::Formatter for Canonical {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

/// Single-line canonical JSON followed by a newline. Non-finite floats
/// become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Canonical);
    value.serialize(&mut ser).expect("documents serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Parses `text`; errors name `source_name` and the line and column.
pub fn from_json<T: DeserializeOwned>(text: &str, source_name: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|error| FormatError::Io {
        source_name: name.clone(),
        error,
    })?;
    from_json(&text, &name)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|error| FormatError::Io {
        source_name: path.display().to_string(),
        error,
    })
}

fn shape(source_name: &str, message: String) -> FormatError {
    FormatError::Shape {
        source_name: source_name.to_string(),
        message,
    }
}

/// Dense row-major complex matrix, entries as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub dim: usize,
    /// Energy unit of the entries; informational only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

fn rows_of(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_rows(dim: usize, rows: &[Vec<[f64; 2]>], source_name: &str) -> Result<CMatrix, FormatError> {
    if rows.len() != dim {
        return Err(shape(source_name, format!("expected {dim} rows, found {}", rows.len())));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(shape(
                source_name,
                format!("row {i}: expected {dim} entries, found {}", row.len()),
            ));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(shape(source_name, format!("entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            dim: m.nrows(),
            unit: None,
            entries: rows_of(m),
        }
    }

    pub fn from_hamiltonian(h: &Hamiltonian) -> Self {
        Self {
            unit: Some("J".to_string()),
            ..Self::from_matrix(h.matrix())
        }
    }

    pub fn to_matrix(&self, source_name: &str) -> Result<CMatrix, FormatError> {
        matrix_from_rows(self.dim, &self.entries, source_name)
    }
}

/// A symmetry matrix plus the index of the drain site it fixes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaDoc {
    pub dim: usize,
    pub drain: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl SigmaDoc {
    pub fn from_sigma(s: &SymmetryMatrix) -> Self {
        Self {
            dim: s.dim(),
            drain: s.drain(),
            entries: rows_of(s.matrix()),
        }
    }

    /// Shape-checked only; symmetry validity is a separate question.
    pub fn to_sigma(&self, source_name: &str) -> Result<SymmetryMatrix, FormatError> {
        let m = matrix_from_rows(self.dim, &self.entries, source_name)?;
        SymmetryMatrix::new(m, self.drain).map_err(|e| shape(source_name, e.to_string()))
    }
}

fn default_dimension() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    /// 1 or 2; one-dimensional lattices keep `y = 0`.
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    pub sites: Vec<[i64; 2]>,
    pub drain: usize,
    pub edges: Vec<[usize; 2]>,
}

impl LatticeDoc {
    pub fn from_lattice(l: &LatticeSpec) -> Self {
        Self {
            dimension: l.dim(),
            sites: l.sites().to_vec(),
            drain: l.drain(),
            edges: l.edges().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_lattice(&self, source_name: &str) -> Result<LatticeSpec, FormatError> {
        let edges = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        LatticeSpec::new(self.dimension, self.sites.clone(), self.drain, edges)
            .map_err(|e| shape(source_name, e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezeDoc {
    pub r: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl From<&SqueezeParams> for SqueezeDoc {
    fn from(s: &SqueezeParams) -> Self {
        Self {
            r: s.r(),
            phi: s.phi(),
            gamma: s.gamma(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateEntryDoc {
    pub m: usize,
    pub n: usize,
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<[f64; 2]>,
}

/// Listed entries only; everything else is `zero`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateDoc {
    pub dim: usize,
    pub entries: Vec<TemplateEntryDoc>,
}

impl TemplateDoc {
    /// Upper-triangle entries that are not `zero`, row by row.
    pub fn from_template(t: &HTemplate) -> Self {
        let entries = t
            .entries()
            .filter(|(_, _, tag)| *tag != EntryTag::Zero)
            .map(|(m, n, tag)| TemplateEntryDoc {
                m,
                n,
                tag: tag.name().to_string(),
                value: match tag {
                    EntryTag::Fixed(z) => Some([z.re, z.im]),
                    _ => None,
                },
            })
            .collect();
        Self { dim: t.dim(), entries }
    }

    pub fn to_template(&self, source_name: &str) -> Result<HTemplate, FormatError> {
        let mut t = HTemplate::new(self.dim);
        for (k, e) in self.entries.iter().enumerate() {
            let value = e.value.map(|[re, im]| C64::new(re, im));
            EntryTag::parse(&e.tag, value)
                .and_then(|tag| t.set(e.m, e.n, tag))
                .map_err(|err| shape(source_name, format!("entry {k}: {err}")))?;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsDoc {
    /// `N_{mn} = ⟨a†_n a_m⟩`
    pub normal: MatrixDoc,
    /// `M_{mn} = ⟨a_m a_n⟩`
    pub anomalous: MatrixDoc,
}

impl MomentsDoc {
    pub fn from_moments(g: &GaussianMoments) -> Self {
        Self {
            normal: MatrixDoc::from_matrix(g.normal()),
            anomalous: MatrixDoc::from_matrix(g.anomalous()),
        }
    }

    pub fn to_moments(&self, source_name: &str) -> Result<GaussianMoments, FormatError> {
        let n = self.normal.to_matrix(source_name)?;
        let m = self.anomalous.to_matrix(source_name)?;
        GaussianMoments::new(n, m).map_err(|e| shape(source_name, e.to_string()))
    }
}

/// `H = particular + Σ c_k basis_k` for real `c_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDoc {
    pub n_free: usize,
    pub particular: MatrixDoc,
    pub basis: Vec<MatrixDoc>,
}

impl SolutionDoc {
    pub fn from_solution(s: &ConstraintSolution) -> Self {
        Self {
            n_free: s.n_free,
            particular: MatrixDoc::from_hamiltonian(&s.particular),
            basis: s.basis.iter().map(MatrixDoc::from_matrix).collect(),
        }
    }
}
