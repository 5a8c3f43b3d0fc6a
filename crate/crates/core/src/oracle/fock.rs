//! Brute-force check of the moment flow: the full density matrix of up to
//! three sites in a truncated Fock basis, evolved under
//!
//! ```text
//! dρ/dt = G·ρ + ρ·G† + L·ρ·L†,   G = −iĤ − ½ L†L,
//! L = √Γ (cosh r a_{n0} − e^{iφ} sinh r a†_{n0}).
//! ```
//!
//! Operators are truncated before `L†L` is formed, so the truncated generator
//! is still trace preserving.

#[allow(unused_imports)] // float methods when std is absent
use nalgebra::ComplexField;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::ode;
use crate::linalg::max_abs_diff;
use crate::model::{GaussianMoments, Hamiltonian, SqueezeParams};
use crate::{CMatrix, Error, Result, C64};

/// Largest lattice the oracle accepts.
pub const MAX_SITES: usize = 3;
/// Smallest per-site photon cutoff the oracle accepts.
pub const MIN_CUTOFF: usize = 8;
/// Largest population allowed on the top Fock level of any site.
pub const LEAK_TOL: f64 = 1e-6;

/// Integration tolerance; far below the agreement the oracle is used for.
const FOCK_TOL: f64 = 1e-9;
/// Largest change of any second moment over one `5/Γ` chunk at which
/// [`FockMode::Steady`] stops.
const STEADY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockMode {
    /// Evolve the vacuum for this duration.
    Time(f64),
    /// Evolve the vacuum until the second moments stop changing.
    Steady,
}

/// Sparse square matrix stored by rows.
#[derive(Debug, Clone)]
struct Sparse {
    rows: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    fn from_map(dim: usize, entries: BTreeMap<(usize, usize), C64>) -> Self {
        let mut rows = vec![Vec::new(); dim];
        for ((i, j), v) in entries {
            if v != C64::new(0.0, 0.0) {
                rows[i].push((j, v));
            }
        }
        Self { rows }
    }

    fn adjoint(&self) -> Self {
        let mut map = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                map.insert((j, i), v.conj());
            }
        }
        Self::from_map(self.rows.len(), map)
    }

    fn mul(&self, other: &Sparse) -> Sparse {
        let mut map = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            for &(k, a) in row {
                for &(j, b) in &other.rows[k] {
                    *map.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += a * b;
                }
            }
        }
        Self::from_map(self.rows.len(), map)
    }

    /// `out = self · x` for a dense row-major `dim × dim` matrix `x`.
    fn mul_dense(&self, x: &[C64], out: &mut [C64]) {
        let d = self.rows.len();
        for (i, row) in self.rows.iter().enumerate() {
            let dst = &mut out[i * d..(i + 1) * d];
            dst.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for &(k, a) in row {
                let src = &x[k * d..(k + 1) * d];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += a * s;
                }
            }
        }
    }
}

/// Product basis `|n_0, …, n_{N−1}>`, `0 <= n_k <= cutoff`, with site 0 the
/// fastest-varying digit.
struct Basis {
    levels: usize,
    dim: usize,
}

impl Basis {
    fn digit(&self, state: usize, site: usize) -> usize {
        (state / self.levels.pow(site as u32)) % self.levels
    }

    fn stride(&self, site: usize) -> usize {
        self.levels.pow(site as u32)
    }

    fn lower(&self, site: usize) -> Sparse {
        let mut map = BTreeMap::new();
        for s in 0..self.dim {
            let n = self.digit(s, site);
            if n > 0 {
                map.insert((s - self.stride(site), s), C64::new((n as f64).sqrt(), 0.0));
            }
        }
        Sparse::from_map(self.dim, map)
    }
}

fn validate(h: &Hamiltonian, drain: usize, cutoff: usize) -> Result<()> {
    let n = h.dim();
    if n == 0 || n > MAX_SITES {
        return Err(Error::InvalidParameter {
            name: "sites",
            reason: format!("Fock oracle handles 1..={MAX_SITES} sites, got {n}"),
        });
    }
    if drain >= n {
        return Err(Error::IndexOutOfRange { index: drain, dim: n });
    }
    if cutoff < MIN_CUTOFF {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            reason: format!("cutoff must be >= {MIN_CUTOFF}, got {cutoff}"),
        });
    }
    Ok(())
}

/// Second moments of the state reached from the vacuum.
pub fn fock_oracle(
    h: &Hamiltonian,
    drain: usize,
    sq: &SqueezeParams,
    cutoff: usize,
    mode: FockMode,
) -> Result<GaussianMoments> {
    validate(h, drain, cutoff)?;
    let sites = h.dim();
    let levels = cutoff + 1;
    let basis = Basis {
        levels,
        dim: levels.pow(sites as u32),
    };
    let d = basis.dim;
    let lower: Vec<Sparse> = (0..sites).map(|k| basis.lower(k)).collect();
    let raise: Vec<Sparse> = lower.iter().map(Sparse::adjoint).collect();

    // Ĥ = Σ H_mn a†_m a_n
    let mut hmap: BTreeMap<(usize, usize), C64> = BTreeMap::new();
    for m in 0..sites {
        for n in 0..sites {
            let hmn = h.get(m, n);
            if hmn == C64::new(0.0, 0.0) {
                continue;
            }
            for (i, j, v) in triples(&raise[m].mul(&lower[n])) {
                *hmap.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += hmn * v;
            }
        }
    }

    let g = sq.gamma().sqrt();
    let (ch, sh) = (sq.r().cosh(), sq.r().sinh());
    let mut lmap = BTreeMap::new();
    for (i, j, v) in triples(&lower[drain]) {
        *lmap.entry((i, j)).or_insert(C64::new(0.0, 0.0)) += v * (g * ch);
    }
    let pref = C64::from_polar(g * sh, sq.phi());
    for (i, j, v) in triples(&raise[drain]) {
        *lmap.entry((i, j)).or_insert(C64::new(0.0, 0.0)) -= v * pref;
    }
    let jump = Sparse::from_map(d, lmap);
    let jump_adj = jump.adjoint();

    let mut gmap: BTreeMap<(usize, usize), C64> = BTreeMap::new();
    for ((i, j), v) in hmap {
        gmap.insert((i, j), v * C64::new(0.0, -1.0));
    }
    for (i, j, v) in triples(&jump_adj.mul(&jump)) {
        *gmap.entry((i, j)).or_insert(C64::new(0.0, 0.0)) -= v * 0.5;
    }
    let gen = Sparse::from_map(d, gmap);

    let mut scratch = vec![C64::new(0.0, 0.0); d * d];
    let mut scratch2 = scratch.clone();
    let mut herm = scratch.clone();
    let mut rhs = |rho: &[C64], out: &mut [C64]| {
        // The flow is evaluated on the Hermitian part of ρ. Round-off in the
        // anti-Hermitian part then stays frozen instead of being amplified,
        // and ρ·G† = (G·ρ)† needs only one sparse product.
        dagger(rho, &mut herm, d);
        for (h, r) in herm.iter_mut().zip(rho) {
            *h = (*h + r) * 0.5;
        }
        gen.mul_dense(&herm, &mut scratch);
        dagger(&scratch, out, d);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o += s;
        }
        jump.mul_dense(&herm, &mut scratch);
        dagger(&scratch, &mut scratch2, d);
        jump.mul_dense(&scratch2, &mut scratch);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o += s;
        }
    };

    let mut rho = vec![C64::new(0.0, 0.0); d * d];
    rho[0] = C64::new(1.0, 0.0);
    match mode {
        FockMode::Time(t) => {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "t",
                    reason: format!("duration must be finite and >= 0, got {t}"),
                });
            }
            ode::integrate(|_, y, dy| rhs(y, dy), 0.0, t, &mut rho, FOCK_TOL)?;
        }
        FockMode::Steady => {
            // Near the fixed point the step controller parks the fast modes
            // at the tolerance level, so convergence is judged on the moments.
            let chunk = 5.0 / sq.gamma();
            let mut elapsed = 0.0;
            let mut last = second_moments(&rho, &lower, &raise, d);
            loop {
                ode::integrate(|_, y, dy| rhs(y, dy), 0.0, chunk, &mut rho, FOCK_TOL)?;
                elapsed += chunk;
                let now = second_moments(&rho, &lower, &raise, d);
                let change = max_abs_diff(&now.0, &last.0).max(max_abs_diff(&now.1, &last.1));
                last = now;
                if change <= STEADY_TOL {
                    break;
                }
                if elapsed > 1e4 / sq.gamma() {
                    return Err(Error::NonRelaxing { smallest_pivot: change });
                }
            }
        }
    }

    let leaked = (0..d)
        .filter(|&s| (0..sites).any(|k| basis.digit(s, k) == cutoff))
        .map(|s| rho[s * d + s].re)
        .sum::<f64>();
    if leaked > LEAK_TOL {
        return Err(Error::TruncationLeak {
            leaked,
            tolerance: LEAK_TOL,
        });
    }

    let (normal, anomalous) = second_moments(&rho, &lower, &raise, d);
    Ok(GaussianMoments::from_flow(normal, anomalous))
}

/// `(N, M)` with `N_mn = Tr(a†_n a_m ρ)` and `M_mn = Tr(a_m a_n ρ)`.
fn second_moments(rho: &[C64], lower: &[Sparse], raise: &[Sparse], d: usize) -> (CMatrix, CMatrix) {
    let expect = |op: &Sparse| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, row) in op.rows.iter().enumerate() {
            for &(k, a) in row {
                acc += a * rho[k * d + i];
            }
        }
        acc
    };
    let sites = lower.len();
    let mut normal = CMatrix::zeros(sites, sites);
    let mut anomalous = CMatrix::zeros(sites, sites);
    for m in 0..sites {
        for n in 0..sites {
            normal[(m, n)] = expect(&raise[n].mul(&lower[m]));
            anomalous[(m, n)] = expect(&lower[m].mul(&lower[n]));
        }
    }
    (normal, anomalous)
}

fn dagger(x: &[C64], out: &mut [C64], d: usize) {
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = x[j * d + i].conj();
        }
    }
}

fn triples(s: &Sparse) -> Vec<(usize, usize, C64)> {
    s.rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().map(move |&(j, v)| (i, j, v)))
        .collect()
}
