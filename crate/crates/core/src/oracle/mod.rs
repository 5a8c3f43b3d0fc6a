//! Dissipative dynamics of the second moments.
//!
//! With `Ĥ = Σ H_{mn} a†_m a_n` and the drain jump operator
//! `√Γ (cosh r a_{n0} − e^{iφ} sinh r a†_{n0})`, the normal and anomalous
//! correlations obey the closed linear flow
//!
//! ```text
//! dN/dt = A·N + N·A† + Γ sinh²r E
//! dM/dt = A·M + M·Aᵀ + Γ e^{iφ} sinh r cosh r E
//! ```
//!
//! where `A = −iH − (Γ/2) E` and `E` projects onto the drain. The stationary
//! point solves two Sylvester equations, which are reduced to triangular form
//! through a complex Schur decomposition of `A`.

pub mod fock;
pub mod ode;

#[allow(unused_imports)] // float methods when std is absent
use nalgebra::ComplexField;
use alloc::format;

use crate::linalg::{expm, max_abs, max_abs_diff, solve_triangular_sylvester};
use crate::model::{GaussianMoments, Hamiltonian, SqueezeParams};
use crate::{CMatrix, Error, Result, C64};

pub use fock::{fock_oracle, FockMode};

/// Local error tolerance of the adaptive integrator.
pub const EVOLVE_TOL: f64 = 1e-10;

/// Sylvester pivots below this (relative to `max(1, max|A|)`) mark the flow
/// as non-relaxing.
pub const PIVOT_TOL: f64 = 1e-10;

/// The affine moment flow for one Hamiltonian, drain and bath.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentGenerator {
    drift: CMatrix,
    drain: usize,
    gamma: f64,
    /// `Γ sinh²r`
    normal_source: f64,
    /// `Γ e^{iφ} sinh r cosh r`
    anomalous_source: C64,
}

impl MomentGenerator {
    pub fn new(h: &Hamiltonian, drain: usize, sq: &SqueezeParams) -> Result<Self> {
        Self::from_parts(h, drain, sq.r(), sq.phi(), sq.gamma())
    }

    /// Like [`MomentGenerator::new`] but also accepts `gamma = 0`, the closed
    /// system.
    pub fn from_parts(h: &Hamiltonian, drain: usize, r: f64, phi: f64, gamma: f64) -> Result<Self> {
        let n = h.dim();
        if drain >= n {
            return Err(Error::IndexOutOfRange { index: drain, dim: n });
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("drain coupling must be finite and >= 0, got {gamma}"),
            });
        }
        if !(r.is_finite() && r >= 0.0 && phi.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("need finite r >= 0 and finite phi, got r = {r}, phi = {phi}"),
            });
        }
        let mut drift = h.matrix().map(|z| z * C64::new(0.0, -1.0));
        drift[(drain, drain)] -= C64::new(gamma / 2.0, 0.0);
        let (s, c) = (r.sinh(), r.cosh());
        Ok(Self {
            drift,
            drain,
            gamma,
            normal_source: gamma * s * s,
            anomalous_source: C64::from_polar(gamma * s * c, phi),
        })
    }

    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    pub fn drain(&self) -> usize {
        self.drain
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `A = −iH − (Γ/2) E`.
    pub fn drift(&self) -> &CMatrix {
        &self.drift
    }

    fn derivative(&self, normal: &CMatrix, anomalous: &CMatrix) -> (CMatrix, CMatrix) {
        let a = &self.drift;
        let mut dn = a * normal + normal * a.adjoint();
        let mut dm = a * anomalous + anomalous * a.transpose();
        let d = self.drain;
        dn[(d, d)] += C64::new(self.normal_source, 0.0);
        dm[(d, d)] += self.anomalous_source;
        (dn, dm)
    }

    /// Time derivative `(dN/dt, dM/dt)` at `g`.
    pub fn apply(&self, g: &GaussianMoments) -> Result<(CMatrix, CMatrix)> {
        self.check_dim(g.dim())?;
        Ok(self.derivative(g.normal(), g.anomalous()))
    }

    /// `max` entry modulus of the time derivative; zero at a fixed point.
    pub fn residual(&self, g: &GaussianMoments) -> Result<f64> {
        let (dn, dm) = self.apply(g)?;
        Ok(max_abs(&dn).max(max_abs(&dm)))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    fn pivot_floor(&self) -> f64 {
        PIVOT_TOL * max_abs(&self.drift).max(1.0)
    }
}

/// Unique stationary moments of the flow.
///
/// Fails with [`Error::NonRelaxing`] when the Sylvester operator is
/// numerically singular, i.e. some eigenmode of `H` does not decay.
pub fn steady_moments(gen: &MomentGenerator) -> Result<GaussianMoments> {
    let n = gen.dim();
    let (q, t) = gen.drift.clone().schur().unpack();
    let d = gen.drain;

    // A·N + N·A† = −s E  ⇒  T·Y + Y·T† = −s Q†EQ,  N = Q·Y·Q†
    let qd = q.row(d).transpose();
    let rank_one = |w: &CMatrix, c: C64| -> CMatrix {
        let mut f = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                f[(i, j)] = -c * qd[i].conj() * w[(j, 0)];
            }
        }
        f
    };

    let qd_col = CMatrix::from_column_slice(n, 1, qd.as_slice());
    let f_normal = rank_one(&qd_col, C64::new(gen.normal_source, 0.0));
    let (y_normal, pivot_n) = solve_triangular_sylvester(&t, &t.adjoint(), &f_normal);

    // A·M + M·Aᵀ = −c E  ⇒  T·Y + Y·Tᵀ = −c Q†E·conj(Q),  M = Q·Y·Qᵀ
    let qd_conj = qd_col.map(|z| z.conj());
    let f_anom = rank_one(&qd_conj, gen.anomalous_source);
    let (y_anom, pivot_m) = solve_triangular_sylvester(&t, &t.transpose(), &f_anom);

    let smallest_pivot = pivot_n.min(pivot_m);
    if !(smallest_pivot > gen.pivot_floor()) {
        return Err(Error::NonRelaxing { smallest_pivot });
    }
    let normal = &q * y_normal * q.adjoint();
    let anomalous = &q * y_anom * q.transpose();
    Ok(GaussianMoments::from_flow(normal, anomalous))
}

/// How [`evolve`] propagates the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    /// Dormand–Prince 5(4) with the given local error tolerance.
    Adaptive { tol: f64 },
    /// `X(t) = X∞ + e^{At}(X0 − X∞)e^{Bt}`, with `B = A†` or `Aᵀ`. Needs a
    /// relaxing flow unless the source terms vanish.
    Exact,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Adaptive { tol: EVOLVE_TOL }
    }
}

/// Moments after evolving `g0` for a duration `t >= 0`.
pub fn evolve(g0: &GaussianMoments, gen: &MomentGenerator, t: f64, integrator: Integrator) -> Result<GaussianMoments> {
    gen.check_dim(g0.dim())?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            reason: format!("duration must be finite and >= 0, got {t}"),
        });
    }
    if t == 0.0 {
        return Ok(g0.clone());
    }
    match integrator {
        Integrator::Adaptive { tol } => evolve_adaptive(g0, gen, t, tol),
        Integrator::Exact => {
            let steady = match steady_moments(gen) {
                Ok(s) => s,
                Err(Error::NonRelaxing { .. })
                    if gen.normal_source == 0.0 && gen.anomalous_source == C64::new(0.0, 0.0) =>
                {
                    GaussianMoments::vacuum(gen.dim())
                }
                Err(e) => return Err(e),
            };
            Ok(propagate_exact(g0, gen, &steady, t))
        }
    }
}

fn propagate_exact(g0: &GaussianMoments, gen: &MomentGenerator, steady: &GaussianMoments, t: f64) -> GaussianMoments {
    let u = expm(&gen.drift.scale(t));
    let dn = g0.normal() - steady.normal();
    let dm = g0.anomalous() - steady.anomalous();
    let normal = steady.normal() + &u * dn * u.adjoint();
    let anomalous = steady.anomalous() + &u * dm * u.transpose();
    GaussianMoments::from_flow(normal, anomalous)
}

fn evolve_adaptive(g0: &GaussianMoments, gen: &MomentGenerator, t: f64, tol: f64) -> Result<GaussianMoments> {
    let n = gen.dim();
    let len = n * n;
    let mut y = ode::pack(&[g0.normal(), g0.anomalous()]);
    ode::integrate(
        |_, y, dy| {
            let normal = CMatrix::from_column_slice(n, n, &y[..len]);
            let anomalous = CMatrix::from_column_slice(n, n, &y[len..]);
            let (dn, dm) = gen.derivative(&normal, &anomalous);
            dy[..len].copy_from_slice(dn.as_slice());
            dy[len..].copy_from_slice(dm.as_slice());
        },
        0.0,
        t,
        &mut y,
        tol,
    )?;
    let normal = CMatrix::from_column_slice(n, n, &y[..len]);
    let anomalous = CMatrix::from_column_slice(n, n, &y[len..]);
    Ok(GaussianMoments::from_flow(normal, anomalous))
}

/// `max(max|N_a − N_b|, max|M_a − M_b|)`.
pub fn moment_distance(a: &GaussianMoments, b: &GaussianMoments) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(max_abs_diff(a.normal(), b.normal()).max(max_abs_diff(a.anomalous(), b.anomalous())))
}

/// Earliest time (to relative precision `1e-6`) at which the exact flow from
/// `g0` is within `target` of the stationary moments and stays there at the
/// bracketing doubling times.
///
/// Fails with [`Error::NonRelaxing`] if the flow has no unique fixed point or
/// does not get within `target` by `t = 1e12 / Γ`.
pub fn relaxation_time(gen: &MomentGenerator, g0: &GaussianMoments, target: f64) -> Result<f64> {
    gen.check_dim(g0.dim())?;
    let steady = steady_moments(gen)?;
    let distance = |t: f64| -> f64 {
        let g = propagate_exact(g0, gen, &steady, t);
        max_abs_diff(g.normal(), steady.normal()).max(max_abs_diff(g.anomalous(), steady.anomalous()))
    };
    if distance(0.0) <= target {
        return Ok(0.0);
    }
    let scale = if gen.gamma > 0.0 { 1.0 / gen.gamma } else { 1.0 };
    let mut hi = scale;
    let mut lo = 0.0;
    while distance(hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 * scale {
            return Err(Error::NonRelaxing { smallest_pivot: 0.0 });
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if distance(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigen;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dimer() -> Hamiltonian {
        Hamiltonian::new(CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])).unwrap()
    }

    #[test]
    fn empty_cavity_decays() {
        let h = Hamiltonian::zeros(1);
        let gen = MomentGenerator::new(&h, 0, &SqueezeParams::new(0.0, 0.0, 2.0).unwrap()).unwrap();
        let g = GaussianMoments::thermal(1, 1.5).unwrap();
        let (dn, dm) = gen.apply(&g).unwrap();
        assert!((dn[(0, 0)] - c(-3.0, 0.0)).norm() < 1e-15);
        assert_eq!(dm[(0, 0)], c(0.0, 0.0));
        assert_eq!(gen.residual(&GaussianMoments::vacuum(1)).unwrap(), 0.0);
    }

    #[test]
    fn single_squeezed_site_fixed_point() {
        let h = Hamiltonian::zeros(1);
        let sq = SqueezeParams::new(0.5, 0.8, 1.0).unwrap();
        let gen = MomentGenerator::new(&h, 0, &sq).unwrap();
        let g = steady_moments(&gen).unwrap();
        assert!((g.normal()[(0, 0)].re - sq.occupation()).abs() < 1e-14);
        assert!((g.anomalous()[(0, 0)] - sq.pairing()).norm() < 1e-14);
        assert!(gen.residual(&g).unwrap() < 1e-14);
    }

    #[test]
    fn closed_flow_conserves_occupation_spectrum() {
        let h = dimer();
        let gen = MomentGenerator::from_parts(&h, 0, 0.3, 0.0, 0.0).unwrap();
        let mut n0 = CMatrix::zeros(2, 2);
        n0[(0, 0)] = c(0.7, 0.0);
        n0[(0, 1)] = c(0.1, 0.2);
        n0[(1, 0)] = c(0.1, -0.2);
        n0[(1, 1)] = c(0.2, 0.0);
        let g0 = GaussianMoments::new(n0.clone(), CMatrix::zeros(2, 2)).unwrap();
        let g = evolve(&g0, &gen, 3.7, Integrator::default()).unwrap();
        let (a, _) = hermitian_eigen(&n0);
        let (b, _) = hermitian_eigen(g.normal());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-9);
        }
        let e = evolve(&g0, &gen, 3.7, Integrator::Exact).unwrap();
        assert!(moment_distance(&g, &e).unwrap() < 1e-9);
    }

    #[test]
    fn adaptive_and_exact_agree() {
        let gen = MomentGenerator::new(&dimer(), 0, &SqueezeParams::new(0.4, 0.3, 0.7).unwrap()).unwrap();
        let g0 = GaussianMoments::vacuum(2);
        let a = evolve(&g0, &gen, 5.0, Integrator::default()).unwrap();
        let b = evolve(&g0, &gen, 5.0, Integrator::Exact).unwrap();
        assert!(moment_distance(&a, &b).unwrap() < 1e-9);
    }

    #[test]
    fn decoupled_drain_is_non_relaxing() {
        let mut m = CMatrix::zeros(3, 3);
        m[(1, 2)] = c(-1.0, 0.0);
        m[(2, 1)] = c(-1.0, 0.0);
        let h = Hamiltonian::new(m).unwrap();
        let gen = MomentGenerator::new(&h, 0, &SqueezeParams::new(0.5, 0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(steady_moments(&gen), Err(Error::NonRelaxing { .. })));
        assert!(relaxation_time(&gen, &GaussianMoments::vacuum(3), 1e-6).is_err());
    }

    #[test]
    fn relaxation_time_of_single_site() {
        // both moments relax as e^{−Γt}; M has the larger amplitude sinh r cosh r
        let sq = SqueezeParams::new(0.5, 0.0, 2.0).unwrap();
        let gen = MomentGenerator::new(&Hamiltonian::zeros(1), 0, &sq).unwrap();
        let t = relaxation_time(&gen, &GaussianMoments::vacuum(1), 1e-6).unwrap();
        let want = (sq.pairing().norm() / 1e-6).ln() / 2.0;
        assert!((t - want).abs() < 1e-4 * want, "{t} vs {want}");
    }

    #[test]
    fn distance_is_a_metric_on_examples() {
        let v = GaussianMoments::vacuum(2);
        let th = GaussianMoments::thermal(2, 0.25).unwrap();
        assert_eq!(moment_distance(&v, &v).unwrap(), 0.0);
        assert_eq!(moment_distance(&v, &th).unwrap(), 0.25);
        assert!(moment_distance(&v, &GaussianMoments::vacuum(3)).is_err());
    }
}
