//! Four-fold quadruplet lattice.
//!
//! Sites are `(x, y)` with `-L <= x, y <= L`, stored row by row (`y` outer,
//! `x` inner) and the drain sits at the origin. Every other site belongs to
//! one of four half-open quadrants, and the 90° rotation `R(x, y) = (-y, x)`
//! maps quadrant `q` onto quadrant `q + 1`.
//!
//! The target symmetry couples each site only to the members of its rotation
//! orbit through a fixed symmetric unitary `4×4` block. Imposing the chiral
//! condition on an on-site plus nearest-neighbour Hamiltonian leaves exactly
//! one free quadrant:
//!
//! * the drain carries no potential,
//! * potentials flip sign under `R`,
//! * hoppings obey `J_{Rm,Rn} = i^{q_m - q_n} J*_{m,n}`,
//! * the drain's x-couplings follow from its y-couplings,
//!   `J_{0,(±1,0)} = ±(J*_{0,(0,±1)} + i J*_{0,(0,∓1)}) / √2`.
//!
//! Here `J_{m,n} = -H_{m,n}` on nearest-neighbour bonds.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use crate::constraint::{EntryTag, HTemplate};
use crate::model::{Hamiltonian, LatticeSpec, SymmetryMatrix};
use crate::{CMatrix, Error, Result, C64};

/// Half-open quadrant of a site, `None` at the origin.
pub fn quadrant(site: [i64; 2]) -> Option<u8> {
    let [x, y] = site;
    if x > 0 && y >= 0 {
        Some(1)
    } else if x <= 0 && y > 0 {
        Some(2)
    } else if x < 0 && y <= 0 {
        Some(3)
    } else if x >= 0 && y < 0 {
        Some(4)
    } else {
        None
    }
}

/// Rotation by `π/2`.
pub fn rotate(site: [i64; 2]) -> [i64; 2] {
    [-site[1], site[0]]
}

pub fn side(l: usize) -> usize {
    2 * l + 1
}

/// Storage index of `site` on the `(2L+1)²` grid.
pub fn site_index(l: usize, site: [i64; 2]) -> usize {
    let li = l as i64;
    ((site[1] + li) * (2 * li + 1) + site[0] + li) as usize
}

fn check_size(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidParameter {
            name: "L",
            reason: format!("half-width must be >= 1, got {l}"),
        });
    }
    Ok(())
}

/// Square grid with nearest-neighbour edges, each site contributing its
/// rightward then its upward bond.
pub fn square_lattice(l: usize) -> Result<LatticeSpec> {
    check_size(l)?;
    let li = l as i64;
    let mut sites = Vec::with_capacity(side(l) * side(l));
    for y in -li..=li {
        for x in -li..=li {
            sites.push([x, y]);
        }
    }
    let mut edges = Vec::new();
    for &[x, y] in &sites {
        let here = site_index(l, [x, y]);
        if x < li {
            edges.push((here, site_index(l, [x + 1, y])));
        }
        if y < li {
            edges.push((here, site_index(l, [x, y + 1])));
        }
    }
    LatticeSpec::new(2, sites, site_index(l, [0, 0]), edges)
}

fn i_pow(k: i32) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// The orbit block before its parity prefactor; rows and columns indexed by
/// quadrant.
fn orbit_block() -> [[C64; 4]; 4] {
    let o = C64::new(0.0, 0.0);
    let p = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [[o, p, o, -i], [p, o, i, o], [o, i, o, -p], [-i, o, -p, o]]
}

/// Target symmetry of the quadruplet state.
///
/// The block for an orbit at taxicab distance `|x| + |y|` carries the factor
/// `(-1)^{|x|+|y|} / √2`, which keeps every block unitary.
pub fn fourfold_sigma(l: usize) -> Result<SymmetryMatrix> {
    let lattice = square_lattice(l)?;
    let n = lattice.len();
    let block = orbit_block();
    let mut s = CMatrix::zeros(n, n);
    s[(lattice.drain(), lattice.drain())] = C64::new(1.0, 0.0);
    for &m in lattice.sites() {
        let Some(qm) = quadrant(m) else { continue };
        let parity = if (m[0].abs() + m[1].abs()) % 2 == 0 { 1.0 } else { -1.0 };
        let mut partner = m;
        for _ in 0..4 {
            let qn = quadrant(partner).expect("orbit avoids the origin");
            s[(site_index(l, m), site_index(l, partner))] =
                block[(qm - 1) as usize][(qn - 1) as usize] * (parity * FRAC_1_SQRT_2);
            partner = rotate(partner);
        }
    }
    SymmetryMatrix::new(s, lattice.drain())
}

/// Sites of quadrant 1 (`1 <= x <= L`, `0 <= y <= L`), `y` outer.
pub fn quadrant_one_sites(l: usize) -> Vec<[i64; 2]> {
    let li = l as i64;
    let mut out = Vec::new();
    for y in 0..=li {
        for x in 1..=li {
            out.push([x, y]);
        }
    }
    out
}

/// One oriented bond per rotation orbit of non-drain bonds.
///
/// Order: horizontal bonds `(i, j) → (i+1, j)` for `j = 1..=L`, `i = 0..L`;
/// axis bonds `(i, 0) → (i+1, 0)` for `i = 1..L`; vertical bonds
/// `(i, j) → (i, j+1)` for `i = 1..=L`, `j = 0..L`.
pub fn representative_bonds(l: usize) -> Vec<([i64; 2], [i64; 2])> {
    let li = l as i64;
    let mut out = Vec::new();
    for j in 1..=li {
        for i in 0..li {
            out.push(([i, j], [i + 1, j]));
        }
    }
    for i in 1..li {
        out.push(([i, 0], [i + 1, 0]));
    }
    for i in 1..=li {
        for j in 0..li {
            out.push(([i, j], [i, j + 1]));
        }
    }
    out
}

/// Plaquette identified by its lower-left corner `n`; its centre is
/// `n + (½, ½)` and its loop runs `n → n+ŷ → n+x̂+ŷ → n+x̂ → n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaquetteId {
    pub x: i64,
    pub y: i64,
}

impl PlaquetteId {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x as f64 + 0.5, self.y as f64 + 0.5)
    }

    /// The plaquette whose centre is the rotated centre of `self`.
    pub fn rotated(&self) -> Self {
        Self {
            x: -self.y - 1,
            y: self.x,
        }
    }

    pub fn is_central(&self) -> bool {
        (self.x == 0 || self.x == -1) && (self.y == 0 || self.y == -1)
    }

    pub fn loop_sites(&self) -> [[i64; 2]; 4] {
        let (x, y) = (self.x, self.y);
        [[x, y], [x, y + 1], [x + 1, y + 1], [x + 1, y]]
    }
}

/// The four plaquettes touching the drain, counter-clockwise from the first
/// quadrant: centres `(½,½)`, `(-½,½)`, `(-½,-½)`, `(½,-½)`.
pub const CENTRAL_PLAQUETTES: [PlaquetteId; 4] = [
    PlaquetteId::new(0, 0),
    PlaquetteId::new(-1, 0),
    PlaquetteId::new(-1, -1),
    PlaquetteId::new(0, -1),
];

/// All plaquettes of the grid, `y` outer.
pub fn plaquettes(l: usize) -> Vec<PlaquetteId> {
    let li = l as i64;
    let mut out = Vec::new();
    for y in -li..li {
        for x in -li..li {
            out.push(PlaquetteId::new(x, y));
        }
    }
    out
}

/// Non-central plaquettes with centres in the open first quadrant, `y` outer.
/// Together with the central four these determine every flux.
pub fn quadrant_one_plaquettes(l: usize) -> Vec<PlaquetteId> {
    let li = l as i64;
    let mut out = Vec::new();
    for y in 0..li {
        for x in 0..li {
            if (x, y) != (0, 0) {
                out.push(PlaquetteId::new(x, y));
            }
        }
    }
    out
}

fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Phase gained around plaquette `p`: `arg(J_{n,n+ŷ} J_{n+ŷ,n+x̂+ŷ}
/// J_{n+x̂+ŷ,n+x̂} J_{n+x̂,n})` with `J = -H`, in `(-π, π]`.
pub fn plaquette_flux(h: &Hamiltonian, lattice: &LatticeSpec, p: PlaquetteId) -> Result<f64> {
    let corners = p.loop_sites();
    let mut idx = [0usize; 4];
    for (slot, c) in idx.iter_mut().zip(corners.iter()) {
        *slot = lattice.index_of(*c).ok_or_else(|| {
            Error::InvalidLattice(format!("plaquette corner {:?} outside the lattice", c))
        })?;
    }
    if h.dim() != lattice.len() {
        return Err(Error::DimensionMismatch {
            expected: lattice.len(),
            found: h.dim(),
        });
    }
    let mut product = C64::new(1.0, 0.0);
    for k in 0..4 {
        let (a, b) = (idx[k], idx[(k + 1) % 4]);
        let hop = -h.get(a, b);
        if hop.norm() == 0.0 {
            return Err(Error::FluxUndefined { from: a, to: b });
        }
        product *= hop;
    }
    Ok(wrap_angle(product.arg()))
}

/// Fluxes of every plaquette of the grid, in [`plaquettes`] order.
pub fn flux_table(h: &Hamiltonian, l: usize) -> Result<Vec<(PlaquetteId, f64)>> {
    let lattice = square_lattice(l)?;
    plaquettes(l)
        .into_iter()
        .map(|p| plaquette_flux(h, &lattice, p).map(|f| (p, f)))
        .collect()
}

/// Free data of one quadrant, from which the whole lattice follows.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrantCouplings {
    pub l: usize,
    /// Potentials on [`quadrant_one_sites`].
    pub potentials: Vec<f64>,
    /// Hoppings `J_{from,to}` on [`representative_bonds`].
    pub hoppings: Vec<C64>,
    /// `J_{(0,0),(0,1)}`
    pub drain_up: C64,
    /// `J_{(0,0),(0,-1)}`
    pub drain_down: C64,
}

impl QuadrantCouplings {
    /// Extends the quadrant to the full lattice by the rotation rules.
    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        let l = self.l;
        check_size(l)?;
        let sites = quadrant_one_sites(l);
        let bonds = representative_bonds(l);
        if self.potentials.len() != sites.len() {
            return Err(Error::DimensionMismatch {
                expected: sites.len(),
                found: self.potentials.len(),
            });
        }
        if self.hoppings.len() != bonds.len() {
            return Err(Error::DimensionMismatch {
                expected: bonds.len(),
                found: self.hoppings.len(),
            });
        }
        let n = side(l) * side(l);
        let mut h = CMatrix::zeros(n, n);

        for (&s, &v) in sites.iter().zip(&self.potentials) {
            let mut site = s;
            let mut value = v;
            for _ in 0..4 {
                let k = site_index(l, site);
                h[(k, k)] = C64::new(value, 0.0);
                site = rotate(site);
                value = -value;
            }
        }

        let set_hop = |h: &mut CMatrix, from: [i64; 2], to: [i64; 2], hop: C64| {
            let (a, b) = (site_index(l, from), site_index(l, to));
            h[(a, b)] = -hop;
            h[(b, a)] = -hop.conj();
        };

        for (&(from, to), &hop) in bonds.iter().zip(&self.hoppings) {
            let (mut m, mut n, mut j) = (from, to, hop);
            for _ in 0..4 {
                set_hop(&mut h, m, n, j);
                let qm = quadrant(m).expect("bond avoids the drain") as i32;
                let qn = quadrant(n).expect("bond avoids the drain") as i32;
                j = i_pow(qm - qn) * j.conj();
                m = rotate(m);
                n = rotate(n);
            }
        }

        let (up, down) = (self.drain_up, self.drain_down);
        let i = C64::new(0.0, 1.0);
        let right = (up.conj() + i * down.conj()) * FRAC_1_SQRT_2;
        let left = -(down.conj() + i * up.conj()) * FRAC_1_SQRT_2;
        let o = [0, 0];
        set_hop(&mut h, o, [0, 1], up);
        set_hop(&mut h, o, [0, -1], down);
        set_hop(&mut h, o, [1, 0], right);
        set_hop(&mut h, o, [-1, 0], left);

        Hamiltonian::new(h)
    }
}

/// On-site potential patterns for the free quadrant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialPattern {
    /// `V_n = (-1)^{q_n} 𝒱`.
    Alternating(f64),
    /// `V_n = 𝒱 n_x n_y / L²`, a saddle that already flips sign under `R`.
    Saddle(f64),
    /// Zero potential everywhere.
    Flat,
}

impl PotentialPattern {
    /// Potential on a quadrant-1 site of a lattice with half-width `l`.
    pub fn quadrant_one_value(&self, l: usize, site: [i64; 2]) -> f64 {
        match *self {
            PotentialPattern::Alternating(v) => -v,
            PotentialPattern::Saddle(v) => v * (site[0] * site[1]) as f64 / (l * l) as f64,
            PotentialPattern::Flat => 0.0,
        }
    }
}

/// Flux-level design: uniform hopping magnitude, a potential pattern, one
/// flux per non-central quadrant-1 plaquette and the four central fluxes.
#[derive(Debug, Clone, PartialEq)]
pub struct FourfoldParams {
    pub l: usize,
    /// Uniform `|J_{m,n}|`.
    pub hopping: f64,
    pub potential: PotentialPattern,
    /// Fluxes on [`quadrant_one_plaquettes`].
    pub fluxes: Vec<f64>,
    /// Fluxes on [`CENTRAL_PLAQUETTES`]; must sum to `π`.
    pub central_fluxes: [f64; 4],
}

/// Default central fluxes: `π/2` through the first-quadrant central plaquette,
/// which with uniform hopping forces the other three.
pub const DEFAULT_CENTRAL_FLUXES: [f64; 4] = [FRAC_PI_2, PI, -FRAC_PI_2, 0.0];

impl FourfoldParams {
    /// Uniform hopping, flux `π/2` through every quadrant-1 plaquette.
    pub fn uniform(l: usize, hopping: f64, potential: PotentialPattern) -> Self {
        let count = quadrant_one_plaquettes(l).len();
        Self {
            l,
            hopping,
            potential,
            fluxes: vec![FRAC_PI_2; count],
            central_fluxes: DEFAULT_CENTRAL_FLUXES,
        }
    }

    /// The quadrant data realizing these fluxes.
    ///
    /// Gauge: drain-up bond and every horizontal representative bond real
    /// positive; vertical representative bonds carry the phases.
    pub fn couplings(&self) -> Result<QuadrantCouplings> {
        let l = self.l;
        check_size(l)?;
        if !(self.hopping.is_finite() && self.hopping > 0.0) {
            return Err(Error::InvalidParameter {
                name: "hopping",
                reason: format!("hopping magnitude must be > 0, got {}", self.hopping),
            });
        }
        let outer = quadrant_one_plaquettes(l);
        if self.fluxes.len() != outer.len() {
            return Err(Error::DimensionMismatch {
                expected: outer.len(),
                found: self.fluxes.len(),
            });
        }
        let down_sign = self.drain_down_sign()?;
        let mag = self.hopping;

        let flux_at = |x: i64, y: i64| -> f64 {
            if (x, y) == (0, 0) {
                self.central_fluxes[0]
            } else {
                let k = outer
                    .iter()
                    .position(|p| p.x == x && p.y == y)
                    .expect("quadrant-1 plaquette");
                self.fluxes[k]
            }
        };

        // vertical[(i-1) * l + j] = phase of J_{(i,j),(i,j+1)}
        let li = l as i64;
        let mut vertical = vec![0.0; l * l];
        for j in 0..li {
            let mut phase = -flux_at(0, j);
            if j == 0 {
                phase -= down_sign * FRAC_PI_4;
            }
            vertical[j as usize] = phase;
            for i in 1..li {
                phase -= flux_at(i, j);
                vertical[i as usize * l + j as usize] = phase;
            }
        }

        let hoppings = representative_bonds(l)
            .into_iter()
            .map(|(from, to)| {
                if from[0] == to[0] {
                    let k = (from[0] - 1) as usize * l + from[1] as usize;
                    C64::from_polar(mag, vertical[k])
                } else {
                    C64::new(mag, 0.0)
                }
            })
            .collect();

        let potentials = quadrant_one_sites(l)
            .into_iter()
            .map(|s| self.potential.quadrant_one_value(l, s))
            .collect();

        Ok(QuadrantCouplings {
            l,
            potentials,
            hoppings,
            drain_up: C64::new(mag, 0.0),
            drain_down: C64::new(down_sign * mag, 0.0),
        })
    }

    /// With uniform drain magnitudes `J_{0,(0,-1)} = ±J_{0,(0,1)}`, and the
    /// central fluxes must read `(Φ, ∓π/2 − Φ, Φ + π, ±π/2 − Φ)`.
    fn drain_down_sign(&self) -> Result<f64> {
        const TOL: f64 = 1e-9;
        let [f1, f2, f3, f4] = self.central_fluxes;
        let total = wrap_angle(f1 + f2 + f3 + f4 - PI);
        let opposite = wrap_angle(f3 - f1 - PI).abs().max(wrap_angle(f4 - f2 - PI).abs());
        let pair = wrap_angle(f1 + f2);
        let sign = if wrap_angle(pair + FRAC_PI_2).abs() < TOL {
            Some(1.0)
        } else if wrap_angle(pair - FRAC_PI_2).abs() < TOL {
            Some(-1.0)
        } else {
            None
        };
        match sign {
            Some(s) if total.abs() < TOL && opposite < TOL => Ok(s),
            _ => Err(Error::IncompatibleFluxes(format!(
                "requested {:?}; with |J| uniform the achievable completions of Φ(½,½) = {f1} are \
                 [{f1}, {}, {}, {}] or [{f1}, {}, {}, {}]",
                self.central_fluxes,
                wrap_angle(-FRAC_PI_2 - f1),
                wrap_angle(f1 + PI),
                wrap_angle(FRAC_PI_2 - f1),
                wrap_angle(FRAC_PI_2 - f1),
                wrap_angle(f1 + PI),
                wrap_angle(-FRAC_PI_2 - f1),
            ))),
        }
    }
}

/// Builds the full lattice Hamiltonian from a flux-level design.
pub fn fourfold_hamiltonian(params: &FourfoldParams) -> Result<Hamiltonian> {
    params.couplings()?.hamiltonian()
}

/// On-site potentials (drain included) and nearest-neighbour hoppings free,
/// every other entry zero.
pub fn fourfold_nn_template(l: usize) -> Result<HTemplate> {
    let lattice = square_lattice(l)?;
    let n = lattice.len();
    let mut t = HTemplate::new(n);
    for k in 0..n {
        t.set(k, k, EntryTag::FreeReal)?;
    }
    for &(a, b) in lattice.edges() {
        t.set(a, b, EntryTag::FreeComplex)?;
    }
    Ok(t)
}
