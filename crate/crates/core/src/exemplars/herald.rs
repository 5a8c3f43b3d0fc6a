//! Heralding lattice: drain `0`, primary chain `A` on sites `1..=L`, heralding
//! register `B` on sites `-L..=-1`. Site `n` is stored at index `n + L`.
//!
//! The target symmetry pairs `B` site `k` with the `k`-th standing wave of the
//! open chain, `φ_k(n) = √(2/(L+1)) sin(π k n / (L+1))`. Imposing chirality on
//! a chain `A` with potential `V` and hopping `J` forces each `B` site to sit
//! at the mirrored mode energy `2J cos(π k/(L+1)) − V`, forbids a drain
//! potential, and ties the drain→`A` couplings to the drain→`B` couplings:
//! `H_{0,n} = Σ_l φ_l(n) H*_{0,-l}`.

#[allow(unused_imports)] // float methods when std is absent
use nalgebra::ComplexField;
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::constraint::{EntryTag, HTemplate};
use crate::linalg::sqrt;
use crate::model::{Hamiltonian, LatticeSpec, SymmetryMatrix};
use crate::{CMatrix, Error, Result, C64};

pub fn herald_index(l: usize, site: i64) -> usize {
    (site + l as i64) as usize
}

fn check_size(l: usize) -> Result<()> {
    if l == 0 {
        return Err(Error::InvalidParameter {
            name: "L",
            reason: format!("chain length must be >= 1, got {l}"),
        });
    }
    Ok(())
}

/// Standing wave `k` of the open chain of length `l`, evaluated on site `n`
/// (`1 <= k, n <= l`).
pub fn chain_mode(l: usize, k: i64, n: i64) -> f64 {
    let lp = (l + 1) as f64;
    sqrt(2.0 / lp) * (PI * (k * n) as f64 / lp).sin()
}

/// Energy of standing wave `k` of the chain `V δ_{mn} − J δ_{|m−n|,1}`.
pub fn chain_energy(l: usize, v: f64, j: f64, k: i64) -> f64 {
    v - 2.0 * j * (PI * k as f64 / (l + 1) as f64).cos()
}

/// Sites `-L..=L`; bonds along the chain `A` plus the drain's bond to every
/// other site.
pub fn herald_lattice(l: usize) -> Result<LatticeSpec> {
    check_size(l)?;
    let li = l as i64;
    let sites = (-li..=li).map(|n| [n, 0]).collect();
    let drain = herald_index(l, 0);
    let mut edges = Vec::new();
    for n in 1..li {
        edges.push((herald_index(l, n), herald_index(l, n + 1)));
    }
    for n in 1..=li {
        edges.push((drain, herald_index(l, -n)));
        edges.push((drain, herald_index(l, n)));
    }
    LatticeSpec::new(1, sites, drain, edges)
}

/// `σ_{0,0} = 1`, `σ_{m,n} = √(2/(L+1)) sin(π m n/(L+1))` when `m` and `n`
/// lie on opposite sides of the drain, zero otherwise.
pub fn herald_sigma(l: usize) -> Result<SymmetryMatrix> {
    check_size(l)?;
    let li = l as i64;
    let n = 2 * l + 1;
    let mut s = CMatrix::zeros(n, n);
    s[(herald_index(l, 0), herald_index(l, 0))] = C64::new(1.0, 0.0);
    for m in 1..=li {
        for k in 1..=li {
            // sin(π (−m) k/(L+1)) = −φ_k(m)
            let v = C64::new(-chain_mode(l, m, k), 0.0);
            s[(herald_index(l, -m), herald_index(l, k))] = v;
            s[(herald_index(l, k), herald_index(l, -m))] = v;
        }
    }
    SymmetryMatrix::new(s, herald_index(l, 0))
}

/// Drain→`A` couplings `H_{0,n}`, `n = 1..=L`, implied by the drain→`B`
/// couplings `H_{0,-l}`.
pub fn drain_to_chain(l: usize, couplings_to_b: &[C64]) -> Vec<C64> {
    let li = l as i64;
    (1..=li)
        .map(|n| {
            (1..=li)
                .map(|k| couplings_to_b[(k - 1) as usize].conj() * chain_mode(l, n, k))
                .sum()
        })
        .collect()
}

/// Chain `A` with potential `v` and hopping `j`, register `B` at the mirrored
/// mode energies, `A` and `B` decoupled, and the drain coupled to `B` through
/// `couplings_to_b[k-1] = H_{0,-k}`.
pub fn herald_hamiltonian(l: usize, v: f64, j: f64, couplings_to_b: &[C64]) -> Result<Hamiltonian> {
    check_size(l)?;
    if !(j.is_finite() && j > 0.0) {
        return Err(Error::InvalidParameter {
            name: "J",
            reason: format!("hopping must be > 0, got {j}"),
        });
    }
    if !v.is_finite() {
        return Err(Error::InvalidParameter {
            name: "V",
            reason: format!("potential must be finite, got {v}"),
        });
    }
    if couplings_to_b.len() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            found: couplings_to_b.len(),
        });
    }
    let li = l as i64;
    let n = 2 * l + 1;
    let drain = herald_index(l, 0);
    let mut h = CMatrix::zeros(n, n);
    for m in 1..=li {
        let a = herald_index(l, m);
        h[(a, a)] = C64::new(v, 0.0);
        if m < li {
            let b = herald_index(l, m + 1);
            h[(a, b)] = C64::new(-j, 0.0);
            h[(b, a)] = C64::new(-j, 0.0);
        }
        let b = herald_index(l, -m);
        h[(b, b)] = C64::new(-chain_energy(l, v, j, m), 0.0);
    }
    for (k, &c) in couplings_to_b.iter().enumerate() {
        let b = herald_index(l, -(k as i64 + 1));
        h[(drain, b)] = c;
        h[(b, drain)] = c.conj();
    }
    for (k, c) in drain_to_chain(l, couplings_to_b).into_iter().enumerate() {
        let a = herald_index(l, k as i64 + 1);
        h[(drain, a)] = c;
        h[(a, drain)] = c.conj();
    }
    Hamiltonian::new(h)
}

/// Chain `A` fixed to `V δ_{mn} − J δ_{|m−n|,1}`; every other entry free.
pub fn herald_template(l: usize, v: f64, j: f64) -> Result<HTemplate> {
    check_size(l)?;
    let n = 2 * l + 1;
    let first_a = herald_index(l, 1);
    let mut t = HTemplate::new(n);
    for a in 0..n {
        for b in a..n {
            let tag = if a >= first_a && b >= first_a {
                let value = if a == b {
                    v
                } else if b == a + 1 {
                    -j
                } else {
                    0.0
                };
                EntryTag::Fixed(C64::new(value, 0.0))
            } else if a == b {
                EntryTag::FreeReal
            } else {
                EntryTag::FreeComplex
            };
            t.set(a, b, tag)?;
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chiral::{chiral_residual, is_valid_symmetry};
    use crate::linalg::max_abs_diff;
    use alloc::vec;

    #[test]
    fn smallest_register_is_a_single_mirrored_pair() {
        let s = herald_sigma(1).unwrap();
        assert!((s.get(0, 2) - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(is_valid_symmetry(&s).valid);
    }

    #[test]
    fn sine_block_for_two_sites() {
        let s = herald_sigma(2).unwrap();
        let f = sqrt(2.0 / 3.0);
        for m in 1..=2i64 {
            for n in 1..=2i64 {
                let want = f * (PI * (-m * n) as f64 / 3.0).sin();
                assert!((s.get(herald_index(2, -m), herald_index(2, n)).re - want).abs() < 1e-15);
            }
        }
        assert!(is_valid_symmetry(&s).valid);
    }

    #[test]
    fn sigma_is_unitary_for_four_sites() {
        let s = herald_sigma(4).unwrap();
        let prod = s.matrix() * s.matrix().adjoint();
        assert!(max_abs_diff(&prod, &CMatrix::identity(9, 9)) <= 1e-12);
    }

    #[test]
    fn uniform_coupling_build() {
        let c = vec![C64::new(-1.0, 0.0); 4];
        let h = herald_hamiltonian(4, 2.5, 1.0, &c).unwrap();
        let b = [-0.882, -1.882, -3.118, -4.118];
        for (m, want) in b.iter().enumerate() {
            let k = herald_index(4, -(m as i64 + 1));
            assert!((h.get(k, k).re - want).abs() < 1e-3);
        }
        let drain = herald_index(4, 0);
        let sum: f64 = (1..=4).map(|l| (PI * l as f64 / 5.0).sin()).sum();
        assert!((h.get(drain, herald_index(4, 1)).re + sqrt(0.4) * sum).abs() < 1e-14);
        assert!((h.get(drain, herald_index(4, 1)).re + 1.9464).abs() < 1e-4);
        assert!(h.get(drain, herald_index(4, 2)).norm() < 1e-14);
        assert!(chiral_residual(&h, &herald_sigma(4).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn complex_couplings_stay_chiral() {
        let c = vec![C64::new(0.3, -0.8), C64::new(-1.1, 0.2), C64::new(0.0, 0.5)];
        let h = herald_hamiltonian(3, -0.4, 0.9, &c).unwrap();
        assert!(chiral_residual(&h, &herald_sigma(3).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(herald_hamiltonian(2, 0.0, 0.0, &[C64::new(1.0, 0.0); 2]).is_err());
        assert!(herald_hamiltonian(2, 0.0, 1.0, &[C64::new(1.0, 0.0); 3]).is_err());
        assert!(herald_sigma(0).is_err());
    }
}
