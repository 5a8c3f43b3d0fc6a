//! Random generators shared by the property tests.
#![allow(dead_code)]

use proptest::prelude::*;
use squeezelat_core::linalg::conj;
use squeezelat_core::{CMatrix, Hamiltonian, SymmetryMatrix, C64};

pub fn complex_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(re, im)| C64::new(re, im))))
}

pub fn hermitian(n: usize) -> impl Strategy<Value = CMatrix> {
    complex_matrix(n).prop_map(|a| (&a + a.adjoint()) * C64::new(0.5, 0.0))
}

/// Haar-ish unitary from the QR factor of a random matrix; almost surely
/// well conditioned for the entry ranges used here.
pub fn unitary(n: usize) -> impl Strategy<Value = CMatrix> {
    complex_matrix(n).prop_map(|a| a.qr().q())
}

/// `σ = 1 ⊕ W·Wᵀ` with the drain at index 0, so `σ` is symmetric, unitary
/// and fixes the drain.
pub fn symmetry(n: usize) -> impl Strategy<Value = SymmetryMatrix> {
    unitary(n - 1).prop_map(move |w| {
        let mut s = CMatrix::zeros(n, n);
        s[(0, 0)] = C64::new(1.0, 0.0);
        s.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(&w * w.transpose()));
        SymmetryMatrix::new(s, 0).unwrap()
    })
}

/// Projection of a Hermitian matrix onto the Hamiltonians that anticommute
/// with `σ` in the generalized sense `σ†·H·σ = −H*`.
pub fn chiral_projection(h0: &CMatrix, sigma: &SymmetryMatrix) -> Hamiltonian {
    let s = sigma.matrix();
    let h = (h0 - s * conj(h0) * s.adjoint()) * C64::new(0.5, 0.0);
    Hamiltonian::new((&h + h.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

/// A symmetry together with a random Hamiltonian it protects.
pub fn chiral_system(n: usize) -> impl Strategy<Value = (Hamiltonian, SymmetryMatrix)> {
    (symmetry(n), hermitian(n)).prop_map(|(s, h0)| (chiral_projection(&h0, &s), s))
}

/// Diagonal phase gauge `U = diag(e^{iθ})` leaving the drain (index 0) alone.
pub fn drain_gauge(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-3.2f64..3.2, n - 1).prop_map(move |th| {
        let mut u = CMatrix::identity(n, n);
        for (k, t) in th.into_iter().enumerate() {
            u[(k + 1, k + 1)] = C64::from_polar(1.0, t);
        }
        u
    })
}
