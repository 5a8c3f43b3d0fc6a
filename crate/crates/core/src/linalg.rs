//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::ComplexField;

use crate::{CMatrix, C64};

/// Largest entry modulus, `max_ij |a_ij|`. Zero for an empty matrix.
pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max_ij |a_ij - b_ij|`. Panics if the shapes differ.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |a - a^dagger|`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `max |a - a^T|`.
pub fn symmetric_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            dev = dev.max((a[(i, j)] - a[(j, i)]).norm());
        }
    }
    dev
}

pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn symmetric_part(a: &CMatrix) -> CMatrix {
    (a + a.transpose()).scale(0.5)
}

/// Entrywise complex conjugate.
pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|z| z.conj())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Eigenvalues come back ascending and each eigenvector is rephased so that
/// its largest-modulus component (first one on ties) is real and positive.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = CMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (col, &k) in order.iter().enumerate() {
        values.push(eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        let mut pivot = 0;
        let mut best = -1.0;
        for (i, z) in v.iter().enumerate() {
            // 1e-12 slack keeps the choice stable against round-off
            if z.norm() > best + 1e-12 {
                best = z.norm();
                pivot = i;
            }
        }
        let phase = if best > 0.0 {
            v[pivot].conj() / best
        } else {
            C64::new(1.0, 0.0)
        };
        vectors.set_column(col, &(v * phase));
    }
    (values, vectors)
}

/// Matrix exponential by Taylor series with scaling and squaring.
///
/// Intended for matrices whose exponential is bounded (dissipative drift
/// matrices); the squaring phase is then norm-nonincreasing.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut norm = one_norm(a);
    let mut squarings = 0u32;
    while norm > 0.5 {
        norm *= 0.5;
        squarings += 1;
    }
    let scaled = a.scale(0.5f64.powi(squarings as i32));

    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = (&term * &scaled).unscale(k as f64);
        sum += &term;
        if one_norm(&term) <= 1e-18 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `T·Y + Y·S = F` for `T` upper triangular and `S` lower triangular
/// by column-wise back substitution.
///
/// Returns the solution and the smallest pivot modulus `min |T_ii + S_jj|`,
/// which is zero exactly when the Sylvester operator is singular.
pub fn solve_triangular_sylvester(t: &CMatrix, s: &CMatrix, f: &CMatrix) -> (CMatrix, f64) {
    let n = t.nrows();
    let mut y = CMatrix::zeros(n, n);
    let mut min_pivot = f64::INFINITY;
    for j in (0..n).rev() {
        let mut rhs: Vec<C64> = f.column(j).iter().copied().collect();
        for k in (j + 1)..n {
            let skj = s[(k, j)];
            if skj != C64::new(0.0, 0.0) {
                for (i, r) in rhs.iter_mut().enumerate() {
                    *r -= y[(i, k)] * skj;
                }
            }
        }
        let shift = s[(j, j)];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for k in (i + 1)..n {
                acc -= t[(i, k)] * y[(k, j)];
            }
            let pivot = t[(i, i)] + shift;
            min_pivot = min_pivot.min(pivot.norm());
            y[(i, j)] = acc / pivot;
        }
    }
    (y, min_pivot)
}

/// Real-valued helper: `sqrt` usable without std.
pub(crate) fn sqrt(x: f64) -> f64 {
    ComplexField::sqrt(x)
}
