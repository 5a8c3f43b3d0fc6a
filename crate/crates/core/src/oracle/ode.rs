//! Dormand–Prince 5(4) with adaptive step size, on flat complex state vectors.

#[allow(unused_imports)] // float methods when std is absent
use nalgebra::ComplexField;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result, C64};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Step statistics of one integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t1` in place.
///
/// The local error of each accepted step satisfies
/// `|err_i| <= tol·(1 + |y_i|)` componentwise.
pub fn integrate<F>(mut f: F, t0: f64, t1: f64, y: &mut [C64], tol: f64) -> Result<Stats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let mut stats = Stats::default();
    if t1 == t0 || n == 0 {
        return Ok(stats);
    }
    let span = t1 - t0;

    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut tmp = k1.clone();
    let mut y_new = k1.clone();

    f(t0, y, &mut k1);
    let mut h = initial_step(y, &k1, tol).min(span.abs());
    let mut t = t0;
    let dir = span.signum();

    let stage = |tmp: &mut [C64], y: &[C64], terms: &[(&[C64], f64)], h: f64| {
        tmp.copy_from_slice(y);
        for (k, a) in terms {
            let w = a * h;
            for (o, v) in tmp.iter_mut().zip(k.iter()) {
                *o += v * w;
            }
        }
    };

    while (t1 - t) * dir > 0.0 {
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = h * dir;
        if h <= 1e-14 * t.abs().max(span.abs()) {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        stage(&mut tmp, y, &[(&k1, A21)], hs);
        f(t + C2 * hs, &tmp, &mut k2);
        stage(&mut tmp, y, &[(&k1, A31), (&k2, A32)], hs);
        f(t + C3 * hs, &tmp, &mut k3);
        stage(&mut tmp, y, &[(&k1, A41), (&k2, A42), (&k3, A43)], hs);
        f(t + C4 * hs, &tmp, &mut k4);
        stage(&mut tmp, y, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)], hs);
        f(t + C5 * hs, &tmp, &mut k5);
        stage(
            &mut tmp,
            y,
            &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)],
            hs,
        );
        f(t + hs, &tmp, &mut k6);
        stage(
            &mut y_new,
            y,
            &[(&k1, B1), (&k3, B3), (&k4, B4), (&k5, B5), (&k6, B6)],
            hs,
        );
        f(t + hs, &y_new, &mut k7);

        let mut err: f64 = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let scale = tol * (1.0 + y[i].norm().max(y_new[i].norm()));
            err = err.max(e.norm() / scale);
        }

        if err <= 1.0 {
            stats.accepted += 1;
            t = if last { t1 } else { t + hs };
            y.copy_from_slice(&y_new);
            core::mem::swap(&mut k1, &mut k7);
        } else {
            stats.rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else if !err.is_finite() {
            0.2
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(stats)
}

fn initial_step(y: &[C64], dy: &[C64], tol: f64) -> f64 {
    let ny = y.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let nd = dy.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if nd == 0.0 {
        return 1e-3;
    }
    let h = 0.01 * (1.0 + ny) / nd;
    h.min(tol.powf(0.2) * 10.0 / nd.max(1e-300)).max(1e-10)
}

/// Flattens a list of equally sized column-major matrices into one vector.
pub(crate) fn pack(parts: &[&crate::CMatrix]) -> Vec<C64> {
    parts.iter().flat_map(|m| m.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_with_rotation() {
        let lambda = C64::new(-0.5, 3.0);
        let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 2.0)];
        let stats = integrate(
            |_, y, dy| {
                for (d, v) in dy.iter_mut().zip(y) {
                    *d = lambda * v;
                }
            },
            0.0,
            4.0,
            &mut y,
            1e-11,
        )
        .unwrap();
        let g = (lambda * 4.0).exp();
        assert!((y[0] - g).norm() < 1e-9);
        assert!((y[1] - g * C64::new(0.0, 2.0)).norm() < 1e-9);
        assert!(stats.accepted > 0);
    }

    #[test]
    fn zero_span_is_identity() {
        let mut y = [C64::new(1.5, -1.0)];
        integrate(|_, _, d| d[0] = C64::new(1.0, 0.0), 2.0, 2.0, &mut y, 1e-10).unwrap();
        assert_eq!(y[0], C64::new(1.5, -1.0));
    }

    #[test]
    fn time_dependent_right_hand_side() {
        // y' = cos t, y(0) = 0
        let mut y = [C64::new(0.0, 0.0)];
        integrate(|t, _, d| d[0] = C64::new(t.cos(), 0.0), 0.0, 10.0, &mut y, 1e-12).unwrap();
        assert!((y[0].re - 10.0f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y², y(0) = 1 diverges at t = 1
        let mut y = [C64::new(1.0, 0.0)];
        let res = integrate(|_, y, d| d[0] = y[0] * y[0], 0.0, 2.0, &mut y, 1e-10);
        assert!(matches!(res, Err(Error::StepSizeUnderflow { .. })));
    }
}
