//! CSV tables: scan rows, plaquette fluxes and time traces.

use std::fmt::Write;

use squeezelat_core::exemplars::fourfold::PlaquetteId;
use squeezelat_core::spectral::ScanRow;

/// `{:.16e}`, or `inf`/`-inf`/`nan`.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("param,min_drain_weight,min_gap\n");
    for r in rows {
        writeln!(out, "{},{},{}", num(r.param), num(r.min_drain_weight), num(r.min_gap)).unwrap();
    }
    out
}

/// One row per plaquette, keyed by its center; fluxes in `(−π, π]`.
pub fn flux_csv(table: &[(PlaquetteId, f64)]) -> String {
    let mut out = String::from("px,py,flux\n");
    for (p, flux) in table {
        let (x, y) = p.center();
        writeln!(out, "{},{},{}", num(x), num(y), num(*flux)).unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub max_distance_to_prediction: f64,
    pub purity_deviation: f64,
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = String::from("t,max_distance_to_prediction,purity_deviation\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            num(r.t),
            num(r.max_distance_to_prediction),
            num(r.purity_deviation)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_site_gap_prints_as_inf() {
        let rows = [ScanRow { param: 0.5, min_drain_weight: 1.0, min_gap: f64::INFINITY }];
        assert_eq!(
            scan_csv(&rows),
            "param,min_drain_weight,min_gap\n5.0000000000000000e-1,1.0000000000000000e0,inf\n"
        );
    }
}
