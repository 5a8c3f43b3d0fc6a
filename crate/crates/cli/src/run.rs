//! The work behind each subcommand, separated from argument parsing so it can
//! be driven and tested directly.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use squeezelat_core::chiral::{chiral_residual, is_valid_symmetry, predicted_steady_moments, purity_deviation};
use squeezelat_core::constraint::{solve, HTemplate};
use squeezelat_core::exemplars::fourfold::{
    flux_table, fourfold_hamiltonian, fourfold_sigma, square_lattice, FourfoldParams, PlaquetteId, PotentialPattern,
};
use squeezelat_core::exemplars::herald::{herald_hamiltonian, herald_lattice, herald_sigma};
use squeezelat_core::oracle::{evolve, moment_distance, steady_moments, Integrator, MomentGenerator};
use squeezelat_core::spectral::{scan_point, PotentialFamily, ScanRow, ScanTable};
use squeezelat_core::{Error, GaussianMoments, Hamiltonian, LatticeSpec, SqueezeParams, SymmetryMatrix, C64};

use crate::csv::{flux_csv, TraceRow};
use crate::format::{to_json, write_text, LatticeDoc, MatrixDoc, SigmaDoc, SolutionDoc, SqueezeDoc};
use crate::{CliError, CliResult};

fn same_dim(h: &Hamiltonian, sigma: &SymmetryMatrix) -> CliResult<()> {
    if h.dim() != sigma.dim() {
        return Err(CliError::Usage(format!(
            "Hamiltonian has dimension {} but sigma has dimension {}",
            h.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub dim: usize,
    pub drain: usize,
    pub symmetric_deviation: f64,
    pub unitary_deviation: f64,
    pub drain_deviation: f64,
    pub valid_symmetry: bool,
    /// `max |σ†·H·σ + H*|`
    pub residual: f64,
    pub tol: f64,
    /// Valid symmetry and `residual <= tol`.
    pub chiral: bool,
}

pub fn verify(h: &Hamiltonian, sigma: &SymmetryMatrix, tol: f64) -> CliResult<VerifyReport> {
    same_dim(h, sigma)?;
    let r = is_valid_symmetry(sigma);
    let residual = chiral_residual(h, sigma)?;
    Ok(VerifyReport {
        dim: h.dim(),
        drain: sigma.drain(),
        symmetric_deviation: r.symmetric_dev,
        unitary_deviation: r.unitary_dev,
        drain_deviation: r.drain_dev,
        valid_symmetry: r.valid,
        residual,
        tol,
        chiral: r.valid && residual <= tol,
    })
}

fn parse_value(kind: &str, text: &str) -> Result<f64, String> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{kind}` needs a finite number, got `{text}`"))
}

/// `alternating:V`, `saddle:V` or `flat`.
pub fn parse_potential(text: &str) -> Result<PotentialPattern, String> {
    match text.split_once(':') {
        Some(("alternating", v)) => parse_value("alternating", v).map(PotentialPattern::Alternating),
        Some(("saddle", v)) => parse_value("saddle", v).map(PotentialPattern::Saddle),
        None if text == "flat" => Ok(PotentialPattern::Flat),
        _ => Err(format!("expected alternating:V, saddle:V or flat, got `{text}`")),
    }
}

/// `uniform:J`.
pub fn parse_coupling(text: &str) -> Result<f64, String> {
    match text.split_once(':') {
        Some(("uniform", j)) => parse_value("uniform", j),
        _ => Err(format!("expected uniform:J, got `{text}`")),
    }
}

/// A closed-form exemplar ready to be written out.
#[derive(Debug, Clone)]
pub struct Built {
    pub lattice: LatticeSpec,
    pub hamiltonian: Hamiltonian,
    pub sigma: SymmetryMatrix,
    pub fluxes: Option<Vec<(PlaquetteId, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildReport {
    pub dim: usize,
    pub drain: usize,
    pub residual: f64,
    pub files: Vec<String>,
}

/// Four-fold lattice of half-width `l` with uniform `|J| = 1` and the default
/// fluxes.
pub fn build_fourfold(l: usize, potential: PotentialPattern) -> CliResult<Built> {
    let hamiltonian = fourfold_hamiltonian(&FourfoldParams::uniform(l, 1.0, potential))?;
    Ok(Built {
        lattice: square_lattice(l)?,
        fluxes: Some(flux_table(&hamiltonian, l)?),
        sigma: fourfold_sigma(l)?,
        hamiltonian,
    })
}

/// Heralding chain with `H_{n,n+1} = H_{0,-n} = −j` and chain potential `v`.
pub fn build_herald(l: usize, v: f64, j: f64) -> CliResult<Built> {
    let couplings = vec![C64::new(-j, 0.0); l];
    Ok(Built {
        lattice: herald_lattice(l)?,
        hamiltonian: herald_hamiltonian(l, v, j, &couplings)?,
        sigma: herald_sigma(l)?,
        fluxes: None,
    })
}

impl Built {
    /// Writes `lattice.json`, `hamiltonian.json`, `sigma.json` and, for
    /// two-dimensional lattices, `fluxes.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> CliResult<BuildReport> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
        let mut files: Vec<(PathBuf, String)> = vec![
            (dir.join("lattice.json"), to_json(&LatticeDoc::from_lattice(&self.lattice))),
            (dir.join("hamiltonian.json"), to_json(&MatrixDoc::from_hamiltonian(&self.hamiltonian))),
            (dir.join("sigma.json"), to_json(&SigmaDoc::from_sigma(&self.sigma))),
        ];
        if let Some(f) = &self.fluxes {
            files.push((dir.join("fluxes.csv"), flux_csv(f)));
        }
        for (path, text) in &files {
            write_text(path, text)?;
        }
        Ok(BuildReport {
            dim: self.hamiltonian.dim(),
            drain: self.sigma.drain(),
            residual: chiral_residual(&self.hamiltonian, &self.sigma)?,
            files: files.iter().map(|(p, _)| p.display().to_string()).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub feasible: bool,
    pub n_free: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Solves the template; an infeasible system is a report, not an error.
pub fn solve_template(template: &HTemplate, sigma: &SymmetryMatrix) -> CliResult<(SolveReport, Option<SolutionDoc>)> {
    if template.dim() != sigma.dim() {
        return Err(CliError::Usage(format!(
            "template has dimension {} but sigma has dimension {}",
            template.dim(),
            sigma.dim()
        )));
    }
    match solve(template, sigma) {
        Ok(sol) => Ok((
            SolveReport {
                feasible: true,
                n_free: sol.n_free,
                diagnostic: None,
            },
            Some(SolutionDoc::from_solution(&sol)),
        )),
        Err(Error::Infeasible(inf)) => Ok((
            SolveReport {
                feasible: false,
                n_free: 0,
                diagnostic: Some(inf.to_string()),
            },
            None,
        )),
        Err(e) => Err(e.into()),
    }
}

/// Evaluates the family on every grid point in parallel; rows come back in
/// grid order.
pub fn parallel_scan(family: PotentialFamily, l: usize, grid: &[f64], sigma: &SymmetryMatrix) -> CliResult<ScanTable> {
    let report = is_valid_symmetry(sigma);
    if !report.valid {
        return Err(CliError::Domain(format!(
            "not a valid chiral symmetry: max deviation {:e}",
            report.max_deviation()
        )));
    }
    let rows = grid
        .par_iter()
        .map(|&p| family.hamiltonian(l, p).and_then(|h| scan_point(&h, sigma, p)))
        .collect::<Result<Vec<ScanRow>, Error>>()?;
    Ok(ScanTable::from_rows(rows)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub family: String,
    #[serde(rename = "L")]
    pub l: usize,
    pub points: usize,
    pub argmax_min_drain_weight: f64,
    pub argmax_min_gap: f64,
    pub argmax_combined: f64,
    pub interior_maximum: bool,
    pub combined_local_maxima: Vec<f64>,
}

impl ScanSummary {
    pub fn new(family: PotentialFamily, l: usize, table: &ScanTable) -> Self {
        Self {
            family: family.name().to_string(),
            l,
            points: table.rows.len(),
            argmax_min_drain_weight: table.argmax_drain_weight,
            argmax_min_gap: table.argmax_gap,
            argmax_combined: table.argmax_combined,
            interior_maximum: table.has_interior_maximum(),
            combined_local_maxima: table.combined_local_maxima.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimulateMode {
    /// Direct solve for the fixed point of the moment flow.
    Steady,
    /// Flow from the vacuum for `t`, sampled at `samples + 1` evenly spaced
    /// times.
    Evolve {
        t: f64,
        samples: usize,
        integrator: Integrator,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateReport {
    pub mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub squeeze: SqueezeDoc,
    /// `max` entry distance of the final moments from the pure squeezed state
    /// predicted by sigma.
    pub distance_to_prediction: f64,
    /// `max |M·M† − N·(N + 1)|`
    pub purity_deviation: f64,
    /// `max` entry of the time derivative at the final moments.
    pub generator_residual: f64,
    pub max_occupation: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub report: SimulateReport,
    pub moments: GaussianMoments,
    pub trace: Vec<TraceRow>,
}

pub fn simulate(h: &Hamiltonian, sigma: &SymmetryMatrix, sq: &SqueezeParams, mode: SimulateMode) -> CliResult<Simulation> {
    same_dim(h, sigma)?;
    let target = predicted_steady_moments(sigma, sq)?;
    let gen = MomentGenerator::new(h, sigma.drain(), sq)?;
    let row = |t: f64, g: &GaussianMoments| -> CliResult<TraceRow> {
        Ok(TraceRow {
            t,
            max_distance_to_prediction: moment_distance(g, &target)?,
            purity_deviation: purity_deviation(g),
        })
    };
    let (moments, trace, t) = match mode {
        SimulateMode::Steady => (steady_moments(&gen)?, Vec::new(), None),
        SimulateMode::Evolve { t, samples, integrator } => {
            if !(t.is_finite() && t >= 0.0) || samples == 0 {
                return Err(CliError::Usage(format!(
                    "need a finite duration >= 0 and at least one sample, got t = {t}, samples = {samples}"
                )));
            }
            let mut g = GaussianMoments::vacuum(h.dim());
            let mut trace = vec![row(0.0, &g)?];
            let dt = t / samples as f64;
            for k in 1..=samples {
                g = evolve(&g, &gen, dt, integrator)?;
                trace.push(row(k as f64 * dt, &g)?);
            }
            (g, trace, Some(t))
        }
    };
    let last = row(t.unwrap_or(f64::INFINITY), &moments)?;
    let max_occupation = (0..moments.dim())
        .map(|k| moments.normal()[(k, k)].re)
        .fold(0.0, f64::max);
    Ok(Simulation {
        report: SimulateReport {
            mode: if t.is_some() { "evolve" } else { "steady" },
            t,
            squeeze: SqueezeDoc::from(sq),
            distance_to_prediction: last.max_distance_to_prediction,
            purity_deviation: last.purity_deviation,
            generator_residual: gen.residual(&moments)?,
            max_occupation,
        },
        moments,
        trace,
    })
}

