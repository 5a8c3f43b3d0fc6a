use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use squeezelat::csv::{scan_csv, trace_csv};
use squeezelat::format::{read_json, to_json, write_text, MatrixDoc, MomentsDoc, SigmaDoc, TemplateDoc};
use squeezelat::run::{
    build_fourfold, build_herald, parallel_scan, parse_coupling, parse_potential, simulate, solve_template, verify,
    ScanSummary, SimulateMode,
};
use squeezelat::{CliError, CliResult};
use squeezelat_core::exemplars::fourfold::{fourfold_sigma, PotentialPattern};
use squeezelat_core::oracle::{Integrator, EVOLVE_TOL};
use squeezelat_core::spectral::{grid, PotentialFamily};
use squeezelat_core::{Hamiltonian, SqueezeParams, SymmetryMatrix};

/// Design and check squeezed-reservoir lattices protected by a generalized
/// chiral symmetry.
///
/// A lattice Hamiltonian H (hopping J_{mn} = −H_{mn}, potential V_n = H_{nn},
/// in units of a reference hopping J) has one drain site coupled at rate
/// gamma to a bath squeezed by r at angle phi. A symmetric unitary sigma that
/// fixes the drain and satisfies sigma†·H·sigma = −H* selects the pure steady
/// state N = sinh²(r)·1, M = e^{i·phi} sinh(r) cosh(r)·sigma.
///
/// Exit codes: 0 success, 1 failed check (invalid, infeasible, non-relaxing),
/// 2 usage or input error.
#[derive(Parser)]
#[command(name = "squeezelat", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Verify(VerifyArgs),
    #[command(subcommand)]
    Build(BuildCommand),
    Solve(SolveArgs),
    Scan(ScanArgs),
    Simulate(SimulateArgs),
}

/// Check sigma and the condition sigma†·H·sigma = −H*; prints a JSON report.
///
/// sigma must be symmetric, unitary and have column `drain` equal to the unit
/// vector on the drain. Exits 0 only if all of that holds and
/// max|sigma†·H·sigma + H*| <= --tol.
#[derive(Args)]
struct VerifyArgs {
    /// Hamiltonian matrix JSON: {"dim", "entries": [[[re, im], ...], ...]}.
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Symmetry JSON: {"dim", "drain", "entries"}.
    #[arg(long)]
    sigma: PathBuf,
    /// Largest accepted entry of sigma†·H·sigma + H*.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

/// Write a closed-form exemplar: lattice.json, hamiltonian.json, sigma.json
/// (and fluxes.csv for the square lattice).
#[derive(Subcommand)]
enum BuildCommand {
    /// Square lattice of (2L+1)² sites, drain at the center, protected by the
    /// 90° rotation symmetry with |J_{mn}| = 1 and plaquette flux π/2 in the
    /// first quadrant.
    Fourfold {
        /// Half-width: sites (x, y) with |x|, |y| <= L.
        #[arg(long = "L")]
        l: usize,
        /// Potential V_n on the first quadrant, continued with alternating sign
        /// under rotation: alternating:V (V_n = ±V by quadrant),
        /// saddle:V (V_n = V·x·y/L²) or flat.
        #[arg(long, default_value = "flat", value_parser = parse_potential)]
        potential: PotentialPattern,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Drain 0, chain A on sites 1..L, heralding register B on sites −L..−1.
    Herald {
        /// Chain length.
        #[arg(long = "L")]
        l: usize,
        /// Potential of every chain site, H_{nn} for n = 1..L.
        #[arg(long = "V", allow_hyphen_values = true)]
        v: f64,
        /// uniform:J sets H_{n,n+1} = H_{0,−n} = −J.
        #[arg(long, value_parser = parse_coupling)]
        coupling: f64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

/// Solve for every Hamiltonian of a template that sigma protects.
///
/// Prints {"feasible", "n_free", "diagnostic"?}. With --out, writes
/// {"n_free", "particular", "basis"}: H = particular + Σ c_k basis_k for any
/// real c_k. Exits 1 if no member of the template satisfies the condition.
#[derive(Args)]
struct SolveArgs {
    /// Template JSON: {"dim", "entries": [{"m", "n", "tag", "value"?}]},
    /// tag one of fixed, free_complex, free_real, zero; unlisted entries are
    /// zero.
    #[arg(long)]
    template: PathBuf,
    /// Symmetry JSON: {"dim", "drain", "entries"}.
    #[arg(long)]
    sigma: PathBuf,
    /// Where to write the solution JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// V_n = ±value by quadrant.
    Alternating,
    /// V_n = value·x·y/L².
    Saddle,
    /// V_n = 0 for every value.
    Constant,
}

impl From<FamilyArg> for PotentialFamily {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Alternating => PotentialFamily::Alternating,
            FamilyArg::Saddle => PotentialFamily::Saddle,
            FamilyArg::Constant => PotentialFamily::Constant,
        }
    }
}

/// Dark-mode robustness along a potential family of the four-fold lattice.
///
/// For each value from --from to --to in steps of --step, records the
/// smallest drain weight min_i |ψ_i(drain)| and the smallest level spacing of
/// H. Writes CSV `param,min_drain_weight,min_gap`; the JSON summary locates
/// the maximum of their product.
#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Half-width of the square lattice.
    #[arg(long = "L", default_value_t = 2)]
    l: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    from: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON destination; printed to stderr if omitted.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegratorArg {
    /// Dormand–Prince 5(4) with local error --tol.
    Adaptive,
    /// Matrix exponential around the fixed point; needs a relaxing lattice.
    Exact,
}

/// Second-moment dynamics of the lattice with a squeezed drain.
///
/// N_{mn} = ⟨a†_n a_m⟩ and M_{mn} = ⟨a_m a_n⟩ obey dN/dt = A·N + N·A† +
/// gamma·sinh²(r)·E and dM/dt = A·M + M·Aᵀ + gamma·e^{i·phi} sinh(r) cosh(r)·E
/// with A = −i·H − (gamma/2)·E, E the projector on the drain. Prints a JSON
/// report comparing the result with the state predicted by sigma. Exits 1 if
/// the lattice has a mode that never relaxes.
#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Symmetry JSON; its `drain` field selects the drain site.
    #[arg(long)]
    sigma: PathBuf,
    /// Squeezing strength r >= 0.
    #[arg(long, default_value_t = 0.5)]
    r: f64,
    /// Squeezing angle phi.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi: f64,
    /// Drain loss rate gamma > 0, in units of J.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Evolve from the vacuum for this time (units of 1/J).
    #[arg(long, conflicts_with = "steady", required_unless_present = "steady")]
    evolve: Option<f64>,
    /// Solve for the fixed point directly.
    #[arg(long)]
    steady: bool,
    /// Number of trace intervals for --evolve.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, value_enum, default_value = "adaptive")]
    integrator: IntegratorArg,
    /// Local error tolerance of the adaptive integrator.
    #[arg(long, default_value_t = EVOLVE_TOL)]
    tol: f64,
    /// Time-trace CSV `t,max_distance_to_prediction,purity_deviation`.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Final moments JSON {"normal", "anomalous"}.
    #[arg(long)]
    moments: Option<PathBuf>,
}

fn load_hamiltonian(path: &Path) -> CliResult<Hamiltonian> {
    let doc: MatrixDoc = read_json(path)?;
    let m = doc.to_matrix(&path.display().to_string())?;
    Ok(Hamiltonian::new(m)?)
}

fn load_sigma(path: &Path) -> CliResult<SymmetryMatrix> {
    let doc: SigmaDoc = read_json(path)?;
    Ok(doc.to_sigma(&path.display().to_string())?)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Verify(a) => {
            let h = load_hamiltonian(&a.hamiltonian)?;
            let sigma = load_sigma(&a.sigma)?;
            let report = verify(&h, &sigma, a.tol)?;
            print!("{}", to_json(&report));
            if !report.chiral {
                return Err(CliError::Domain(if report.valid_symmetry {
                    format!("residual {:e} exceeds tolerance {:e}", report.residual, a.tol)
                } else {
                    "sigma is not a valid symmetry (symmetric, unitary, fixing the drain)".to_string()
                }));
            }
        }
        Command::Build(b) => {
            let (built, dir) = match b {
                BuildCommand::Fourfold { l, potential, out_dir } => (build_fourfold(l, potential)?, out_dir),
                BuildCommand::Herald { l, v, coupling, out_dir } => (build_herald(l, v, coupling)?, out_dir),
            };
            print!("{}", to_json(&built.write(&dir)?));
        }
        Command::Solve(a) => {
            let template = read_json::<TemplateDoc>(&a.template)?.to_template(&a.template.display().to_string())?;
            let sigma = load_sigma(&a.sigma)?;
            let (report, solution) = solve_template(&template, &sigma)?;
            print!("{}", to_json(&report));
            match (solution, &a.out) {
                (Some(sol), Some(out)) => write_text(out, &to_json(&sol))?,
                (None, _) => {
                    return Err(CliError::Domain(format!(
                        "infeasible: {}",
                        report.diagnostic.unwrap_or_default()
                    )))
                }
                _ => {}
            }
        }
        Command::Scan(a) => {
            let family = PotentialFamily::from(a.family);
            let points = grid(a.from, a.to, a.step)?;
            let table = parallel_scan(family, a.l, &points, &fourfold_sigma(a.l)?)?;
            let csv = scan_csv(&table.rows);
            let summary = to_json(&ScanSummary::new(family, a.l, &table));
            match &a.out {
                Some(p) => write_text(p, &csv)?,
                None => print!("{csv}"),
            }
            match &a.summary {
                Some(p) => write_text(p, &summary)?,
                None => eprint!("{summary}"),
            }
        }
        Command::Simulate(a) => {
            let h = load_hamiltonian(&a.hamiltonian)?;
            let sigma = load_sigma(&a.sigma)?;
            let sq = SqueezeParams::new(a.r, a.phi, a.gamma)?;
            let mode = match a.evolve {
                Some(t) => SimulateMode::Evolve {
                    t,
                    samples: a.samples,
                    integrator: match a.integrator {
                        IntegratorArg::Adaptive => Integrator::Adaptive { tol: a.tol },
                        IntegratorArg::Exact => Integrator::Exact,
                    },
                },
                None => SimulateMode::Steady,
            };
            let sim = simulate(&h, &sigma, &sq, mode)?;
            if let Some(p) = &a.trace {
                write_text(p, &trace_csv(&sim.trace))?;
            }
            if let Some(p) = &a.moments {
                write_text(p, &to_json(&MomentsDoc::from_moments(&sim.moments)))?;
            }
            print!("{}", to_json(&sim.report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
