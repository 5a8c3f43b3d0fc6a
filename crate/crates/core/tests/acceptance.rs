//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints its own PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use squeezelat_core::chiral::{
    chiral_residual, is_valid_symmetry, predicted_steady_moments, purity_deviation,
};
use squeezelat_core::constraint::{solve, EntryTag};
use squeezelat_core::exemplars::fourfold::{
    fourfold_hamiltonian, fourfold_nn_template, fourfold_sigma, plaquette_flux, plaquettes,
    quadrant, rotate, site_index, square_lattice, FourfoldParams, PotentialPattern,
    CENTRAL_PLAQUETTES,
};
use squeezelat_core::exemplars::herald::{
    chain_energy, herald_hamiltonian, herald_index, herald_sigma, herald_template,
};
use squeezelat_core::oracle::{
    evolve, fock_oracle, moment_distance, relaxation_time, steady_moments, FockMode, Integrator,
    MomentGenerator,
};
use squeezelat_core::spectral::{eigenmodes, grid, scan, PotentialFamily};
use squeezelat_core::{CMatrix, Error, GaussianMoments, Hamiltonian, SqueezeParams, SymmetryMatrix, C64};

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

fn reference_fourfold() -> (Hamiltonian, SymmetryMatrix) {
    let p = FourfoldParams::uniform(2, 1.0, PotentialPattern::Alternating(0.5));
    (fourfold_hamiltonian(&p).unwrap(), fourfold_sigma(2).unwrap())
}

fn reference_herald() -> (Hamiltonian, SymmetryMatrix) {
    let c = vec![C64::new(-1.0, 0.0); 4];
    (herald_hamiltonian(4, 2.5, 1.0, &c).unwrap(), herald_sigma(4).unwrap())
}

fn bath() -> SqueezeParams {
    SqueezeParams::new(0.5, 0.3, 1.0).unwrap()
}

fn symmetry_validity() -> Check {
    let mut worst: f64 = 0.0;
    let mut all_valid = true;
    let mut sigmas = vec![fourfold_sigma(2).unwrap()];
    for l in [1, 2, 4] {
        sigmas.push(herald_sigma(l).unwrap());
    }
    for s in &sigmas {
        let r = is_valid_symmetry(s);
        all_valid &= r.valid;
        worst = worst.max(r.max_deviation());
    }
    ensure(all_valid && worst <= 1e-12, format!("max deviation {worst:.2e} over 4 matrices"))
}

fn chiral_closure() -> Check {
    let (h4, s4) = reference_fourfold();
    let (hh, sh) = reference_herald();
    let a = chiral_residual(&h4, &s4).unwrap();
    let b = chiral_residual(&hh, &sh).unwrap();
    ensure(a <= 1e-12 && b <= 1e-12, format!("four-fold {a:.2e}, herald {b:.2e}"))
}

fn flux_laws() -> Check {
    let (h, _) = reference_fourfold();
    let lat = square_lattice(2).unwrap();
    let mut worst: f64 = 0.0;
    for p in plaquettes(2) {
        if p.is_central() {
            continue;
        }
        let a = plaquette_flux(&h, &lat, p).unwrap();
        let b = plaquette_flux(&h, &lat, p.rotated()).unwrap();
        worst = worst.max(wrap(a + b).abs());
    }
    let total: f64 = CENTRAL_PLAQUETTES
        .iter()
        .map(|p| plaquette_flux(&h, &lat, *p).unwrap())
        .sum();
    let central = wrap(total - PI).abs();
    ensure(
        worst <= 1e-10 && central <= 1e-10,
        format!("rotation rule max error {worst:.2e}, central sum - pi = {central:.2e}"),
    )
}

fn steady_state_theorem() -> Check {
    let sq = bath();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, (h, s)) in [("four-fold", reference_fourfold()), ("herald", reference_herald())] {
        let gen = MomentGenerator::new(&h, s.drain(), &sq).unwrap();
        let got = steady_moments(&gen).map_err(|e| format!("{name}: {e}"))?;
        let want = predicted_steady_moments(&s, &sq).unwrap();
        let d = moment_distance(&got, &want).unwrap();
        let p = purity_deviation(&got);
        ok &= d <= 1e-8 && p <= 1e-8;
        parts.push(format!("{name}: distance {d:.2e}, purity {p:.2e}"));
    }
    ensure(ok, parts.join("; "))
}

fn convergence() -> Check {
    let sq = bath();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, (h, s)) in [("four-fold", reference_fourfold()), ("herald", reference_herald())] {
        let gen = MomentGenerator::new(&h, s.drain(), &sq).unwrap();
        let vac = GaussianMoments::vacuum(h.dim());
        let t = relaxation_time(&gen, &vac, 1e-6).map_err(|e| format!("{name}: {e}"))?;
        let fixed = steady_moments(&gen).unwrap();
        let reached = evolve(&vac, &gen, t, Integrator::Exact).unwrap();
        let d = moment_distance(&reached, &fixed).unwrap();
        ok &= t.is_finite() && d <= 1e-6;
        parts.push(format!("{name}: t = {t:.4e}/J, distance {d:.2e}"));
    }
    let mut m = CMatrix::zeros(3, 3);
    m[(1, 2)] = C64::new(-1.0, 0.0);
    m[(2, 1)] = C64::new(-1.0, 0.0);
    let gen = MomentGenerator::new(&Hamiltonian::new(m).unwrap(), 0, &sq).unwrap();
    let control = matches!(steady_moments(&gen), Err(Error::NonRelaxing { .. }));
    ok &= control;
    parts.push(format!("decoupled control non-relaxing: {control}"));
    ensure(ok, parts.join("; "))
}

fn oracle_stack() -> Check {
    let mut worst: f64 = 0.0;
    let cases: Vec<(Hamiltonian, SqueezeParams)> = vec![
        (Hamiltonian::zeros(1), SqueezeParams::new(0.4, 0.7, 1.0).unwrap()),
        (
            Hamiltonian::new(CMatrix::from_row_slice(1, 1, &[C64::new(0.8, 0.0)])).unwrap(),
            SqueezeParams::new(0.3, -0.4, 0.6).unwrap(),
        ),
        (
            Hamiltonian::new(CMatrix::from_row_slice(
                2,
                2,
                &[C64::new(0.0, 0.0), C64::new(-1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 0.0)],
            ))
            .unwrap(),
            SqueezeParams::new(0.3, 0.2, 1.0).unwrap(),
        ),
        (
            Hamiltonian::new(CMatrix::from_row_slice(
                2,
                2,
                &[C64::new(0.3, 0.0), C64::new(-0.5, 0.4), C64::new(-0.5, -0.4), C64::new(-0.6, 0.0)],
            ))
            .unwrap(),
            SqueezeParams::new(0.4, 1.1, 0.8).unwrap(),
        ),
    ];
    for (h, sq) in &cases {
        let gen = MomentGenerator::new(h, 0, sq).unwrap();
        let vac = GaussianMoments::vacuum(h.dim());
        let fixed = steady_moments(&gen).map_err(|e| e.to_string())?;
        let fock = fock_oracle(h, 0, sq, 16, FockMode::Steady).map_err(|e| e.to_string())?;
        worst = worst.max(moment_distance(&fixed, &fock).unwrap());
        let t = 2.5;
        let gauss = evolve(&vac, &gen, t, Integrator::default()).unwrap();
        let fock = fock_oracle(h, 0, sq, 16, FockMode::Time(t)).map_err(|e| e.to_string())?;
        worst = worst.max(moment_distance(&gauss, &fock).unwrap());
    }
    ensure(worst <= 1e-4, format!("max Gaussian/Fock distance {worst:.2e} over 4 systems x (steady, t = 2.5)"))
}

/// `J_{m,n} = -H_{m,n}` on a nearest-neighbour bond given by coordinates.
fn hop(h: &Hamiltonian, m: [i64; 2], n: [i64; 2]) -> C64 {
    -h.get(site_index(2, m), site_index(2, n))
}

fn fourfold_rule_violation(h: &Hamiltonian) -> f64 {
    let lat = square_lattice(2).unwrap();
    let mut worst: f64 = 0.0;
    let o = [0i64, 0i64];
    worst = worst.max(h.get(lat.drain(), lat.drain()).norm());
    for &s in lat.sites() {
        if s == o {
            continue;
        }
        let a = h.get(site_index(2, s), site_index(2, s)).re;
        let b = h.get(site_index(2, rotate(s)), site_index(2, rotate(s))).re;
        worst = worst.max((a + b).abs());
    }
    let i = C64::new(0.0, 1.0);
    for &(a, b) in lat.edges() {
        let (m, n) = (lat.sites()[a], lat.sites()[b]);
        if m == o || n == o {
            continue;
        }
        let qm = quadrant(m).unwrap() as i32;
        let qn = quadrant(n).unwrap() as i32;
        let want = i.powi(qm - qn) * hop(h, m, n).conj();
        worst = worst.max((hop(h, rotate(m), rotate(n)) - want).norm());
    }
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    for sign in [1i64, -1] {
        let lhs = hop(h, o, [sign, 0]);
        let rhs = (hop(h, o, [0, sign]).conj() + i * hop(h, o, [0, -sign]).conj()) * (sign as f64 * r2);
        worst = worst.max((lhs - rhs).norm());
    }
    worst
}

fn constraint_solver() -> Check {
    let s4 = fourfold_sigma(2).unwrap();
    let sol = solve(&fourfold_nn_template(2).unwrap(), &s4).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst_rule: f64 = 0.0;
    for _ in 0..100 {
        let c: Vec<f64> = (0..sol.n_free).map(|_| rng.random_range(-1.0..1.0)).collect();
        worst_rule = worst_rule.max(fourfold_rule_violation(&sol.sample(&c).unwrap()));
    }
    let (h4, _) = reference_fourfold();
    let d4 = sol.distance_to_family(&h4).unwrap();

    let (hh, sh) = reference_herald();
    let hsol = solve(&herald_template(4, 2.5, 1.0).unwrap(), &sh).map_err(|e| e.to_string())?;
    let dh = hsol.distance_to_family(&hh).unwrap();

    let mut t = fourfold_nn_template(2).unwrap();
    let drain = s4.drain();
    t.set(drain, drain, EntryTag::Fixed(C64::new(1.0, 0.0))).unwrap();
    let infeasible = match solve(&t, &s4) {
        Err(Error::Infeasible(inf)) => Some(inf),
        _ => None,
    };
    ensure(
        worst_rule <= 1e-10 && d4 <= 1e-9 && dh <= 1e-9 && infeasible.is_some(),
        format!(
            "n_free = {}, 100 samples max rule error {worst_rule:.2e}; closed-form distances four-fold {d4:.2e}, herald {dh:.2e}; fixed drain potential: {}",
            sol.n_free,
            infeasible.map_or("feasible".to_string(), |i| format!("infeasible ({i})"))
        ),
    )
}

fn herald_regression() -> Check {
    let mut worst: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for l in [1usize, 2, 3, 4, 6] {
        for (v, j) in [(2.5, 1.0), (-0.7, 0.4)] {
            let c: Vec<C64> = (0..l).map(|k| C64::from_polar(1.0 + 0.1 * k as f64, 0.3 * k as f64)).collect();
            let h = herald_hamiltonian(l, v, j, &c).unwrap();
            for m in 1..=l as i64 {
                let want = (2.0 * (PI * m as f64 / (l + 1) as f64).cos() - v / j) * j;
                let k = herald_index(l, -m);
                worst = worst.max((h.get(k, k).re - want).abs());
                worst = worst.max((h.get(k, k).re + chain_energy(l, v, j, m)).abs());
            }
        }
    }
    let sigma = herald_sigma(4).unwrap();
    for lambda in [0.1, 10.0] {
        let c = vec![C64::new(-lambda, 0.0); 4];
        let (h, _) = reference_herald();
        let mut m = h.matrix().clone();
        let d = herald_index(4, 0);
        for n in 0..9 {
            if n != d {
                m[(d, n)] *= lambda;
                m[(n, d)] *= lambda;
            }
        }
        let scaled = Hamiltonian::new(m).unwrap();
        worst_res = worst_res.max(chiral_residual(&scaled, &sigma).unwrap());
        let direct = herald_hamiltonian(4, 2.5, 1.0, &c).unwrap();
        worst_res = worst_res.max(chiral_residual(&direct, &sigma).unwrap());
    }
    ensure(
        worst <= 1e-14 && worst_res <= 1e-12,
        format!("B potentials max error {worst:.2e}; rescaled residual {worst_res:.2e}"),
    )
}

fn robustness_scans() -> Check {
    let sigma = fourfold_sigma(2).unwrap();
    let alt = scan(
        |v| PotentialFamily::Alternating.hamiltonian(2, v),
        &grid(0.0, 2.0, 0.05).unwrap(),
        &sigma,
    )
    .map_err(|e| e.to_string())?;
    let saddle = scan(
        |v| PotentialFamily::Saddle.hamiltonian(2, v),
        &grid(0.0, 5.0, 0.05).unwrap(),
        &sigma,
    )
    .map_err(|e| e.to_string())?;
    let best = saddle.rows.iter().map(|r| r.combined()).fold(f64::MIN, f64::max);
    let ties = saddle.rows.iter().filter(|r| r.combined() == best).count();
    let alt_ok = alt.has_interior_maximum() && (alt.argmax_combined - 0.5).abs() <= 0.3;
    let saddle_ok = saddle.has_interior_maximum() && ties == 1;
    ensure(
        alt_ok && saddle_ok,
        format!(
            "alternating argmax {:.2}J; saddle global interior argmax {:.2}J (local maxima at {:?})",
            alt.argmax_combined, saddle.argmax_combined, saddle.combined_local_maxima
        ),
    )
}

fn spectral_chirality() -> Check {
    let s4 = fourfold_sigma(2).unwrap();
    let sol = solve(&fourfold_nn_template(2).unwrap(), &s4).map_err(|e| e.to_string())?;
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let c: Vec<f64> = (0..sol.n_free).map(|_| rng.random_range(-2.0..2.0)).collect();
        let e = eigenmodes(&sol.sample(&c).unwrap()).energies;
        let n = e.len();
        for i in 0..n {
            worst = worst.max((e[i] + e[n - 1 - i]).abs());
        }
    }
    ensure(worst <= 1e-9, format!("max |e_i + e_(N+1-i)| = {worst:.2e} over 50 samples"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("symmetry validity", symmetry_validity),
        ("chiral closure", chiral_closure),
        ("flux laws", flux_laws),
        ("steady-state theorem", steady_state_theorem),
        ("convergence", convergence),
        ("oracle stack", oracle_stack),
        ("constraint solver", constraint_solver),
        ("herald potentials and rescaling", herald_regression),
        ("robustness scans", robustness_scans),
        ("spectral chirality", spectral_chirality),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", k + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
