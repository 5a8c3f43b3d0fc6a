//! Second-moment flow: invariant manifold, semigroup law, relaxation speed,
//! and a three-site cross-check against the truncated Fock-space dynamics.

mod common;

use common::{complex_matrix, hermitian};
use proptest::prelude::*;
use squeezelat_core::chiral::predicted_steady_moments;
use squeezelat_core::exemplars::fourfold::fourfold_sigma;
use squeezelat_core::exemplars::herald::{herald_hamiltonian, herald_index, herald_sigma};
use squeezelat_core::linalg::{hermitian_deviation, symmetric_deviation};
use squeezelat_core::oracle::{
    evolve, fock_oracle, moment_distance, relaxation_time, FockMode, Integrator, MomentGenerator,
};
use squeezelat_core::spectral::{dark_mode_metrics, PotentialFamily};
use squeezelat_core::{CMatrix, Error, GaussianMoments, Hamiltonian, SqueezeParams, C64};

/// `N = B·B†`, `M` symmetric: on the manifold the flow has to preserve.
fn moments(n: usize) -> impl Strategy<Value = GaussianMoments> {
    (complex_matrix(n), complex_matrix(n)).prop_map(|(b, m)| {
        GaussianMoments::new(&b * b.adjoint(), (&m + m.transpose()) * C64::new(0.5, 0.0)).unwrap()
    })
}

fn system(n: usize) -> impl Strategy<Value = (Hamiltonian, GaussianMoments, usize)> {
    (hermitian(n), moments(n), 0..n).prop_map(|(h, g, d)| (Hamiltonian::new(h).unwrap(), g, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generator_keeps_moments_on_the_manifold(
        (h, g, d) in (1usize..6).prop_flat_map(system),
        r in 0.0f64..1.5,
        phi in -3.2f64..3.2,
        gamma in 0.0f64..3.0,
    ) {
        let gen = MomentGenerator::from_parts(&h, d, r, phi, gamma).unwrap();
        let (dn, dm) = gen.apply(&g).unwrap();
        prop_assert!(hermitian_deviation(&dn) <= 1e-12);
        prop_assert!(symmetric_deviation(&dm) <= 1e-12);
    }

    #[test]
    fn two_half_steps_make_one_step(
        (h, g, d) in (1usize..5).prop_flat_map(system),
        r in 0.0f64..1.0,
        gamma in 0.2f64..2.0,
        t in 0.0f64..4.0,
    ) {
        let gen = MomentGenerator::from_parts(&h, d, r, 0.9, gamma).unwrap();
        let adaptive = Integrator::default();
        let whole = evolve(&g, &gen, t, adaptive).unwrap();
        let half = evolve(&g, &gen, t / 2.0, adaptive).unwrap();
        let halves = evolve(&half, &gen, t / 2.0, adaptive).unwrap();
        prop_assert!(moment_distance(&whole, &halves).unwrap() <= 1e-8);

        let exact = match evolve(&g, &gen, t, Integrator::Exact) {
            Ok(e) => e,
            // an eigenmode without drain weight never relaxes
            Err(Error::NonRelaxing { .. }) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(moment_distance(&whole, &exact).unwrap() <= 1e-7);
        let half = evolve(&g, &gen, t / 2.0, Integrator::Exact).unwrap();
        let halves = evolve(&half, &gen, t / 2.0, Integrator::Exact).unwrap();
        prop_assert!(moment_distance(&exact, &halves).unwrap() <= 1e-9);
    }
}

#[test]
fn weaker_drain_weight_relaxes_slower() {
    let sigma = fourfold_sigma(2).unwrap();
    let sq = SqueezeParams::new(0.5, 0.0, 1.0).unwrap();
    let mut points: Vec<(f64, f64)> = [0.4, 1.2, 3.0]
        .iter()
        .map(|&v| {
            let h = PotentialFamily::Alternating.hamiltonian(2, v).unwrap();
            let w = dark_mode_metrics(&h, sigma.drain()).unwrap().min_drain_weight;
            let gen = MomentGenerator::new(&h, sigma.drain(), &sq).unwrap();
            let t = relaxation_time(&gen, &GaussianMoments::vacuum(h.dim()), 1e-6).unwrap();
            (w, t)
        })
        .collect();
    points.sort_by(|a, b| b.0.total_cmp(&a.0));
    assert!(
        points.windows(2).all(|p| p[0].1 < p[1].1),
        "relaxation times not ordered by drain weight: {points:?}"
    );
}

#[test]
fn decoupled_site_never_relaxes() {
    let mut m = CMatrix::zeros(2, 2);
    m[(1, 1)] = C64::new(0.4, 0.0);
    let gen = MomentGenerator::from_parts(&Hamiltonian::new(m).unwrap(), 0, 0.3, 0.0, 1.0).unwrap();
    let err = relaxation_time(&gen, &GaussianMoments::vacuum(2), 1e-6).unwrap_err();
    assert!(matches!(err, Error::NonRelaxing { .. }));
}

#[test]
fn smallest_herald_matches_fock_dynamics() {
    let l = 1;
    let h = herald_hamiltonian(l, 0.6, 1.0, &[C64::new(-0.8, 0.3)]).unwrap();
    let sigma = herald_sigma(l).unwrap();
    let drain = herald_index(l, 0);
    let sq = SqueezeParams::new(0.15, 0.5, 1.0).unwrap();
    let gen = MomentGenerator::new(&h, drain, &sq).unwrap();
    let t = 1.5;
    let gauss = evolve(&GaussianMoments::vacuum(3), &gen, t, Integrator::default()).unwrap();
    let fock = fock_oracle(&h, drain, &sq, 8, FockMode::Time(t)).unwrap();
    let d = moment_distance(&gauss, &fock).unwrap();
    assert!(d <= 1e-4, "Gaussian vs Fock distance {d:e}");

    let late = evolve(&GaussianMoments::vacuum(3), &gen, 400.0, Integrator::Exact).unwrap();
    let target = predicted_steady_moments(&sigma, &sq).unwrap();
    assert!(moment_distance(&late, &target).unwrap() <= 1e-8);
}
