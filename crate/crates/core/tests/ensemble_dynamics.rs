use std::f64::consts::PI;

use hartree_core::ensemble::{
    add_perturbation, picard_iterate, Bump, ModeEnsemble, PerturbationSpec, PerturbationState, PicardSettings,
    Placement,
};
use hartree_core::equilibria::{Distribution, Potential};
use hartree_core::spectral::{apply_multiplier, free_propagator, random_field, SpectralField, TorusGrid};
use hartree_core::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_modes(g: &TorusGrid, n: usize, seed: u64) -> Vec<(usize, f64, SpectralField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|j| {
            let f = random_field(g, &mut rng, 2.0);
            let f = f.scaled(Complex64::new(0.2 / f.max_abs(), 0.0));
            (j, 1.0, f)
        })
        .collect()
}

#[test]
fn free_flow_is_exact_and_mass_is_a_gauge() {
    let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
    let modes = random_modes(&g, 3, 5);
    let mut e = ModeEnsemble::from_fields(&g, &Potential::zero(), 0.7, modes.clone()).unwrap();
    for _ in 0..40 {
        e.step(0.025).unwrap();
    }
    for (j, (_, _, f)) in modes.iter().enumerate() {
        let exact = apply_multiplier(f, free_propagator(1.0, 0.0)).unwrap();
        assert!(e.mode_field(j).max_abs_diff(&exact) < 1e-12);
    }
}

#[test]
fn bose_equilibrium_density_stays_flat_in_two_dimensions() {
    let g = TorusGrid::new(2, 4.0 * PI, 16).unwrap();
    let f = Distribution::bose(1.0, -0.5).unwrap();
    let mut e = ModeEnsemble::init_equilibrium(&g, &f, &Potential::gaussian(0.8, 0.5).unwrap(), 1e-10).unwrap();
    let rho0 = e.density_values()[0];
    let traj = e.evolve(0.5, 0.01, 10, |_, _| Ok(())).unwrap();
    let dev = e.density_values().iter().map(|r| (r - rho0).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-10 * rho0, "{dev}");
    assert!(traj.max_mass_drift() < 1e-12);
}

#[test]
fn evolution_commutes_with_lattice_translation() {
    let g = TorusGrid::new(1, 2.0 * PI, 32).unwrap();
    let w = Potential::gaussian(1.5, 0.7).unwrap();
    let modes = random_modes(&g, 4, 11);
    let shifted: Vec<_> = modes.iter().map(|(i, a, f)| (*i, *a, f.shifted(&[5]))).collect();
    let mut a = ModeEnsemble::from_fields(&g, &w, 0.3, modes).unwrap();
    let mut b = ModeEnsemble::from_fields(&g, &w, 0.3, shifted).unwrap();
    for _ in 0..50 {
        a.step(0.01).unwrap();
        b.step(0.01).unwrap();
    }
    for j in 0..a.len() {
        assert!(a.mode_field(j).shifted(&[5]).max_abs_diff(&b.mode_field(j)) < 1e-12);
    }
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let g = TorusGrid::new(2, 2.0 * PI, 16).unwrap();
    let e = ModeEnsemble::init_equilibrium(
        &g,
        &Distribution::fermi(1.0, 0.0).unwrap(),
        &Potential::delta(1.0).unwrap(),
        1e-8,
    )
    .unwrap();
    let spec = PerturbationSpec {
        bump: Bump::centered(&g, 0.5, 0.05),
        placement: Placement::Modulated,
    };
    let run = || {
        let mut s = add_perturbation(&e, &spec).unwrap();
        s.evolve(0.2, 0.01, 5).unwrap();
        s.deviations()
            .into_iter()
            .flat_map(|f| f.into_values())
            .collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn energy_error_is_second_order_for_a_perturbed_fermi_gas() {
    let g = TorusGrid::new(1, 2.0 * PI, 64).unwrap();
    let e = ModeEnsemble::init_equilibrium(
        &g,
        &Distribution::fermi(1.0, 0.0).unwrap(),
        &Potential::delta(1.0).unwrap(),
        1e-8,
    )
    .unwrap();
    let spec = PerturbationSpec {
        bump: Bump::centered(&g, 0.5, 0.1),
        placement: Placement::Modulated,
    };
    let drift = |dt: f64| {
        let mut s = add_perturbation(&e, &spec).unwrap();
        s.evolve(1.0, dt, 1).unwrap().max_energy_drift()
    };
    let (a, b, c) = (drift(0.02), drift(0.01), drift(0.005));
    assert!((a / b - 4.0).abs() < 0.8 && (b / c - 4.0).abs() < 0.8, "{a} {b} {c}");
}

#[test]
fn fixed_point_is_the_free_flow_without_interaction() {
    let g = TorusGrid::new(1, 2.0 * PI, 32).unwrap();
    let e = ModeEnsemble::from_plane_waves(&g, &Potential::zero(), &[(1, 0.5), (31, 0.5)]).unwrap();
    let s: PerturbationState = add_perturbation(
        &e,
        &PerturbationSpec {
            bump: Bump::centered(&g, 0.5, 1e-2),
            placement: Placement::Modulated,
        },
    )
    .unwrap();
    let rep = picard_iterate(
        &s,
        &PicardSettings {
            window: 0.5,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(rep.converged && !rep.diverged);
    assert!(rep.iterates.len() <= 3, "{:?}", rep.iterates);
    assert!(rep.compare_with_split_step(&s, 4).unwrap() < 1e-12);
}
