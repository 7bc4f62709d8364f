use infolat_core::hamiltonian::{
    build_composite, build_effective_hamiltonian, build_kitaev_sweet_spot, build_kitaev_with_mu,
    build_tb_hamiltonian,
};
use infolat_core::lattice::{coords, lattice_delta, scale_profile};
use infolat_core::oracle::{
    odd_parity_operator, oracle_entropy, oracle_evolve, oracle_ground_state, oracle_hamiltonian, oracle_lattice,
    oracle_occupations,
};
use infolat_core::validation::{compare, protocol_cases, random_case, run_validation};
use infolat_core::{
    evolve, ground_state, local_information, CouplingMatrix, GroundStateOptions, LatticeCoord,
};

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() < tol, "{x} vs {y}");
    }
}

fn random_gaussian(seed: u64) -> (CouplingMatrix, CouplingMatrix, f64) {
    let case = random_case(seed);
    let pre = CouplingMatrix::from_terms(case.n_sites, case.pre).unwrap();
    let post = CouplingMatrix::from_terms(case.n_sites, case.post).unwrap();
    (pre, post, case.t)
}

/// First seed whose random case has exactly `n` sites.
fn seed_with_sites(n: usize) -> u64 {
    (0..).find(|&s| random_case(s).n_sites == n).unwrap()
}

#[test]
fn tight_binding_many_body_spectrum() {
    let h = build_tb_hamiltonian(4, &[], 0.0, 0.7, 1.0).unwrap();
    let fock = oracle_hamiltonian(h.terms(), 4).unwrap();
    assert_close(&h.many_body_spectrum().unwrap(), &fock.spectrum(), 1e-10);
}

#[test]
fn sweet_spot_single_particle_energies() {
    let h = build_kitaev_sweet_spot(3, 1.0).unwrap();
    let eps = h.single_particle_energies();
    assert_close(&eps, &[0.0, 1.0, 1.0], 1e-12);
    let fock = oracle_hamiltonian(h.terms(), 3).unwrap();
    assert_close(&h.many_body_spectrum().unwrap(), &fock.spectrum(), 1e-12);
}

#[test]
fn detuned_kitaev_ground_energy() {
    let h = build_kitaev_with_mu(4, 1.0, 0.3).unwrap();
    let m = ground_state(&h, GroundStateOptions::default()).unwrap();
    let fock = oracle_hamiltonian(h.terms(), 4).unwrap();
    assert!((h.energy(&m).unwrap() - fock.spectrum()[0]).abs() < 1e-10);
}

#[test]
fn composite_ground_state_entropies() {
    let kitaev = build_kitaev_sweet_spot(2, 5.0).unwrap();
    let probe = build_tb_hamiltonian(2, &[], 0.0, 0.0, 1.0).unwrap();
    let h = build_composite(&kitaev, &probe, 0.5).unwrap();
    // γ_{A,0} stays uncoupled, so the ground space is doubly degenerate.
    // The two parity sectors differ by that local operator and share all
    // subsystem entropies.
    let m = ground_state(&h, GroundStateOptions::empty_zero_modes()).unwrap();
    let lat = local_information(&m).unwrap();
    let fock = oracle_hamiltonian(h.terms(), 4).unwrap();
    let psi = oracle_ground_state(&fock, Some(&odd_parity_operator(4))).unwrap();
    for c in coords(4) {
        let s = oracle_entropy(&psi, 4, c.m, c.last());
        assert!((lat.entropy(c) - s).abs() < 1e-8, "{c:?}");
    }
}

#[test]
fn effective_model_spectrum() {
    let h = build_effective_hamiltonian(4, 1.0, 1.0).unwrap();
    let fock = oracle_hamiltonian(h.terms(), 4).unwrap();
    assert_close(&h.many_body_spectrum().unwrap(), &fock.spectrum(), 1e-10);
}

#[test]
fn evolved_occupations_six_sites() {
    let (pre, post, _) = random_gaussian(seed_with_sites(6));
    let m = evolve(&ground_state(&pre, Default::default()).unwrap(), &post, 1.7).unwrap();
    let h_pre = oracle_hamiltonian(pre.terms(), 6).unwrap();
    let h_post = oracle_hamiltonian(post.terms(), 6).unwrap();
    let psi = oracle_evolve(&h_post, &oracle_ground_state(&h_pre, None).unwrap(), 1.7);
    assert_close(&m.occupation_density(), &oracle_occupations(&psi, 6), 1e-8);
}

#[test]
fn ground_state_occupations_five_sites() {
    let (pre, _, _) = random_gaussian(seed_with_sites(5));
    let m = ground_state(&pre, Default::default()).unwrap();
    let psi = oracle_ground_state(&oracle_hamiltonian(pre.terms(), 5).unwrap(), None).unwrap();
    assert_close(&m.occupation_density(), &oracle_occupations(&psi, 5), 1e-10);
}

#[test]
fn all_subsystem_entropies_six_sites() {
    let (pre, post, t) = random_gaussian(seed_with_sites(6) + 1000);
    let n = pre.n_sites();
    let m = evolve(&ground_state(&pre, Default::default()).unwrap(), &post, t).unwrap();
    let h_pre = oracle_hamiltonian(pre.terms(), n).unwrap();
    let h_post = oracle_hamiltonian(post.terms(), n).unwrap();
    let psi = oracle_evolve(&h_post, &oracle_ground_state(&h_pre, None).unwrap(), t);
    let mut count = 0;
    for c in coords(n) {
        let s = infolat_core::entropy::subsystem_entropy(&m, c).unwrap();
        assert!((s - oracle_entropy(&psi, n, c.m, c.last())).abs() < 1e-8);
        count += 1;
    }
    assert_eq!(count, n * (n + 1) / 2);
}

#[test]
fn profile_and_delta_against_oracle() {
    let (pre, post, _) = random_gaussian(seed_with_sites(8));
    let t = 2.3;
    let m0 = ground_state(&pre, Default::default()).unwrap();
    let m = evolve(&m0, &post, t).unwrap();
    let base = local_information(&m0).unwrap();
    let lat = local_information(&m).unwrap();

    let h_pre = oracle_hamiltonian(pre.terms(), 8).unwrap();
    let h_post = oracle_hamiltonian(post.terms(), 8).unwrap();
    let psi0 = oracle_ground_state(&h_pre, None).unwrap();
    let psi = oracle_evolve(&h_post, &psi0, t);
    let base_ref = oracle_lattice(&psi0, 8).unwrap();
    let lat_ref = oracle_lattice(&psi, 8).unwrap();

    assert_close(&scale_profile(&lat), &scale_profile(&lat_ref), 1e-8);
    let d = lattice_delta(&lat, &base).unwrap();
    let d_ref = lattice_delta(&lat_ref, &base_ref).unwrap();
    for (a, b) in d.iter().zip(&d_ref) {
        assert_close(a, b, 1e-8);
    }
    let top = LatticeCoord::new(7, 0, 8).unwrap();
    assert!((lat.info(top) - lat_ref.info(top)).abs() < 1e-8);
}

#[test]
fn shrunk_protocols_agree() {
    for case in protocol_cases().unwrap() {
        let dev = compare(&case).unwrap();
        assert!(dev.max() < 1e-8, "{dev:?}");
    }
}

#[test]
fn fifty_seeded_random_cases() {
    let report = run_validation(50, 0xC0FFEE).unwrap();
    assert!(report.cases.len() >= 50);
    assert!(report.max_deviation < 1e-8, "{:?}", report.max_deviation);
}
