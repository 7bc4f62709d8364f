use proptest::prelude::*;

use infolat_core::io::{config_to_text, fmt_num, parse_config};
use infolat_core::lattice::coords;
use infolat_core::partition::{gamma, partition_sums, partition_sums_fast};
use infolat_core::{
    evolve, ground_state, local_information, CouplingMatrix, CovarianceMatrix, GroundStateOptions,
    HamiltonianTerm, IntervalProbe, PartitionLabel, Protocol, QuenchConfig, RegionSpec,
};

fn max_antisymmetry_defect(m: &nalgebra::DMatrix<f64>) -> f64 {
    (m + m.transpose()).amax()
}

/// Random quadratic Hamiltonians on `n` sites: a chemical potential on
/// every site plus a handful of hopping and pairing terms.
fn hamiltonian_of(n: usize) -> impl Strategy<Value = CouplingMatrix> {
    let mus = prop::collection::vec(-2.0..2.0f64, n);
    let bonds = prop::collection::vec((0..n, 1..n, -1.5..1.5f64, any::<bool>()), 1..2 * n);
    (mus, bonds).prop_map(move |(mus, bonds)| {
        let mut terms: Vec<HamiltonianTerm> = mus
            .iter()
            .enumerate()
            .map(|(i, &mu)| HamiltonianTerm::chemical_potential(i, mu))
            .collect();
        for (i, shift, amp, pairing) in bonds {
            let j = (i + shift) % n;
            terms.push(if pairing {
                HamiltonianTerm::pairing(i, j, amp)
            } else {
                HamiltonianTerm::hopping(i, j, amp)
            });
        }
        CouplingMatrix::from_terms(n, terms).unwrap()
    })
}

fn hamiltonian(max_sites: usize) -> impl Strategy<Value = CouplingMatrix> {
    (2..=max_sites).prop_flat_map(hamiltonian_of)
}

fn same_size_pair(max_sites: usize) -> impl Strategy<Value = (CouplingMatrix, CouplingMatrix)> {
    (2..=max_sites).prop_flat_map(|n| (hamiltonian_of(n), hamiltonian_of(n)))
}

fn within(term: &HamiltonianTerm, keep: usize) -> bool {
    match *term {
        HamiltonianTerm::ChemicalPotential { site, .. } => site < keep,
        HamiltonianTerm::Hopping { i, j, .. } | HamiltonianTerm::Pairing { i, j, .. } => i < keep && j < keep,
    }
}

fn pure_state(h: &CouplingMatrix) -> CovarianceMatrix {
    ground_state(h, GroundStateOptions::empty_zero_modes()).unwrap()
}

/// A generic pure state: the ground state of one Hamiltonian evolved by another.
fn quenched(pre: &CouplingMatrix, post: &CouplingMatrix, t: f64) -> CovarianceMatrix {
    evolve(&pure_state(pre), post, t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coupling_and_states_are_antisymmetric((pre, post) in same_size_pair(10), t in 0.0..5.0f64) {
        prop_assert!(max_antisymmetry_defect(pre.matrix()) <= 1e-12);
        let m = quenched(&pre, &post, t);
        prop_assert!(max_antisymmetry_defect(m.matrix()) <= 1e-12);
    }

    #[test]
    fn evolution_keeps_states_pure((pre, post) in same_size_pair(12), t in 0.0..20.0f64) {
        let m = quenched(&pre, &post, t);
        prop_assert!(m.purity_defect() <= 1e-9, "defect {}", m.purity_defect());
    }

    #[test]
    fn evolution_conserves_energy((pre, post) in same_size_pair(10), t in 0.0..20.0f64) {
        let m0 = pure_state(&pre);
        let e0 = post.energy(&m0).unwrap();
        let e1 = post.energy(&evolve(&m0, &post, t).unwrap()).unwrap();
        prop_assert!((e1 - e0).abs() <= 1e-9 * e0.abs().max(1.0), "{e0} -> {e1}");
    }

    #[test]
    fn ground_states_are_stationary(h in hamiltonian(10), t in 0.0..20.0f64) {
        let m0 = pure_state(&h);
        let mt = evolve(&m0, &h, t).unwrap();
        prop_assert!((mt.matrix() - m0.matrix()).amax() <= 1e-10);
    }

    #[test]
    fn pure_lattice_totals_n_sites((pre, post) in same_size_pair(12), t in 0.0..10.0f64) {
        let m = quenched(&pre, &post, t);
        let lat = local_information(&m).unwrap();
        let n = m.n_sites() as f64;
        prop_assert!((lat.total_info() - n).abs() <= 1e-8 * n);
        prop_assert!(lat.min_info() >= -1e-9, "min {}", lat.min_info());
    }

    #[test]
    fn triangles_reconstruct_interval_information(
        (pre, post) in same_size_pair(12),
        t in 0.0..10.0f64,
        cut in 0.0..1.0f64,
    ) {
        // Restricting a pure state to a sub-chain gives a mixed state.
        let full = quenched(&pre, &post, t);
        let n = full.n_sites();
        let len = 1 + ((n - 1) as f64 * cut) as usize;
        let m = full.subsystem(n - len, len);
        let lat = local_information(&m).unwrap();
        prop_assert!(lat.min_info() >= -1e-9);
        for c in coords(len) {
            let inside = lat.sum_where(|d| c.contains(&d));
            let expected = (c.ell + 1) as f64 - lat.entropy(c);
            prop_assert!((inside - expected).abs() <= 1e-9, "{c:?}: {inside} vs {expected}");
        }
    }

    #[test]
    fn total_information_is_conserved((pre, post) in same_size_pair(10), t in 0.0..10.0f64) {
        // Mixed initial state: half of a pure chain, evolved by a Hamiltonian
        // acting on that half only.
        let n = pre.n_sites();
        let big = pure_state(&pre);
        let keep = n.div_ceil(2);
        let m0 = big.subsystem(0, keep);
        let h = CouplingMatrix::from_terms(
            keep,
            post.terms()
                .iter()
                .filter(|term| within(term, keep))
                .cloned()
                .collect(),
        )
        .unwrap();
        let before = local_information(&m0).unwrap().total_info();
        let after = local_information(&evolve(&m0, &h, t).unwrap()).unwrap().total_info();
        prop_assert!((after - before).abs() <= 1e-8 * keep as f64, "{before} -> {after}");
    }

    #[test]
    fn partitions_cover_the_lattice(
        (pre, post) in same_size_pair(12),
        t in 0.0..10.0f64,
        split in (0.0..1.0f64, 0.0..1.0f64),
    ) {
        let m0 = pure_state(&pre);
        let mt = evolve(&m0, &post, t).unwrap();
        let n = m0.n_sites();
        prop_assume!(n >= 3);
        let l_q = 1 + ((n - 3) as f64 * split.0) as usize;
        let l_x = 1 + ((n - l_q - 2) as f64 * split.1) as usize;
        let regions = RegionSpec::new(l_q, l_x, n - l_q - l_x).unwrap();

        let base = local_information(&m0).unwrap();
        let lat = local_information(&mt).unwrap();
        let sums = partition_sums(&lat, &regions).unwrap();
        let total: f64 = sums.values().sum();
        prop_assert!((total - lat.total_info()).abs() <= 1e-9);

        let mut probe = IntervalProbe::new(&mt);
        let fast = partition_sums_fast(&mut probe, &regions).unwrap();
        for label in PartitionLabel::ALL {
            prop_assert!((fast[&label] - sums[&label]).abs() <= 1e-9, "{label:?}");
        }

        let g = gamma(std::slice::from_ref(&lat), &base, &regions).unwrap();
        let net: f64 = g.values().map(|v| v[0]).sum();
        prop_assert!(net.abs() <= 1e-8, "ΣΓ = {net}");
    }

    #[test]
    fn numbers_survive_formatting(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt_num(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 1e-11 * x.abs());
    }

    #[test]
    fn configs_round_trip_through_text(
        protocol in prop::sample::select(Protocol::ALL.to_vec()),
        n_sites in prop::option::of(10usize..400),
        l_q in prop::option::of(1usize..50),
        tau in prop::option::of(0.1..200.0f64),
        tau_t in prop::option::of(0.0..2.0f64),
        mu_f in prop::option::of(-30.0..30.0f64),
        t_stop in prop::option::of(1.0..200.0f64),
        snaps in prop::collection::vec(0.0..100.0f64, 0..4),
    ) {
        let mut cfg = QuenchConfig::new(protocol);
        cfg.n_sites = n_sites;
        cfg.l_q = l_q;
        cfg.tau = tau;
        cfg.tau_t = tau_t;
        cfg.mu_f = mu_f;
        cfg.t_stop = t_stop;
        cfg.snapshot_times = snaps;
        let text = config_to_text(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}
