//! Cross-check of the Gaussian pipeline against the Fock-space oracle on
//! small chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::covariance::{ground_state, GroundStateOptions};
use crate::error::Result;
use crate::evolution::evolve;
use crate::hamiltonian::{
    build_composite, build_effective_hamiltonian, build_kitaev_sweet_spot, build_kitaev_with_mu,
    build_tb_hamiltonian, CouplingMatrix, HamiltonianTerm,
};
use crate::lattice::local_information;
use crate::oracle::{
    oracle_covariance, oracle_evolve, oracle_ground_state, oracle_hamiltonian, oracle_lattice,
    oracle_occupations, EmptyMode,
};

/// A quench on a chain small enough for the oracle.
#[derive(Clone, Debug)]
pub struct OracleCase {
    pub name: String,
    pub n_sites: usize,
    pub pre: Vec<HamiltonianTerm>,
    pub post: Vec<HamiltonianTerm>,
    pub t: f64,
    /// Mode to leave empty when the pre-quench ground state is degenerate.
    pub empty_mode: Option<EmptyMode>,
}

/// Largest absolute disagreement per observable for one case.
#[derive(Clone, Debug, Serialize)]
pub struct CaseDeviation {
    pub name: String,
    pub n_sites: usize,
    pub ground_energy: f64,
    pub energy: f64,
    pub occupations: f64,
    pub entropies: f64,
    pub local_info: f64,
    pub covariance: f64,
}

impl CaseDeviation {
    pub fn max(&self) -> f64 {
        [
            self.ground_energy,
            self.energy,
            self.occupations,
            self.entropies,
            self.local_info,
            self.covariance,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub cases: Vec<CaseDeviation>,
    pub max_deviation: f64,
}

fn random_terms(rng: &mut ChaCha8Rng, n: usize) -> Vec<HamiltonianTerm> {
    let mut terms = Vec::new();
    for site in 0..n {
        let mag = rng.gen_range(0.2..1.5);
        let mu = if rng.gen_bool(0.5) { mag } else { -mag };
        terms.push(HamiltonianTerm::chemical_potential(site, mu));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            // Nearest neighbours always, longer range occasionally.
            if j == i + 1 || rng.gen_bool(0.25) {
                terms.push(HamiltonianTerm::hopping(i, j, rng.gen_range(-1.0..1.0)));
            }
            if rng.gen_bool(0.5) {
                terms.push(HamiltonianTerm::pairing(i, j, rng.gen_range(-1.0..1.0)));
            }
        }
    }
    terms
}

/// Random quadratic pre- and post-quench Hamiltonians on 2 to 8 sites.
pub fn random_case(seed: u64) -> OracleCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_sites = rng.gen_range(2..=8);
    OracleCase {
        name: format!("random_{seed}"),
        n_sites,
        pre: random_terms(&mut rng, n_sites),
        post: random_terms(&mut rng, n_sites),
        t: rng.gen_range(0.1..3.0),
        empty_mode: None,
    }
}

/// The quench protocols shrunk to at most 8 sites.
pub fn protocol_cases() -> Result<Vec<OracleCase>> {
    let terms = |h: CouplingMatrix| h.terms().to_vec();
    let mut cases = vec![
        OracleCase {
            name: "release_particle".into(),
            n_sites: 7,
            pre: terms(build_tb_hamiltonian(7, &[3], -20.0, 20.0, 1.0)?),
            post: terms(build_tb_hamiltonian(7, &[], 20.0, 20.0, 1.0)?),
            t: 2.3,
            empty_mode: None,
        },
        OracleCase {
            name: "barrier_removal".into(),
            n_sites: 8,
            pre: terms(build_tb_hamiltonian(8, &[3], 20.0, 1e-5, 1.0)?),
            post: terms(build_tb_hamiltonian(8, &[], 0.0, 1e-5, 1.0)?),
            t: 1.9,
            empty_mode: None,
        },
        OracleCase {
            name: "barrier_removal_wide".into(),
            n_sites: 8,
            pre: terms(build_tb_hamiltonian(8, &[2, 3, 4], 20.0, 1e-5, 1.0)?),
            post: terms(build_tb_hamiltonian(8, &[], 0.0, 1e-5, 1.0)?),
            t: 1.1,
            empty_mode: None,
        },
    ];
    for (name, l_q, probe, mu) in [("kitaev_probe", 3, 4, 0.0), ("kitaev_probe_detuned", 4, 4, 0.6)] {
        let tau = 20.0;
        let kitaev = build_kitaev_with_mu(l_q, tau, mu * tau)?;
        let chain = build_tb_hamiltonian(probe, &[], 0.0, 0.0, 1.0)?;
        cases.push(OracleCase {
            name: name.into(),
            n_sites: l_q + probe,
            pre: terms(build_composite(&kitaev, &chain, 0.0)?),
            post: terms(build_composite(&kitaev, &chain, 1.0)?),
            t: 2.7,
            empty_mode: (mu == 0.0).then_some(EmptyMode {
                re: 2 * l_q - 1,
                im: 0,
            }),
        });
    }
    cases.push(OracleCase {
        name: "effective_model".into(),
        n_sites: 5,
        pre: terms(build_effective_hamiltonian(5, 0.0, 1.0)?),
        post: terms(build_effective_hamiltonian(5, 1.0, 1.0)?),
        t: 3.3,
        empty_mode: Some(EmptyMode { re: 1, im: 0 }),
    });
    // Static sweet-spot ground state.
    let kitaev = build_kitaev_sweet_spot(5, 1.0)?;
    cases.push(OracleCase {
        name: "sweet_spot".into(),
        n_sites: 5,
        pre: terms(kitaev.clone()),
        post: terms(kitaev),
        t: 0.0,
        empty_mode: Some(EmptyMode { re: 9, im: 0 }),
    });
    Ok(cases)
}

fn max_abs_diff<'a>(a: impl IntoIterator<Item = &'a f64>, b: impl IntoIterator<Item = &'a f64>) -> f64 {
    a.into_iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Run one case through both routes.
pub fn compare(case: &OracleCase) -> Result<CaseDeviation> {
    let n = case.n_sites;
    let pre = CouplingMatrix::from_terms(n, case.pre.clone())?;
    let post = CouplingMatrix::from_terms(n, case.post.clone())?;
    let opts = if case.empty_mode.is_some() {
        GroundStateOptions::empty_zero_modes()
    } else {
        GroundStateOptions::default()
    };
    let m0 = ground_state(&pre, opts)?;
    let m = evolve(&m0, &post, case.t)?;
    let lattice = local_information(&m)?;

    let h_pre = oracle_hamiltonian(&case.pre, n)?;
    let h_post = oracle_hamiltonian(&case.post, n)?;
    let rule = case.empty_mode.map(|r| r.number_operator(n));
    let psi0 = oracle_ground_state(&h_pre, rule.as_ref())?;
    let psi = oracle_evolve(&h_post, &psi0, case.t);
    let reference = oracle_lattice(&psi, n)?;

    Ok(CaseDeviation {
        name: case.name.clone(),
        n_sites: n,
        ground_energy: (pre.energy(&m0)? - h_pre.expectation(&psi0)).abs(),
        energy: (post.energy(&m)? - h_post.expectation(&psi)).abs(),
        occupations: max_abs_diff(&m.occupation_density(), &oracle_occupations(&psi, n)),
        entropies: max_abs_diff(
            lattice.entropies().iter().flatten(),
            reference.entropies().iter().flatten(),
        ),
        local_info: max_abs_diff(
            lattice.local_info().iter().flatten(),
            reference.local_info().iter().flatten(),
        ),
        covariance: (m.matrix() - oracle_covariance(&psi, n)?.matrix()).amax(),
    })
}

/// `n_random` seeded random cases followed by the shrunk protocols.
pub fn run_validation(n_random: usize, seed: u64) -> Result<ValidationReport> {
    let mut all: Vec<OracleCase> = (0..n_random as u64).map(|k| random_case(seed + k)).collect();
    all.extend(protocol_cases()?);
    let cases = all.iter().map(compare).collect::<Result<Vec<_>>>()?;
    let max_deviation = cases.iter().map(CaseDeviation::max).fold(0.0, f64::max);
    Ok(ValidationReport {
        cases,
        max_deviation,
    })
}
