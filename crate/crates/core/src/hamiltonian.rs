//! Quadratic fermionic Hamiltonians in the Majorana basis.
//!
//! A term list is assembled into a real antisymmetric coupling matrix `A`
//! such that
//!
//! ```text
//! H = (i/4) Σ_{jk} A_{jk} γ_j γ_k + E0
//! ```
//!
//! where `E0` collects the c-number shifts produced by rewriting `c†c`
//! in Majorana form. All energies are in units of the probe hopping
//! (`τ_p = 1`).

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::majorana::{majorana, Species};
use crate::skew::skew_spectrum;

/// One second-quantized term of a quadratic Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianTerm {
    /// `μ c†_i c_i`
    ChemicalPotential { site: usize, mu: f64 },
    /// `t (c†_i c_j + c†_j c_i)`
    Hopping { i: usize, j: usize, amplitude: f64 },
    /// `Δ (c_i c_j + c†_j c†_i)`
    Pairing { i: usize, j: usize, amplitude: f64 },
}

impl HamiltonianTerm {
    pub fn chemical_potential(site: usize, mu: f64) -> Self {
        Self::ChemicalPotential { site, mu }
    }

    pub fn hopping(i: usize, j: usize, amplitude: f64) -> Self {
        Self::Hopping { i, j, amplitude }
    }

    pub fn pairing(i: usize, j: usize, amplitude: f64) -> Self {
        Self::Pairing { i, j, amplitude }
    }

    fn check(&self, n_sites: usize) -> Result<()> {
        let in_range = |site: usize| {
            if site < n_sites {
                Ok(())
            } else {
                Err(Error::SiteOutOfRange { site, n_sites })
            }
        };
        match *self {
            Self::ChemicalPotential { site, .. } => in_range(site),
            Self::Hopping { i, j, .. } | Self::Pairing { i, j, .. } => {
                in_range(i)?;
                in_range(j)?;
                if i == j {
                    Err(Error::SelfCoupling(i))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Same term with every site index moved by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        match *self {
            Self::ChemicalPotential { site, mu } => Self::ChemicalPotential {
                site: site + offset,
                mu,
            },
            Self::Hopping { i, j, amplitude } => Self::Hopping {
                i: i + offset,
                j: j + offset,
                amplitude,
            },
            Self::Pairing { i, j, amplitude } => Self::Pairing {
                i: i + offset,
                j: j + offset,
                amplitude,
            },
        }
    }
}

/// Real antisymmetric `2N × 2N` Majorana coupling matrix plus the terms it
/// was assembled from.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingMatrix {
    n_sites: usize,
    matrix: DMatrix<f64>,
    offset: f64,
    terms: Vec<HamiltonianTerm>,
}

impl CouplingMatrix {
    /// Assemble `A` from a list of terms. Only antisymmetric pairs of
    /// entries are ever written.
    pub fn from_terms(n_sites: usize, terms: Vec<HamiltonianTerm>) -> Result<Self> {
        let dim = 2 * n_sites;
        let mut a = DMatrix::<f64>::zeros(dim, dim);
        let mut offset = 0.0;
        let put = |a: &mut DMatrix<f64>, j: usize, k: usize, v: f64| {
            a[(j, k)] += v;
            a[(k, j)] -= v;
        };
        for term in &terms {
            term.check(n_sites)?;
            match *term {
                HamiltonianTerm::ChemicalPotential { site, mu } => {
                    // μ c†c = μ/2 + (iμ/2) γ_B γ_A
                    put(&mut a, majorana(site, Species::B), majorana(site, Species::A), mu);
                    offset += 0.5 * mu;
                }
                HamiltonianTerm::Hopping { i, j, amplitude } => {
                    // t(c†_i c_j + h.c.) = (it/2)(γ_{B,i} γ_{A,j} + γ_{B,j} γ_{A,i})
                    put(&mut a, majorana(i, Species::B), majorana(j, Species::A), amplitude);
                    put(&mut a, majorana(j, Species::B), majorana(i, Species::A), amplitude);
                }
                HamiltonianTerm::Pairing { i, j, amplitude } => {
                    // Δ(c_i c_j + h.c.) = (iΔ/2)(γ_{B,i} γ_{A,j} − γ_{B,j} γ_{A,i})
                    put(&mut a, majorana(i, Species::B), majorana(j, Species::A), amplitude);
                    put(&mut a, majorana(j, Species::B), majorana(i, Species::A), -amplitude);
                }
            }
        }
        Ok(Self {
            n_sites,
            matrix: a,
            offset,
            terms,
        })
    }

    /// Place several disjoint blocks on one chain of `n_sites` sites and add
    /// `bridges` (terms in global site indices) between them.
    pub fn compose(
        n_sites: usize,
        blocks: &[(usize, &CouplingMatrix)],
        bridges: Vec<HamiltonianTerm>,
    ) -> Result<Self> {
        let mut ranges: Vec<(usize, usize)> = blocks
            .iter()
            .map(|(off, b)| (*off, off + b.n_sites))
            .collect();
        ranges.sort_unstable();
        for w in ranges.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::OverlappingRanges {
                    a0: w[0].0,
                    a1: w[0].1,
                    b0: w[1].0,
                    b1: w[1].1,
                });
            }
        }
        if let Some(&(_, end)) = ranges.iter().max_by_key(|r| r.1) {
            if end > n_sites {
                return Err(Error::SiteOutOfRange {
                    site: end - 1,
                    n_sites,
                });
            }
        }
        let mut terms = Vec::new();
        for (off, block) in blocks {
            terms.extend(block.terms.iter().map(|t| t.shifted(*off)));
        }
        terms.extend(bridges);
        Self::from_terms(n_sites, terms)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        2 * self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// c-number part `E0` of the Hamiltonian.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn terms(&self) -> &[HamiltonianTerm] {
        &self.terms
    }

    /// Largest absolute entry of `A`.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// `⟨H⟩ = (1/4) Σ A_jk M_jk + E0`.
    pub fn energy(&self, state: &CovarianceMatrix) -> Result<f64> {
        let m = state.matrix();
        if m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: m.nrows(),
            });
        }
        let dot: f64 = self.matrix.iter().zip(m.iter()).map(|(a, b)| a * b).sum();
        Ok(0.25 * dot + self.offset)
    }

    /// Single-particle energies `ε_k ≥ 0` (ascending).
    pub fn single_particle_energies(&self) -> Vec<f64> {
        skew_spectrum(&self.matrix)
    }

    /// All `2^N` many-body levels `E0 + Σ_k ε_k (n_k − 1/2)`, ascending.
    pub fn many_body_spectrum(&self) -> Result<Vec<f64>> {
        const MAX: usize = 20;
        if self.n_sites > MAX {
            return Err(Error::SpectrumTooLarge {
                max: MAX,
                got: self.n_sites,
            });
        }
        let eps = self.single_particle_energies();
        let ground = self.offset - 0.5 * eps.iter().sum::<f64>();
        let mut levels = vec![ground];
        for e in eps {
            let excited: Vec<f64> = levels.iter().map(|l| l + e).collect();
            levels.extend(excited);
        }
        levels.sort_by(f64::total_cmp);
        Ok(levels)
    }
}

fn check_sites(n_sites: usize, min: usize) -> Result<()> {
    if n_sites < min {
        Err(Error::TooFewSites { min, got: n_sites })
    } else {
        Ok(())
    }
}

/// Open tight-binding chain with hopping `τ_p/2` on every bond, chemical
/// potential `mu_center` on `eta_sites` and `mu_p` elsewhere.
pub fn build_tb_hamiltonian(
    n_sites: usize,
    eta_sites: &[usize],
    mu_center: f64,
    mu_p: f64,
    tau_p: f64,
) -> Result<CouplingMatrix> {
    check_sites(n_sites, 2)?;
    for &site in eta_sites {
        if site >= n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites });
        }
    }
    let mut terms = Vec::with_capacity(2 * n_sites);
    for site in 0..n_sites {
        let mu = if eta_sites.contains(&site) { mu_center } else { mu_p };
        if mu != 0.0 {
            terms.push(HamiltonianTerm::chemical_potential(site, mu));
        }
    }
    for i in 0..n_sites - 1 {
        terms.push(HamiltonianTerm::hopping(i, i + 1, 0.5 * tau_p));
    }
    CouplingMatrix::from_terms(n_sites, terms)
}

/// Kitaev chain at the sweet spot: `(τ/2) Σ (c†_i c_{i+1} + c_i c_{i+1} + h.c.)`,
/// which pairs `γ_{B,i}` with `γ_{A,i+1}` and leaves the edge Majoranas free.
pub fn build_kitaev_sweet_spot(l_q: usize, tau: f64) -> Result<CouplingMatrix> {
    build_kitaev_with_mu(l_q, tau, 0.0)
}

/// Sweet-spot Kitaev chain plus `μ c†_i c_i` on every site.
pub fn build_kitaev_with_mu(l_q: usize, tau: f64, mu: f64) -> Result<CouplingMatrix> {
    check_sites(l_q, 2)?;
    let mut terms = Vec::with_capacity(3 * l_q);
    if mu != 0.0 {
        terms.extend((0..l_q).map(|i| HamiltonianTerm::chemical_potential(i, mu)));
    }
    for i in 0..l_q - 1 {
        terms.push(HamiltonianTerm::hopping(i, i + 1, 0.5 * tau));
        terms.push(HamiltonianTerm::pairing(i, i + 1, 0.5 * tau));
    }
    CouplingMatrix::from_terms(l_q, terms)
}

/// Kitaev block on sites `0..l_Q` followed by `probe` on the remaining sites,
/// joined by `(τ_t/2)(c†_{l_Q−1} c_{l_Q} + h.c.)`.
pub fn build_composite(
    kitaev: &CouplingMatrix,
    probe: &CouplingMatrix,
    tau_t: f64,
) -> Result<CouplingMatrix> {
    build_composite_at(kitaev, 0, probe, kitaev.n_sites(), tau_t)
}

/// Like [`build_composite`] with explicit block offsets.
pub fn build_composite_at(
    kitaev: &CouplingMatrix,
    kitaev_offset: usize,
    probe: &CouplingMatrix,
    probe_offset: usize,
    tau_t: f64,
) -> Result<CouplingMatrix> {
    let n_sites = (kitaev_offset + kitaev.n_sites()).max(probe_offset + probe.n_sites());
    let left = kitaev_offset + kitaev.n_sites() - 1;
    let bridges = if tau_t != 0.0 {
        vec![HamiltonianTerm::hopping(left, probe_offset, 0.5 * tau_t)]
    } else {
        Vec::new()
    };
    CouplingMatrix::compose(
        n_sites,
        &[(kitaev_offset, kitaev), (probe_offset, probe)],
        bridges,
    )
}

/// Single effective site `f` (site 0) coupled through
/// `(τ_t/4)(c†_1 − c_1)(f + f†)` to a tight-binding chain on sites
/// `1..n_eff` with hopping `τ_p/2`.
pub fn build_effective_hamiltonian(n_eff: usize, tau_t: f64, tau_p: f64) -> Result<CouplingMatrix> {
    check_sites(n_eff, 2)?;
    let mut terms = Vec::with_capacity(n_eff + 1);
    if tau_t != 0.0 {
        // (τ_t/4)(c†_p f + f† c_p) + (−τ_t/4)(c_p f + h.c.)
        terms.push(HamiltonianTerm::hopping(1, 0, 0.25 * tau_t));
        terms.push(HamiltonianTerm::pairing(1, 0, -0.25 * tau_t));
    }
    for i in 1..n_eff - 1 {
        terms.push(HamiltonianTerm::hopping(i, i + 1, 0.5 * tau_p));
    }
    CouplingMatrix::from_terms(n_eff, terms)
}
