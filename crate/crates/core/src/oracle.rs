//! Brute-force many-body reference in the `2^N`-dimensional Fock space.
//!
//! Basis state `x` has site `i` occupied when bit `i` of `x` is set (site 0
//! is the least significant bit). Fermionic order follows the site index:
//!
//! ```text
//! c_i |x⟩ = (−1)^{popcount(x & (2^i − 1))} |x ⊕ 2^i⟩   if bit i of x is set
//! ```
//!
//! Everything here is dense and deliberately naive. It shares no numerical
//! code with the Gaussian pipeline beyond the term definitions.

use nalgebra::{Complex, DMatrix, DVector};

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerm;
use crate::lattice::InformationLattice;

pub type C64 = Complex<f64>;

/// Largest chain the oracle accepts.
pub const MAX_SITES: usize = 12;

/// Relative width of the ground-state energy window.
const DEGENERACY_TOL: f64 = 1e-9;

/// Eigen-decomposition `H = U diag(λ) U†` of a Hermitian matrix, eigenvalues
/// ascending.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    let a = faer::Mat::<C64>::from_fn(n, n, |i, j| h[(i, j)]);
    let evd = a
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigensolver did not converge");
    let values = (0..n).map(|k| evd.S()[k].re).collect();
    let u = evd.U();
    (values, DMatrix::from_fn(n, n, |i, j| u[(i, j)]))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let n = h.nrows();
    let a = faer::Mat::<C64>::from_fn(n, n, |i, j| h[(i, j)]);
    a.self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("self-adjoint eigensolver did not converge")
}

/// Dense Hermitian operator on the Fock space of `n_sites` modes.
#[derive(Clone, Debug)]
pub struct FockOperator {
    n_sites: usize,
    matrix: DMatrix<C64>,
}

impl FockOperator {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).map(|z| z.norm()).max()
    }

    /// Eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `⟨ψ|O|ψ⟩`, real part.
    pub fn expectation(&self, psi: &DVector<C64>) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }
}

fn check_size(n_sites: usize) -> Result<()> {
    if n_sites > MAX_SITES {
        return Err(Error::OracleTooLarge {
            max: MAX_SITES,
            got: n_sites,
        });
    }
    Ok(())
}

/// Matrix of `c_i`.
pub fn annihilator(n_sites: usize, site: usize) -> DMatrix<C64> {
    let dim = 1usize << n_sites;
    let bit = 1usize << site;
    let mut c = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        if x & bit != 0 {
            let sign = if (x & (bit - 1)).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            c[(x ^ bit, x)] = C64::new(sign, 0.0);
        }
    }
    c
}

/// Matrix of the Majorana operator with index `j` (`2i` is `γ_{A,i}`,
/// `2i + 1` is `γ_{B,i}`), using `γ_B = c + c†` and `γ_A = −i(c − c†)`.
pub fn majorana_operator(n_sites: usize, j: usize) -> DMatrix<C64> {
    let c = annihilator(n_sites, j / 2);
    let cd = c.adjoint();
    if j % 2 == 1 {
        &c + &cd
    } else {
        (&c - &cd) * C64::new(0.0, -1.0)
    }
}

/// Second-quantized Hamiltonian built term by term from creation and
/// annihilation matrices.
pub fn oracle_hamiltonian(terms: &[HamiltonianTerm], n_sites: usize) -> Result<FockOperator> {
    check_size(n_sites)?;
    let dim = 1usize << n_sites;
    let cs: Vec<DMatrix<C64>> = (0..n_sites).map(|i| annihilator(n_sites, i)).collect();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for term in terms {
        match *term {
            HamiltonianTerm::ChemicalPotential { site, mu } => {
                let site = checked(site, n_sites)?;
                h += cs[site].adjoint() * &cs[site] * C64::from(mu);
            }
            HamiltonianTerm::Hopping { i, j, amplitude } => {
                let (i, j) = (checked(i, n_sites)?, checked(j, n_sites)?);
                let op = cs[i].adjoint() * &cs[j];
                h += (&op + op.adjoint()) * C64::from(amplitude);
            }
            HamiltonianTerm::Pairing { i, j, amplitude } => {
                let (i, j) = (checked(i, n_sites)?, checked(j, n_sites)?);
                let op = &cs[i] * &cs[j];
                h += (&op + op.adjoint()) * C64::from(amplitude);
            }
        }
    }
    Ok(FockOperator { n_sites, matrix: h })
}

fn checked(site: usize, n_sites: usize) -> Result<usize> {
    if site < n_sites {
        Ok(site)
    } else {
        Err(Error::SiteOutOfRange { site, n_sites })
    }
}

/// Rule for resolving a degenerate ground space: pick the state with the
/// fermion `f = (γ_re + i γ_im)/2` empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmptyMode {
    pub re: usize,
    pub im: usize,
}

impl EmptyMode {
    /// `f†f = (1 + i γ_re γ_im)/2`.
    pub fn number_operator(&self, n_sites: usize) -> DMatrix<C64> {
        let gr = majorana_operator(n_sites, self.re);
        let gi = majorana_operator(n_sites, self.im);
        let id = DMatrix::<C64>::identity(1 << n_sites, 1 << n_sites);
        (id + gr * gi * C64::new(0.0, 1.0)) * C64::from(0.5)
    }
}

/// `(1 − (−1)^N)/2`: zero on even-parity states, one on odd ones.
pub fn odd_parity_operator(n_sites: usize) -> DMatrix<C64> {
    let dim = 1usize << n_sites;
    DMatrix::from_fn(dim, dim, |i, j| {
        C64::from(if i == j && i.count_ones() % 2 == 1 { 1.0 } else { 0.0 })
    })
}

/// Lowest eigenvector of `h`. A degenerate ground space is resolved by
/// minimizing the expectation of the Hermitian `rule` within it (for
/// example [`EmptyMode::number_operator`]); without a rule, or if the
/// minimum is itself degenerate, an error is returned.
pub fn oracle_ground_state(h: &FockOperator, rule: Option<&DMatrix<C64>>) -> Result<DVector<C64>> {
    let (values, vectors) = hermitian_eigen(&h.matrix);
    let e0 = values[0];
    let scale = values.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let count = values
        .iter()
        .take_while(|&&e| e - e0 <= DEGENERACY_TOL * scale)
        .count();
    if count == 1 {
        return Ok(vectors.column(0).clone_owned());
    }
    let degenerate = || Error::DegenerateGroundState {
        count,
        threshold: DEGENERACY_TOL * scale,
    };
    let rule = rule.ok_or_else(degenerate)?;
    let basis = vectors.columns(0, count).clone_owned();
    let projected = basis.adjoint() * rule * &basis;
    let (occ, coeffs) = hermitian_eigen(&projected);
    if occ[1] - occ[0] < 1e-6 {
        return Err(degenerate());
    }
    Ok(basis * coeffs.column(0))
}

/// `e^{−iHt} ψ` through the full eigendecomposition of `H`.
pub fn oracle_evolve(h: &FockOperator, psi: &DVector<C64>, t: f64) -> DVector<C64> {
    let (values, v) = hermitian_eigen(&h.matrix);
    let mut coeffs = v.adjoint() * psi;
    for (c, e) in coeffs.iter_mut().zip(&values) {
        *c *= C64::new(0.0, -e * t).exp();
    }
    v * coeffs
}

/// Reduced density matrix of sites `first..=last`, tracing out the other
/// bits. For states of definite fermion parity this coincides with the
/// fermionic reduced state of the block.
pub fn reduced_density_matrix(
    psi: &DVector<C64>,
    n_sites: usize,
    first: usize,
    last: usize,
) -> DMatrix<C64> {
    let w = last - first + 1;
    let inner_dim = 1usize << w;
    let outer_dim = 1usize << (n_sites - w);
    let mask = inner_dim - 1;
    let low = (1usize << first) - 1;
    let mut amp = DMatrix::<C64>::zeros(inner_dim, outer_dim);
    for (x, a) in psi.iter().enumerate() {
        let inner = (x >> first) & mask;
        let outer = (x & low) | ((x >> (last + 1)) << first);
        amp[(inner, outer)] = *a;
    }
    &amp * amp.adjoint()
}

/// Von Neumann entropy in bits of sites `first..=last`.
pub fn oracle_entropy(psi: &DVector<C64>, n_sites: usize, first: usize, last: usize) -> f64 {
    let rho = reduced_density_matrix(psi, n_sites, first, last);
    hermitian_eigenvalues(&rho)
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Information lattice of `psi` from partial-trace entropies.
pub fn oracle_lattice(psi: &DVector<C64>, n_sites: usize) -> Result<InformationLattice> {
    check_size(n_sites)?;
    let entropies = (0..n_sites)
        .map(|ell| {
            (0..n_sites - ell)
                .map(|m| oracle_entropy(psi, n_sites, m, m + ell))
                .collect()
        })
        .collect();
    InformationLattice::from_entropies(entropies)
}

/// `⟨c†_i c_i⟩` for every site.
pub fn oracle_occupations(psi: &DVector<C64>, n_sites: usize) -> Vec<f64> {
    (0..n_sites)
        .map(|i| {
            let bit = 1usize << i;
            psi.iter()
                .enumerate()
                .filter(|(x, _)| x & bit != 0)
                .map(|(_, a)| a.norm_sqr())
                .sum()
        })
        .collect()
}

/// Majorana covariance `M_jk = i⟨γ_j γ_k⟩` (`j ≠ k`) of `psi`.
pub fn oracle_covariance(psi: &DVector<C64>, n_sites: usize) -> Result<CovarianceMatrix> {
    check_size(n_sites)?;
    let dim = 2 * n_sites;
    let gammas: Vec<DMatrix<C64>> = (0..dim).map(|j| majorana_operator(n_sites, j)).collect();
    let applied: Vec<DVector<C64>> = gammas.iter().map(|g| g * psi).collect();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        for k in 0..dim {
            if j != k {
                // ⟨γ_j γ_k⟩ = (γ_j ψ)† (γ_k ψ) since γ_j is Hermitian.
                let z = applied[j].dotc(&applied[k]);
                m[(j, k)] = (C64::new(0.0, 1.0) * z).re;
            }
        }
    }
    CovarianceMatrix::new(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::build_kitaev_sweet_spot;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn single_site_number_operator() {
        let h = oracle_hamiltonian(&[HamiltonianTerm::chemical_potential(0, 1.0)], 1).unwrap();
        assert!((h.matrix()[(0, 0)].re).abs() < 1e-15);
        assert!((h.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert!(h.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn two_site_hopping() {
        let h = oracle_hamiltonian(&[HamiltonianTerm::hopping(0, 1, 0.5)], 2).unwrap();
        assert!(close(&h.spectrum(), &[-0.5, 0.0, 0.0, 0.5], 1e-12));
        assert!(h.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn anticommutation() {
        let n = 3;
        let id = DMatrix::<C64>::identity(8, 8);
        for j in 0..2 * n {
            for k in 0..2 * n {
                let (a, b) = (majorana_operator(n, j), majorana_operator(n, k));
                let anti = &a * &b + &b * &a;
                let expected = &id * C64::from(if j == k { 2.0 } else { 0.0 });
                assert!((anti - expected).map(|z| z.norm()).max() < 1e-14);
            }
        }
    }

    #[test]
    fn three_site_sweet_spot_spectrum() {
        let h = build_kitaev_sweet_spot(3, 1.0).unwrap();
        let fock = oracle_hamiltonian(h.terms(), 3).unwrap();
        assert!(close(
            &fock.spectrum(),
            &[-1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0],
            1e-12
        ));
    }

    #[test]
    fn degeneracy_needs_a_rule() {
        let h = build_kitaev_sweet_spot(3, 1.0).unwrap();
        let fock = oracle_hamiltonian(h.terms(), 3).unwrap();
        assert!(oracle_ground_state(&fock, None).is_err());
        let rule = EmptyMode { re: 5, im: 0 };
        let psi = oracle_ground_state(&fock, Some(&rule.number_operator(3))).unwrap();
        let nf = FockOperator {
            n_sites: 3,
            matrix: rule.number_operator(3),
        };
        assert!(nf.expectation(&psi).abs() < 1e-10);
    }

    #[test]
    fn bell_pair_lattice() {
        let h = oracle_hamiltonian(&[HamiltonianTerm::hopping(0, 1, -1.0)], 2).unwrap();
        let psi = oracle_ground_state(&h, None).unwrap();
        assert!((oracle_entropy(&psi, 2, 0, 0) - 1.0).abs() < 1e-12);
        let lat = oracle_lattice(&psi, 2).unwrap();
        assert!((lat.row(1)[0] - 2.0).abs() < 1e-12);
        assert!(lat.row(0).iter().all(|i| i.abs() < 1e-12));
    }

    #[test]
    fn vacuum_is_a_product() {
        let mut psi = DVector::<C64>::zeros(16);
        psi[0] = C64::from(1.0);
        let lat = oracle_lattice(&psi, 4).unwrap();
        assert!(lat.entropies().iter().flatten().all(|s| s.abs() < 1e-14));
        assert!(close(&oracle_occupations(&psi, 4), &[0.0; 4], 1e-15));
        let m = oracle_covariance(&psi, 4).unwrap();
        assert!((m.matrix() - CovarianceMatrix::vacuum(4).matrix()).amax() < 1e-14);
    }

    #[test]
    fn eigensolver_residual() {
        // Matrix on which a general-purpose solver was seen to fail.
        let kitaev = crate::hamiltonian::build_kitaev_with_mu(4, 20.0, 12.0).unwrap();
        let probe = crate::hamiltonian::build_tb_hamiltonian(4, &[], 0.0, 0.0, 1.0).unwrap();
        let h = crate::hamiltonian::build_composite(&kitaev, &probe, 1.0).unwrap();
        let fock = oracle_hamiltonian(h.terms(), 8).unwrap();
        let (values, u) = hermitian_eigen(fock.matrix());
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| C64::from(x)),
        ));
        let residual = fock.matrix() * &u - &u * d;
        assert!(residual.map(|z| z.norm()).max() < 1e-10);
    }

    #[test]
    fn size_limit() {
        assert!(matches!(
            oracle_hamiltonian(&[], 13),
            Err(Error::OracleTooLarge { .. })
        ));
    }
}
