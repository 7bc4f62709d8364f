//! Majorana covariance matrices of fermionic Gaussian states.
//!
//! `M_{jk} = (i/2) Tr(ρ [γ_j, γ_k])`. With the layout of
//! [`crate::majorana`], `⟨c†_i c_i⟩ = (1 + M_{2i+1, 2i}) / 2`, so the empty
//! site has `M_{2i, 2i+1} = +1`.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hamiltonian::CouplingMatrix;
use crate::skew::{skew_spectrum, CanonicalForm};

/// Tolerance for `Mᵀ = −M`.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;
/// Slack on the `[−1, 1]` bound of the spectrum of `iM`.
pub const SPECTRUM_TOL: f64 = 1e-9;
/// Tolerance for `M Mᵀ = 1` on pure states.
pub const PURITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    matrix: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Wrap `m` after checking shape and antisymmetry.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || n % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: n + n % 2,
                got: matrix.ncols(),
            });
        }
        let mut worst = 0.0_f64;
        for j in 0..n {
            for k in j..n {
                worst = worst.max((matrix[(j, k)] + matrix[(k, j)]).abs());
            }
        }
        if worst > ANTISYMMETRY_TOL {
            return Err(Error::InvalidCovariance { value: worst });
        }
        Ok(Self { matrix })
    }

    /// Antisymmetrize an almost antisymmetric matrix.
    pub(crate) fn from_raw(mut matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        for j in 0..n {
            matrix[(j, j)] = 0.0;
            for k in (j + 1)..n {
                let v = 0.5 * (matrix[(j, k)] - matrix[(k, j)]);
                matrix[(j, k)] = v;
                matrix[(k, j)] = -v;
            }
        }
        Self { matrix }
    }

    /// The product state with every site empty.
    pub fn vacuum(n_sites: usize) -> Self {
        let mut m = DMatrix::<f64>::zeros(2 * n_sites, 2 * n_sites);
        for i in 0..n_sites {
            m[(2 * i, 2 * i + 1)] = 1.0;
            m[(2 * i + 1, 2 * i)] = -1.0;
        }
        Self { matrix: m }
    }

    /// `ρ ∝ 1`.
    pub fn maximally_mixed(n_sites: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(2 * n_sites, 2 * n_sites),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_sites(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Full check of the physical constraints: antisymmetry and spectrum of
    /// `iM` within `[−1, 1]`.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.matrix.clone())?;
        let top = skew_spectrum(&self.matrix).last().copied().unwrap_or(0.0);
        if top > 1.0 + SPECTRUM_TOL {
            return Err(Error::InvalidCovariance { value: top });
        }
        Ok(())
    }

    /// `max |M Mᵀ − 1|`.
    pub fn purity_defect(&self) -> f64 {
        let n = self.dim();
        (&self.matrix * self.matrix.transpose() - DMatrix::<f64>::identity(n, n)).amax()
    }

    pub fn is_pure(&self) -> bool {
        self.purity_defect() <= PURITY_TOL
    }

    /// `⟨c†_i c_i⟩` for every site.
    pub fn occupation_density(&self) -> Vec<f64> {
        (0..self.n_sites())
            .map(|i| 0.5 * (1.0 + self.matrix[(2 * i + 1, 2 * i)]))
            .collect()
    }

    /// Principal submatrix on the Majorana indices of sites `start..start+len`.
    pub fn restrict(&self, start: usize, len: usize) -> DMatrix<f64> {
        self.matrix
            .view((2 * start, 2 * start), (2 * len, 2 * len))
            .clone_owned()
    }

    /// The reduced state of sites `start..start+len`.
    pub fn subsystem(&self, start: usize, len: usize) -> Self {
        Self {
            matrix: self.restrict(start, len),
        }
    }

    /// Product state of independent blocks laid out left to right.
    pub fn direct_sum(blocks: &[&CovarianceMatrix]) -> Self {
        let dim = blocks.iter().map(|b| b.dim()).sum();
        let mut matrix = DMatrix::<f64>::zeros(dim, dim);
        let mut off = 0;
        for b in blocks {
            matrix.view_mut((off, off), (b.dim(), b.dim())).copy_from(&b.matrix);
            off += b.dim();
        }
        Self { matrix }
    }

    /// Row-major CSV dump, one matrix row per line, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.matrix.row_iter() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("covariance csv: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config("covariance csv is not square".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

/// What to do with single-particle energies below the degeneracy threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyPolicy {
    /// Refuse to pick a ground state.
    #[default]
    Error,
    /// Leave zero modes empty.
    OccupyZeroModesEmpty,
}

#[derive(Clone, Copy, Debug)]
pub struct GroundStateOptions {
    pub policy: DegeneracyPolicy,
    /// Relative threshold; zero modes are `ε ≤ rel_threshold · ‖A‖₂`.
    pub rel_threshold: f64,
}

impl Default for GroundStateOptions {
    fn default() -> Self {
        Self {
            policy: DegeneracyPolicy::Error,
            rel_threshold: 1e-8,
        }
    }
}

impl GroundStateOptions {
    pub fn empty_zero_modes() -> Self {
        Self {
            policy: DegeneracyPolicy::OccupyZeroModesEmpty,
            ..Self::default()
        }
    }
}

/// Ground-state covariance of the quadratic Hamiltonian `h`.
///
/// Each canonical pair `(p, q)` with `pᵀ A q = ε > 0` contributes
/// `q pᵀ − p qᵀ`. Zero modes are either rejected or emptied: their pairing
/// is fixed first against the vacuum (`γ_{A,i}` with `γ_{B,i}`), then against
/// the index-ordered reference (lower index playing `γ_A`), which gives
/// `f = (γ_R + iγ_L)/2` empty for the edge modes of a Kitaev chain.
pub fn ground_state(h: &CouplingMatrix, opts: GroundStateOptions) -> Result<CovarianceMatrix> {
    let a = h.matrix();
    let n = a.nrows();
    let norm = skew_spectrum(a).last().copied().unwrap_or(0.0);
    let threshold = opts.rel_threshold * norm;
    let cf = CanonicalForm::new(a, threshold);

    let mut m = DMatrix::<f64>::zeros(n, n);
    let o = cf.basis();
    for k in 0..cf.n_pairs() {
        let p = o.column(2 * k);
        let q = o.column(2 * k + 1);
        m += q * p.transpose() - p * q.transpose();
    }

    if cf.kernel_dim() > 0 {
        match opts.policy {
            DegeneracyPolicy::Error => {
                return Err(Error::DegenerateGroundState {
                    count: cf.kernel_dim() / 2,
                    threshold,
                })
            }
            DegeneracyPolicy::OccupyZeroModesEmpty => {
                let kernel = cf.kernel();
                let pairing = empty_kernel_pairing(&kernel)?;
                m += &kernel * pairing * kernel.transpose();
            }
        }
    }
    Ok(CovarianceMatrix::from_raw(m))
}

/// Covariance (in kernel coordinates) of the state that leaves the zero
/// modes spanned by `kernel` empty.
fn empty_kernel_pairing(kernel: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = kernel.nrows();
    let dim = kernel.ncols();
    let vacuum = CovarianceMatrix::vacuum(n / 2).matrix;
    let ordered = DMatrix::<f64>::from_fn(n, n, |p, q| match p.cmp(&q) {
        std::cmp::Ordering::Less => 1.0,
        std::cmp::Ordering::Greater => -1.0,
        std::cmp::Ordering::Equal => 0.0,
    });

    let mut out = DMatrix::<f64>::zeros(dim, dim);
    // Orthonormal basis (in kernel coordinates) of the still-unpaired part.
    let mut free = DMatrix::<f64>::identity(dim, dim);
    for reference in [&vacuum, &ordered] {
        if free.ncols() == 0 {
            break;
        }
        let sub = kernel * &free;
        let k = sub.transpose() * reference * &sub;
        let cf = CanonicalForm::new(&k, 1e-6);
        let basis = cf.basis();
        for j in 0..cf.n_pairs() {
            // pᵀ K q > 0: align the state with the reference.
            let p = &free * basis.column(2 * j);
            let q = &free * basis.column(2 * j + 1);
            out += &p * q.transpose() - &q * p.transpose();
        }
        free = &free * cf.kernel();
    }
    if free.ncols() > 0 {
        return Err(Error::DegenerateGroundState {
            count: free.ncols() / 2,
            threshold: 0.0,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_kitaev_sweet_spot, build_tb_hamiltonian, HamiltonianTerm};

    #[test]
    fn positive_chemical_potential_gives_vacuum() {
        let h = build_tb_hamiltonian(6, &[], 0.0, 3.0, 1.0).unwrap();
        let m = ground_state(&h, GroundStateOptions::default()).unwrap();
        assert!(m.occupation_density().iter().all(|n| n.abs() < 0.01));
        assert!(m.is_pure());
        m.validate().unwrap();
    }

    #[test]
    fn release_well_is_occupied() {
        let h = build_tb_hamiltonian(201, &[100], -20.0, 20.0, 1.0).unwrap();
        let m = ground_state(&h, GroundStateOptions::default()).unwrap();
        let n = m.occupation_density();
        assert!((n[100] - 1.0).abs() < 1e-2);
        let rest: f64 = n.iter().enumerate().filter(|(i, _)| *i != 100).map(|(_, v)| v).sum();
        assert!(rest < 1e-2);
    }

    #[test]
    fn sweet_spot_energy_and_empty_edge_mode() {
        for l in 2..8 {
            let tau = 1.7;
            let h = build_kitaev_sweet_spot(l, tau).unwrap();
            let m = ground_state(&h, GroundStateOptions::empty_zero_modes()).unwrap();
            let e = h.energy(&m).unwrap();
            assert!((e + (l as f64 - 1.0) * tau / 2.0).abs() < 1e-12);
            assert!(m.is_pure());
            // n_f = (1 + M_{R,L}) / 2 with γ_L = index 0, γ_R = index 2l−1.
            let nf = 0.5 * (1.0 + m.matrix()[(2 * l - 1, 0)]);
            assert!(nf.abs() < 1e-12);
        }
    }

    #[test]
    fn sweet_spot_is_ambiguous_without_policy() {
        let h = build_kitaev_sweet_spot(5, 1.0).unwrap();
        assert!(matches!(
            ground_state(&h, GroundStateOptions::default()),
            Err(Error::DegenerateGroundState { count: 1, .. })
        ));
    }

    #[test]
    fn empty_hamiltonian() {
        let h = CouplingMatrix::from_terms(1, vec![]).unwrap();
        assert!(ground_state(&h, GroundStateOptions::default()).is_err());
        let m = ground_state(&h, GroundStateOptions::empty_zero_modes()).unwrap();
        assert_eq!(m, CovarianceMatrix::vacuum(1));
        let h = CouplingMatrix::from_terms(4, vec![]).unwrap();
        let m = ground_state(&h, GroundStateOptions::empty_zero_modes()).unwrap();
        assert!((m.matrix() - CovarianceMatrix::vacuum(4).matrix()).amax() < 1e-12);
    }

    #[test]
    fn half_filled_chain() {
        let h = build_tb_hamiltonian(100, &[], 0.0, 1e-5, 1.0).unwrap();
        let m = ground_state(&h, GroundStateOptions::default()).unwrap();
        for n in &m.occupation_density()[10..90] {
            assert!((n - 0.5).abs() < 1e-6, "{n}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let h = CouplingMatrix::from_terms(
            3,
            vec![
                HamiltonianTerm::hopping(0, 1, 0.3),
                HamiltonianTerm::pairing(1, 2, 0.7),
                HamiltonianTerm::chemical_potential(2, -0.4),
                HamiltonianTerm::chemical_potential(0, 0.2),
            ],
        )
        .unwrap();
        let m = ground_state(&h, GroundStateOptions::default()).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = CovarianceMatrix::read_csv(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn rejects_non_antisymmetric() {
        let mut m = DMatrix::<f64>::zeros(2, 2);
        m[(0, 1)] = 1.0;
        assert!(CovarianceMatrix::new(m).is_err());
    }
}
