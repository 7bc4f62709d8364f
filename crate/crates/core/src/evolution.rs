//! Exact unitary evolution of Gaussian states.
//!
//! Under `H = (i/4) γᵀ A γ` the Majoranas evolve as `γ(t) = e^{At} γ`, so
//! `M(t) = O(t) M₀ O(t)ᵀ` with `O(t) = e^{At}`. `A` is decomposed once; each
//! requested time then costs two matrix products.

use nalgebra::DMatrix;

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::hamiltonian::CouplingMatrix;
use crate::skew::{skew_spectrum, CanonicalForm};

/// Relative cutoff below which canonical pairs are folded into the kernel
/// block, which is then propagated by a Taylor series.
const KERNEL_REL_THRESHOLD: f64 = 1e-12;

/// Precomputed spectral data of a post-quench Hamiltonian. Immutable and
/// safe to share between threads.
#[derive(Clone, Debug)]
pub struct Evolver {
    dim: usize,
    basis: DMatrix<f64>,
    energies: Vec<f64>,
    /// `A` restricted to the kernel block (tiny or zero).
    kernel_block: DMatrix<f64>,
}

impl Evolver {
    pub fn new(h: &CouplingMatrix) -> Self {
        let a = h.matrix();
        let norm = skew_spectrum(a).last().copied().unwrap_or(0.0);
        let cf = CanonicalForm::new(a, KERNEL_REL_THRESHOLD * norm);
        let kernel = cf.kernel();
        let kernel_block = kernel.transpose() * a * &kernel;
        Self {
            dim: a.nrows(),
            basis: cf.basis().clone(),
            energies: cf.energies().to_vec(),
            kernel_block,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `O(t) = e^{At}` in the canonical basis: 2×2 rotations plus the
    /// kernel block.
    fn rotate(&self, x: &mut DMatrix<f64>, t: f64) {
        let n_pairs = self.energies.len();
        // X ← R X Rᵀ, rows then columns.
        for (k, &eps) in self.energies.iter().enumerate() {
            let (s, c) = (eps * t).sin_cos();
            let (i, j) = (2 * k, 2 * k + 1);
            // R = [[c, s], [−s, c]]
            for col in 0..self.dim {
                let (a, b) = (x[(i, col)], x[(j, col)]);
                x[(i, col)] = c * a + s * b;
                x[(j, col)] = -s * a + c * b;
            }
            for row in 0..self.dim {
                let (a, b) = (x[(row, i)], x[(row, j)]);
                x[(row, i)] = c * a + s * b;
                x[(row, j)] = -s * a + c * b;
            }
        }
        let kd = self.kernel_block.nrows();
        if kd > 0 && self.kernel_block.amax() > 0.0 {
            let r = taylor_exp(&(&self.kernel_block * t));
            let off = 2 * n_pairs;
            let rows = r.clone() * x.rows(off, kd);
            x.rows_mut(off, kd).copy_from(&rows);
            let cols = x.columns(off, kd) * r.transpose();
            x.columns_mut(off, kd).copy_from(&cols);
        }
    }

    /// Covariance at time `t` given the covariance `m0` at `t = 0`.
    pub fn evolve(&self, m0: &CovarianceMatrix, t: f64) -> Result<CovarianceMatrix> {
        self.prepare(m0)?.at(t)
    }

    /// Cache `Oᵀ M₀ O` for repeated evaluation at many times.
    pub fn prepare<'a>(&'a self, m0: &CovarianceMatrix) -> Result<PreparedEvolution<'a>> {
        if m0.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: m0.dim(),
            });
        }
        let rotated = self.basis.transpose() * m0.matrix() * &self.basis;
        Ok(PreparedEvolution {
            evolver: self,
            rotated,
            initial: m0.clone(),
        })
    }
}

/// Initial state expressed in the canonical basis of an [`Evolver`].
#[derive(Clone, Debug)]
pub struct PreparedEvolution<'a> {
    evolver: &'a Evolver,
    rotated: DMatrix<f64>,
    initial: CovarianceMatrix,
}

impl PreparedEvolution<'_> {
    pub fn at(&self, t: f64) -> Result<CovarianceMatrix> {
        if t == 0.0 {
            return Ok(self.initial.clone());
        }
        let mut x = self.rotated.clone();
        self.evolver.rotate(&mut x, t);
        let b = &self.evolver.basis;
        Ok(CovarianceMatrix::from_raw(b * x * b.transpose()))
    }
}

/// `exp(K)` for a small matrix by scaling and squaring a Taylor series.
fn taylor_exp(k: &DMatrix<f64>) -> DMatrix<f64> {
    let n = k.nrows();
    let norm = k.amax() * n as f64;
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = k / 2f64.powi(squarings as i32);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for i in 1..=12 {
        term = &term * &scaled / i as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// One-shot `M(t)` for `M₀` under `h`.
pub fn evolve(m0: &CovarianceMatrix, h: &CouplingMatrix, t: f64) -> Result<CovarianceMatrix> {
    Evolver::new(h).evolve(m0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{ground_state, GroundStateOptions};
    use crate::hamiltonian::{build_kitaev_sweet_spot, build_tb_hamiltonian, HamiltonianTerm};

    fn dense_exp(a: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
        taylor_exp(&(a * t))
    }

    #[test]
    fn identity_at_zero_time() {
        let pre = build_tb_hamiltonian(8, &[3], -2.0, 1.0, 1.0).unwrap();
        let post = build_tb_hamiltonian(8, &[], 0.0, 1.0, 1.0).unwrap();
        let m0 = ground_state(&pre, GroundStateOptions::default()).unwrap();
        let m = evolve(&m0, &post, 0.0).unwrap();
        assert!((m.matrix() - m0.matrix()).amax() <= 1e-14);
    }

    #[test]
    fn matches_dense_exponential() {
        let post = CouplingMatrix::from_terms(
            4,
            vec![
                HamiltonianTerm::hopping(0, 1, 0.4),
                HamiltonianTerm::hopping(1, 3, -0.3),
                HamiltonianTerm::pairing(2, 3, 0.8),
                HamiltonianTerm::chemical_potential(1, 0.5),
            ],
        )
        .unwrap();
        let m0 = CovarianceMatrix::vacuum(4);
        let t = 1.3;
        let o = dense_exp(post.matrix(), t);
        let expected = &o * m0.matrix() * o.transpose();
        let got = evolve(&m0, &post, t).unwrap();
        assert!((got.matrix() - expected).amax() < 1e-12);
    }

    #[test]
    fn ground_state_is_stationary_and_purity_kept() {
        let h = build_kitaev_sweet_spot(6, 2.0).unwrap();
        let m0 = ground_state(&h, GroundStateOptions::empty_zero_modes()).unwrap();
        let ev = Evolver::new(&h);
        let prepared = ev.prepare(&m0).unwrap();
        for t in [0.3, 5.0, 170.0] {
            let m = prepared.at(t).unwrap();
            assert!((m.matrix() - m0.matrix()).amax() < 1e-10);
            assert!(m.purity_defect() < 1e-9);
        }
    }

    #[test]
    fn energy_is_conserved() {
        let pre = build_tb_hamiltonian(30, &[15], 5.0, 0.1, 1.0).unwrap();
        let post = build_tb_hamiltonian(30, &[], 0.0, 0.1, 1.0).unwrap();
        let m0 = ground_state(&pre, GroundStateOptions::default()).unwrap();
        let e0 = post.energy(&m0).unwrap();
        let ev = Evolver::new(&post);
        let prepared = ev.prepare(&m0).unwrap();
        for t in [1.0, 17.0, 123.4] {
            let e = post.energy(&prepared.at(t).unwrap()).unwrap();
            assert!((e - e0).abs() <= 1e-9 * e0.abs().max(1.0));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let post = build_tb_hamiltonian(4, &[], 0.0, 0.1, 1.0).unwrap();
        assert!(matches!(
            evolve(&CovarianceMatrix::vacuum(3), &post, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
