//! The information lattice: local information `i(ell, m)` resolved by scale
//! `ell` and leftmost site `m`.
//!
//! With `I(ell, m) = (ell + 1) − S(ell, m)` and `I = 0` for `ell < 0`,
//!
//! ```text
//! i(ell, m) = I(ell, m) − I(ell−1, m) − I(ell−1, m+1) + I(ell−2, m+1)
//! ```
//!
//! Summed over every coordinate inside a contiguous interval this telescopes
//! to `I` of the interval, which is what the fast probes below exploit.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covariance::CovarianceMatrix;
use crate::entropy::interval_entropy;
use crate::error::{Error, Result};
use crate::partition::RegionSpec;

/// Subsystem of `ell + 1` sites starting at site `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeCoord {
    pub ell: usize,
    pub m: usize,
}

impl LatticeCoord {
    pub fn new(ell: usize, m: usize, n_sites: usize) -> Result<Self> {
        if m + ell >= n_sites {
            return Err(Error::CoordOutOfRange { ell, m, n_sites });
        }
        Ok(Self { ell, m })
    }

    /// Twice the center `n = m + ell/2`, an integer.
    pub fn two_n(&self) -> usize {
        2 * self.m + self.ell
    }

    /// Last site of the subsystem.
    pub fn last(&self) -> usize {
        self.m + self.ell
    }

    /// Whether `other` is contained in this subsystem.
    pub fn contains(&self, other: &LatticeCoord) -> bool {
        other.m >= self.m && other.last() <= self.last()
    }
}

/// Every coordinate of an `n`-site lattice, ordered by `ell` then `m`.
pub fn coords(n_sites: usize) -> impl Iterator<Item = LatticeCoord> {
    (0..n_sites).flat_map(move |ell| (0..n_sites - ell).map(move |m| LatticeCoord { ell, m }))
}

/// Sum in a fixed pairwise order, independent of how the values were
/// produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let (lo, hi) = values.split_at(values.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InformationLattice {
    n_sites: usize,
    /// `entropies[ell][m]` in bits.
    entropies: Vec<Vec<f64>>,
    /// `local_info[ell][m]` in bits.
    local_info: Vec<Vec<f64>>,
    total_info: f64,
}

impl InformationLattice {
    /// Build the lattice from cached subsystem entropies `S[ell][m]`.
    pub fn from_entropies(entropies: Vec<Vec<f64>>) -> Result<Self> {
        let n = entropies.len();
        for (ell, row) in entropies.iter().enumerate() {
            if row.len() != n - ell {
                return Err(Error::DimensionMismatch {
                    expected: n - ell,
                    got: row.len(),
                });
            }
        }
        let info = |ell: isize, m: usize| -> f64 {
            if ell < 0 {
                0.0
            } else {
                (ell + 1) as f64 - entropies[ell as usize][m]
            }
        };
        let local_info: Vec<Vec<f64>> = (0..n)
            .map(|ell| {
                let l = ell as isize;
                (0..n - ell)
                    .map(|m| info(l, m) - info(l - 1, m) - info(l - 1, m + 1) + info(l - 2, m + 1))
                    .collect()
            })
            .collect();
        let flat: Vec<f64> = local_info.iter().flatten().copied().collect();
        let total_info = pairwise_sum(&flat);
        Ok(Self {
            n_sites: n,
            entropies,
            local_info,
            total_info,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn entropy(&self, c: LatticeCoord) -> f64 {
        self.entropies[c.ell][c.m]
    }

    pub fn info(&self, c: LatticeCoord) -> f64 {
        self.local_info[c.ell][c.m]
    }

    /// `i` at scale `ell`, indexed by `m`.
    pub fn row(&self, ell: usize) -> &[f64] {
        &self.local_info[ell]
    }

    pub fn entropies(&self) -> &[Vec<f64>] {
        &self.entropies
    }

    pub fn local_info(&self) -> &[Vec<f64>] {
        &self.local_info
    }

    pub fn total_info(&self) -> f64 {
        self.total_info
    }

    pub fn min_info(&self) -> f64 {
        self.local_info
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `(coord, S, i)` for every lattice site, ordered by `ell` then `m`.
    pub fn iter(&self) -> impl Iterator<Item = (LatticeCoord, f64, f64)> + '_ {
        coords(self.n_sites).map(|c| (c, self.entropy(c), self.info(c)))
    }

    /// Deterministic sum of `i` over the coordinates accepted by `keep`.
    pub fn sum_where(&self, mut keep: impl FnMut(LatticeCoord) -> bool) -> f64 {
        let vals: Vec<f64> = self.iter().filter(|(c, _, _)| keep(*c)).map(|(_, _, i)| i).collect();
        pairwise_sum(&vals)
    }
}

/// Compute every subsystem entropy of `state` and assemble the lattice.
///
/// One eigenproblem per coordinate, run on the current rayon pool. Results
/// are written to fixed slots, so the output does not depend on the number
/// of workers.
pub fn local_information(state: &CovarianceMatrix) -> Result<InformationLattice> {
    let n = state.n_sites();
    let m = state.matrix();
    // Largest subsystems first so the long tasks start early.
    let mut all: Vec<LatticeCoord> = coords(n).collect();
    all.sort_by(|a, b| b.ell.cmp(&a.ell).then(a.m.cmp(&b.m)));
    let values: Vec<Result<f64>> = all
        .par_iter()
        .map_init(Vec::new, |buf, c| interval_entropy(m, c.m, c.ell + 1, buf))
        .collect();
    let mut entropies: Vec<Vec<f64>> = (0..n).map(|ell| vec![0.0; n - ell]).collect();
    for (c, v) in all.iter().zip(values) {
        entropies[c.ell][c.m] = v?;
    }
    InformationLattice::from_entropies(entropies)
}

/// Mean of `i` over `m` at each scale.
pub fn scale_profile(lattice: &InformationLattice) -> Vec<f64> {
    lattice
        .local_info
        .iter()
        .map(|row| pairwise_sum(row) / row.len() as f64)
        .collect()
}

/// `i_t − i_baseline` elementwise, as `[ell][m]`.
pub fn lattice_delta(
    lattice: &InformationLattice,
    baseline: &InformationLattice,
) -> Result<Vec<Vec<f64>>> {
    if lattice.n_sites != baseline.n_sites {
        return Err(Error::DimensionMismatch {
            expected: baseline.n_sites,
            got: lattice.n_sites,
        });
    }
    Ok(lattice
        .local_info
        .iter()
        .zip(&baseline.local_info)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect())
}

/// Information on the diagonal of subsystems whose leftmost site is the
/// last site of `Q`, scales `1..=N−l_Q`.
pub fn interface_sum(lattice: &InformationLattice, regions: &RegionSpec) -> f64 {
    let m = regions.l_q - 1;
    let vals: Vec<f64> = (1..=lattice.n_sites - regions.l_q)
        .map(|ell| lattice.local_info[ell][m])
        .collect();
    pairwise_sum(&vals)
}

/// Information on the left-edge diagonal from scale `l_Q − 1` to the top.
pub fn diagonal_sum_topological(lattice: &InformationLattice, l_q: usize) -> f64 {
    let vals: Vec<f64> = (l_q.saturating_sub(1)..lattice.n_sites)
        .map(|ell| lattice.local_info[ell][0])
        .collect();
    pairwise_sum(&vals)
}

/// Entropies of selected intervals of one state, computed on demand and
/// cached. Cheap replacement for a full lattice when only a handful of
/// telescoped sums are needed.
pub struct IntervalProbe<'a> {
    matrix: &'a DMatrix<f64>,
    n_sites: usize,
    cache: HashMap<(usize, usize), f64>,
    buf: Vec<f64>,
}

impl<'a> IntervalProbe<'a> {
    pub fn new(state: &'a CovarianceMatrix) -> Self {
        Self {
            matrix: state.matrix(),
            n_sites: state.n_sites(),
            cache: HashMap::new(),
            buf: Vec::new(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Entropy of sites `first..=last`; empty intervals have zero entropy.
    pub fn entropy(&mut self, first: usize, last: usize) -> Result<f64> {
        if last < first {
            return Ok(0.0);
        }
        if last >= self.n_sites {
            return Err(Error::CoordOutOfRange {
                ell: last - first,
                m: first,
                n_sites: self.n_sites,
            });
        }
        if let Some(&s) = self.cache.get(&(first, last)) {
            return Ok(s);
        }
        let s = interval_entropy(self.matrix, first, last - first + 1, &mut self.buf)?;
        self.cache.insert((first, last), s);
        Ok(s)
    }

    /// `I = |A| − S(A)` of sites `first..=last`.
    pub fn info(&mut self, first: usize, last: usize) -> Result<f64> {
        if last < first {
            return Ok(0.0);
        }
        Ok((last - first + 1) as f64 - self.entropy(first, last)?)
    }

    /// `I(ell, m)` with the convention `I = 0` for `ell < 0`.
    fn info_at(&mut self, ell: isize, m: usize) -> Result<f64> {
        if ell < 0 {
            return Ok(0.0);
        }
        self.info(m, m + ell as usize)
    }

    /// A single local-information value.
    pub fn local_info(&mut self, c: LatticeCoord) -> Result<f64> {
        let l = c.ell as isize;
        Ok(self.info_at(l, c.m)? - self.info_at(l - 1, c.m)? - self.info_at(l - 1, c.m + 1)?
            + self.info_at(l - 2, c.m + 1)?)
    }

    /// `Σ_{ell=a..=b} i(ell, m)`, which telescopes to
    /// `D(b) − D(a−1)` with `D(ell) = I(ell, m) − I(ell−1, m+1)`.
    pub fn diagonal_sum(&mut self, m: usize, a: usize, b: usize) -> Result<f64> {
        if b < a {
            return Ok(0.0);
        }
        let mut d = |ell: isize| -> Result<f64> {
            if ell < 0 {
                return Ok(0.0);
            }
            Ok(self.info_at(ell, m)? - self.info_at(ell - 1, m + 1)?)
        };
        Ok(d(b as isize)? - d(a as isize - 1)?)
    }

    pub fn interface_sum(&mut self, regions: &RegionSpec) -> Result<f64> {
        let n = self.n_sites;
        self.diagonal_sum(regions.l_q - 1, 1, n - regions.l_q)
    }

    pub fn diagonal_sum_topological(&mut self, l_q: usize) -> Result<f64> {
        let n = self.n_sites;
        self.diagonal_sum(0, l_q.saturating_sub(1), n - 1)
    }
}
