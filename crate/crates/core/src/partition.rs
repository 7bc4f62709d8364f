//! Partition of the lattice induced by splitting the chain into `Q | X | P`,
//! and the partition sums `Γ_Λ`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{pairwise_sum, InformationLattice, IntervalProbe, LatticeCoord};

/// Site counts of the three regions, left to right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub l_q: usize,
    pub l_x: usize,
    pub l_p: usize,
}

impl RegionSpec {
    pub fn new(l_q: usize, l_x: usize, l_p: usize) -> Result<Self> {
        if l_q == 0 || l_x == 0 || l_p == 0 {
            return Err(Error::InvalidRegions(format!(
                "all regions must be nonempty, got ({l_q}, {l_x}, {l_p})"
            )));
        }
        Ok(Self { l_q, l_x, l_p })
    }

    pub fn n_sites(&self) -> usize {
        self.l_q + self.l_x + self.l_p
    }

    pub fn check(&self, n_sites: usize) -> Result<()> {
        if self.n_sites() != n_sites {
            return Err(Error::InvalidRegions(format!(
                "regions cover {} sites, chain has {n_sites}",
                self.n_sites()
            )));
        }
        Ok(())
    }

    /// First site of `X`.
    fn x0(&self) -> usize {
        self.l_q
    }

    /// First site of `P`.
    fn p0(&self) -> usize {
        self.l_q + self.l_x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PartitionLabel {
    Qbar,
    Xbar,
    Pbar,
    QX,
    XP,
    QXP,
}

impl PartitionLabel {
    pub const ALL: [PartitionLabel; 6] = [
        PartitionLabel::Qbar,
        PartitionLabel::Xbar,
        PartitionLabel::Pbar,
        PartitionLabel::QX,
        PartitionLabel::XP,
        PartitionLabel::QXP,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PartitionLabel::Qbar => "Qbar",
            PartitionLabel::Xbar => "Xbar",
            PartitionLabel::Pbar => "Pbar",
            PartitionLabel::QX => "QX",
            PartitionLabel::XP => "XP",
            PartitionLabel::QXP => "QXP",
        }
    }
}

impl fmt::Display for PartitionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PartitionLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Error::InvalidRegions(format!("unknown partition label {s:?}")))
    }
}

pub fn classify(coord: LatticeCoord, regions: &RegionSpec) -> PartitionLabel {
    let (first, last) = (coord.m, coord.last());
    let in_q = first < regions.x0();
    let in_p = last >= regions.p0();
    let touches_x = last >= regions.x0() && first < regions.p0();
    match (in_q, touches_x, in_p) {
        (true, _, true) => PartitionLabel::QXP,
        (true, true, false) => PartitionLabel::QX,
        (true, false, false) => PartitionLabel::Qbar,
        (false, true, true) => PartitionLabel::XP,
        (false, true, false) => PartitionLabel::Xbar,
        (false, false, _) => PartitionLabel::Pbar,
    }
}

/// Total `i` in each partition.
pub fn partition_sums(
    lattice: &InformationLattice,
    regions: &RegionSpec,
) -> Result<BTreeMap<PartitionLabel, f64>> {
    regions.check(lattice.n_sites())?;
    let mut buckets: BTreeMap<PartitionLabel, Vec<f64>> =
        PartitionLabel::ALL.iter().map(|l| (*l, Vec::new())).collect();
    for (c, _, i) in lattice.iter() {
        buckets.get_mut(&classify(c, regions)).unwrap().push(i);
    }
    Ok(buckets
        .into_iter()
        .map(|(l, v)| (l, pairwise_sum(&v)))
        .collect())
}

/// Partition sums from six interval entropies. A triangle of the lattice
/// spanning a contiguous interval sums to `I` of that interval, so
///
/// ```text
/// Q̄ = I(Q)   X̄ = I(X)   P̄ = I(P)
/// QX = I(QX) − I(Q) − I(X)          XP = I(XP) − I(X) − I(P)
/// QXP = I(QXP) − I(QX) − I(XP) + I(X)
/// ```
pub fn partition_sums_fast(
    probe: &mut IntervalProbe<'_>,
    regions: &RegionSpec,
) -> Result<BTreeMap<PartitionLabel, f64>> {
    regions.check(probe.n_sites())?;
    let (x0, p0, n) = (regions.x0(), regions.p0(), regions.n_sites());
    let q = probe.info(0, x0 - 1)?;
    let x = probe.info(x0, p0 - 1)?;
    let p = probe.info(p0, n - 1)?;
    let qx = probe.info(0, p0 - 1)?;
    let xp = probe.info(x0, n - 1)?;
    let all = probe.info(0, n - 1)?;
    Ok(BTreeMap::from([
        (PartitionLabel::Qbar, q),
        (PartitionLabel::Xbar, x),
        (PartitionLabel::Pbar, p),
        (PartitionLabel::QX, qx - q - x),
        (PartitionLabel::XP, xp - x - p),
        (PartitionLabel::QXP, all - qx - xp + x),
    ]))
}

/// `Γ_Λ(t) = Σ_{Λ} [i_t − i_baseline]` for a series of lattices.
pub fn gamma(
    lattices: &[InformationLattice],
    baseline: &InformationLattice,
    regions: &RegionSpec,
) -> Result<BTreeMap<PartitionLabel, Vec<f64>>> {
    let base = partition_sums(baseline, regions)?;
    let mut out: BTreeMap<PartitionLabel, Vec<f64>> =
        PartitionLabel::ALL.iter().map(|l| (*l, Vec::new())).collect();
    for lat in lattices {
        if lat.n_sites() != baseline.n_sites() {
            return Err(Error::DimensionMismatch {
                expected: baseline.n_sites(),
                got: lat.n_sites(),
            });
        }
        for (l, v) in partition_sums(lat, regions)? {
            out.get_mut(&l).unwrap().push(v - base[&l]);
        }
    }
    Ok(out)
}
