//! Von Neumann entropies of contiguous subsystems of a Gaussian state.

use nalgebra::DMatrix;

use crate::covariance::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::lattice::LatticeCoord;
use crate::skew::skew_spectrum_in_place;

/// Symplectic values up to this far above 1 are round-off and get clamped.
pub const CLAMP_TOL: f64 = 1e-9;
/// Beyond this the covariance is rejected.
pub const INVALID_TOL: f64 = 1e-6;

/// `h₂(x)` in bits, with `h₂(0) = h₂(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let plogp = |p: f64| if p <= 0.0 { 0.0 } else { p * p.log2() };
    -(plogp(x) + plogp(1.0 - x))
}

/// Entropy in bits of one Majorana pair with symplectic value `nu`.
/// Written in terms of `(1 ± ν)/2` directly so that `ν → 1` does not lose
/// digits to cancellation.
fn pair_entropy(nu: f64) -> f64 {
    let p = 0.5 * (1.0 + nu);
    let q = 0.5 * (1.0 - nu);
    let plogp = |p: f64| if p <= 0.0 { 0.0 } else { p * p.log2() };
    -(plogp(p) + plogp(q))
}

/// Total entropy from a list of symplectic values.
pub fn entropy_from_spectrum(nus: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &nu in nus {
        if !(nu >= -INVALID_TOL && nu <= 1.0 + INVALID_TOL) {
            return Err(Error::InvalidCovariance { value: nu });
        }
        if nu > 1.0 + CLAMP_TOL {
            log::debug!("symplectic value {nu} clamped to 1");
        }
        s += pair_entropy(nu.clamp(0.0, 1.0));
    }
    Ok(s)
}

/// Entropy of sites `start..start+len` of the state `m`. `buf` is scratch
/// space reused across calls.
pub(crate) fn interval_entropy(
    m: &DMatrix<f64>,
    start: usize,
    len: usize,
    buf: &mut Vec<f64>,
) -> Result<f64> {
    if len == 0 {
        return Ok(0.0);
    }
    let n = 2 * len;
    let off = 2 * start;
    buf.clear();
    // Copying columns gives the transpose, i.e. −M, which has the same
    // symplectic values.
    for j in off..off + n {
        buf.extend_from_slice(&m.column(j).as_slice()[off..off + n]);
    }
    let nus = skew_spectrum_in_place(buf, n);
    entropy_from_spectrum(&nus)
}

/// Entropy in bits of the subsystem at `coord`.
pub fn subsystem_entropy(state: &CovarianceMatrix, coord: LatticeCoord) -> Result<f64> {
    let n = state.n_sites();
    if coord.m + coord.ell >= n {
        return Err(Error::CoordOutOfRange {
            ell: coord.ell,
            m: coord.m,
            n_sites: n,
        });
    }
    let mut buf = Vec::new();
    interval_entropy(state.matrix(), coord.m, coord.ell + 1, &mut buf)
}
