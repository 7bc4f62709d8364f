//! Majorana index layout.
//!
//! Each physical site `i` carries two Majorana operators, with
//! `c_i = (γ_{B,i} + i γ_{A,i}) / 2`. They are stored at index `2i`
//! (species A) and `2i + 1` (species B).

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Species {
    A,
    B,
}

/// Bijection between `(site, species)` and Majorana indices `0..2N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SiteIndexing {
    n_sites: usize,
}

impl SiteIndexing {
    pub fn new(n_sites: usize) -> Self {
        Self { n_sites }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_majoranas(&self) -> usize {
        2 * self.n_sites
    }

    pub fn majorana_of(&self, site: usize, species: Species) -> Result<usize> {
        if site >= self.n_sites {
            return Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            });
        }
        Ok(majorana(site, species))
    }

    /// Inverse of [`SiteIndexing::majorana_of`].
    pub fn site_of(&self, index: usize) -> Option<(usize, Species)> {
        (index < self.n_majoranas()).then(|| {
            let species = if index % 2 == 0 { Species::A } else { Species::B };
            (index / 2, species)
        })
    }
}

/// Unchecked index helper used internally.
#[inline]
pub(crate) fn majorana(site: usize, species: Species) -> usize {
    match species {
        Species::A => 2 * site,
        Species::B => 2 * site + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_a_bijection() {
        let idx = SiteIndexing::new(7);
        let mut seen = vec![false; idx.n_majoranas()];
        for site in 0..7 {
            for species in [Species::A, Species::B] {
                let k = idx.majorana_of(site, species).unwrap();
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(idx.site_of(k), Some((site, species)));
            }
        }
        assert!(seen.into_iter().all(|s| s));
        assert_eq!(idx.majorana_of(1, Species::A).unwrap(), 2);
        assert_eq!(idx.majorana_of(1, Species::B).unwrap(), 3);
    }

    #[test]
    fn out_of_range_site() {
        let idx = SiteIndexing::new(3);
        assert!(idx.majorana_of(3, Species::A).is_err());
        assert_eq!(idx.site_of(6), None);
    }
}
