use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Letter, Word};
use crate::error::Error;

/// Lattice geometry. Sites of finite lattices are numbered `1..=L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topology {
    /// Periodic chain; site indices are residues mod `L`.
    Ring(usize),
    /// Open chain.
    Line(usize),
    /// Unbounded chain over all integers.
    InfiniteLine,
}

/// Lattice plus blockade range `λ_b`. The Rabi frequency is fixed to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    topology: Topology,
    blockade_range: usize,
}

impl ModelSpec {
    pub fn new(topology: Topology, blockade_range: usize) -> Result<Self, Error> {
        if blockade_range == 0 {
            return Err(Error::InvalidModel("blockade range must be at least 1".into()));
        }
        match topology {
            Topology::Ring(l) if l < 2 => {
                return Err(Error::InvalidModel(format!("ring needs at least 2 sites, got {l}")))
            }
            Topology::Line(0) => return Err(Error::InvalidModel("line needs at least 1 site".into())),
            _ => {}
        }
        Ok(ModelSpec { topology, blockade_range })
    }

    pub fn ring(sites: usize, blockade_range: usize) -> Result<Self, Error> {
        ModelSpec::new(Topology::Ring(sites), blockade_range)
    }

    pub fn line(sites: usize, blockade_range: usize) -> Result<Self, Error> {
        ModelSpec::new(Topology::Line(sites), blockade_range)
    }

    pub fn infinite(blockade_range: usize) -> Result<Self, Error> {
        ModelSpec::new(Topology::InfiniteLine, blockade_range)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn blockade_range(&self) -> usize {
        self.blockade_range
    }

    /// Number of sites, `None` for the infinite line.
    pub fn sites(&self) -> Option<usize> {
        match self.topology {
            Topology::Ring(l) | Topology::Line(l) => Some(l),
            Topology::InfiniteLine => None,
        }
    }

    /// Canonical label of `site`, or `None` if the site does not exist.
    pub fn normalize_site(&self, site: i64) -> Option<i64> {
        match self.topology {
            Topology::Ring(l) => Some((site - 1).rem_euclid(l as i64) + 1),
            Topology::Line(l) => (1..=l as i64).contains(&site).then_some(site),
            Topology::InfiniteLine => Some(site),
        }
    }

    /// Maps a word onto the lattice: residues on a ring, range check on a line.
    pub fn normalize_word(&self, word: &Word) -> Result<Word, Error> {
        word.relabel(|site| {
            self.normalize_site(site)
                .ok_or_else(|| Error::InvalidWord(format!("site {site} is not on the {self} lattice")))
        })
    }

    /// The blockade neighbourhood `Λ_k`: distinct existing sites within
    /// distance `λ_b` of `k`, excluding `k` itself.
    pub fn neighborhood(&self, k: i64) -> Vec<i64> {
        let lb = self.blockade_range as i64;
        let mut sites: Vec<i64> = (1..=lb)
            .flat_map(|d| [k - d, k + d])
            .filter_map(|s| self.normalize_site(s))
            .collect();
        let k = self.normalize_site(k);
        sites.retain(|&s| Some(s) != k);
        sites.sort_unstable();
        sites.dedup();
        sites
    }

    /// The two words `r_k Π m_j` and `r†_k Π m_j` (product over `Λ_k`) whose
    /// sum is the local term `H_k`.
    pub fn term_words(&self, k: i64) -> [Word; 2] {
        let k = self.normalize_site(k).expect("term site must exist on the lattice");
        let neighbors = self.neighborhood(k);
        let build = |flip: Letter| {
            Word::from_letters(
                neighbors.iter().map(|&j| (j, Letter::Proj)).chain(std::iter::once((k, flip))),
            )
            .expect("neighbourhood excludes k")
        };
        [build(Letter::Lower), build(Letter::Raise)]
    }

    /// Sites `k` whose term `H_k` can fail to commute with `word`: those whose
    /// closed neighbourhood `{k} ∪ Λ_k` meets the support of the word.
    pub fn coupled_sites(&self, word: &Word) -> Vec<i64> {
        let lb = self.blockade_range as i64;
        let mut sites: Vec<i64> = Vec::new();
        for (site, _) in word.iter() {
            for k in site - lb..=site + lb {
                if let Some(k) = self.normalize_site(k) {
                    sites.push(k);
                }
            }
        }
        sites.sort_unstable();
        sites.dedup();
        sites
    }

    /// Every existing site of a finite lattice in increasing order.
    pub fn site_range(&self) -> Option<std::ops::RangeInclusive<i64>> {
        self.sites().map(|l| 1..=l as i64)
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.topology {
            Topology::Ring(l) => write!(f, "ring(L={l}, λ_b={})", self.blockade_range),
            Topology::Line(l) => write!(f, "line(L={l}, λ_b={})", self.blockade_range),
            Topology::InfiniteLine => write!(f, "infinite line(λ_b={})", self.blockade_range),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_models() {
        assert!(ModelSpec::ring(1, 1).is_err());
        assert!(ModelSpec::line(0, 1).is_err());
        assert!(ModelSpec::infinite(0).is_err());
        assert!(ModelSpec::ring(2, 1).is_ok());
    }

    #[test]
    fn ring_neighbourhoods_are_distinct_residues() {
        let m = ModelSpec::ring(2, 1).unwrap();
        assert_eq!(m.neighborhood(1), vec![2]);
        let m = ModelSpec::ring(4, 2).unwrap();
        assert_eq!(m.neighborhood(1), vec![2, 3, 4]);
        let m = ModelSpec::ring(5, 1).unwrap();
        assert_eq!(m.neighborhood(5), vec![1, 4]);
    }

    #[test]
    fn line_neighbourhoods_are_truncated() {
        let m = ModelSpec::line(3, 1).unwrap();
        assert_eq!(m.neighborhood(1), vec![2]);
        assert_eq!(m.neighborhood(2), vec![1, 3]);
        let m = ModelSpec::line(5, 2).unwrap();
        assert_eq!(m.neighborhood(5), vec![3, 4]);
    }

    #[test]
    fn ring_site_labels_wrap() {
        let m = ModelSpec::ring(5, 1).unwrap();
        assert_eq!(m.normalize_site(0), Some(5));
        assert_eq!(m.normalize_site(6), Some(1));
        assert_eq!(m.normalize_site(-4), Some(1));
        let w: Word = "0:m 1:r".parse().unwrap();
        assert_eq!(m.normalize_word(&w).unwrap().to_string(), "1:r 5:m");
        let clash: Word = "0:m 5:r".parse().unwrap();
        assert!(m.normalize_word(&clash).is_err());
    }

    #[test]
    fn coupled_sites_dilate_support() {
        let m = ModelSpec::infinite(1).unwrap();
        let w: Word = "0:n".parse().unwrap();
        assert_eq!(m.coupled_sites(&w), vec![-1, 0, 1]);
        let m = ModelSpec::line(4, 1).unwrap();
        let w: Word = "1:n".parse().unwrap();
        assert_eq!(m.coupled_sites(&w), vec![1, 2]);
    }
}
