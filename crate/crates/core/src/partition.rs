use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A split of the sites `0..n` into two nonempty blocks. The canonical form
/// keeps site 0 in `left`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// Builds the canonical bipartition with `block` on one side.
    pub fn new(block: &[usize], n_sites: usize) -> Result<Self> {
        let mut inside = vec![false; n_sites];
        for &s in block {
            if s >= n_sites {
                return Err(Error::SiteOutOfRange { site: s, n_sites });
            }
            inside[s] = true;
        }
        let left: Vec<usize> = (0..n_sites).filter(|&s| inside[s]).collect();
        let right: Vec<usize> = (0..n_sites).filter(|&s| !inside[s]).collect();
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "bipartition of {n_sites} sites needs two nonempty blocks, got {block:?}"
            )));
        }
        Ok(if inside[0] {
            Bipartition { left, right }
        } else {
            Bipartition {
                left: right,
                right: left,
            }
        })
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_sites(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// One-based labels, e.g. `12|34`. Labels are dot-separated past nine sites.
impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n_sites() > 9 { "." } else { "" };
        let block = |b: &[usize]| {
            b.iter()
                .map(|s| (s + 1).to_string())
                .collect::<Vec<_>>()
                .join(sep)
        };
        write!(f, "{}|{}", block(&self.left), block(&self.right))
    }
}

impl Serialize for Bipartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All `2^(n-1) - 1` canonical bipartitions, ordered by the bitmask of `left`.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "bipartitions need at least 2 sites, got {n}"
        )));
    }
    if n >= usize::BITS as usize {
        return Err(Error::InvalidParameter(format!("{n} sites is too many")));
    }
    let full = (1usize << n) - 1;
    Ok((1..full)
        .step_by(2)
        .map(|mask| {
            let left = (0..n).filter(|&s| mask >> s & 1 == 1).collect();
            let right = (0..n).filter(|&s| mask >> s & 1 == 0).collect();
            Bipartition { left, right }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn three_sites() {
        let parts = enumerate_bipartitions(3).unwrap();
        let labels: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        assert_eq!(labels, ["1|23", "12|3", "13|2"]);
    }

    #[test]
    fn four_sites_match_listed_partitions() {
        let labels: HashSet<String> = enumerate_bipartitions(4)
            .unwrap()
            .iter()
            .map(|p| p.to_string())
            .collect();
        // 2|134 is written canonically as 134|2, and so on.
        let expected: HashSet<String> = ["1|234", "134|2", "124|3", "123|4", "12|34", "13|24", "14|23"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(labels, expected);
    }

    #[test]
    fn two_sites_and_errors() {
        assert_eq!(enumerate_bipartitions(2).unwrap().len(), 1);
        assert!(enumerate_bipartitions(1).is_err());
        assert!(enumerate_bipartitions(0).is_err());
    }

    #[test]
    fn counts_and_distinctness() {
        for n in 2..=8 {
            let parts = enumerate_bipartitions(n).unwrap();
            assert_eq!(parts.len(), (1 << (n - 1)) - 1);
            let distinct: HashSet<_> = parts.iter().collect();
            assert_eq!(distinct.len(), parts.len());
            for p in &parts {
                assert_eq!(p.left()[0], 0);
                assert!(!p.right().is_empty());
                assert_eq!(p.n_sites(), n);
            }
        }
    }

    #[test]
    fn new_canonicalizes() {
        let p = Bipartition::new(&[2, 3], 4).unwrap();
        assert_eq!(p.left(), &[0, 1]);
        assert_eq!(p.right(), &[2, 3]);
        assert!(Bipartition::new(&[0, 1, 2], 3).is_err());
        assert!(Bipartition::new(&[], 3).is_err());
        assert!(Bipartition::new(&[4], 3).is_err());
    }

    #[test]
    fn label_past_nine_sites() {
        let p = Bipartition::new(&[0, 9], 10).unwrap();
        assert_eq!(p.to_string(), "1.10|2.3.4.5.6.7.8.9");
    }
}
