//! Topic sets with coverage requirements, the input of DCG ranking.

use crate::error::{Error, Result};

/// One topic set `S` with its requirement `k_S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSet {
    pub members: Vec<usize>,
    pub k: usize,
}

/// Ground set `0..n` and the sets to be covered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystemInstance {
    n: usize,
    sets: Vec<CoverSet>,
}

impl SetSystemInstance {
    /// Validates and normalizes (members sorted, duplicates removed).
    pub fn new(n: usize, sets: Vec<CoverSet>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("set system needs n >= 1".into()));
        }
        if sets.is_empty() {
            return Err(Error::InvalidInstance("set system needs at least one set".into()));
        }
        let mut normalized = Vec::with_capacity(sets.len());
        for (idx, mut s) in sets.into_iter().enumerate() {
            s.members.sort_unstable();
            s.members.dedup();
            if s.members.is_empty() {
                return Err(Error::InvalidInstance(format!("sets[{idx}] is empty")));
            }
            if let Some(&e) = s.members.iter().find(|&&e| e >= n) {
                return Err(Error::InvalidInstance(format!(
                    "sets[{idx}].members contains {e}, outside 0..{n}"
                )));
            }
            if s.k == 0 || s.k > s.members.len() {
                return Err(Error::InvalidInstance(format!(
                    "sets[{idx}].k = {} must lie in 1..={}",
                    s.k,
                    s.members.len()
                )));
            }
            normalized.push(s);
        }
        Ok(Self { n, sets: normalized })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[CoverSet] {
        &self.sets
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_requirements() {
        let bad = SetSystemInstance::new(3, vec![CoverSet { members: vec![0, 1], k: 3 }]);
        assert!(matches!(bad, Err(Error::InvalidInstance(_))));
        let bad = SetSystemInstance::new(3, vec![CoverSet { members: vec![], k: 1 }]);
        assert!(bad.is_err());
        let bad = SetSystemInstance::new(3, vec![CoverSet { members: vec![5], k: 1 }]);
        assert!(bad.is_err());
        assert!(SetSystemInstance::new(3, vec![]).is_err());
    }

    #[test]
    fn normalizes_members() {
        let s = SetSystemInstance::new(4, vec![CoverSet { members: vec![3, 1, 3], k: 2 }]).unwrap();
        assert_eq!(s.sets()[0].members, vec![1, 3]);
    }
}
