//! Monotone submodular set functions accessed through a value oracle.

use crate::error::{Error, Result};
use crate::Real;

/// Value-oracle access to a set function over the ground set `0..ground_size()`.
///
/// Implementors must be monotone with `eval(&[]) >= 0`; the solvers never
/// check submodularity, they only rely on it for their guarantees.
pub trait SetFunction<T>: Sync {
    fn ground_size(&self) -> usize;

    /// Value of `s`; indices must be in range and distinct.
    fn eval(&self, s: &[usize]) -> T;
}

/// The constant zero function.
#[derive(Debug, Clone, Copy)]
pub struct ZeroFunction {
    pub n: usize,
}

impl<T: Real> SetFunction<T> for ZeroFunction {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval(&self, _s: &[usize]) -> T {
        T::zero()
    }
}

/// Serializable monotone submodular function: modular or weighted coverage.
#[derive(Debug, Clone, PartialEq)]
pub enum SubmodularSpec<T> {
    Modular { weights: Vec<T> },
    Coverage(Coverage<T>),
}

/// `f(S) = weight of ∪_{e ∈ S} covers[e]` over universe `0..universe`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coverage<T> {
    universe: usize,
    covers: Vec<Vec<usize>>,
    uweights: Option<Vec<T>>,
    masks: Vec<Vec<u64>>,
}

impl<T: Real> Coverage<T> {
    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }

    pub fn uweights(&self) -> Option<&[T]> {
        self.uweights.as_deref()
    }

    fn words(&self) -> usize {
        self.universe.div_ceil(64)
    }

    fn eval_masks<'a>(&self, masks: impl Iterator<Item = &'a Vec<u64>>) -> T {
        let mut acc = vec![0u64; self.words()];
        for m in masks {
            for (a, &b) in acc.iter_mut().zip(m) {
                *a |= b;
            }
        }
        match &self.uweights {
            None => T::of_usize(acc.iter().map(|w| w.count_ones() as usize).sum()),
            Some(wts) => {
                let mut total = T::zero();
                for (wi, &word) in acc.iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        total += wts[wi * 64 + b];
                        bits &= bits - 1;
                    }
                }
                total
            }
        }
    }
}

impl<T: Real> SubmodularSpec<T> {
    pub fn modular(weights: Vec<T>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < T::zero()) {
            return Err(Error::InvalidInstance(format!("weights[{i}] must be finite and non-negative")));
        }
        Ok(Self::Modular { weights })
    }

    pub fn coverage(universe: usize, covers: Vec<Vec<usize>>, uweights: Option<Vec<T>>) -> Result<Self> {
        let words = universe.div_ceil(64);
        let mut masks = Vec::with_capacity(covers.len());
        let mut normalized = Vec::with_capacity(covers.len());
        for (e, cover) in covers.into_iter().enumerate() {
            let mut cover = cover;
            cover.sort_unstable();
            cover.dedup();
            let mut mask = vec![0u64; words];
            for &item in &cover {
                if item >= universe {
                    return Err(Error::InvalidInstance(format!(
                        "covers[{e}] contains {item}, outside universe 0..{universe}"
                    )));
                }
                mask[item / 64] |= 1u64 << (item % 64);
            }
            masks.push(mask);
            normalized.push(cover);
        }
        if let Some(w) = &uweights {
            if w.len() != universe {
                return Err(Error::ShapeMismatch(format!(
                    "uweights has {} entries, universe is {universe}",
                    w.len()
                )));
            }
            if let Some(i) = w.iter().position(|x| !x.is_finite() || *x < T::zero()) {
                return Err(Error::InvalidInstance(format!("uweights[{i}] must be finite and non-negative")));
            }
        }
        Ok(Self::Coverage(Coverage { universe, covers: normalized, uweights, masks }))
    }

    /// The all-zero modular function on `n` elements.
    pub fn zero(n: usize) -> Self {
        Self::Modular { weights: vec![T::zero(); n] }
    }

    /// True when every value is zero (all weights zero or nothing coverable).
    pub fn is_identically_zero(&self) -> bool {
        match self {
            Self::Modular { weights } => weights.iter().all(|w| w.is_zero()),
            Self::Coverage(c) => match &c.uweights {
                None => c.covers.iter().all(Vec::is_empty),
                Some(w) => c.covers.iter().flatten().all(|&i| w[i].is_zero()),
            },
        }
    }
}

impl<T: Real> SetFunction<T> for SubmodularSpec<T> {
    fn ground_size(&self) -> usize {
        match self {
            Self::Modular { weights } => weights.len(),
            Self::Coverage(c) => c.covers.len(),
        }
    }

    fn eval(&self, s: &[usize]) -> T {
        match self {
            Self::Modular { weights } => s.iter().map(|&e| weights[e]).sum(),
            Self::Coverage(c) => c.eval_masks(s.iter().map(|&e| &c.masks[e])),
        }
    }
}

/// Checked value-oracle call.
pub fn eval_submodular<T: Real>(spec: &SubmodularSpec<T>, s: &[usize]) -> Result<T> {
    let n = spec.ground_size();
    if let Some(&index) = s.iter().find(|&&e| e >= n) {
        return Err(Error::IndexOutOfRange { index, len: n });
    }
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(spec.eval(&sorted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;
    use std::collections::BTreeSet;

    fn random_coverage(rng: &mut RngState, n: usize, universe: usize) -> SubmodularSpec<f64> {
        let covers = (0..n)
            .map(|_| (0..universe).filter(|_| rng.bernoulli(0.3)).collect())
            .collect();
        let w = (0..universe).map(|_| rng.unit() * 3.0).collect();
        SubmodularSpec::coverage(universe, covers, Some(w)).unwrap()
    }

    #[test]
    fn full_cover_unit_weights() {
        let f = SubmodularSpec::<f64>::coverage(5, vec![vec![0, 1, 2], vec![2, 3, 4]], None).unwrap();
        assert_eq!(eval_submodular(&f, &[0, 1]).unwrap(), 5.0);
        assert_eq!(eval_submodular(&f, &[]).unwrap(), 0.0);
    }

    #[test]
    fn modular_empty_is_zero() {
        let f = SubmodularSpec::modular(vec![1.0, 2.0]).unwrap();
        assert_eq!(eval_submodular(&f, &[]).unwrap(), 0.0);
        assert_eq!(eval_submodular(&f, &[0, 1]).unwrap(), 3.0);
        assert!(eval_submodular(&f, &[2]).is_err());
    }

    #[test]
    fn coverage_matches_set_union() {
        let mut rng = RngState::new(11);
        for _ in 0..50 {
            let universe = 70 + rng.below(30);
            let f = random_coverage(&mut rng, 8, universe);
            let SubmodularSpec::Coverage(c) = &f else { unreachable!() };
            let s: Vec<usize> = (0..8).filter(|_| rng.bernoulli(0.5)).collect();
            let union: BTreeSet<usize> = s.iter().flat_map(|&e| c.covers()[e].iter().copied()).collect();
            let expected: f64 = union.iter().map(|&i| c.uweights().unwrap()[i]).sum();
            assert!((f.eval(&s) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn coverage_is_monotone_and_submodular() {
        let mut rng = RngState::new(5);
        let n = 10;
        let f = random_coverage(&mut rng, n, 40);
        for _ in 0..1000 {
            // random chain A ⊆ B and x ∉ B
            let b: Vec<usize> = (0..n).filter(|_| rng.bernoulli(0.5)).collect();
            let a: Vec<usize> = b.iter().copied().filter(|_| rng.bernoulli(0.5)).collect();
            let outside: Vec<usize> = (0..n).filter(|e| !b.contains(e)).collect();
            assert!(f.eval(&a) <= f.eval(&b) + 1e-12);
            if outside.is_empty() {
                continue;
            }
            let x = outside[rng.below(outside.len())];
            let with = |s: &[usize]| {
                let mut v = s.to_vec();
                v.push(x);
                v
            };
            let gain_a = f.eval(&with(&a)) - f.eval(&a);
            let gain_b = f.eval(&with(&b)) - f.eval(&b);
            assert!(gain_a + 1e-9 >= gain_b);
        }
    }

    #[test]
    fn rejects_malformed() {
        assert!(SubmodularSpec::<f64>::modular(vec![-1.0]).is_err());
        assert!(SubmodularSpec::<f64>::coverage(2, vec![vec![2]], None).is_err());
        assert!(SubmodularSpec::<f64>::coverage(2, vec![vec![1]], Some(vec![1.0])).is_err());
    }

    #[test]
    fn zero_detection() {
        assert!(SubmodularSpec::<f64>::zero(4).is_identically_zero());
        let f = SubmodularSpec::<f64>::coverage(3, vec![vec![0]], Some(vec![0.0, 1.0, 1.0])).unwrap();
        assert!(f.is_identically_zero());
    }
}
