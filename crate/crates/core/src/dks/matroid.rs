//! Picking at most one candidate per part to maximize a set function of the
//! union (a partition matroid constraint).

use serde::{Deserialize, Serialize};

use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatroidMode {
    /// Best marginal pick until every non-empty part is used.
    Greedy,
    /// Every combination of one candidate per non-empty part.
    #[default]
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatroidChoice<T> {
    /// Chosen candidate index per part; `None` only for empty pools.
    pub picks: Vec<Option<usize>>,
    /// Sorted union of the chosen candidates.
    pub union: Vec<usize>,
    pub value: (T, T),
    /// Exact mode exceeded its budget and greedy was used instead.
    pub fell_back: bool,
}

fn union_of(pools: &[Vec<Vec<usize>>], picks: &[Option<usize>], buf: &mut Vec<usize>) {
    buf.clear();
    for (pool, pick) in pools.iter().zip(picks) {
        if let Some(c) = *pick {
            buf.extend_from_slice(&pool[c]);
        }
    }
    buf.sort_unstable();
}

#[inline]
fn beats<T: Real>(a: (T, T), b: (T, T)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && a.1 > b.1)
}

/// Maximizes `objective(union)` (compared lexicographically on the pair)
/// over one candidate per non-empty pool. The objective should be monotone
/// submodular in its first component for the greedy mode to be meaningful.
///
/// Exact mode gives up when the number of combinations exceeds `budget` and
/// runs greedy instead, setting `fell_back`.
pub fn matroid_maximize<T, F>(pools: &[Vec<Vec<usize>>], objective: F, mode: MatroidMode, budget: u128) -> MatroidChoice<T>
where
    T: Real,
    F: Fn(&[usize]) -> (T, T),
{
    let live: Vec<usize> = (0..pools.len()).filter(|&i| !pools[i].is_empty()).collect();
    let combos = live.iter().fold(1u128, |acc, &i| acc.saturating_mul(pools[i].len() as u128));
    match mode {
        MatroidMode::Exact if combos <= budget => exact(pools, &live, &objective),
        MatroidMode::Exact => MatroidChoice { fell_back: true, ..greedy(pools, &live, &objective) },
        MatroidMode::Greedy => greedy(pools, &live, &objective),
    }
}

fn greedy<T: Real, F: Fn(&[usize]) -> (T, T)>(pools: &[Vec<Vec<usize>>], live: &[usize], objective: &F) -> MatroidChoice<T> {
    let mut picks = vec![None; pools.len()];
    let mut buf = Vec::new();
    let mut value = objective(&[]);
    for _ in 0..live.len() {
        let mut best: Option<(usize, usize, (T, T))> = None;
        for &i in live {
            if picks[i].is_some() {
                continue;
            }
            for c in 0..pools[i].len() {
                picks[i] = Some(c);
                union_of(pools, &picks, &mut buf);
                let v = objective(&buf);
                if best.is_none_or(|(_, _, b)| beats(v, b)) {
                    best = Some((i, c, v));
                }
            }
            picks[i] = None;
        }
        let (i, c, v) = best.expect("an unused non-empty part remains");
        picks[i] = Some(c);
        value = v;
    }
    union_of(pools, &picks, &mut buf);
    MatroidChoice { picks, union: buf, value, fell_back: false }
}

fn exact<T: Real, F: Fn(&[usize]) -> (T, T)>(pools: &[Vec<Vec<usize>>], live: &[usize], objective: &F) -> MatroidChoice<T> {
    let mut picks: Vec<Option<usize>> = pools.iter().map(|p| (!p.is_empty()).then_some(0)).collect();
    let mut buf = Vec::new();
    let mut best: Option<(Vec<Option<usize>>, (T, T))> = None;
    loop {
        union_of(pools, &picks, &mut buf);
        let v = objective(&buf);
        if best.as_ref().is_none_or(|(_, b)| beats(v, *b)) {
            best = Some((picks.clone(), v));
        }
        // odometer over live parts, last part fastest
        let mut advanced = false;
        for &i in live.iter().rev() {
            let c = picks[i].as_mut().expect("live part");
            *c += 1;
            if *c < pools[i].len() {
                advanced = true;
                break;
            }
            *c = 0;
        }
        if !advanced {
            break;
        }
    }
    let (picks, value) = best.expect("at least one combination");
    union_of(pools, &picks, &mut buf);
    MatroidChoice { picks, union: buf, value, fell_back: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;
    use crate::submodular::{SetFunction, SubmodularSpec};
    use itertools::Itertools;

    fn with_zero<T: Real>(v: T) -> (T, T) {
        (v, T::zero())
    }

    #[test]
    fn modular_disjoint_parts() {
        let weights = vec![0.5, 2.0, 1.0, 0.1, 3.0, 0.2, 0.7];
        let h = SubmodularSpec::modular(weights.clone()).unwrap();
        let pools = vec![vec![vec![0], vec![1]], vec![vec![2, 3], vec![4]], vec![], vec![vec![5], vec![6]]];
        let f = |u: &[usize]| with_zero(h.eval(u));
        let g = matroid_maximize(&pools, f, MatroidMode::Greedy, 1000);
        let e = matroid_maximize(&pools, f, MatroidMode::Exact, 1000);
        assert_eq!(g.picks, vec![Some(1), Some(1), None, Some(1)]);
        assert_eq!(g.picks, e.picks);
        assert_eq!(e.union, vec![1, 4, 6]);
    }

    #[test]
    fn single_part() {
        let h = SubmodularSpec::<f64>::coverage(4, vec![vec![0], vec![1, 2], vec![0, 3], vec![2]], None).unwrap();
        let pools = vec![vec![vec![0, 3], vec![1], vec![2, 3]]];
        let f = |u: &[usize]| with_zero(h.eval(u));
        let g = matroid_maximize(&pools, f, MatroidMode::Greedy, 10);
        let e = matroid_maximize(&pools, f, MatroidMode::Exact, 10);
        assert_eq!(g.picks, e.picks);
        assert_eq!(e.value.0, 3.0);
    }

    #[test]
    fn coverage_three_by_three() {
        let mut rng = RngState::new(44);
        for _ in 0..100 {
            let covers: Vec<Vec<usize>> = (0..9).map(|_| (0..12).filter(|_| rng.bernoulli(0.3)).collect()).collect();
            let h = SubmodularSpec::coverage(12, covers, None).unwrap();
            let pools: Vec<Vec<Vec<usize>>> = (0..3).map(|p| (0..3).map(|c| vec![3 * p + c]).collect()).collect();
            let f = |u: &[usize]| with_zero(h.eval(u));
            let e = matroid_maximize(&pools, f, MatroidMode::Exact, 1000);
            let g = matroid_maximize(&pools, f, MatroidMode::Greedy, 1000);
            let oracle = (0..3)
                .map(|_| 0..3)
                .multi_cartesian_product()
                .map(|c| h.eval(&[c[0], 3 + c[1], 6 + c[2]]))
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(e.value.0, oracle);
            assert!(g.value.0 >= 0.5 * e.value.0);
        }
    }

    #[test]
    fn budget_fallback() {
        let h = SubmodularSpec::modular(vec![1.0; 6]).unwrap();
        let pools = vec![vec![vec![0], vec![1]], vec![vec![2], vec![3]], vec![vec![4], vec![5]]];
        let r = matroid_maximize(&pools, |u: &[usize]| with_zero(h.eval(u)), MatroidMode::Exact, 7);
        assert!(r.fell_back);
        assert_eq!(r.union.len(), 3);
    }

    #[test]
    fn ties_use_second_key() {
        let pools = vec![vec![vec![0], vec![1], vec![2]]];
        let r = matroid_maximize(&pools, |u: &[usize]| (0.0, if u == [1] { 1.0 } else { 0.0 }), MatroidMode::Exact, 10);
        assert_eq!(r.picks, vec![Some(1)]);
    }
}
