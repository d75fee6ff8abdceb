use itertools::Itertools;

use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::submodular::SetFunction;
use crate::Real;

/// Largest number of `p`-subsets the exhaustive oracles visit.
pub const BRUTE_FORCE_MAX_SUBSETS: u128 = 1_000_000;

pub(crate) fn check_p<T: Real>(inst: &MetricInstance<T>, p: usize) -> Result<()> {
    if p == 0 || p > inst.len() {
        return Err(Error::InvalidParameter(format!("p = {p} must lie in 1..={}", inst.len())));
    }
    Ok(())
}

/// Pair greedy: take the farthest remaining pair until `p` points are
/// chosen; for odd `p` the last point maximizes its distance sum to the
/// chosen ones. Ties go to the lowest indices.
pub fn greedy_dispersion<T: Real>(inst: &MetricInstance<T>, p: usize) -> Result<Vec<usize>> {
    check_p(inst, p)?;
    let n = inst.len();
    let mut used = vec![false; n];
    let mut chosen = Vec::with_capacity(p);
    while chosen.len() + 2 <= p {
        let mut best: Option<(usize, usize, T)> = None;
        for i in (0..n).filter(|&i| !used[i]) {
            for j in (i + 1..n).filter(|&j| !used[j]) {
                let d = inst.d(i, j);
                if best.is_none_or(|(_, _, b)| d > b) {
                    best = Some((i, j, d));
                }
            }
        }
        let (i, j, _) = best.expect("two unused points remain");
        used[i] = true;
        used[j] = true;
        chosen.extend([i, j]);
    }
    if chosen.len() < p {
        let x = (0..n)
            .filter(|&x| !used[x])
            .fold(None::<(usize, T)>, |acc, x| {
                let v = inst.point_disp(x, &chosen);
                match acc {
                    Some((_, b)) if v <= b => acc,
                    _ => Some((x, v)),
                }
            })
            .expect("an unused point remains")
            .0;
        chosen.push(x);
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Adds, one at a time, the point with the largest
/// `f(S ∪ {x}) − f(S) + disp({x}, S)`; ties to the lowest index.
pub fn marginal_greedy<T, F>(inst: &MetricInstance<T>, p: usize, f: &F) -> Result<Vec<usize>>
where
    T: Real,
    F: SetFunction<T> + ?Sized,
{
    check_p(inst, p)?;
    let n = inst.len();
    let mut used = vec![false; n];
    let mut chosen: Vec<usize> = Vec::with_capacity(p);
    let mut f_cur = f.eval(&chosen);
    let mut trial = Vec::with_capacity(p);
    while chosen.len() < p {
        let mut best: Option<(usize, T, T)> = None;
        for x in (0..n).filter(|&x| !used[x]) {
            trial.clear();
            trial.extend_from_slice(&chosen);
            trial.push(x);
            let fx = f.eval(&trial);
            let gain = fx - f_cur + inst.point_disp(x, &chosen);
            if best.is_none_or(|(_, g, _)| gain > g) {
                best = Some((x, gain, fx));
            }
        }
        let (x, _, fx) = best.expect("an unused point remains");
        used[x] = true;
        chosen.push(x);
        f_cur = fx;
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Exact maximizer of `disp(S) + f(S)` over `p`-sets; ties to the
/// lexicographically smallest set.
pub(crate) fn brute_force_objective<T, F>(inst: &MetricInstance<T>, p: usize, f: &F) -> Result<(Vec<usize>, T)>
where
    T: Real,
    F: SetFunction<T> + ?Sized,
{
    check_p(inst, p)?;
    let n = inst.len();
    let count = (0..p).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1));
    if count > BRUTE_FORCE_MAX_SUBSETS {
        return Err(Error::GuardExceeded { what: "brute-force p-subsets", count, limit: BRUTE_FORCE_MAX_SUBSETS });
    }
    let mut best: Option<(Vec<usize>, T)> = None;
    for s in (0..n).combinations(p) {
        let v = inst.disp_of(&s) + f.eval(&s);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((s, v));
        }
    }
    Ok(best.expect("at least one subset"))
}
