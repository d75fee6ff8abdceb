use itertools::Itertools;

use super::DksInstance;
use crate::error::{Error, Result};
use crate::submodular::SetFunction;
use crate::Real;

/// Largest number of completions the exhaustive oracle visits.
pub const BRUTE_FORCE_MAX_SUBSETS: u128 = 1_000_000;

/// Exact maximizer of `h(T) + den(T)` over `k`-sets `T ⊇ I`, with `den` read
/// as 0 below two nodes. Ties go to the lexicographically smallest set.
pub fn brute_force_subdks<T, H>(inst: &DksInstance<T>, h: &H) -> Result<(Vec<usize>, T)>
where
    T: Real,
    H: SetFunction<T> + ?Sized,
{
    let free = inst.free_nodes();
    let k_free = inst.k_free();
    let count = (0..k_free).fold(1u128, |acc, i| acc.saturating_mul((free.len() - i) as u128) / (i as u128 + 1));
    if count > BRUTE_FORCE_MAX_SUBSETS {
        return Err(Error::GuardExceeded {
            what: "brute-force DkS completions",
            count,
            limit: BRUTE_FORCE_MAX_SUBSETS,
        });
    }
    let forced = inst.forced();
    let mut best: Option<(Vec<usize>, T)> = None;
    let mut set = Vec::with_capacity(inst.k());
    for extra in free.iter().copied().combinations(k_free) {
        set.clear();
        set.extend(forced.iter().merge(extra.iter()).copied());
        let value = h.eval(&set) + inst.den_or_zero(&set);
        let better = match &best {
            None => true,
            Some((b, bv)) => value > *bv || (value == *bv && set < *b),
        };
        if better {
            best = Some((set.clone(), value));
        }
    }
    Ok(best.expect("at least one completion"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;
    use crate::submodular::{SubmodularSpec, ZeroFunction};

    #[test]
    fn unit_clique_and_reverse_order() {
        let mut rng = RngState::new(6);
        for _ in 0..20 {
            let n = 5 + rng.below(5);
            let mut t = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    t.push((i, j, (rng.unit() * 8.0).floor() / 8.0));
                }
            }
            let k = 2 + rng.below(3);
            let inst = DksInstance::new(n, &t, vec![], k).unwrap();
            let h = SubmodularSpec::coverage(6, (0..n).map(|_| vec![rng.below(6)]).collect(), None).unwrap();
            let (set, value) = brute_force_subdks(&inst, &h).unwrap();
            // reverse lexicographic enumeration must find the same value
            let mut other = f64::NEG_INFINITY;
            for c in (0..n).rev().combinations(k) {
                let mut c = c;
                c.sort_unstable();
                other = other.max(h.eval(&c) + inst.den_or_zero(&c));
            }
            assert_eq!(value, other);
            assert_eq!(value, h.eval(&set) + inst.den(&set).unwrap());
        }
    }

    #[test]
    fn guard() {
        let inst = DksInstance::<f64>::new(40, &[], vec![], 20).unwrap();
        assert!(brute_force_subdks(&inst, &ZeroFunction { n: 40 }).unwrap_err().is_guard());
    }
}
