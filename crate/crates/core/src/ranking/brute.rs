use itertools::Itertools;

use super::{cover_times_from_positions, GainFunction, Ranking};
use crate::error::{Error, Result};
use crate::setsystem::SetSystemInstance;
use crate::Real;

/// Largest ground set the exhaustive oracle accepts (9! = 362880 orders).
pub const BRUTE_FORCE_MAX_N: usize = 9;

/// Exact DCG optimum under the standard gain.
pub fn brute_force_dcg<T: Real>(inst: &SetSystemInstance) -> Result<(Ranking, T)> {
    brute_force_dcg_with(inst, GainFunction::DcgStandard)
}

/// Exact optimum over all `n!` orders. Ties go to the lexicographically
/// smallest permutation.
pub fn brute_force_dcg_with<T: Real>(inst: &SetSystemInstance, f: GainFunction) -> Result<(Ranking, T)> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::GuardExceeded {
            what: "brute-force DCG ground set",
            count: n as u128,
            limit: BRUTE_FORCE_MAX_N as u128,
        });
    }
    let gains: Vec<T> = (0..=n).map(|t| if t == 0 { T::zero() } else { f.at(t) }).collect();
    let mut pos = vec![0usize; n];
    let mut best: Option<(Vec<usize>, T)> = None;
    for perm in (0..n).permutations(n) {
        for (i, &e) in perm.iter().enumerate() {
            pos[e] = i;
        }
        let value: T = cover_times_from_positions(&pos, inst).into_iter().map(|t| gains[t]).sum();
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((perm, value));
        }
    }
    let (perm, value) = best.expect("at least one permutation");
    Ok((Ranking::new(perm, inst)?, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsystem::CoverSet;

    #[test]
    fn single_element() {
        let inst = SetSystemInstance::new(
            1,
            vec![CoverSet { members: vec![0], k: 1 }, CoverSet { members: vec![0], k: 1 }],
        )
        .unwrap();
        let (r, opt) = brute_force_dcg::<f64>(&inst).unwrap();
        assert_eq!(r.perm(), &[0]);
        assert_eq!(opt, 2.0);
    }

    #[test]
    fn hand_instance() {
        let inst = SetSystemInstance::new(
            3,
            vec![CoverSet { members: vec![0], k: 1 }, CoverSet { members: vec![1, 2], k: 1 }],
        )
        .unwrap();
        let (r, opt) = brute_force_dcg::<f64>(&inst).unwrap();
        assert!((opt - (1.0 + 1.0 / 3f64.log2())).abs() < 1e-12);
        assert_eq!(r.perm(), &[0, 1, 2]);
    }

    #[test]
    fn guard() {
        let inst = SetSystemInstance::new(10, vec![CoverSet { members: vec![0], k: 1 }]).unwrap();
        assert!(brute_force_dcg::<f64>(&inst).unwrap_err().is_guard());
    }
}
