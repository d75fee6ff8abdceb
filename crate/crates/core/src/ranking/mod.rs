//! Diversified search ranking under the DCG objective.
//!
//! A ranking is a permutation of the ground set; set `S` is covered at the
//! first prefix length containing `k_S` of its members, and it contributes
//! `f(t)` for a non-increasing gain `f` (standard DCG: `1/log2(t + 1)`).

mod brute;
mod ptas;
mod relaxation;
mod rounding;

pub use brute::{brute_force_dcg, brute_force_dcg_with, BRUTE_FORCE_MAX_N};
pub use ptas::{ptas_dcg, PtasConfig, PtasDiagnostics, PtasOutcome};
pub use relaxation::{build_dcg_lp, split_time_bound, solve_dcg_lp, split_times, DcgRelaxation};
pub use rounding::{round_lp, tau, RoundingParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::setsystem::SetSystemInstance;
use crate::Real;

/// Position discount `f: [n] → (0, 1]`, non-increasing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "shift")]
pub enum GainFunction {
    /// `1 / log2(t + 1)`
    DcgStandard,
    /// `1 / log2(t + u + 1)`: standard DCG seen from `u` positions further down.
    DcgShifted(usize),
    Constant,
}

impl GainFunction {
    /// Closed form, valid for any real `t ≥ 1` (also beyond the ground set).
    pub fn eval<T: Real>(&self, t: T) -> T {
        match *self {
            GainFunction::DcgStandard => T::one() / (t + T::one()).log2(),
            GainFunction::DcgShifted(u) => T::one() / (t + T::of_usize(u) + T::one()).log2(),
            GainFunction::Constant => T::one(),
        }
    }

    pub fn at<T: Real>(&self, t: usize) -> T {
        self.eval(T::of_usize(t))
    }
}

/// Earliest prefix length of `perm` containing `k` members of `members`.
pub fn cover_time(perm: &[usize], members: &[usize], k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidParameter("coverage requirement must be at least 1".into()));
    }
    if k > members.len() {
        return Err(Error::NoCoverTime { k, size: members.len() });
    }
    let mut seen = 0;
    for (pos, e) in perm.iter().enumerate() {
        if members.contains(e) {
            seen += 1;
            if seen == k {
                return Ok(pos + 1);
            }
        }
    }
    Err(Error::NoCoverTime { k, size: seen })
}

/// A permutation of the ground set together with its per-set cover times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    perm: Vec<usize>,
    cover_times: Vec<usize>,
}

impl Ranking {
    pub fn new(perm: Vec<usize>, inst: &SetSystemInstance) -> Result<Self> {
        let n = inst.n();
        if perm.len() != n {
            return Err(Error::ShapeMismatch(format!("ranking has {} entries, expected {n}", perm.len())));
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &e) in perm.iter().enumerate() {
            if e >= n {
                return Err(Error::IndexOutOfRange { index: e, len: n });
            }
            if pos[e] != usize::MAX {
                return Err(Error::InvalidInstance(format!("element {e} appears twice in the ranking")));
            }
            pos[e] = i;
        }
        let cover_times = cover_times_from_positions(&pos, inst);
        Ok(Self { perm, cover_times })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn cover_times(&self) -> &[usize] {
        &self.cover_times
    }

    pub fn dcg<T: Real>(&self, f: GainFunction) -> T {
        self.cover_times.iter().map(|&t| f.at::<T>(t)).sum()
    }
}

/// Cover times given `pos[e]` = 0-based position of `e`.
pub(crate) fn cover_times_from_positions(pos: &[usize], inst: &SetSystemInstance) -> Vec<usize> {
    let mut buf = Vec::new();
    inst.sets()
        .iter()
        .map(|s| {
            buf.clear();
            buf.extend(s.members.iter().map(|&e| pos[e]));
            let (_, kth, _) = buf.select_nth_unstable(s.k - 1);
            *kth + 1
        })
        .collect()
}

/// DCG of `perm` on `inst` under gain `f`.
pub fn dcg_value<T: Real>(perm: &[usize], inst: &SetSystemInstance, f: GainFunction) -> Result<T> {
    Ok(Ranking::new(perm.to_vec(), inst)?.dcg(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;
    use crate::setsystem::CoverSet;

    #[test]
    fn cover_time_examples() {
        assert_eq!(cover_time(&[0, 1, 2], &[0], 1).unwrap(), 1);
        // π = (3, 1, 2) in 1-based labels
        assert_eq!(cover_time(&[2, 0, 1], &[0, 1], 2).unwrap(), 3);
        assert!(matches!(cover_time(&[0, 1], &[0], 2), Err(Error::NoCoverTime { .. })));
    }

    #[test]
    fn cover_time_matches_scan() {
        let mut rng = RngState::new(8);
        for _ in 0..200 {
            let n = 1 + rng.below(9);
            let mut perm: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut perm);
            let members: Vec<usize> = (0..n).filter(|_| rng.bernoulli(0.5)).collect();
            if members.is_empty() {
                continue;
            }
            let k = 1 + rng.below(members.len());
            let inst = SetSystemInstance::new(n, vec![CoverSet { members: members.clone(), k }]).unwrap();
            let ranking = Ranking::new(perm.clone(), &inst).unwrap();
            // independent scan: smallest prefix with k members
            let scan = (1..=n)
                .find(|&t| perm[..t].iter().filter(|e| members.contains(e)).count() >= k)
                .unwrap();
            assert_eq!(ranking.cover_times()[0], scan);
            assert_eq!(cover_time(&perm, &members, k).unwrap(), scan);
        }
    }

    #[test]
    fn dcg_examples() {
        let inst = SetSystemInstance::new(2, vec![CoverSet { members: vec![0, 1], k: 1 }]).unwrap();
        assert_eq!(dcg_value::<f64>(&[0, 1], &inst, GainFunction::DcgStandard).unwrap(), 1.0);
        let inst = SetSystemInstance::new(
            3,
            vec![CoverSet { members: vec![0], k: 1 }, CoverSet { members: vec![1, 2], k: 2 }],
        )
        .unwrap();
        assert_eq!(dcg_value::<f64>(&[2, 1, 0], &inst, GainFunction::Constant).unwrap(), 2.0);
    }

    #[test]
    fn rejects_non_permutations() {
        let inst = SetSystemInstance::new(2, vec![CoverSet { members: vec![0], k: 1 }]).unwrap();
        assert!(Ranking::new(vec![0, 0], &inst).is_err());
        assert!(Ranking::new(vec![0], &inst).is_err());
        assert!(Ranking::new(vec![0, 2], &inst).is_err());
    }

    #[test]
    fn gains_are_non_increasing_and_bounded() {
        for f in [GainFunction::DcgStandard, GainFunction::DcgShifted(3), GainFunction::Constant] {
            let vals: Vec<f64> = (1..30).map(|t| f.at(t)).collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0]));
            assert!(vals.iter().all(|&v| v > 0.0 && v <= 1.0));
        }
        assert_eq!(GainFunction::DcgStandard.at::<f64>(1), 1.0);
        assert_eq!(GainFunction::DcgShifted(2).at::<f64>(1), GainFunction::DcgStandard.at::<f64>(3));
    }
}
