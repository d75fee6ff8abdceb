//! The anchor/witness pair loop shared by dispersion and diversification.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::{build_dks_from_ball, BallDecomposition};
use crate::dks::{brute_force_subdks, submodular_dks, SubDksParams};
use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::rng::RngState;
use crate::submodular::SetFunction;
use crate::Real;

/// How each ball subproblem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerMode {
    /// Exhaustive search over the subproblem; falls back to the scheme when
    /// too large.
    Exact,
    /// The randomized densest-subgraph scheme with `cfg.dks`.
    #[default]
    Scheme,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QptasConfig {
    pub epsilon: f64,
    pub inner: InnerMode,
    /// Subproblem parameters; `gamma` defaults to `0.00005 ε²`.
    pub dks: SubDksParams,
}

impl QptasConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            inner: InnerMode::Scheme,
            dks: SubDksParams::new(Self::inner_gamma(epsilon)),
        }
    }

    /// Exhaustive subproblems, for small instances.
    pub fn exact(epsilon: f64) -> Self {
        Self { inner: InnerMode::Exact, ..Self::new(epsilon) }
    }

    /// `0.00005 ε²`
    pub fn inner_gamma(epsilon: f64) -> f64 {
        0.00005 * epsilon * epsilon
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {} must lie in (0, 1]", self.epsilon)));
        }
        self.dks.validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PairDiagnostics {
    pub epsilon: f64,
    pub inner_gamma: f64,
    pub inner: InnerMode,
    pub pairs_total: usize,
    pub pairs_skipped: usize,
    pub pairs_solved: usize,
    /// Admissible pairs leaving a single point to choose.
    pub single_point_pairs: usize,
    pub exact_fallbacks: usize,
    /// Scheme runs that hit an enumeration cap or an exact-mode budget.
    pub incomplete_inner_runs: usize,
    pub theoretical_params_honored: bool,
    pub no_admissible_pair: bool,
    /// Largest gap between `disp(S)` and its outer/cross/inner split.
    pub decomposition_error: f64,
    pub best_pair: Option<(usize, usize)>,
    pub best_source: String,
}

/// `C ↦ scale · f(outer ∪ C)` on the ball's local labels.
struct BallBonus<'a, T, F: ?Sized> {
    f: &'a F,
    outer: &'a [usize],
    nodes: &'a [usize],
    scale: T,
}

impl<T: Real, F: SetFunction<T> + ?Sized> SetFunction<T> for BallBonus<'_, T, F> {
    fn ground_size(&self) -> usize {
        self.nodes.len()
    }

    fn eval(&self, s: &[usize]) -> T {
        let mut all: Vec<usize> = self.outer.to_vec();
        all.extend(s.iter().map(|&i| self.nodes[i]));
        self.f.eval(&all) * self.scale
    }
}

pub(crate) struct PairResult<T> {
    pub set: Vec<usize>,
    pub value: T,
    pub pair: (usize, usize),
}

enum Step<T> {
    Skipped,
    Solved { res: PairResult<T>, single: bool, fell_back: bool, incomplete: bool, err: f64 },
}

/// Ordered pairs `(u, v)`, `u ≠ v`, by `d(u, v)` descending then `(u, v)`.
pub(crate) fn ordered_pairs<T: Real>(inst: &MetricInstance<T>) -> Vec<(usize, usize)> {
    let n = inst.len();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    pairs.sort_by(|a, b| {
        inst.d(b.0, b.1)
            .partial_cmp(&inst.d(a.0, a.1))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(b))
    });
    pairs
}

/// Runs the ball reduction for every pair and returns the best
/// `S = T ∪ outer` under `disp(S) + f(S)`, ties to the smaller set.
pub(crate) fn search_pairs<T, F>(
    inst: &MetricInstance<T>,
    p: usize,
    f: &F,
    cfg: &QptasConfig,
    rng: &mut RngState,
) -> Result<(Option<PairResult<T>>, PairDiagnostics)>
where
    T: Real,
    F: SetFunction<T> + ?Sized,
{
    cfg.validate()?;
    let pairs = ordered_pairs(inst);
    let base_seed = rng.next_u64();
    let steps: Vec<Result<Step<T>>> = pairs
        .par_iter()
        .enumerate()
        .map(|(idx, &(u, v))| -> Result<Step<T>> {
            let dec = BallDecomposition::new(inst, p, u, v, cfg.epsilon)?;
            if !dec.admissible(p) {
                return Ok(Step::Skipped);
            }
            let objective = |s: &[usize]| inst.disp_of(s) + f.eval(s);
            if dec.k == 1 {
                // ring is empty here; add the inner point that helps most
                let mut best: Option<(Vec<usize>, T)> = None;
                for &x in &dec.inner {
                    let mut s = dec.outer.clone();
                    s.push(x);
                    s.sort_unstable();
                    let val = objective(&s);
                    if best.as_ref().is_none_or(|(_, b)| val > *b) {
                        best = Some((s, val));
                    }
                }
                let (set, value) = best.expect("anchor lies in its own ball");
                return Ok(Step::Solved { res: PairResult { set, value, pair: (u, v) }, single: true, fell_back: false, incomplete: false, err: 0.0 });
            }
            let (dks, dec, nodes) = build_dks_from_ball(inst, p, u, v, cfg.epsilon)?;
            let bonus = BallBonus { f, outer: &dec.outer, nodes: &nodes, scale: dec.scale() };
            let mut prng = RngState::derive(base_seed, &[idx as u64]);
            let (local, fell_back, incomplete) = match cfg.inner {
                InnerMode::Exact => match brute_force_subdks(&dks, &bonus) {
                    Ok((t, _)) => (t, false, false),
                    Err(e) if e.is_guard() => {
                        let out = submodular_dks(&dks, &bonus, &cfg.dks, &mut prng)?;
                        (out.set, true, !out.diagnostics.complete())
                    }
                    Err(e) => return Err(e),
                },
                InnerMode::Scheme => {
                    let out = submodular_dks(&dks, &bonus, &cfg.dks, &mut prng)?;
                    let incomplete = !out.diagnostics.complete();
                    (out.set, false, incomplete)
                }
            };
            let t: Vec<usize> = local.iter().map(|&i| nodes[i]).collect();
            let mut set: Vec<usize> = dec.outer.iter().chain(&t).copied().collect();
            set.sort_unstable();
            let split = inst.disp_of(&dec.outer) + inst.cross_of(&dec.outer, &t) + inst.disp_of(&t);
            let err = (inst.disp_of(&set) - split).abs().as_f64();
            let value = objective(&set);
            Ok(Step::Solved { res: PairResult { set, value, pair: (u, v) }, single: false, fell_back, incomplete, err })
        })
        .collect();

    let mut diag = PairDiagnostics {
        epsilon: cfg.epsilon,
        inner_gamma: cfg.dks.gamma,
        inner: cfg.inner,
        pairs_total: pairs.len(),
        ..Default::default()
    };
    let mut best: Option<PairResult<T>> = None;
    for step in steps {
        match step? {
            Step::Skipped => diag.pairs_skipped += 1,
            Step::Solved { res, single, fell_back, incomplete, err } => {
                diag.pairs_solved += 1;
                diag.single_point_pairs += single as usize;
                diag.exact_fallbacks += fell_back as usize;
                diag.incomplete_inner_runs += incomplete as usize;
                diag.decomposition_error = diag.decomposition_error.max(err);
                let better = match &best {
                    None => true,
                    Some(b) => res.value > b.value || (res.value == b.value && res.set < b.set),
                };
                if better {
                    best = Some(res);
                }
            }
        }
    }
    diag.no_admissible_pair = best.is_none();
    diag.theoretical_params_honored = cfg.inner == InnerMode::Scheme
        && cfg.dks.gamma == QptasConfig::inner_gamma(cfg.epsilon)
        && cfg.dks.s.is_none()
        && cfg.dks.t.is_none()
        && diag.incomplete_inner_runs == 0;
    diag.best_pair = best.as_ref().map(|b| b.pair);
    Ok((best, diag))
}
