//! Max-sum dispersion: choose `p` points maximizing the sum of their
//! pairwise distances.
//!
//! The approximation scheme guesses an anchor `u` of the optimum and the
//! farthest point `v` left out of it. Everything farther than `Δ* = 20 Δ/ε`
//! from `u` is taken outright, the shell between `Δ = d(u, v)` and `Δ*` is
//! forced, and the rest is a densest-subgraph problem on the ball.

mod ball;
mod baseline;
mod pairs;

pub use ball::{build_dks_from_ball, BallDecomposition};
pub use baseline::{greedy_dispersion, marginal_greedy, BRUTE_FORCE_MAX_SUBSETS};
pub use pairs::{InnerMode, PairDiagnostics, QptasConfig};

pub(crate) use baseline::{brute_force_objective, check_p};
pub(crate) use pairs::search_pairs;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::rng::RngState;
use crate::submodular::{SetFunction, ZeroFunction};
use crate::Real;

#[derive(Debug, Clone)]
pub struct DispersionOutcome<T> {
    /// Sorted, `p` points.
    pub set: Vec<usize>,
    pub value: T,
    pub diagnostics: PairDiagnostics,
}

/// Best of the pair-loop candidates and both greedy baselines under
/// `disp + f`. Shared with diversification.
pub(crate) fn solve_with_bonus<T, F>(
    inst: &MetricInstance<T>,
    p: usize,
    f: &F,
    cfg: &QptasConfig,
    rng: &mut RngState,
) -> Result<DispersionOutcome<T>>
where
    T: Real,
    F: SetFunction<T> + ?Sized,
{
    check_p(inst, p)?;
    let (best, mut diag) = search_pairs(inst, p, f, cfg, rng)?;
    let objective = |s: &[usize]| inst.disp_of(s) + f.eval(s);
    let mut pool: Vec<(&str, Vec<usize>, T)> = Vec::with_capacity(3);
    if let Some(b) = best {
        pool.push(("pair", b.set, b.value));
    }
    let g = greedy_dispersion(inst, p)?;
    let gv = objective(&g);
    pool.push(("greedy_pair", g, gv));
    let m = marginal_greedy(inst, p, f)?;
    let mv = objective(&m);
    pool.push(("greedy_marginal", m, mv));
    let (source, set, value) = pool
        .into_iter()
        .reduce(|a, b| if b.2 > a.2 || (b.2 == a.2 && b.1 < a.1) { b } else { a })
        .expect("non-empty pool");
    diag.best_source = source.to_string();
    if source != "pair" {
        diag.best_pair = None;
    }
    Ok(DispersionOutcome { set, value, diagnostics: diag })
}

/// Approximation scheme for max-sum dispersion. The result is never worse
/// than [`greedy_dispersion`].
pub fn qptas_dispersion<T: Real>(inst: &MetricInstance<T>, p: usize, cfg: &QptasConfig, rng: &mut RngState) -> Result<DispersionOutcome<T>> {
    solve_with_bonus(inst, p, &ZeroFunction { n: inst.len() }, cfg, rng)
}

/// Exact optimum over all `p`-subsets, ties to the lexicographically
/// smallest set.
pub fn brute_force_dispersion<T: Real>(inst: &MetricInstance<T>, p: usize) -> Result<(Vec<usize>, T)> {
    brute_force_objective(inst, p, &ZeroFunction { n: inst.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuralCheck {
    /// Member with the smallest distance sum to the rest of the set.
    pub u_min: usize,
    /// Outside point attaining the smallest ratio.
    pub witness: Option<usize>,
    /// `min_v value · 16 / (p (p − 1) d(u_min, v))` over outside `v` with
    /// `d > 0`; infinite when there is none.
    pub ratio: f64,
}

pub(crate) fn structural_ratio<T: Real>(inst: &MetricInstance<T>, set: &[usize], value: T) -> Result<StructuralCheck> {
    inst.check_indices(set)?;
    let p = set.len();
    if p < 2 {
        return Err(Error::InvalidParameter("the bound needs at least two chosen points".into()));
    }
    if p >= inst.len() {
        return Err(Error::InvalidParameter("every point is chosen; no outside witness exists".into()));
    }
    let u_min = set
        .iter()
        .copied()
        .fold(None::<(usize, T)>, |acc, u| {
            let v = inst.point_disp(u, set);
            match acc {
                Some((a, b)) if v > b || (v == b && a < u) => acc,
                _ => Some((u, v)),
            }
        })
        .expect("non-empty")
        .0;
    let lead = value.as_f64() * 16.0 / (p * (p - 1)) as f64;
    let mut out = StructuralCheck { u_min, witness: None, ratio: f64::INFINITY };
    for v in (0..inst.len()).filter(|v| !set.contains(v)) {
        let delta = inst.d(u_min, v).as_f64();
        if delta > 0.0 && lead / delta < out.ratio {
            out.ratio = lead / delta;
            out.witness = Some(v);
        }
    }
    Ok(out)
}

/// Lower bound check for an optimal set: `disp(S) ≥ p(p − 1) d(u_min, v)/16`
/// for every `v ∉ S`. Holds (ratio ≥ 1) whenever `set` is optimal.
pub fn check_structural_lemma<T: Real>(inst: &MetricInstance<T>, set: &[usize]) -> Result<StructuralCheck> {
    structural_ratio(inst, set, inst.disp(set)?)
}
