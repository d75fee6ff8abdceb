//! Max-sum diversification: maximize `dive(S) = disp(S) + f(S)` over
//! `p`-sets for a monotone submodular `f`.
//!
//! Uses the same pair loop as [`crate::dispersion`]; each ball subproblem
//! carries the bonus `h(C) = f(outer ∪ ring ∪ C) / (k (k − 1) Δ*)`.

use serde::Serialize;

use crate::dispersion::{
    brute_force_objective, check_p, marginal_greedy, solve_with_bonus, structural_ratio, DispersionOutcome, QptasConfig,
    StructuralCheck,
};
use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::rng::RngState;
use crate::submodular::{eval_submodular, SetFunction, SubmodularSpec};
use crate::Real;

/// `disp(S) + f(S)`.
pub fn dive<T: Real>(s: &[usize], inst: &MetricInstance<T>, f: &SubmodularSpec<T>) -> Result<T> {
    Ok(inst.disp(s)? + eval_submodular(f, s)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversificationInstance<T> {
    pub metric: MetricInstance<T>,
    pub f: SubmodularSpec<T>,
    pub p: usize,
}

impl<T: Real> DiversificationInstance<T> {
    pub fn new(metric: MetricInstance<T>, f: SubmodularSpec<T>, p: usize) -> Result<Self> {
        if f.ground_size() != metric.len() {
            return Err(Error::ShapeMismatch(format!(
                "submodular function is over {} elements, metric has {} points",
                f.ground_size(),
                metric.len()
            )));
        }
        check_p(&metric, p)?;
        Ok(Self { metric, f, p })
    }

    pub fn dive(&self, s: &[usize]) -> Result<T> {
        dive(s, &self.metric, &self.f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiversificationOptimum<T> {
    pub set: Vec<usize>,
    pub value: T,
    pub disp: T,
    pub f: T,
}

/// Pair-loop scheme with the scaled bonus; never worse than the greedy
/// baselines.
pub fn diversify<T: Real>(dinst: &DiversificationInstance<T>, cfg: &QptasConfig, rng: &mut RngState) -> Result<DispersionOutcome<T>> {
    solve_with_bonus(&dinst.metric, dinst.p, &dinst.f, cfg, rng)
}

/// Marginal greedy on `dive`, ties to the lowest index. A baseline without a
/// certified ratio.
pub fn greedy_diversification<T: Real>(dinst: &DiversificationInstance<T>) -> Result<Vec<usize>> {
    marginal_greedy(&dinst.metric, dinst.p, &dinst.f)
}

/// Exact optimum with its dispersion and bonus parts.
pub fn brute_force_diversification<T: Real>(dinst: &DiversificationInstance<T>) -> Result<DiversificationOptimum<T>> {
    let (set, value) = brute_force_objective(&dinst.metric, dinst.p, &dinst.f)?;
    let disp = dinst.metric.disp_of(&set);
    let f = dinst.f.eval(&set);
    Ok(DiversificationOptimum { set, value, disp, f })
}

/// As [`crate::dispersion::check_structural_lemma`] with `dive(S)` on the
/// left; `u_min` still minimizes the distance sum only.
pub fn check_div_structural_lemma<T: Real>(dinst: &DiversificationInstance<T>, set: &[usize]) -> Result<StructuralCheck> {
    structural_ratio(&dinst.metric, set, dinst.dive(set)?)
}
