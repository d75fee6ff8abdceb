use std::collections::HashSet;

use super::{solve_lp_with, Constraint, LinearProgram, LpSolution, PivotRule};
use crate::error::Result;
use crate::Real;

/// A constraint produced by a separation oracle, with a deduplication key.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut<T> {
    pub key: Vec<usize>,
    pub constraint: Constraint<T>,
}

#[derive(Debug, Clone)]
pub struct CutLoopOutcome<T> {
    pub solution: LpSolution<T>,
    /// The base program plus every cut added.
    pub lp: LinearProgram<T>,
    pub rounds: usize,
    pub cuts_added: usize,
    /// Oracle returned no violated constraint for the final solution.
    pub converged: bool,
    /// Oracle only returned cuts that were already present.
    pub stalled: bool,
    /// Violated constraints still reported when the loop stopped.
    pub remaining_violations: usize,
    pub objective_trace: Vec<T>,
}

/// Re-solves `base` with the oracle's cuts until the oracle reports nothing,
/// `max_rounds` cut rounds were added, or the LP stops being optimal.
pub fn solve_with_cuts<T, F>(
    base: &LinearProgram<T>,
    mut oracle: F,
    max_rounds: usize,
    rule: PivotRule,
) -> Result<CutLoopOutcome<T>>
where
    T: Real,
    F: FnMut(&[T]) -> Vec<Cut<T>>,
{
    let mut lp = base.clone();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut rounds = 0;
    let mut cuts_added = 0;
    let mut trace = Vec::new();
    loop {
        let solution = solve_lp_with(&lp, rule)?;
        if !solution.is_optimal() {
            return Ok(CutLoopOutcome {
                solution,
                lp,
                rounds,
                cuts_added,
                converged: false,
                stalled: false,
                remaining_violations: 0,
                objective_trace: trace,
            });
        }
        trace.push(solution.objective);
        let cuts = oracle(&solution.x);
        let reported = cuts.len();
        let fresh: Vec<Cut<T>> = cuts.into_iter().filter(|c| !seen.contains(&c.key)).collect();
        let done = reported == 0 || fresh.is_empty() || rounds >= max_rounds;
        if done {
            return Ok(CutLoopOutcome {
                solution,
                lp,
                rounds,
                cuts_added,
                converged: reported == 0,
                stalled: reported > 0 && fresh.is_empty(),
                remaining_violations: reported,
                objective_trace: trace,
            });
        }
        for cut in fresh {
            if seen.insert(cut.key) {
                lp.add(cut.constraint);
                cuts_added += 1;
            }
        }
        rounds += 1;
    }
}
