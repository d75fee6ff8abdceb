//! The knapsack-cover LP relaxation of DCG ranking.
//!
//! `x[e][t]` is the fraction of element `e` at position `t`, `y[S][t]` the
//! extent to which `S` is covered by time `t` (with `y[S][0] = 0`). The
//! objective `Σ_S Σ_t (y[S][t] − y[S][t−1]) f(t)` telescopes into per-variable
//! coefficients `f(t) − f(t+1)` (and `f(n)` at `t = n`).

use super::GainFunction;
use crate::error::Result;
use crate::lp::{dcg_separation, solve_with_cuts, Constraint, DcgLayout, LinearProgram, LpSolution, PivotRule, Relation};
use crate::setsystem::SetSystemInstance;
use crate::Real;

/// Base LP: assignment equalities, monotone `y`, unit boxes. The knapsack
/// family is left to [`dcg_separation`].
pub fn build_dcg_lp<T: Real>(inst: &SetSystemInstance, f: GainFunction) -> (LinearProgram<T>, DcgLayout) {
    let layout = DcgLayout::for_instance(inst);
    let (n, m) = (layout.n, layout.m);
    let mut lp = LinearProgram::new(layout.num_vars());
    for s in 0..m {
        for t in 1..=n {
            let next = if t < n { f.at::<T>(t + 1) } else { T::zero() };
            lp.objective[layout.y(s, t)] = f.at::<T>(t) - next;
        }
    }
    for b in lp.bounds.iter_mut() {
        *b = (T::zero(), T::one());
    }
    for t in 1..=n {
        let terms = (0..n).map(|e| (layout.x(e, t), T::one())).collect();
        lp.add(Constraint::new(terms, Relation::Eq, T::one()));
    }
    for e in 0..n {
        let terms = (1..=n).map(|t| (layout.x(e, t), T::one())).collect();
        lp.add(Constraint::new(terms, Relation::Eq, T::one()));
    }
    for s in 0..m {
        for t in 2..=n {
            lp.add(Constraint::new(
                vec![(layout.y(s, t), T::one()), (layout.y(s, t - 1), -T::one())],
                Relation::Ge,
                T::zero(),
            ));
        }
    }
    (lp, layout)
}

/// Solved relaxation plus cut-loop bookkeeping.
#[derive(Debug, Clone)]
pub struct DcgRelaxation<T> {
    pub layout: DcgLayout,
    pub solution: LpSolution<T>,
    pub rounds: usize,
    pub cuts_added: usize,
    pub converged: bool,
}

impl<T: Real> DcgRelaxation<T> {
    pub fn objective(&self) -> T {
        self.solution.objective
    }

    pub fn x(&self) -> &[T] {
        self.layout.split(&self.solution.x).0
    }

    pub fn y(&self) -> &[T] {
        self.layout.split(&self.solution.x).1
    }
}

/// Solves the relaxation by constraint generation over the knapsack family.
pub fn solve_dcg_lp<T: Real>(
    inst: &SetSystemInstance,
    f: GainFunction,
    max_rounds: usize,
    rule: PivotRule,
) -> Result<DcgRelaxation<T>> {
    let (base, layout) = build_dcg_lp::<T>(inst, f);
    let out = solve_with_cuts(
        &base,
        |v: &[T]| {
            let (x, y) = layout.split(v);
            dcg_separation(x, y, inst)
                .map(|cuts| cuts.into_iter().map(|c| c.into_cut()).collect())
                .unwrap_or_default()
        },
        max_rounds,
        rule,
    )?;
    Ok(DcgRelaxation {
        layout,
        solution: out.solution,
        rounds: out.rounds,
        cuts_added: out.cuts_added,
        converged: out.converged,
    })
}

/// Per set, the largest `t ∈ [n]` with `y[S][t−1] ≤ η f(t)`.
pub fn split_times<T: Real>(y: &[T], layout: DcgLayout, f: GainFunction, eta: T) -> Vec<usize> {
    let n = layout.n;
    (0..layout.m)
        .map(|s| {
            (1..=n)
                .rev()
                .find(|&t| {
                    let prev = if t == 1 { T::zero() } else { y[s * n + (t - 2)] };
                    prev <= eta * f.at::<T>(t)
                })
                .unwrap_or(1)
        })
        .collect()
}

/// `(1 + η) Σ_S f(t*(S))`, an upper bound on the LP value of `y`.
pub fn split_time_bound<T: Real>(y: &[T], layout: DcgLayout, f: GainFunction, eta: T) -> T {
    let sum: T = split_times(y, layout, f, eta).into_iter().map(|t| f.at::<T>(t)).sum();
    (T::one() + eta) * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, KnapsackCut};
    use crate::ranking::brute_force_dcg;
    use crate::rng::RngState;
    use crate::setsystem::CoverSet;

    fn random_instance(rng: &mut RngState, n: usize, m: usize) -> SetSystemInstance {
        let sets = (0..m)
            .map(|_| {
                let mut members: Vec<usize> = (0..n).filter(|_| rng.bernoulli(0.45)).collect();
                if members.is_empty() {
                    members.push(rng.below(n));
                }
                let k = 1 + rng.below(members.len().min(3));
                CoverSet { members, k }
            })
            .collect();
        SetSystemInstance::new(n, sets).unwrap()
    }

    /// Every knapsack constraint for every (S, A ⊆ S, t), materialized.
    fn materialized<T: Real>(inst: &SetSystemInstance, f: GainFunction) -> LinearProgram<T> {
        let (mut lp, layout) = build_dcg_lp::<T>(inst, f);
        let n = inst.n();
        for (s, set) in inst.sets().iter().enumerate() {
            let size = set.members.len();
            for mask in 0u32..(1 << size) {
                let a: Vec<usize> = (0..size).filter(|i| mask >> i & 1 == 1).map(|i| set.members[i]).collect();
                if a.len() >= set.k {
                    continue;
                }
                for t in 1..=n {
                    let mut terms = Vec::new();
                    for &e in set.members.iter().filter(|e| !a.contains(e)) {
                        for tp in 1..=t {
                            terms.push((layout.x(e, tp), T::one()));
                        }
                    }
                    terms.push((layout.y(s, t), -T::of_usize(set.k - a.len())));
                    lp.add(Constraint::new(terms, Relation::Ge, T::zero()));
                }
            }
        }
        lp
    }

    #[test]
    fn single_element() {
        let inst = SetSystemInstance::new(1, vec![CoverSet { members: vec![0], k: 1 }]).unwrap();
        let r = solve_dcg_lp::<f64>(&inst, GainFunction::DcgStandard, 20, PivotRule::Bland).unwrap();
        assert!((r.objective() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cut_loop_matches_materialized_family() {
        let mut rng = RngState::new(31);
        for n in [3usize, 3, 3, 4, 4] {
            let inst = random_instance(&mut rng, n, 3);
            let cut = solve_dcg_lp::<f64>(&inst, GainFunction::DcgStandard, 100, PivotRule::Bland).unwrap();
            assert!(cut.converged);
            let full = solve_lp(&materialized::<f64>(&inst, GainFunction::DcgStandard)).unwrap();
            assert!((cut.objective() - full.objective).abs() < 1e-6, "{} vs {}", cut.objective(), full.objective);
        }
    }

    #[test]
    fn relaxation_bounds_optimum_and_split_bound() {
        let mut rng = RngState::new(77);
        for _ in 0..20 {
            let n = 2 + rng.below(5);
            let m = 1 + rng.below(4);
            let inst = random_instance(&mut rng, n, m);
            let (_, opt) = brute_force_dcg::<f64>(&inst).unwrap();
            let r = solve_dcg_lp::<f64>(&inst, GainFunction::DcgStandard, 100, PivotRule::Bland).unwrap();
            assert!(r.objective() >= opt - 1e-6);
            for eta in [0.05, 0.1] {
                let bound = split_time_bound(r.y(), r.layout, GainFunction::DcgStandard, eta);
                assert!(r.objective() <= bound + 1e-9);
                assert!(opt <= bound + 1e-9);
            }
            // final point violates no knapsack constraint
            let cuts: Vec<KnapsackCut<f64>> = dcg_separation(r.x(), r.y(), &inst).unwrap();
            assert!(cuts.is_empty());
        }
    }

    #[test]
    fn full_requirement_relaxation_gap() {
        // both halves of each element at positions 1 and 2 satisfy every
        // knapsack constraint with y = (1/2, 1)
        let inst = SetSystemInstance::new(2, vec![CoverSet { members: vec![0, 1], k: 2 }]).unwrap();
        let f = GainFunction::DcgStandard;
        let r = solve_dcg_lp::<f64>(&inst, f, 100, PivotRule::Bland).unwrap();
        let (_, opt) = brute_force_dcg::<f64>(&inst).unwrap();
        assert!((opt - f.at::<f64>(2)).abs() < 1e-12);
        assert!((r.objective() - 0.5 * (f.at::<f64>(1) + f.at::<f64>(2))).abs() < 1e-9);

        let mut rng = RngState::new(5);
        for _ in 0..10 {
            let n = 2 + rng.below(3);
            let sets = (0..1 + rng.below(3))
                .map(|_| {
                    let mut members: Vec<usize> = (0..n).filter(|_| rng.bernoulli(0.5)).collect();
                    if members.is_empty() {
                        members.push(0);
                    }
                    let k = members.len();
                    CoverSet { members, k }
                })
                .collect();
            let inst = SetSystemInstance::new(n, sets).unwrap();
            let (_, opt) = brute_force_dcg::<f64>(&inst).unwrap();
            let r = solve_dcg_lp::<f64>(&inst, f, 100, PivotRule::Bland).unwrap();
            assert!(r.objective() >= opt - 1e-6);
        }
    }

    #[test]
    fn split_time_defaults_to_one() {
        let layout = DcgLayout { n: 3, m: 1 };
        let y = [1.0, 1.0, 1.0];
        assert_eq!(split_times(&y, layout, GainFunction::DcgStandard, 0.1), vec![1]);
        let y = [0.0, 0.0, 0.0];
        assert_eq!(split_times(&y, layout, GainFunction::DcgStandard, 0.1), vec![3]);
    }
}
