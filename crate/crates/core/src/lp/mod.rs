//! A small dense LP solver, a cutting-plane loop on top of it, and the
//! knapsack-cover separation oracle used by the DCG relaxation.

mod cuts;
mod separation;
mod simplex;

pub use cuts::{solve_with_cuts, Cut, CutLoopOutcome};
pub use separation::{dcg_separation, tightest_cover_violation, DcgLayout, KnapsackCut};
pub use simplex::{solve_lp, solve_lp_with, PivotRule};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// `Σ terms relation rhs`, with sparse `(variable, coefficient)` terms.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T> {
    pub terms: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

impl<T: Real> Constraint<T> {
    pub fn new(terms: Vec<(usize, T)>, relation: Relation, rhs: T) -> Self {
        Self { terms, relation, rhs }
    }

    pub fn lhs(&self, x: &[T]) -> T {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the constraint (zero when satisfied).
    pub fn violation(&self, x: &[T]) -> T {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(T::zero()),
            Relation::Ge => (self.rhs - lhs).max(T::zero()),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Maximize `objective · x` subject to the constraints and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
    pub bounds: Vec<(T, T)>,
}

impl<T: Real> LinearProgram<T> {
    /// `num_vars` variables with zero objective and bounds `[0, +inf)`.
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![T::zero(); num_vars],
            constraints: Vec::new(),
            bounds: vec![(T::zero(), T::infinity()); num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, c: Constraint<T>) {
        self.constraints.push(c);
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::ShapeMismatch(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        if let Some(j) = self.objective.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInstance(format!("objective[{j}] is not finite")));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == T::infinity() || hi == T::neg_infinity() {
                return Err(Error::InvalidInstance(format!("bounds[{j}] = [{lo}, {hi}] is empty")));
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.rhs.is_finite() {
                return Err(Error::InvalidInstance(format!("constraints[{i}].rhs is not finite")));
            }
            for &(j, a) in &c.terms {
                if j >= n {
                    return Err(Error::IndexOutOfRange { index: j, len: n });
                }
                if !a.is_finite() {
                    return Err(Error::InvalidInstance(format!("constraints[{i}] coefficient of x{j} is not finite")));
                }
            }
        }
        Ok(())
    }

    /// Largest constraint or bound violation of `x`.
    pub fn max_violation(&self, x: &[T]) -> T {
        let rows = self.constraints.iter().map(|c| c.violation(x));
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi).max(T::zero()));
        rows.chain(bounds).fold(T::zero(), T::max)
    }

    pub fn value(&self, x: &[T]) -> T {
        self.objective.iter().zip(x).map(|(&c, &v)| c * v).sum()
    }

    /// Plain-text dump, one constraint per line, in the CPLEX LP layout.
    pub fn to_lp_text(&self) -> String {
        fn linear<T: Real>(terms: impl Iterator<Item = (usize, T)>) -> String {
            let mut out = String::new();
            for (j, a) in terms {
                if a.is_zero() {
                    continue;
                }
                if out.is_empty() {
                    let _ = write!(out, "{a} x{j}");
                } else if a < T::zero() {
                    let _ = write!(out, " - {} x{j}", -a);
                } else {
                    let _ = write!(out, " + {a} x{j}");
                }
            }
            if out.is_empty() {
                out.push('0');
            }
            out
        }
        let mut s = String::from("maximize\n obj: ");
        s += &linear(self.objective.iter().copied().enumerate());
        s += "\nsubject to\n";
        for (i, c) in self.constraints.iter().enumerate() {
            let _ = writeln!(s, " c{i}: {} {} {}", linear(c.terms.iter().copied()), c.relation.symbol(), c.rhs);
        }
        s += "bounds\n";
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            let lo = if lo.is_infinite() { "-inf".to_string() } else { lo.to_string() };
            let hi = if hi.is_infinite() { "+inf".to_string() } else { hi.to_string() };
            let _ = writeln!(s, " {lo} <= x{j} <= {hi}");
        }
        s += "end\n";
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot limit reached before optimality was certified.
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    pub x: Vec<T>,
    pub objective: T,
    pub pivots: usize,
}

impl<T> LpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_lists_every_row() {
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![1.0, -2.0];
        lp.add(Constraint::new(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0));
        lp.bounds[1] = (0.0, 1.0);
        let text = lp.to_lp_text();
        assert!(text.contains("obj: 1 x0 - 2 x1"));
        assert!(text.contains("c0: 1 x0 + 1 x1 <= 1"));
        assert!(text.contains("0 <= x1 <= 1"));
        assert!(text.contains("0 <= x0 <= +inf"));
    }

    #[test]
    fn validate_rejects_empty_bounds() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.bounds[0] = (1.0, 0.0);
        assert!(lp.validate().is_err());
        let mut lp = LinearProgram::<f64>::new(1);
        lp.add(Constraint::new(vec![(3, 1.0)], Relation::Le, 1.0));
        assert!(lp.validate().is_err());
    }
}
