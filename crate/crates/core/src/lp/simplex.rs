//! Dense two-phase primal simplex.
//!
//! Variables are shifted or reflected onto `[0, +inf)` (free variables are
//! split), finite upper bounds become explicit rows, rows are normalized to a
//! non-negative right-hand side, and `>=`/`=` rows receive artificials that
//! phase one drives to zero.

use super::{LinearProgram, LpSolution, LpStatus, Relation};
use crate::error::Result;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variables; never cycles.
    #[default]
    Bland,
    /// Largest reduced profit, switching to Bland's rule for the rest of the
    /// phase after a run of degenerate pivots.
    Dantzig,
}

pub fn solve_lp<T: Real>(lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
    solve_lp_with(lp, PivotRule::default())
}

#[derive(Debug, Clone, Copy)]
enum ColMap<T> {
    /// `x = lo + c`
    Shift(T),
    /// `x = hi - c`
    Flip(T),
    /// `x = c+ - c-`, columns `c` and `c + 1`
    Split,
}

struct Tableau<T> {
    rows: usize,
    width: usize,
    a: Vec<T>,
    obj: Vec<T>,
    basis: Vec<usize>,
    blocked: Vec<bool>,
    pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Limit,
}

impl<T: Real> Tableau<T> {
    #[inline]
    fn at(&self, r: usize, c: usize) -> T {
        self.a[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> T {
        self.a[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        let (before, rest) = self.a.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[c] = T::one();
        let eliminate = |row: &mut [T]| {
            let f = row[c];
            if f.is_zero() {
                return;
            }
            for (x, &pr) in row.iter_mut().zip(prow.iter()) {
                *x -= f * pr;
            }
            row[c] = T::zero();
        };
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            eliminate(row);
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn entering(&self, rule: PivotRule, bland: bool) -> Option<usize> {
        let eps = T::tol();
        let cols = self.width - 1;
        if bland || rule == PivotRule::Bland {
            (0..cols).find(|&j| !self.blocked[j] && self.obj[j] > eps)
        } else {
            let mut best: Option<(usize, T)> = None;
            for j in 0..cols {
                if !self.blocked[j] && self.obj[j] > eps && best.is_none_or(|(_, v)| self.obj[j] > v) {
                    best = Some((j, self.obj[j]));
                }
            }
            best.map(|(j, _)| j)
        }
    }

    fn leaving(&self, c: usize) -> Option<usize> {
        let peps = T::pivot_eps();
        let mut best: Option<(usize, T)> = None;
        for r in 0..self.rows {
            let a = self.at(r, c);
            if a <= peps {
                continue;
            }
            let ratio = self.rhs(r).max(T::zero()) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bv)) => {
                    let slack = T::pivot_eps() * (T::one() + bv.abs());
                    if ratio < bv - slack || (ratio <= bv + slack && self.basis[r] < self.basis[br]) {
                        Some((r, ratio))
                    } else {
                        Some((br, bv))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn run(&mut self, rule: PivotRule, limit: usize) -> Step {
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let switch_after = 2 * self.rows + 10;
        loop {
            if self.pivots >= limit {
                return Step::Limit;
            }
            let Some(c) = self.entering(rule, bland) else {
                return Step::Optimal;
            };
            let Some(r) = self.leaving(c) else {
                return Step::Unbounded;
            };
            if self.rhs(r) <= T::tol() {
                degenerate_run += 1;
                if degenerate_run > switch_after {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }
}

pub fn solve_lp_with<T: Real>(lp: &LinearProgram<T>, rule: PivotRule) -> Result<LpSolution<T>> {
    lp.validate()?;
    let nv = lp.num_vars();

    // structural columns
    let mut maps = Vec::with_capacity(nv);
    let mut col_of = Vec::with_capacity(nv);
    let mut ns = 0usize;
    let mut bound_rows: Vec<(usize, T)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        col_of.push(ns);
        if lo.is_finite() {
            maps.push(ColMap::Shift(lo));
            if hi.is_finite() {
                bound_rows.push((ns, hi - lo));
            }
            ns += 1;
        } else if hi.is_finite() {
            maps.push(ColMap::Flip(hi));
            ns += 1;
        } else {
            maps.push(ColMap::Split);
            ns += 2;
        }
    }

    // rows over structural columns, rhs normalized to >= 0
    let mut rows: Vec<(Vec<T>, Relation, T)> = Vec::with_capacity(lp.constraints.len() + bound_rows.len());
    for c in &lp.constraints {
        let mut dense = vec![T::zero(); ns];
        let mut rhs = c.rhs;
        for &(j, a) in &c.terms {
            let col = col_of[j];
            match maps[j] {
                ColMap::Shift(lo) => {
                    dense[col] += a;
                    rhs -= a * lo;
                }
                ColMap::Flip(hi) => {
                    dense[col] -= a;
                    rhs -= a * hi;
                }
                ColMap::Split => {
                    dense[col] += a;
                    dense[col + 1] -= a;
                }
            }
        }
        rows.push((dense, c.relation, rhs));
    }
    for &(col, cap) in &bound_rows {
        let mut dense = vec![T::zero(); ns];
        dense[col] = T::one();
        rows.push((dense, Relation::Le, cap));
    }
    for (dense, rel, rhs) in rows.iter_mut() {
        if *rhs < T::zero() {
            dense.iter_mut().for_each(|v| *v = -*v);
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = ns + n_slack + n_art;
    let width = cols + 1;
    let art_start = ns + n_slack;

    let mut a = vec![T::zero(); m * width];
    let mut basis = vec![0usize; m];
    let mut next_slack = ns;
    let mut next_art = art_start;
    let mut obj = vec![T::zero(); width];
    for (r, (dense, rel, rhs)) in rows.iter().enumerate() {
        let row = &mut a[r * width..(r + 1) * width];
        row[..ns].copy_from_slice(dense);
        row[cols] = *rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = T::one();
                basis[r] = next_slack;
                next_slack += 1;
            }
            Relation::Ge | Relation::Eq => {
                if *rel == Relation::Ge {
                    row[next_slack] = -T::one();
                    next_slack += 1;
                }
                row[next_art] = T::one();
                basis[r] = next_art;
                next_art += 1;
                // phase one profit: maximize -Σ artificials
                for j in 0..art_start {
                    obj[j] += row[j];
                }
                obj[cols] += *rhs;
            }
        }
    }

    let limit = 50 * (m + cols) + 1000;
    let mut tab = Tableau {
        rows: m,
        width,
        a,
        obj,
        basis,
        blocked: vec![false; cols],
        pivots: 0,
    };

    let fail = |status: LpStatus, pivots: usize| LpSolution {
        status,
        x: vec![T::zero(); nv],
        objective: T::zero(),
        pivots,
    };

    if n_art > 0 {
        if let Step::Limit = tab.run(rule, limit) {
            return Ok(fail(LpStatus::NumericalFailure, tab.pivots));
        }
        let bmax = rows.iter().map(|r| r.2).fold(T::one(), T::max);
        // obj[cols] holds Σ artificials at the phase-one optimum
        if tab.obj[cols] > T::tol() * T::lit(10.0) * bmax {
            return Ok(fail(LpStatus::Infeasible, tab.pivots));
        }
        for r in 0..m {
            if tab.basis[r] >= art_start {
                let replacement = (0..art_start).find(|&j| tab.at(r, j).abs() > T::pivot_eps() * T::lit(100.0));
                if let Some(j) = replacement {
                    tab.pivot(r, j);
                }
            }
        }
        for j in art_start..cols {
            tab.blocked[j] = true;
        }
    }

    // phase two profit row
    let mut costs = vec![T::zero(); cols];
    for (j, &c) in lp.objective.iter().enumerate() {
        let col = col_of[j];
        match maps[j] {
            ColMap::Shift(_) => costs[col] = c,
            ColMap::Flip(_) => costs[col] = -c,
            ColMap::Split => {
                costs[col] = c;
                costs[col + 1] = -c;
            }
        }
    }
    tab.obj = vec![T::zero(); width];
    tab.obj[..cols].copy_from_slice(&costs);
    for r in 0..m {
        let cb = costs[tab.basis[r]];
        if cb.is_zero() {
            continue;
        }
        for j in 0..width {
            let v = tab.at(r, j);
            tab.obj[j] -= cb * v;
        }
    }
    for r in 0..m {
        let b = tab.basis[r];
        tab.obj[b] = T::zero();
    }

    match tab.run(rule, limit) {
        Step::Limit => return Ok(fail(LpStatus::NumericalFailure, tab.pivots)),
        Step::Unbounded => return Ok(fail(LpStatus::Unbounded, tab.pivots)),
        Step::Optimal => {}
    }

    let mut colval = vec![T::zero(); cols];
    for r in 0..m {
        colval[tab.basis[r]] = tab.rhs(r).max(T::zero());
    }
    let x: Vec<T> = maps
        .iter()
        .zip(&col_of)
        .map(|(map, &col)| match *map {
            ColMap::Shift(lo) => lo + colval[col],
            ColMap::Flip(hi) => hi - colval[col],
            ColMap::Split => colval[col] - colval[col + 1],
        })
        .collect();
    let objective = lp.value(&x);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Constraint;
    use crate::rng::RngState;

    fn lp2() -> LinearProgram<f64> {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![1.0, 1.0];
        lp.add(Constraint::new(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0));
        lp
    }

    #[test]
    fn unit_box() {
        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective = vec![1.0];
        lp.bounds[0] = (0.0, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!(s.is_optimal());
        assert_eq!(s.x, vec![1.0]);
        assert_eq!(s.objective, 1.0);
    }

    #[test]
    fn simplex_face() {
        for rule in [PivotRule::Bland, PivotRule::Dantzig] {
            let s = solve_lp_with(&lp2(), rule).unwrap();
            assert!(s.is_optimal());
            assert!((s.objective - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = lp2();
        lp.add(Constraint::new(vec![(0, 1.0)], Relation::Ge, 2.0));
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![1.0, 0.0];
        lp.add(Constraint::new(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0));
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equalities_and_negative_bounds() {
        // max x - y, x + y = 1, x in [-2, 0.25], y free
        let mut lp = LinearProgram::<f64>::new(2);
        lp.objective = vec![1.0, -1.0];
        lp.bounds = vec![(-2.0, 0.25), (f64::NEG_INFINITY, f64::INFINITY)];
        lp.add(Constraint::new(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 1.0));
        let s = solve_lp(&lp).unwrap();
        assert!(s.is_optimal());
        assert!((s.x[0] - 0.25).abs() < 1e-12 && (s.x[1] - 0.75).abs() < 1e-12);
        assert!((s.objective + 0.5).abs() < 1e-12);
    }

    #[test]
    fn upper_only_bound() {
        // max -x with x <= 3, x >= -1 as a row
        let mut lp = LinearProgram::<f64>::new(1);
        lp.objective = vec![-1.0];
        lp.bounds = vec![(f64::NEG_INFINITY, 3.0)];
        lp.add(Constraint::new(vec![(0, 1.0)], Relation::Ge, -1.0));
        let s = solve_lp(&lp).unwrap();
        assert!((s.x[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_permutation_invariance() {
        let mut rng = RngState::new(99);
        for _ in 0..30 {
            let mut lp = LinearProgram::<f64>::new(4);
            lp.objective = (0..4).map(|_| rng.unit() * 2.0 - 0.5).collect();
            lp.bounds = vec![(0.0, 2.0); 4];
            for _ in 0..5 {
                let terms = (0..4).map(|j| (j, rng.unit() * 2.0 - 0.5)).collect();
                lp.add(Constraint::new(terms, Relation::Le, rng.unit() * 3.0));
            }
            let base = solve_lp(&lp).unwrap();
            let mut permuted = lp.clone();
            permuted.constraints.reverse();
            let s = solve_lp(&permuted).unwrap();
            assert!((base.objective - s.objective).abs() < 1e-6);
        }
    }

    #[test]
    fn single_precision() {
        let mut lp = LinearProgram::<f32>::new(2);
        lp.objective = vec![3.0, 2.0];
        lp.add(Constraint::new(vec![(0, 1.0), (1, 1.0)], Relation::Le, 4.0));
        lp.add(Constraint::new(vec![(0, 1.0), (1, 3.0)], Relation::Le, 6.0));
        lp.bounds[0] = (0.0, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.objective - 11.0).abs() < 1e-4);
    }
}
