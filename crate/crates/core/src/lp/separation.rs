//! Separation over the knapsack-cover family of the DCG relaxation:
//!
//! `Σ_{e ∈ S∖A} Σ_{t' ≤ t} x[e][t'] ≥ (k_S − |A|) · y[S][t]` for all `S`, `A ⊆ S`, `t`.
//!
//! For fixed `(S, t)` write `z_e` for the prefix mass of `e`. Moving `e` into
//! `A` trades `z_e` for `y[S][t]` on the left-hand side, so the tightest
//! member of the family takes `A = {e : z_e > y}` and the whole family holds
//! iff `Σ_{e∈S} min(z_e, y) ≥ k_S · y`.

use super::{Constraint, Cut, Relation};
use crate::error::{Error, Result};
use crate::setsystem::SetSystemInstance;
use crate::Real;

/// Column layout of the DCG relaxation: `x[e][t]` then `y[S][t]`, `t` 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DcgLayout {
    pub n: usize,
    pub m: usize,
}

impl DcgLayout {
    pub fn for_instance(inst: &SetSystemInstance) -> Self {
        Self { n: inst.n(), m: inst.m() }
    }

    #[inline]
    pub fn x(&self, e: usize, t: usize) -> usize {
        e * self.n + (t - 1)
    }

    #[inline]
    pub fn y(&self, s: usize, t: usize) -> usize {
        self.n * self.n + s * self.n + (t - 1)
    }

    pub fn num_vars(&self) -> usize {
        self.n * self.n + self.m * self.n
    }

    /// Splits a full LP vector into its `x` and `y` blocks.
    pub fn split<'a, T>(&self, v: &'a [T]) -> (&'a [T], &'a [T]) {
        v.split_at(self.n * self.n)
    }
}

/// One violated knapsack-cover constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackCut<T> {
    pub set: usize,
    pub t: usize,
    pub a: Vec<usize>,
    pub constraint: Constraint<T>,
}

impl<T> KnapsackCut<T> {
    pub fn into_cut(self) -> Cut<T> {
        let mut key = Vec::with_capacity(self.a.len() + 2);
        key.push(self.set);
        key.push(self.t);
        key.extend(&self.a);
        Cut { key, constraint: self.constraint }
    }
}

/// For prefix masses `z` of the members of one set, requirement `k` and level
/// `y`: the positions forming the tightest `A` when that constraint is
/// violated by more than [`Real::tol`], otherwise `None`.
pub fn tightest_cover_violation<T: Real>(z: &[T], y: T, k: usize) -> Option<Vec<usize>> {
    let capped: T = z.iter().map(|&v| v.min(y)).sum();
    if capped < T::of_usize(k) * y - T::tol() {
        Some((0..z.len()).filter(|&i| z[i] > y).collect())
    } else {
        None
    }
}

/// Violated knapsack-cover constraints of `(x, y)`, one per violated `(S, t)`.
pub fn dcg_separation<T: Real>(x: &[T], y: &[T], inst: &SetSystemInstance) -> Result<Vec<KnapsackCut<T>>> {
    let layout = DcgLayout::for_instance(inst);
    let n = layout.n;
    if x.len() != n * n {
        return Err(Error::ShapeMismatch(format!("x has {} entries, expected {}", x.len(), n * n)));
    }
    if y.len() != layout.m * n {
        return Err(Error::ShapeMismatch(format!("y has {} entries, expected {}", y.len(), layout.m * n)));
    }
    // prefix[e][t-1] = Σ_{t' ≤ t} x[e][t']
    let mut prefix = vec![T::zero(); n * n];
    for e in 0..n {
        let mut acc = T::zero();
        for t in 0..n {
            acc += x[e * n + t];
            prefix[e * n + t] = acc;
        }
    }
    let mut cuts = Vec::new();
    let mut z = Vec::new();
    for (s, set) in inst.sets().iter().enumerate() {
        for t in 1..=n {
            let yv = y[s * n + (t - 1)];
            z.clear();
            z.extend(set.members.iter().map(|&e| prefix[e * n + (t - 1)]));
            let Some(pos) = tightest_cover_violation(&z, yv, set.k) else {
                continue;
            };
            let a: Vec<usize> = pos.iter().map(|&i| set.members[i]).collect();
            let mut terms = Vec::new();
            for &e in set.members.iter().filter(|e| !a.contains(e)) {
                for tp in 1..=t {
                    terms.push((layout.x(e, tp), T::one()));
                }
            }
            terms.push((layout.y(s, t), -T::of_usize(set.k - a.len())));
            cuts.push(KnapsackCut {
                set: s,
                t,
                a,
                constraint: Constraint::new(terms, Relation::Ge, T::zero()),
            });
        }
    }
    Ok(cuts)
}
