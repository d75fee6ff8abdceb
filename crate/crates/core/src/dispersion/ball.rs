use serde::Serialize;

use crate::dks::DksInstance;
use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::Real;

/// Split of the points around anchor `u` at radius `Δ = d(u, v)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallDecomposition<T> {
    pub u: usize,
    pub v: usize,
    pub delta: T,
    /// `20 Δ / ε`
    pub delta_star: T,
    /// Farther than `Δ*` from `u`: always taken, left out of the subproblem.
    pub outer: Vec<usize>,
    /// Within `Δ*` but farther than `Δ`: forced into the subproblem's solution.
    pub ring: Vec<usize>,
    /// Within `Δ` of `u`.
    pub inner: Vec<usize>,
    /// Points still to choose inside `Δ*`: `p − |outer|`.
    pub k: usize,
}

impl<T: Real> BallDecomposition<T> {
    pub fn new(inst: &MetricInstance<T>, p: usize, u: usize, v: usize, epsilon: f64) -> Result<Self> {
        inst.check_indices(&[u, v])?;
        if u == v {
            return Err(Error::InvalidParameter("anchor and witness must differ".into()));
        }
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
        }
        let delta = inst.d(u, v);
        let delta_star = T::lit(20.0) * delta / T::lit(epsilon);
        let (mut outer, mut ring, mut inner) = (Vec::new(), Vec::new(), Vec::new());
        for (x, &d) in inst.row(u).iter().enumerate() {
            if d > delta_star {
                outer.push(x);
            } else if d > delta {
                ring.push(x);
            } else {
                inner.push(x);
            }
        }
        let k = p.saturating_sub(outer.len());
        Ok(Self { u, v, delta, delta_star, outer, ring, inner, k })
    }

    /// Points outside the radius-`Δ` ball, i.e. `outer ∪ ring`.
    pub fn beyond_delta(&self) -> usize {
        self.outer.len() + self.ring.len()
    }

    /// Fewer than `p` points lie outside the radius-`Δ` ball.
    pub fn admissible(&self, p: usize) -> bool {
        self.beyond_delta() < p
    }

    /// `B(u, Δ*)` in ascending order: the subproblem's node labels.
    pub fn ball(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.ring.iter().chain(&self.inner).copied().collect();
        v.sort_unstable();
        v
    }

    /// `1 / (k (k − 1) Δ*)`, or 1 when that is undefined.
    pub fn scale(&self) -> T {
        let denom = T::of_usize(self.k * self.k.saturating_sub(1)) * self.delta_star;
        if denom > T::zero() {
            T::one() / denom
        } else {
            T::one()
        }
    }
}

/// The densest-subgraph subproblem of the pair `(u, v)`: nodes are
/// `B(u, Δ*)` (returned as global labels), the ring is forced, the target is
/// `k`, and `w = min(1, d / (2Δ*))`.
pub fn build_dks_from_ball<T: Real>(
    inst: &MetricInstance<T>,
    p: usize,
    u: usize,
    v: usize,
    epsilon: f64,
) -> Result<(DksInstance<T>, BallDecomposition<T>, Vec<usize>)> {
    let dec = BallDecomposition::new(inst, p, u, v, epsilon)?;
    if !dec.admissible(p) {
        return Err(Error::Degenerate(format!(
            "pair ({u}, {v}) has {} points beyond radius {}, at least p = {p}",
            dec.beyond_delta(),
            dec.delta
        )));
    }
    if dec.k < 2 || dec.k < dec.ring.len() {
        return Err(Error::Degenerate(format!("pair ({u}, {v}) leaves target k = {} with {} forced points", dec.k, dec.ring.len())));
    }
    let nodes = dec.ball();
    let m = nodes.len();
    let half_inv = if dec.delta_star > T::zero() { T::lit(0.5) / dec.delta_star } else { T::zero() };
    let mut w = vec![T::zero(); m * m];
    for a in 0..m {
        for b in a + 1..m {
            let x = (inst.d(nodes[a], nodes[b]) * half_inv).min(T::one());
            w[a * m + b] = x;
            w[b * m + a] = x;
        }
    }
    let forced: Vec<usize> = dec.ring.iter().map(|g| nodes.binary_search(g).expect("ring inside ball")).collect();
    let dks = DksInstance::from_dense(m, w, forced, dec.k)?;
    Ok((dks, dec, nodes))
}
