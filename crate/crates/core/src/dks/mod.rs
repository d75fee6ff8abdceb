//! Densest `k`-subgraph with a forced set and an optional submodular bonus.
//!
//! Nodes are `0..n`, pair weights lie in `[0, 1]`, and a solution is a
//! `k`-set containing the forced set `I`. The plain objective is the average
//! pair weight [`DksInstance::den`]; the bonus variant adds a monotone
//! submodular `h(T)`.

mod brute;
mod matroid;
mod solver;

pub use brute::{brute_force_subdks, BRUTE_FORCE_MAX_SUBSETS};
pub use matroid::{matroid_maximize, MatroidChoice, MatroidMode};
pub use solver::{dks_additive, partition_conditions, submodular_dks, SubDksDiagnostics, SubDksOutcome, SubDksParams};

use crate::error::{Error, Result};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct DksInstance<T> {
    n: usize,
    w: Vec<T>,
    forced: Vec<usize>,
    k: usize,
}

impl<T: Real> DksInstance<T> {
    /// Builds an instance from weighted pairs; missing pairs weigh 0 and
    /// self-pairs are ignored.
    pub fn new(n: usize, weights: &[(usize, usize, T)], forced: Vec<usize>, k: usize) -> Result<Self> {
        let mut w = vec![T::zero(); n * n];
        for &(i, j, x) in weights {
            for v in [i, j] {
                if v >= n {
                    return Err(Error::IndexOutOfRange { index: v, len: n });
                }
            }
            if !(x >= T::zero() && x <= T::one()) {
                return Err(Error::InvalidInstance(format!("weight of pair ({i}, {j}) is {x}, outside [0, 1]")));
            }
            if i != j {
                w[i * n + j] = x;
                w[j * n + i] = x;
            }
        }
        Self::from_dense(n, w, forced, k)
    }

    /// `w` is the row-major `n × n` matrix; the diagonal is ignored.
    pub fn from_dense(n: usize, mut w: Vec<T>, mut forced: Vec<usize>, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("a DkS instance needs at least one node".into()));
        }
        if w.len() != n * n {
            return Err(Error::ShapeMismatch(format!("weight matrix has {} entries, expected {}", w.len(), n * n)));
        }
        for i in 0..n {
            w[i * n + i] = T::zero();
            for j in 0..i {
                let (a, b) = (w[i * n + j], w[j * n + i]);
                if a != b {
                    return Err(Error::InvalidInstance(format!("weights of ({i}, {j}) and ({j}, {i}) differ")));
                }
                if !(a >= T::zero() && a <= T::one()) {
                    return Err(Error::InvalidInstance(format!("weight of pair ({j}, {i}) is {a}, outside [0, 1]")));
                }
            }
        }
        forced.sort_unstable();
        forced.dedup();
        if let Some(&v) = forced.iter().find(|&&v| v >= n) {
            return Err(Error::IndexOutOfRange { index: v, len: n });
        }
        if k < forced.len() || k > n || k == 0 {
            return Err(Error::InvalidInstance(format!(
                "target size {k} must satisfy |I| = {} <= k <= n = {n} and k >= 1",
                forced.len()
            )));
        }
        Ok(Self { n, w, forced, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn forced(&self) -> &[usize] {
        &self.forced
    }

    /// `k − |I|`
    pub fn k_free(&self) -> usize {
        self.k - self.forced.len()
    }

    /// `V ∖ I`, ascending.
    pub fn free_nodes(&self) -> Vec<usize> {
        let mut is_forced = vec![false; self.n];
        self.forced.iter().for_each(|&v| is_forced[v] = true);
        (0..self.n).filter(|&v| !is_forced[v]).collect()
    }

    #[inline]
    pub fn w(&self, i: usize, j: usize) -> T {
        self.w[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    /// Non-zero pairs `(i, j, w)` with `i < j`.
    pub fn weight_triples(&self) -> Vec<(usize, usize, T)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let x = self.w(i, j);
                if !x.is_zero() {
                    out.push((i, j, x));
                }
            }
        }
        out
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::from_dense(self.n, self.w.clone(), self.forced.clone(), k)
    }

    /// Sum of `w` over unordered pairs of `t` (unchecked).
    pub fn pair_sum(&self, t: &[usize]) -> T {
        let mut acc = T::zero();
        for (a, &i) in t.iter().enumerate() {
            let row = self.row(i);
            for &j in &t[a + 1..] {
                acc += row[j];
            }
        }
        acc
    }

    /// `Σ_{i ∈ a, j ∈ b} w(i, j)` (unchecked).
    pub fn cross_sum(&self, a: &[usize], b: &[usize]) -> T {
        a.iter().map(|&i| b.iter().map(|&j| self.w(i, j)).sum::<T>()).sum()
    }

    /// Average pair weight; 0 for sets with fewer than two nodes.
    pub fn den_or_zero(&self, t: &[usize]) -> T {
        let s = t.len();
        if s < 2 {
            return T::zero();
        }
        self.pair_sum(t) / T::of_usize(s * (s - 1) / 2)
    }

    /// Average pair weight of `t`.
    pub fn den(&self, t: &[usize]) -> Result<T> {
        self.check_set(t)?;
        if t.len() < 2 {
            return Err(Error::InvalidParameter(format!("density needs at least two nodes, got {}", t.len())));
        }
        Ok(self.den_or_zero(t))
    }

    /// Indices in range and distinct.
    pub fn check_set(&self, t: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n];
        for &v in t {
            if v >= self.n {
                return Err(Error::IndexOutOfRange { index: v, len: self.n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidParameter(format!("node {v} listed twice")));
            }
        }
        Ok(())
    }

    /// A solution must contain `I` and have exactly `k` distinct nodes.
    pub fn check_solution(&self, t: &[usize]) -> Result<()> {
        self.check_set(t)?;
        if t.len() != self.k {
            return Err(Error::InfeasibleSolution(format!("solution has {} nodes, expected {}", t.len(), self.k)));
        }
        if let Some(v) = self.forced.iter().find(|v| !t.contains(v)) {
            return Err(Error::InfeasibleSolution(format!("forced node {v} missing")));
        }
        Ok(())
    }
}

/// `ōw(U) = W 1(U) / |U|`, over all nodes.
pub fn avg_weight_profile<T: Real>(u: &[usize], inst: &DksInstance<T>) -> Vec<T> {
    let n = inst.n();
    let mut acc = vec![T::zero(); n];
    for &v in u {
        for (a, &x) in acc.iter_mut().zip(inst.row(v)) {
            *a += x;
        }
    }
    let scale = T::one() / T::of_usize(u.len());
    acc.iter_mut().for_each(|a| *a *= scale);
    acc
}

/// `(ōw(U), ōind(U))`.
pub fn profile_vectors<T: Real>(u: &[usize], inst: &DksInstance<T>) -> Result<(Vec<T>, Vec<T>)> {
    if u.is_empty() {
        return Err(Error::InvalidParameter("profile of an empty set".into()));
    }
    inst.check_set(u)?;
    let mut ind = vec![T::zero(); inst.n()];
    let share = T::one() / T::of_usize(u.len());
    u.iter().for_each(|&v| ind[v] = share);
    Ok((avg_weight_profile(u, inst), ind))
}

/// `ōind(U)ᵀ x`.
#[inline]
pub(crate) fn ind_dot<T: Real>(u: &[usize], x: &[T]) -> T {
    u.iter().map(|&v| x[v]).sum::<T>() / T::of_usize(u.len())
}

/// Admission test of a part subset `u` against the anchor `q`:
/// `‖ōw(U) − ōw(Q)‖∞ ≤ 2γ'` and `|ōind(U)ᵀōw(Q) − ōind(Q)ᵀōw(Q)| ≤ 4γ'`.
pub fn candidate_admit<T: Real>(u: &[usize], q: &[usize], inst: &DksInstance<T>, gamma_prime: T) -> bool {
    if u.is_empty() || q.is_empty() {
        return false;
    }
    let wu = avg_weight_profile(u, inst);
    let wq = avg_weight_profile(q, inst);
    admit_profiles(&wu, u, &wq, ind_dot(q, &wq), gamma_prime)
}

#[inline]
pub(crate) fn admit_profiles<T: Real>(wu: &[T], u: &[usize], wq: &[T], q_self: T, gamma_prime: T) -> bool {
    let two = gamma_prime + gamma_prime;
    wu.iter().zip(wq).all(|(&a, &b)| (a - b).abs() <= two) && (ind_dot(u, wq) - q_self).abs() <= two + two
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngState;

    pub(crate) fn random_instance(rng: &mut RngState, n: usize) -> DksInstance<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                t.push((i, j, rng.unit()));
            }
        }
        DksInstance::new(n, &t, vec![], 2.min(n)).unwrap()
    }

    #[test]
    fn den_examples() {
        let full: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j, 1.0))).collect();
        let inst = DksInstance::new(5, &full, vec![], 3).unwrap();
        assert_eq!(inst.den(&[0, 2, 4]).unwrap(), 1.0);
        let zero = DksInstance::<f64>::new(5, &[], vec![], 3).unwrap();
        assert_eq!(zero.den(&[0, 1]).unwrap(), 0.0);
        assert!(zero.den(&[0]).is_err());
        assert!(zero.den(&[0, 0]).is_err());

        let mut rng = RngState::new(3);
        let inst = random_instance(&mut rng, 7);
        let t = [1, 3, 4, 6];
        let mut s = 0.0;
        for a in 0..4 {
            for b in a + 1..4 {
                s += inst.w(t[a], t[b]);
            }
        }
        assert!((inst.den(&t).unwrap() - s / 6.0).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(DksInstance::new(3, &[(0, 1, 1.5)], vec![], 2).is_err());
        assert!(DksInstance::new(3, &[(0, 3, 0.5)], vec![], 2).is_err());
        assert!(DksInstance::<f64>::new(3, &[], vec![0, 1, 2], 2).is_err());
        assert!(DksInstance::<f64>::new(3, &[], vec![], 4).is_err());
        let inst = DksInstance::new(3, &[(1, 1, 0.5), (0, 2, 0.25)], vec![2, 2], 2).unwrap();
        assert_eq!(inst.w(1, 1), 0.0);
        assert_eq!(inst.forced(), &[2]);
        assert_eq!(inst.free_nodes(), vec![0, 1]);
    }

    #[test]
    fn profiles() {
        let mut rng = RngState::new(9);
        let inst = random_instance(&mut rng, 6);
        let (w, ind) = profile_vectors(&[4], &inst).unwrap();
        for x in 0..6 {
            assert_eq!(w[x], inst.w(4, x));
        }
        assert_eq!(w[4], 0.0);
        assert_eq!(ind[4], 1.0);

        let full: Vec<_> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j, 1.0))).collect();
        let unit = DksInstance::new(6, &full, vec![], 3).unwrap();
        let (w, _) = profile_vectors(&[0, 1, 2, 3], &unit).unwrap();
        assert_eq!(w, vec![0.75, 0.75, 0.75, 0.75, 1.0, 1.0]);

        let u = [0, 2, 5];
        let (w, ind) = profile_vectors(&u, &inst).unwrap();
        for x in 0..6 {
            let naive = u.iter().map(|&v| if v == x { 0.0 } else { inst.w(v, x) }).sum::<f64>() / 3.0;
            assert!((w[x] - naive).abs() < 1e-12);
            assert_eq!(ind[x], if u.contains(&x) { 1.0 / 3.0 } else { 0.0 });
        }
        assert!(profile_vectors(&[], &inst).is_err());
    }

    #[test]
    fn admission() {
        let mut rng = RngState::new(1);
        let inst = random_instance(&mut rng, 8);
        for _ in 0..50 {
            let size = 1 + rng.below(7);
            let u = rng.subset(&(0..8).collect::<Vec<_>>(), size);
            assert!(candidate_admit(&u, &u, &inst, 0.0));
        }
        let zero = DksInstance::<f64>::new(8, &[], vec![], 2).unwrap();
        assert!(candidate_admit(&[0, 1], &[5], &zero, 0.0));

        // two stars: centre 0 with leaves 1..=3, centre 4 with no leaves;
        // profiles differ by 3γ' at node 1..=3 when weights are 3γ'
        let gp = 0.01;
        let star: Vec<_> = (1..=3).map(|j| (0, j, 3.0 * gp)).collect();
        let inst = DksInstance::new(6, &star, vec![], 2).unwrap();
        let (wu, _) = profile_vectors(&[0], &inst).unwrap();
        let (wq, _) = profile_vectors(&[4], &inst).unwrap();
        let norm = wu.iter().zip(&wq).map(|(a, b): (&f64, &f64)| (a - b).abs()).fold(0.0, f64::max);
        assert!((norm - 3.0 * gp).abs() < 1e-15);
        assert!(!candidate_admit(&[0], &[4], &inst, gp));
    }

    #[test]
    fn admission_is_label_equivariant() {
        let mut rng = RngState::new(12);
        let n = 7;
        let inst = random_instance(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut perm);
        let relabel: Vec<_> = inst.weight_triples().into_iter().map(|(i, j, w)| (perm[i], perm[j], w)).collect();
        let other = DksInstance::new(n, &relabel, vec![], 2).unwrap();
        for _ in 0..200 {
            let all: Vec<usize> = (0..n).collect();
            let size = 1 + rng.below(4);
            let u = rng.subset(&all, size);
            let size = 1 + rng.below(4);
            let q = rng.subset(&all, size);
            let pu: Vec<_> = u.iter().map(|&v| perm[v]).collect();
            let pq: Vec<_> = q.iter().map(|&v| perm[v]).collect();
            assert_eq!(candidate_admit(&u, &q, &inst, 0.05), candidate_admit(&pu, &pq, &other, 0.05));
        }
    }
}
