use std::cmp::Ordering;
use std::collections::BinaryHeap;

use itertools::Itertools;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::matroid::{matroid_maximize, MatroidMode};
use super::{admit_profiles, avg_weight_profile, ind_dot, DksInstance};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::submodular::{SetFunction, ZeroFunction};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SubDksParams {
    /// Accuracy parameter; `γ' = 0.01 γ`.
    pub gamma: f64,
    /// Number of parts; derived from `γ`, `k'` and `n` when absent.
    pub s: Option<usize>,
    /// Target part size; `k' / s` when absent.
    pub t: Option<f64>,
    /// Cap on anchors and, separately, on candidates.
    pub enum_cap: usize,
    /// Anchors scanned before ranking them; exceeding it is reported.
    pub anchor_scan_limit: u128,
    pub mode: MatroidMode,
    /// Largest number of combinations exact mode will try.
    pub exact_budget: u128,
}

impl SubDksParams {
    pub fn new(gamma: f64) -> Self {
        Self {
            gamma,
            s: None,
            t: None,
            enum_cap: 200_000,
            anchor_scan_limit: 20_000_000,
            mode: MatroidMode::Exact,
            exact_budget: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::InvalidParameter(format!("gamma = {} must lie in (0, 1]", self.gamma)));
        }
        if self.s == Some(0) {
            return Err(Error::InvalidParameter("s must be at least 1".into()));
        }
        if let Some(t) = self.t {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("t = {t} must be positive")));
            }
        }
        if self.enum_cap == 0 || self.exact_budget == 0 || self.anchor_scan_limit == 0 {
            return Err(Error::InvalidParameter("caps and budgets must be positive".into()));
        }
        Ok(())
    }

    pub fn gamma_prime(&self) -> f64 {
        0.01 * self.gamma
    }

    /// `⌊0.001 γ'² k' / ln n⌋` before clamping.
    pub fn s_formula(&self, n: usize, k_free: usize) -> usize {
        if n < 2 {
            return 0;
        }
        let g = self.gamma_prime();
        (0.001 * g * g * k_free as f64 / (n as f64).ln()).floor() as usize
    }

    /// `(s, t)` after overrides and clamping `s ≥ 1`.
    pub fn resolve(&self, n: usize, k_free: usize) -> (usize, f64) {
        let s = self.s.unwrap_or_else(|| self.s_formula(n, k_free)).max(1);
        let t = self.t.unwrap_or(k_free as f64 / s as f64);
        (s, t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubDksDiagnostics {
    pub gamma: f64,
    pub gamma_prime: f64,
    pub s_formula: usize,
    pub s: usize,
    pub t: f64,
    pub k_free: usize,
    pub mode: MatroidMode,
    pub part_sizes: Vec<usize>,
    pub empty_parts: usize,
    pub candidates: usize,
    pub candidate_cap_hit: bool,
    pub anchors_total: u128,
    pub anchors_evaluated: usize,
    pub anchor_cap_hit: bool,
    pub anchor_scan_hit: bool,
    pub exact_fallbacks: usize,
    /// Anchors whose union was smaller than `k'` and got padded.
    pub padded: usize,
}

impl SubDksDiagnostics {
    /// Enumeration was complete: no cap or fallback was hit.
    pub fn complete(&self) -> bool {
        !(self.candidate_cap_hit || self.anchor_cap_hit || self.anchor_scan_hit) && self.exact_fallbacks == 0
    }
}

#[derive(Debug, Clone)]
pub struct SubDksOutcome<T> {
    /// Sorted solution, contains the forced set, exactly `k` nodes.
    pub set: Vec<usize>,
    pub value: T,
    pub h: T,
    pub den: T,
    pub parts: Vec<Vec<usize>>,
    pub diagnostics: SubDksDiagnostics,
}

struct Candidate<T> {
    nodes: Vec<usize>,
    profile: Vec<T>,
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().merge(b.iter()).copied().collect();
    out.dedup();
    out
}

fn binom(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// Sizes `j ≥ 1` with `(1 − γ')t ≤ j ≤ (1 + γ')t`, capped at `max`.
fn window(t: f64, gp: f64, max: usize) -> std::ops::RangeInclusive<usize> {
    let lo = ((1.0 - gp) * t).ceil().max(1.0) as usize;
    let hi = (((1.0 + gp) * t).floor() as usize).min(max);
    lo..=hi
}

/// Anchor ordered by density of `Q ∪ I` (descending), then `Q` ascending.
#[derive(Debug)]
struct Anchor<T> {
    score: T,
    nodes: Vec<usize>,
}

impl<T: Real> Ord for Anchor<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // "greater" = later in the processing order, so a max-heap evicts the worst
        other.score.partial_cmp(&self.score).unwrap_or(Ordering::Equal).then_with(|| self.nodes.cmp(&other.nodes))
    }
}
impl<T: Real> PartialOrd for Anchor<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> PartialEq for Anchor<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Anchor<T> {}

/// Densest `k`-subgraph with bonus `h`: maximizes `h(T) + den(T)` over
/// `k`-sets `T ⊇ I`.
///
/// The free nodes are split at random into `s` parts. For each anchor `Q`
/// (a small free subset), every part contributes the subsets of size about
/// `t` whose weight profile is close to that of `Q`; one subset per part is
/// then chosen to maximize `h` of the union (ties by density), and the union
/// is cut or padded to `k'` nodes. The best set over all anchors wins.
pub fn submodular_dks<T, H>(inst: &DksInstance<T>, h: &H, params: &SubDksParams, rng: &mut RngState) -> Result<SubDksOutcome<T>>
where
    T: Real,
    H: SetFunction<T> + ?Sized,
{
    params.validate()?;
    if h.ground_size() != inst.n() {
        return Err(Error::ShapeMismatch(format!(
            "bonus function is over {} nodes, instance has {}",
            h.ground_size(),
            inst.n()
        )));
    }
    let n = inst.n();
    let forced = inst.forced();
    let k_free = inst.k_free();
    let gp = params.gamma_prime();
    let (s, t) = params.resolve(n, k_free);
    let mut diag = SubDksDiagnostics {
        gamma: params.gamma,
        gamma_prime: gp,
        s_formula: params.s_formula(n, k_free),
        s,
        t,
        k_free,
        mode: params.mode,
        part_sizes: vec![],
        empty_parts: 0,
        candidates: 0,
        candidate_cap_hit: false,
        anchors_total: 0,
        anchors_evaluated: 0,
        anchor_cap_hit: false,
        anchor_scan_hit: false,
        exact_fallbacks: 0,
        padded: 0,
    };
    let score = |set: &[usize]| -> (T, T, T) {
        let hv = h.eval(set);
        let dv = inst.den_or_zero(set);
        (hv + dv, hv, dv)
    };
    if k_free == 0 {
        let set = forced.to_vec();
        let (value, hv, dv) = score(&set);
        return Ok(SubDksOutcome { set, value, h: hv, den: dv, parts: vec![], diagnostics: diag });
    }

    let free = inst.free_nodes();
    let mut parts = vec![Vec::new(); s];
    for &v in &free {
        parts[rng.below(s)].push(v);
    }
    diag.part_sizes = parts.iter().map(Vec::len).collect();
    diag.empty_parts = parts.iter().filter(|p| p.is_empty()).count();

    // candidates per part, sorted by the first profile coordinate
    let gp_t = T::lit(gp);
    let mut cands: Vec<Vec<Candidate<T>>> = Vec::with_capacity(s);
    let mut budget = params.enum_cap;
    for part in &parts {
        let mut list = Vec::new();
        'sizes: for j in window(t, gp, part.len()) {
            for nodes in part.iter().copied().combinations(j) {
                if budget == 0 {
                    diag.candidate_cap_hit = true;
                    break 'sizes;
                }
                budget -= 1;
                let profile = avg_weight_profile(&nodes, inst);
                list.push(Candidate { nodes, profile });
            }
        }
        list.sort_by(|a, b| a.profile[0].partial_cmp(&b.profile[0]).unwrap_or(Ordering::Equal));
        diag.candidates += list.len();
        cands.push(list);
    }

    // anchors
    let amax = (((1.0 + gp) * t).floor().max(1.0) as usize).min(free.len());
    diag.anchors_total = (1..=amax).map(|j| binom(free.len(), j)).fold(0u128, |a, b| a.saturating_add(b));
    let mut heap: BinaryHeap<Anchor<T>> = BinaryHeap::new();
    let mut scanned: u128 = 0;
    'scan: for j in 1..=amax {
        for q in free.iter().copied().combinations(j) {
            if scanned == params.anchor_scan_limit {
                diag.anchor_scan_hit = true;
                break 'scan;
            }
            scanned += 1;
            let a = Anchor { score: inst.den_or_zero(&merge_sorted(forced, &q)), nodes: q };
            if heap.len() < params.enum_cap {
                heap.push(a);
            } else if a < *heap.peek().expect("non-empty") {
                heap.pop();
                heap.push(a);
                diag.anchor_cap_hit = true;
            } else {
                diag.anchor_cap_hit = true;
            }
        }
    }
    let anchors = heap.into_sorted_vec();
    diag.anchors_evaluated = anchors.len();

    let base_seed = rng.next_u64();
    let results: Vec<(Vec<usize>, (T, T, T), bool, bool)> = anchors
        .par_iter()
        .enumerate()
        .map(|(ai, anchor)| {
            let q = &anchor.nodes;
            let wq = avg_weight_profile(q, inst);
            let q_self = ind_dot(q, &wq);
            let two = gp_t + gp_t;
            let pools: Vec<Vec<Vec<usize>>> = cands
                .iter()
                .map(|list| {
                    let lo = list.partition_point(|c| c.profile[0] < wq[0] - two);
                    list[lo..]
                        .iter()
                        .take_while(|c| c.profile[0] <= wq[0] + two)
                        .filter(|c| admit_profiles(&c.profile, &c.nodes, &wq, q_self, gp_t))
                        .map(|c| c.nodes.clone())
                        .collect()
                })
                .collect();
            let choice = matroid_maximize(
                &pools,
                |u: &[usize]| {
                    let all = merge_sorted(forced, u);
                    (h.eval(&all), inst.den_or_zero(&all))
                },
                params.mode,
                params.exact_budget,
            );
            let mut chosen = choice.union;
            let padded = chosen.len() < k_free;
            if padded {
                let mut used = vec![false; n];
                chosen.iter().for_each(|&v| used[v] = true);
                let extra: Vec<usize> = free.iter().copied().filter(|&v| !used[v]).take(k_free - chosen.len()).collect();
                chosen = merge_sorted(&chosen, &extra);
            } else {
                let mut arng = RngState::derive(base_seed, &[ai as u64]);
                chosen = arng.subset(&chosen, k_free);
            }
            let set = merge_sorted(forced, &chosen);
            let sc = score(&set);
            (set, sc, choice.fell_back, padded)
        })
        .collect();

    let mut best: Option<(Vec<usize>, (T, T, T))> = None;
    for (set, sc, fell_back, padded) in results {
        diag.exact_fallbacks += fell_back as usize;
        diag.padded += padded as usize;
        let better = match &best {
            None => true,
            Some((bs, b)) => sc.0 > b.0 || (sc.0 == b.0 && set < *bs),
        };
        if better {
            best = Some((set, sc));
        }
    }
    let (set, (value, hv, dv)) = best.ok_or_else(|| Error::Degenerate("no anchor was evaluated".into()))?;
    Ok(SubDksOutcome { set, value, h: hv, den: dv, parts, diagnostics: diag })
}

/// Plain densest `k`-subgraph: the bonus-free case with `γ = ε`.
pub fn dks_additive<T: Real>(inst: &DksInstance<T>, epsilon: f64, rng: &mut RngState) -> Result<SubDksOutcome<T>> {
    submodular_dks(inst, &ZeroFunction { n: inst.n() }, &SubDksParams::new(epsilon), rng)
}

/// For a reference solution `t_ref ⊇ I` and a partition of the free nodes,
/// reports per part whether `U_i = part ∩ t_ref` has size within
/// `[(1 − γ')t, (1 + γ')t]`, profile within `γ'` of `t_ref ∖ I` in sup norm,
/// and self-score within `γ'` of it.
pub fn partition_conditions<T: Real>(
    inst: &DksInstance<T>,
    parts: &[Vec<usize>],
    t_ref: &[usize],
    gamma_prime: f64,
    t: f64,
) -> Vec<[bool; 3]> {
    let forced = inst.forced();
    let rest: Vec<usize> = t_ref.iter().copied().filter(|v| !forced.contains(v)).collect();
    let g = T::lit(gamma_prime);
    let (wr, r_self) = if rest.is_empty() {
        (vec![T::zero(); inst.n()], T::zero())
    } else {
        let wr = avg_weight_profile(&rest, inst);
        let r_self = ind_dot(&rest, &wr);
        (wr, r_self)
    };
    parts
        .iter()
        .map(|part| {
            let u: Vec<usize> = part.iter().copied().filter(|v| rest.contains(v)).collect();
            let size = (1.0 - gamma_prime) * t <= u.len() as f64 && u.len() as f64 <= (1.0 + gamma_prime) * t;
            if u.is_empty() || rest.is_empty() {
                return [size, false, false];
            }
            let wu = avg_weight_profile(&u, inst);
            let close = wu.iter().zip(&wr).all(|(&a, &b)| (a - b).abs() <= g);
            let aligned = (ind_dot(&u, &wr) - r_self).abs() <= g;
            [size, close, aligned]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dks::brute_force_subdks;
    use crate::submodular::SubmodularSpec;

    fn random_instance(rng: &mut RngState, n: usize, k: usize, forced: usize) -> DksInstance<f64> {
        let mut t = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                t.push((i, j, rng.unit()));
            }
        }
        let all: Vec<usize> = (0..n).collect();
        DksInstance::new(n, &t, rng.subset(&all, forced), k).unwrap()
    }

    #[test]
    fn s_clamps_to_one() {
        let p = SubDksParams::new(0.1);
        assert_eq!(p.s_formula(10, 5), 0);
        assert_eq!(p.resolve(10, 5), (1, 5.0));
    }

    #[test]
    fn single_part_matches_brute_force() {
        let mut rng = RngState::new(17);
        for _ in 0..15 {
            let n = 4 + rng.below(6);
            let k = 2 + rng.below(n - 2);
            let forced = rng.below(k.min(3));
            let inst = random_instance(&mut rng, n, k, forced);
            let zero = ZeroFunction { n };
            let out = submodular_dks(&inst, &zero, &SubDksParams::new(0.1), &mut rng).unwrap();
            let (_, opt) = brute_force_subdks(&inst, &zero).unwrap();
            inst.check_solution(&out.set).unwrap();
            assert!((out.value - opt).abs() < 1e-9, "{} vs {opt}", out.value);
            assert!(out.diagnostics.complete());
        }
    }

    #[test]
    fn planted_clique() {
        let n = 10;
        let clique = [1usize, 4, 6, 8];
        let mut t = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = if clique.contains(&i) && clique.contains(&j) { 1.0 } else { 0.0 };
                t.push((i, j, w));
            }
        }
        let inst = DksInstance::new(n, &t, vec![], 4).unwrap();
        let out = dks_additive(&inst, 0.1, &mut RngState::new(2)).unwrap();
        assert_eq!(out.den, 1.0);
        assert_eq!(out.set, clique);
    }

    #[test]
    fn forced_only() {
        let inst = DksInstance::new(4, &[(0, 1, 0.5)], vec![0, 1], 2).unwrap();
        let out = dks_additive(&inst, 0.1, &mut RngState::new(0)).unwrap();
        assert_eq!(out.set, vec![0, 1]);
        assert_eq!(out.den, 0.5);
    }

    #[test]
    fn star_graph_pair() {
        let mut t: Vec<_> = (1..6).map(|j| (0, j, 0.1 * j as f64)).collect();
        t.push((2, 3, 0.05));
        let inst = DksInstance::new(6, &t, vec![], 2).unwrap();
        let out = dks_additive(&inst, 0.1, &mut RngState::new(0)).unwrap();
        assert_eq!(out.set, vec![0, 5]);
    }

    #[test]
    fn many_parts_keep_size_and_forced() {
        let mut rng = RngState::new(5);
        for seed in 0..30 {
            let inst = random_instance(&mut rng, 11, 7, 2);
            let h = SubmodularSpec::modular((0..11).map(|i| 0.1 * i as f64).collect()).unwrap();
            let mut p = SubDksParams::new(0.5);
            p.s = Some(3);
            p.mode = if seed % 2 == 0 { MatroidMode::Greedy } else { MatroidMode::Exact };
            let out = submodular_dks(&inst, &h, &p, &mut RngState::new(seed)).unwrap();
            inst.check_solution(&out.set).unwrap();
            assert_eq!(out.parts.len(), 3);
            let again = submodular_dks(&inst, &h, &p, &mut RngState::new(seed)).unwrap();
            assert_eq!(out.set, again.set);
        }
    }

    #[test]
    fn anchor_cap_is_reported() {
        let mut rng = RngState::new(8);
        let inst = random_instance(&mut rng, 9, 4, 0);
        let mut p = SubDksParams::new(0.1);
        p.enum_cap = 10;
        let out = dks_additive(&inst, 0.1, &mut RngState::new(1)).unwrap();
        assert!(!out.diagnostics.anchor_cap_hit);
        let out = submodular_dks(&inst, &ZeroFunction { n: 9 }, &p, &mut RngState::new(1)).unwrap();
        assert!(out.diagnostics.anchor_cap_hit && out.diagnostics.candidate_cap_hit);
        assert_eq!(out.diagnostics.anchors_evaluated, 10);
        inst.check_solution(&out.set).unwrap();
    }

    #[test]
    fn conditions_hold_for_single_part() {
        let mut rng = RngState::new(2);
        let inst = random_instance(&mut rng, 8, 4, 1);
        let (t_ref, _) = brute_force_subdks(&inst, &ZeroFunction { n: 8 }).unwrap();
        let parts = vec![inst.free_nodes()];
        let c = partition_conditions(&inst, &parts, &t_ref, 0.001, 3.0);
        assert_eq!(c, vec![[true, true, true]]);
    }
}
