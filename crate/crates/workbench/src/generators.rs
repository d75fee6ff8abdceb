//! Seeded instance generators, including the two reduction constructions
//! (densest subgraph to dispersion, regular coverage to DCG ranking).
//!
//! Every generator takes an explicit seed and is a pure function of its
//! arguments. [`GenSpec`] bundles a generator call so that it can live in a
//! bench spec or be built from the command line; [`GenSpec::generate`]
//! returns a document carrying the generator name, parameters and seed in
//! its `meta` field.

use divkit::io::{Document, Instance};
use divkit::setsystem::{CoverSet, SetSystemInstance};
use divkit::{DksInstance, Error, Metric, Result, RngState, Submodular};
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Largest number of `k`-subsets [`max_coverage`] will examine.
pub const MAX_COVERAGE_SUBSETS: u128 = 100_000;

/// Uniform points in the unit cube `[0, 1]^dim`, Euclidean distances.
pub fn gen_random_euclidean(n: usize, dim: usize, seed: u64) -> Result<Metric> {
    if n < 2 || dim == 0 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and dim >= 1, got n = {n}, dim = {dim}")));
    }
    let mut rng = RngState::new(seed);
    let points = (0..n).map(|_| (0..dim).map(|_| rng.unit()).collect()).collect();
    Metric::from_points(points)
}

/// Symmetric distances drawn uniformly from `[1, 2]`. Any such matrix is a
/// metric since `d(i, k) ≤ 2 ≤ d(i, j) + d(j, k)`.
pub fn gen_random_metric(n: usize, seed: u64) -> Result<Metric> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("need n >= 2, got {n}")));
    }
    let mut rng = RngState::new(seed);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = 1.0 + rng.unit();
            rows[i][j] = d;
            rows[j][i] = d;
        }
    }
    Metric::from_matrix(rows)
}

/// Weights uniform in `[0, 1]`, each pair present with probability
/// `density`. `forced` nodes are drawn uniformly.
pub fn gen_random_dks(n: usize, k: usize, forced: usize, density: f64, seed: u64) -> Result<DksInstance<f64>> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidParameter(format!("density = {density} must lie in [0, 1]")));
    }
    let mut rng = RngState::new(seed);
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let keep = rng.bernoulli(density);
            let w = rng.unit();
            if keep {
                triples.push((i, j, w));
            }
        }
    }
    let all: Vec<usize> = (0..n).collect();
    let forced = rng.subset(&all, forced);
    DksInstance::new(n, &triples, forced, k)
}

/// A densest-subgraph instance with a planted unit-weight `k`-clique; other
/// weights are uniform in `[0, 0.5]`. Returns the planted set, sorted.
pub fn gen_planted_dks(n: usize, k: usize, seed: u64) -> Result<(DksInstance<f64>, Vec<usize>)> {
    if !(2 <= k && k <= n) {
        return Err(Error::InvalidParameter(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = RngState::new(seed);
    let all: Vec<usize> = (0..n).collect();
    let planted = rng.subset(&all, k);
    let mut inside = vec![false; n];
    for &v in &planted {
        inside[v] = true;
    }
    let mut triples = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let w = if inside[i] && inside[j] { 1.0 } else { 0.5 * rng.unit() };
            triples.push((i, j, w));
        }
    }
    Ok((DksInstance::new(n, &triples, Vec::new(), k)?, planted))
}

/// `d(u, v) = 1 + w(u, v)` with `p = k`. For every `k`-set `T`,
/// `disp(T) = k(k − 1)/2 · (1 + den(T))`.
pub fn dks_to_dispersion(dks: &DksInstance<f64>) -> Result<(Metric, usize)> {
    if !dks.forced().is_empty() {
        return Err(Error::InvalidParameter("instances with a forced set are not supported".into()));
    }
    let n = dks.n();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 + dks.w(i, j) }).collect())
        .collect();
    Ok((Metric::from_matrix(rows)?, dks.k()))
}

/// Maximum coverage input: sets over the universe `0..universe`, budget `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageInstance {
    pub universe: usize,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
    /// Every set has exactly `universe / k` items.
    pub regular: bool,
    /// Indices of the planted partition, when there is one.
    pub planted: Option<Vec<usize>>,
}

impl CoverageInstance {
    pub fn new(universe: usize, mut sets: Vec<Vec<usize>>, k: usize) -> Result<Self> {
        if k == 0 || universe == 0 {
            return Err(Error::InvalidInstance("coverage needs k >= 1 and a non-empty universe".into()));
        }
        for (idx, s) in sets.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if let Some(&bad) = s.iter().find(|&&x| x >= universe) {
                return Err(Error::InvalidInstance(format!("set {idx} contains item {bad} outside the universe")));
            }
        }
        let regular = universe.is_multiple_of(k) && sets.iter().all(|s| s.len() == universe / k);
        Ok(Self { universe, sets, k, regular, planted: None })
    }

    pub fn covered(&self, chosen: &[usize]) -> usize {
        let mut seen = vec![false; self.universe];
        for &j in chosen {
            for &x in &self.sets[j] {
                seen[x] = true;
            }
        }
        seen.iter().filter(|&&b| b).count()
    }
}

/// Regular sets of size `universe / k`. With `planted`, `k` of them
/// partition the universe, so the coverage optimum is the whole universe.
/// Set order is shuffled; the planted indices are recorded.
pub fn gen_regular_coverage(universe: usize, k: usize, planted: bool, extra_sets: usize, seed: u64) -> Result<CoverageInstance> {
    if k == 0 || universe == 0 || !universe.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!("k = {k} must divide the universe size {universe}")));
    }
    let q = universe / k;
    let mut rng = RngState::new(seed);
    let items: Vec<usize> = (0..universe).collect();
    let mut sets = Vec::new();
    if planted {
        let mut order = items.clone();
        rng.shuffle(&mut order);
        for chunk in order.chunks(q) {
            let mut s = chunk.to_vec();
            s.sort_unstable();
            sets.push(s);
        }
    }
    for _ in 0..extra_sets {
        sets.push(rng.subset(&items, q));
    }
    let mut order: Vec<usize> = (0..sets.len()).collect();
    rng.shuffle(&mut order);
    let shuffled: Vec<Vec<usize>> = order.iter().map(|&i| sets[i].clone()).collect();
    let mut inst = CoverageInstance::new(universe, shuffled, k)?;
    if planted {
        let mut idx: Vec<usize> = (0..order.len()).filter(|&pos| order[pos] < k).collect();
        idx.sort_by_key(|&pos| order[pos]);
        inst.planted = Some(idx);
    }
    Ok(inst)
}

/// One topic per universe item, containing the sets that cover it, each with
/// requirement 1. Fails when some item is covered by no set.
pub fn coverage_to_dcg(cov: &CoverageInstance) -> Result<SetSystemInstance> {
    let mut topics = vec![Vec::new(); cov.universe];
    for (j, s) in cov.sets.iter().enumerate() {
        for &x in s {
            topics[x].push(j);
        }
    }
    let uncovered: Vec<usize> = topics.iter().positions(Vec::is_empty).collect();
    if !uncovered.is_empty() {
        return Err(Error::InvalidInstance(format!("universe items covered by no set: {uncovered:?}")));
    }
    SetSystemInstance::new(cov.sets.len(), topics.into_iter().map(|members| CoverSet { members, k: 1 }).collect())
}

/// Exact maximum coverage with `k` sets, ties to the lexicographically
/// smallest choice.
pub fn max_coverage(cov: &CoverageInstance) -> Result<(Vec<usize>, usize)> {
    let m = cov.sets.len();
    let k = cov.k.min(m);
    let count = binomial(m, k);
    if count > MAX_COVERAGE_SUBSETS {
        return Err(Error::GuardExceeded { what: "coverage subsets", count, limit: MAX_COVERAGE_SUBSETS });
    }
    let mut best = (Vec::new(), 0);
    for c in (0..m).combinations(k) {
        let v = cov.covered(&c);
        if v > best.1 || best.0.is_empty() {
            best = (c, v);
        }
    }
    Ok(best)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

/// `n` topics over the ground set `0..n`, sizes uniform in `1..=n`,
/// requirements uniform in `1..=min(kmax, size)`.
pub fn gen_setsystem(n: usize, m: usize, kmax: usize, seed: u64) -> Result<SetSystemInstance> {
    if n == 0 || m == 0 || kmax == 0 {
        return Err(Error::InvalidParameter("n, m and kmax must be positive".into()));
    }
    let mut rng = RngState::new(seed);
    let all: Vec<usize> = (0..n).collect();
    let sets = (0..m)
        .map(|_| {
            let size = 1 + rng.below(n);
            let members = rng.subset(&all, size);
            let k = 1 + rng.below(kmax.min(size));
            CoverSet { members, k }
        })
        .collect();
    SetSystemInstance::new(n, sets)
}

/// Weighted coverage over `n` elements: each element covers 1 to 3 random
/// items of `0..universe`, item weights uniform in `[0, 1]`.
pub fn gen_coverage_function(n: usize, universe: usize, seed: u64) -> Result<Submodular> {
    if universe == 0 {
        return Err(Error::InvalidParameter("universe must be non-empty".into()));
    }
    let mut rng = RngState::new(seed);
    let items: Vec<usize> = (0..universe).collect();
    let covers = (0..n)
        .map(|_| {
            let size = 1 + rng.below(3.min(universe));
            rng.subset(&items, size)
        })
        .collect();
    let weights = (0..universe).map(|_| rng.unit()).collect();
    Submodular::coverage(universe, covers, Some(weights))
}

/// Weights uniform in `[0, 1]`.
pub fn gen_modular(n: usize, seed: u64) -> Result<Submodular> {
    let mut rng = RngState::new(seed);
    Submodular::modular((0..n).map(|_| rng.unit()).collect())
}

/// A generator call with its parameters, as found in bench specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum GenSpec {
    Euclidean { n: usize, dim: usize, seed: u64 },
    RangeMetric { n: usize, seed: u64 },
    RandomDks {
        n: usize,
        k: usize,
        #[serde(default)]
        forced: usize,
        #[serde(default = "one")]
        density: f64,
        seed: u64,
    },
    PlantedDks { n: usize, k: usize, seed: u64 },
    /// Metric image of a planted densest-subgraph instance.
    PlantedDispersion { n: usize, k: usize, seed: u64 },
    Setsystem { n: usize, m: usize, kmax: usize, seed: u64 },
    /// Ranking image of a regular coverage instance.
    CoverageDcg {
        universe: usize,
        k: usize,
        #[serde(default)]
        planted: bool,
        #[serde(default)]
        extra: usize,
        seed: u64,
    },
    CoverageFunction { n: usize, universe: usize, seed: u64 },
    Modular { n: usize, seed: u64 },
}

fn one() -> f64 {
    1.0
}

impl GenSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GenSpec::Euclidean { .. } => "euclidean",
            GenSpec::RangeMetric { .. } => "range_metric",
            GenSpec::RandomDks { .. } => "random_dks",
            GenSpec::PlantedDks { .. } => "planted_dks",
            GenSpec::PlantedDispersion { .. } => "planted_dispersion",
            GenSpec::Setsystem { .. } => "setsystem",
            GenSpec::CoverageDcg { .. } => "coverage_dcg",
            GenSpec::CoverageFunction { .. } => "coverage_function",
            GenSpec::Modular { .. } => "modular",
        }
    }

    /// Builds the instance; `meta` holds the call and any planted structure.
    pub fn generate(&self) -> Result<Document> {
        let mut meta = serde_json::to_value(self).expect("serializable");
        let mut extra = |key: &str, v: Value| {
            meta.as_object_mut().expect("tagged enum").insert(key.to_string(), v);
        };
        let instance = match *self {
            GenSpec::Euclidean { n, dim, seed } => Instance::Metric(gen_random_euclidean(n, dim, seed)?),
            GenSpec::RangeMetric { n, seed } => Instance::Metric(gen_random_metric(n, seed)?),
            GenSpec::RandomDks { n, k, forced, density, seed } => Instance::Dks(gen_random_dks(n, k, forced, density, seed)?),
            GenSpec::PlantedDks { n, k, seed } => {
                let (inst, planted) = gen_planted_dks(n, k, seed)?;
                extra("planted", json!(planted));
                Instance::Dks(inst)
            }
            GenSpec::PlantedDispersion { n, k, seed } => {
                let (dks, planted) = gen_planted_dks(n, k, seed)?;
                let (metric, p) = dks_to_dispersion(&dks)?;
                extra("planted", json!(planted));
                extra("p", json!(p));
                extra("optimum", json!((p * (p - 1)) as f64));
                Instance::Metric(metric)
            }
            GenSpec::Setsystem { n, m, kmax, seed } => Instance::SetSystem(gen_setsystem(n, m, kmax, seed)?),
            GenSpec::CoverageDcg { universe, k, planted, extra: extra_sets, seed } => {
                let cov = gen_regular_coverage(universe, k, planted, extra_sets, seed)?;
                extra("coverage", serde_json::to_value(&cov).expect("serializable"));
                Instance::SetSystem(coverage_to_dcg(&cov)?)
            }
            GenSpec::CoverageFunction { n, universe, seed } => Instance::Submodular(gen_coverage_function(n, universe, seed)?),
            GenSpec::Modular { n, seed } => Instance::Submodular(gen_modular(n, seed)?),
        };
        Ok(Document::with_meta(instance, meta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use divkit::dks::brute_force_subdks;
    use divkit::metric::validate_metric;
    use divkit::ranking::{brute_force_dcg, dcg_value};
    use divkit::submodular::ZeroFunction;
    use divkit::{GainFunction, SetFunction};

    #[test]
    fn generated_metrics_validate() {
        for seed in 0..200 {
            let e = gen_random_euclidean(2 + seed as usize % 9, 1 + seed as usize % 3, seed).unwrap();
            assert!(validate_metric(&e).is_ok(), "seed {seed}");
            let r = gen_random_metric(2 + seed as usize % 9, seed).unwrap();
            assert!(validate_metric(&r).is_ok(), "seed {seed}");
            assert!((0..r.len()).all(|i| (0..r.len()).all(|j| i == j || (1.0..=2.0).contains(&r.d(i, j)))));
        }
    }

    #[test]
    fn same_seed_same_instance() {
        assert_eq!(gen_random_euclidean(6, 2, 9).unwrap(), gen_random_euclidean(6, 2, 9).unwrap());
        assert_ne!(gen_random_euclidean(6, 2, 9).unwrap(), gen_random_euclidean(6, 2, 10).unwrap());
        assert_eq!(gen_planted_dks(8, 3, 1).unwrap(), gen_planted_dks(8, 3, 1).unwrap());
        assert_eq!(gen_regular_coverage(12, 3, true, 4, 5).unwrap(), gen_regular_coverage(12, 3, true, 4, 5).unwrap());
    }

    #[test]
    fn line_points() {
        let m = Metric::from_points(vec![vec![0.0], vec![0.5], vec![1.0]]).unwrap();
        assert_eq!((m.d(0, 1), m.d(1, 2), m.d(0, 2)), (0.5, 0.5, 1.0));
    }

    #[test]
    fn planted_clique_is_optimal() {
        for seed in 0..30 {
            let n = 6 + seed as usize % 7;
            let k = 2 + seed as usize % 4;
            let (inst, planted) = gen_planted_dks(n, k, seed).unwrap();
            assert_eq!(inst.den(&planted).unwrap(), 1.0);
            for (i, j, w) in inst.weight_triples() {
                let both = planted.contains(&i) && planted.contains(&j);
                assert!(if both { w == 1.0 } else { (0.0..=0.5).contains(&w) });
            }
            let (best, v) = brute_force_subdks(&inst, &ZeroFunction { n }).unwrap();
            assert_eq!(v, 1.0);
            assert_eq!(best, planted);
        }
        let (full, _) = gen_planted_dks(5, 5, 0).unwrap();
        assert!(full.weight_triples().iter().all(|t| t.2 == 1.0));
    }

    #[test]
    fn dispersion_image_identity() {
        let (dks, _) = gen_planted_dks(7, 3, 4).unwrap();
        let (metric, p) = dks_to_dispersion(&dks).unwrap();
        assert_eq!(p, 3);
        assert!(validate_metric(&metric).is_ok());
        let mut rng = RngState::new(1);
        let all: Vec<usize> = (0..7).collect();
        for _ in 0..20 {
            let t = rng.subset(&all, 3);
            let lhs = metric.disp(&t).unwrap();
            let rhs = 3.0 * (1.0 + dks.den(&t).unwrap());
            assert!((lhs - rhs).abs() < 1e-12);
        }
        let zero = DksInstance::new(4, &[], vec![], 3).unwrap();
        let (m0, _) = dks_to_dispersion(&zero).unwrap();
        assert_eq!(m0.disp(&[0, 2, 3]).unwrap(), 3.0);
        let forced = DksInstance::new(4, &[], vec![1], 3).unwrap();
        assert!(dks_to_dispersion(&forced).is_err());
    }

    #[test]
    fn regular_coverage() {
        assert!(gen_regular_coverage(10, 3, true, 0, 0).is_err());
        let cov = gen_regular_coverage(12, 3, true, 0, 7).unwrap();
        assert!(cov.regular);
        assert_eq!(cov.sets.len(), 3);
        assert_eq!(cov.covered(&[0, 1, 2]), 12);
        for seed in 0..20 {
            let cov = gen_regular_coverage(12, 3, true, 5, seed).unwrap();
            assert!(cov.regular && cov.sets.iter().all(|s| s.len() == 4));
            let planted = cov.planted.clone().unwrap();
            assert_eq!(cov.covered(&planted), 12);
            assert_eq!(max_coverage(&cov).unwrap().1, 12);
        }
    }

    #[test]
    fn coverage_ranking_image() {
        let cov = CoverageInstance::new(4, vec![vec![0, 1, 2, 3]], 1).unwrap();
        let sys = coverage_to_dcg(&cov).unwrap();
        assert_eq!((sys.n(), sys.m()), (1, 4));
        assert!(sys.sets().iter().all(|s| s.members == vec![0] && s.k == 1));

        let gap = CoverageInstance::new(3, vec![vec![0], vec![1]], 1).unwrap();
        assert!(coverage_to_dcg(&gap).unwrap_err().to_string().contains("[2]"));

        let cov = gen_regular_coverage(6, 2, true, 2, 3).unwrap();
        let sys = coverage_to_dcg(&cov).unwrap();
        let planted = cov.planted.clone().unwrap();
        let mut perm = planted.clone();
        perm.extend((0..cov.sets.len()).filter(|j| !planted.contains(j)));
        let v: f64 = dcg_value(&perm, &sys, GainFunction::DcgStandard).unwrap();
        let want: f64 = (1..=2).map(|i| 3.0 / ((i + 1) as f64).log2()).sum();
        assert!((v - want).abs() < 1e-9);
        let (_, opt): (_, f64) = brute_force_dcg(&sys).unwrap();
        assert!((opt - want).abs() < 1e-9);
    }

    #[test]
    fn spec_documents_carry_meta() {
        let doc = GenSpec::PlantedDispersion { n: 6, k: 3, seed: 2 }.generate().unwrap();
        let meta = doc.meta.unwrap();
        assert_eq!(meta["generator"], "planted_dispersion");
        assert_eq!(meta["p"], 3);
        assert_eq!(meta["seed"], 2);
        let spec: GenSpec = serde_json::from_value(json!({"generator": "random_dks", "n": 5, "k": 2, "seed": 1})).unwrap();
        assert_eq!(spec, GenSpec::RandomDks { n: 5, k: 2, forced: 0, density: 1.0, seed: 1 });
    }

    #[test]
    fn generated_setsystems_are_valid() {
        for seed in 0..200 {
            let s = gen_setsystem(1 + seed as usize % 7, 1 + seed as usize % 5, 3, seed).unwrap();
            assert!(s.sets().iter().all(|c| c.k >= 1 && c.k <= c.members.len() && c.k <= 3));
        }
        let f = gen_coverage_function(5, 4, 0).unwrap();
        assert_eq!(f.ground_size(), 5);
    }
}
