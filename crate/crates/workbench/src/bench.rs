//! Declarative benchmark runs.
//!
//! A spec lists instances (files or generator calls), algorithms with
//! parameter grids and seeds:
//!
//! ```json
//! {
//!   "instances": [
//!     {"id": "e8", "source": {"generate": {"generator": "euclidean", "n": 8, "dim": 2, "seed": 1}}, "p": 3},
//!     {"id": "disk", "source": {"file": "metric.json"}, "f": {"file": "f.json"}, "p": 4}
//!   ],
//!   "algorithms": [
//!     {"name": "qptas_dispersion", "epsilon": [0.5, 1.0], "inner": "exact"},
//!     {"name": "greedy_dispersion"}
//!   ],
//!   "seeds": [1, 2]
//! }
//! ```
//!
//! An algorithm runs on the instances of its kind (diversification also
//! needs `f`); it is an error if there are none. Every (instance,
//! algorithm, epsilon, seed) cell runs concurrently. When
//! the exact optimum is affordable it is computed once per instance and
//! problem, and each record gets `ratio = value / oracle`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use divkit::dispersion::InnerMode;
use divkit::dks::MatroidMode;
use divkit::io::{self, Document, Instance};
use divkit::{DksInstance, Error, Metric, Result, SetSystemInstance, Submodular};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generators::GenSpec;
use crate::solve::{self, DcgParams, DispersionParams, DksParams, SetAlgorithm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub generate: Option<GenSpec>,
}

impl Source {
    fn load(&self, base: &Path) -> Result<Document> {
        match (&self.file, &self.generate) {
            (Some(file), None) => io::load(base.join(file)),
            (None, Some(spec)) => spec.generate(),
            _ => Err(Error::Schema("a source needs exactly one of `file` and `generate`".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceEntry {
    pub id: String,
    pub source: Source,
    /// Submodular bonus: `f` for diversification, `h` for densest subgraph.
    #[serde(default)]
    pub f: Option<Source>,
    /// Solution size for metric instances; falls back to `meta.p`.
    #[serde(default)]
    pub p: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    PtasDcg,
    QptasDispersion,
    GreedyDispersion,
    Diversify,
    GreedyDiversification,
    SubmodularDks,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::PtasDcg => "ptas_dcg",
            Algorithm::QptasDispersion => "qptas_dispersion",
            Algorithm::GreedyDispersion => "greedy_dispersion",
            Algorithm::Diversify => "diversify",
            Algorithm::GreedyDiversification => "greedy_diversification",
            Algorithm::SubmodularDks => "submodular_dks",
        }
    }

    fn takes_epsilon(self) -> bool {
        !matches!(self, Algorithm::GreedyDispersion | Algorithm::GreedyDiversification)
    }

    fn default_epsilon(self) -> f64 {
        match self {
            Algorithm::PtasDcg => 0.1,
            _ => 0.5,
        }
    }
}

/// One algorithm with its grid. For `submodular_dks` the grid values are `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmEntry {
    pub name: Algorithm,
    /// Name used in records; defaults to `name`.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    #[serde(default)]
    pub u: Option<usize>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub prefix_cap: Option<u128>,
    #[serde(default)]
    pub inner: Option<InnerMode>,
    #[serde(default)]
    pub mode: Option<MatroidMode>,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub enum_cap: Option<usize>,
}

impl AlgorithmEntry {
    pub fn new(name: Algorithm) -> Self {
        Self {
            name,
            label: None,
            epsilon: Vec::new(),
            u: None,
            gamma: None,
            trials: None,
            prefix_cap: None,
            inner: None,
            mode: None,
            s: None,
            t: None,
            enum_cap: None,
        }
    }

    fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.name.name().to_string())
    }

    fn grid(&self) -> Vec<Option<f64>> {
        if !self.name.takes_epsilon() {
            vec![None]
        } else if self.epsilon.is_empty() {
            vec![Some(self.name.default_epsilon())]
        } else {
            self.epsilon.iter().copied().map(Some).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub instances: Vec<InstanceEntry>,
    pub algorithms: Vec<AlgorithmEntry>,
    pub seeds: Vec<u64>,
    /// Compute exact optima where the brute-force guards allow.
    #[serde(default = "yes")]
    pub oracle: bool,
}

fn yes() -> bool {
    true
}

impl BenchSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            Error::Schema(format!("bench spec at `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub value: f64,
    pub oracle: Option<f64>,
    /// `value / oracle`; present iff the oracle ran.
    pub ratio: Option<f64>,
    pub millis: f64,
}

/// Means over the seeds of one (instance, algorithm, epsilon) group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchAggregate {
    pub instance: String,
    pub algorithm: String,
    pub epsilon: Option<f64>,
    pub runs: usize,
    pub mean_value: f64,
    pub mean_oracle: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    pub mean_millis: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub aggregates: Vec<BenchAggregate>,
}

pub const CSV_HEADER: [&str; 8] = ["instance", "algorithm", "seed", "epsilon", "value", "oracle", "ratio", "millis"];

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl BenchReport {
    /// Records followed by one row per aggregate, whose `seed` cell reads
    /// `mean`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.instance.clone(),
                r.algorithm.clone(),
                r.seed.to_string(),
                opt_cell(r.epsilon),
                r.value.to_string(),
                opt_cell(r.oracle),
                opt_cell(r.ratio),
                format!("{:.3}", r.millis),
            ])
            .expect("in-memory write");
        }
        for a in &self.aggregates {
            w.write_record([
                a.instance.clone(),
                a.algorithm.clone(),
                "mean".to_string(),
                opt_cell(a.epsilon),
                a.mean_value.to_string(),
                opt_cell(a.mean_oracle),
                opt_cell(a.mean_ratio),
                format!("{:.3}", a.mean_millis),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8")
    }
}

struct Loaded {
    id: String,
    instance: Instance,
    f: Option<Submodular>,
    p: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Problem {
    Dcg,
    Dispersion,
    Diversification,
    Dks,
}

fn problem_of(alg: Algorithm) -> Problem {
    match alg {
        Algorithm::PtasDcg => Problem::Dcg,
        Algorithm::QptasDispersion | Algorithm::GreedyDispersion => Problem::Dispersion,
        Algorithm::Diversify | Algorithm::GreedyDiversification => Problem::Diversification,
        Algorithm::SubmodularDks => Problem::Dks,
    }
}

impl Loaded {
    /// Whether the algorithm's problem fits this instance's kind.
    fn applies(&self, alg: Algorithm) -> bool {
        match (problem_of(alg), &self.instance) {
            (Problem::Dcg, Instance::SetSystem(_)) | (Problem::Dks, Instance::Dks(_)) => true,
            (Problem::Dispersion, Instance::Metric(_)) => true,
            (Problem::Diversification, Instance::Metric(_)) => self.f.is_some(),
            _ => false,
        }
    }

    fn setsystem(&self) -> Result<&SetSystemInstance> {
        match &self.instance {
            Instance::SetSystem(s) => Ok(s),
            other => Err(self.mismatch("setsystem", other.kind())),
        }
    }

    fn metric(&self) -> Result<(&Metric, usize)> {
        match &self.instance {
            Instance::Metric(m) => {
                let p = self.p.ok_or_else(|| Error::Schema(format!("instance `{}`: no `p` given", self.id)))?;
                Ok((m, p))
            }
            other => Err(self.mismatch("metric", other.kind())),
        }
    }

    fn bonus(&self) -> Result<&Submodular> {
        self.f.as_ref().ok_or_else(|| Error::Schema(format!("instance `{}`: diversification needs `f`", self.id)))
    }

    fn dks(&self) -> Result<&DksInstance<f64>> {
        match &self.instance {
            Instance::Dks(d) => Ok(d),
            other => Err(self.mismatch("dks", other.kind())),
        }
    }

    fn mismatch(&self, want: &str, got: &str) -> Error {
        Error::Schema(format!("instance `{}` is a {got} document, the algorithm needs {want}", self.id))
    }

    /// Fails on kind mismatches; `None` when the guards refuse.
    fn oracle(&self, problem: Problem) -> Result<Option<f64>> {
        let out = match problem {
            Problem::Dcg => solve::oracle_dcg(self.setsystem()?),
            Problem::Dispersion => {
                let (m, p) = self.metric()?;
                solve::oracle_dispersion(m, p)
            }
            Problem::Diversification => {
                let (m, p) = self.metric()?;
                solve::oracle_diversification(m, self.bonus()?, p)
            }
            Problem::Dks => solve::oracle_dks(self.dks()?, self.f.as_ref()),
        };
        match out {
            Ok(o) => Ok(Some(o.value())),
            Err(e) if e.is_guard() => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn run(&self, alg: &AlgorithmEntry, epsilon: Option<f64>, seed: u64) -> Result<f64> {
        let eps = epsilon.unwrap_or(1.0);
        match alg.name {
            Algorithm::PtasDcg => {
                let params = DcgParams {
                    epsilon: eps,
                    u: alg.u,
                    gamma: alg.gamma,
                    eta: None,
                    trials: alg.trials.unwrap_or(20),
                    prefix_cap: alg.prefix_cap,
                };
                Ok(solve::solve_dcg(self.setsystem()?, &params, seed)?.dcg)
            }
            Algorithm::QptasDispersion | Algorithm::GreedyDispersion => {
                let (m, p) = self.metric()?;
                Ok(solve::solve_dispersion(m, &self.set_params(alg, p, eps), seed)?.disp)
            }
            Algorithm::Diversify | Algorithm::GreedyDiversification => {
                let (m, p) = self.metric()?;
                Ok(solve::solve_diversification(m, self.bonus()?, &self.set_params(alg, p, eps), seed)?.dive)
            }
            Algorithm::SubmodularDks => {
                let params = DksParams {
                    gamma: eps,
                    mode: alg.mode.unwrap_or_default(),
                    s: alg.s,
                    t: alg.t,
                    enum_cap: alg.enum_cap,
                };
                Ok(solve::solve_dks(self.dks()?, self.f.as_ref(), &params, seed)?.value)
            }
        }
    }

    fn set_params(&self, alg: &AlgorithmEntry, p: usize, eps: f64) -> DispersionParams {
        DispersionParams {
            p,
            epsilon: eps,
            inner: alg.inner.unwrap_or_default(),
            enum_cap: alg.enum_cap,
            algorithm: if alg.name.takes_epsilon() { SetAlgorithm::Qptas } else { SetAlgorithm::Greedy },
        }
    }
}

fn load_entry(entry: &InstanceEntry, base: &Path) -> Result<Loaded> {
    let doc = entry.source.load(base)?;
    let f = match &entry.f {
        None => None,
        Some(src) => match src.load(base)?.instance {
            Instance::Submodular(f) => Some(f),
            other => {
                return Err(Error::Schema(format!("instance `{}`: `f` is a {} document", entry.id, other.kind())));
            }
        },
    };
    let meta_p = doc.meta.as_ref().and_then(|m| m.get("p")).and_then(|v| v.as_u64()).map(|p| p as usize);
    Ok(Loaded { id: entry.id.clone(), instance: doc.instance, f, p: entry.p.or(meta_p) })
}

/// Runs every cell. Relative file paths resolve against `base`.
pub fn run_bench(spec: &BenchSpec, base: &Path) -> Result<BenchReport> {
    let mut ids = std::collections::BTreeSet::new();
    for e in &spec.instances {
        if !ids.insert(e.id.as_str()) {
            return Err(Error::Schema(format!("duplicate instance id `{}`", e.id)));
        }
    }
    let loaded = spec.instances.iter().map(|e| load_entry(e, base)).collect::<Result<Vec<_>>>()?;

    for alg in &spec.algorithms {
        if !loaded.iter().any(|l| l.applies(alg.name)) {
            return Err(Error::Schema(format!("algorithm `{}` applies to none of the instances", alg.label())));
        }
    }
    let mut needed: Vec<(usize, Problem)> = loaded
        .iter()
        .enumerate()
        .flat_map(|(i, l)| spec.algorithms.iter().filter(|a| l.applies(a.name)).map(move |a| (i, problem_of(a.name))))
        .collect();
    needed.sort_unstable();
    needed.dedup();
    let oracles: BTreeMap<(usize, Problem), Option<f64>> = if spec.oracle {
        needed
            .par_iter()
            .map(|&(i, pr)| loaded[i].oracle(pr).map(|v| ((i, pr), v)))
            .collect::<Result<_>>()?
    } else {
        BTreeMap::new()
    };

    let mut cells = Vec::new();
    for (i, l) in loaded.iter().enumerate() {
        for alg in spec.algorithms.iter().filter(|a| l.applies(a.name)) {
            for eps in alg.grid() {
                for &seed in &spec.seeds {
                    cells.push((i, alg, eps, seed));
                }
            }
        }
    }
    let mut records = cells
        .par_iter()
        .map(|&(i, alg, eps, seed)| {
            let start = Instant::now();
            let value = loaded[i].run(alg, eps, seed)?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            let oracle = oracles.get(&(i, problem_of(alg.name))).copied().flatten();
            let ratio = oracle.map(|o| if o > 0.0 { value / o } else { 1.0 });
            Ok(BenchRecord { instance: loaded[i].id.clone(), algorithm: alg.label(), seed, epsilon: eps, value, oracle, ratio, millis })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by(|a, b| {
        (&a.instance, &a.algorithm)
            .cmp(&(&b.instance, &b.algorithm))
            .then(a.epsilon.unwrap_or(-1.0).total_cmp(&b.epsilon.unwrap_or(-1.0)))
            .then(a.seed.cmp(&b.seed))
    });
    let aggregates = aggregate(&records);
    Ok(BenchReport { records, aggregates })
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Groups consecutive records; expects the canonical order.
pub fn aggregate(records: &[BenchRecord]) -> Vec<BenchAggregate> {
    records
        .chunk_by(|a, b| a.instance == b.instance && a.algorithm == b.algorithm && a.epsilon == b.epsilon)
        .map(|g| BenchAggregate {
            instance: g[0].instance.clone(),
            algorithm: g[0].algorithm.clone(),
            epsilon: g[0].epsilon,
            runs: g.len(),
            mean_value: mean(g.iter().map(|r| r.value)).expect("non-empty group"),
            mean_oracle: mean(g.iter().filter_map(|r| r.oracle)),
            mean_ratio: mean(g.iter().filter_map(|r| r.ratio)),
            min_ratio: g.iter().filter_map(|r| r.ratio).reduce(f64::min),
            mean_millis: mean(g.iter().map(|r| r.millis)).expect("non-empty group"),
        })
        .collect()
}
