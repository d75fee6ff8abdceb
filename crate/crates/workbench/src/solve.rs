//! Solver entry points shared by the command line and the bench harness.
//!
//! Results are plain serializable records. They hold no timing, so the same
//! input, flags and seed always give byte-identical JSON.

use divkit::dispersion::{brute_force_dispersion, greedy_dispersion, qptas_dispersion, InnerMode, PairDiagnostics, QptasConfig};
use divkit::diversification::{brute_force_diversification, diversify, greedy_diversification, DiversificationInstance};
use divkit::dks::{brute_force_subdks, submodular_dks, MatroidMode, SubDksDiagnostics, SubDksOutcome, SubDksParams};
use divkit::ranking::{brute_force_dcg, ptas_dcg, PtasConfig, PtasDiagnostics};
use divkit::submodular::ZeroFunction;
use divkit::{DksInstance, Error, Metric, Result, RngState, SetFunction, SetSystemInstance, Submodular};
use serde::{Deserialize, Serialize};

/// Pretty JSON followed by a newline.
pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results always serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcgParams {
    pub epsilon: f64,
    #[serde(default)]
    pub u: Option<usize>,
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub prefix_cap: Option<u128>,
}

fn default_trials() -> usize {
    20
}

impl DcgParams {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon, u: None, gamma: None, eta: None, trials: default_trials(), prefix_cap: None }
    }

    pub fn config(&self) -> PtasConfig {
        let mut cfg = PtasConfig::new(self.epsilon);
        cfg.u = self.u;
        cfg.gamma = self.gamma;
        cfg.eta = self.eta;
        cfg.trials = self.trials;
        if let Some(cap) = self.prefix_cap {
            cfg.prefix_cap = cap;
        }
        cfg
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DcgResult {
    pub algorithm: &'static str,
    pub seed: u64,
    pub params: DcgParams,
    pub ranking: Vec<usize>,
    pub cover_times: Vec<usize>,
    pub dcg: f64,
    pub lp_bound: f64,
    pub diagnostics: PtasDiagnostics,
}

pub fn solve_dcg(inst: &SetSystemInstance, params: &DcgParams, seed: u64) -> Result<DcgResult> {
    let mut rng = RngState::new(seed);
    let out = ptas_dcg::<f64>(inst, &params.config(), &mut rng)?;
    Ok(DcgResult {
        algorithm: "ptas_dcg",
        seed,
        params: params.clone(),
        ranking: out.ranking.perm().to_vec(),
        cover_times: out.ranking.cover_times().to_vec(),
        dcg: out.value,
        lp_bound: out.diagnostics.lp_bound,
        diagnostics: out.diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetAlgorithm {
    /// Pair enumeration with ball subproblems.
    #[default]
    Qptas,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionParams {
    pub p: usize,
    pub epsilon: f64,
    #[serde(default)]
    pub inner: InnerMode,
    #[serde(default)]
    pub enum_cap: Option<usize>,
    #[serde(default)]
    pub algorithm: SetAlgorithm,
}

impl DispersionParams {
    pub fn new(p: usize, epsilon: f64) -> Self {
        Self { p, epsilon, inner: InnerMode::default(), enum_cap: None, algorithm: SetAlgorithm::Qptas }
    }

    pub fn config(&self) -> QptasConfig {
        let mut cfg = QptasConfig::new(self.epsilon);
        cfg.inner = self.inner;
        if let Some(cap) = self.enum_cap {
            cfg.dks.enum_cap = cap;
        }
        cfg
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionResult {
    pub algorithm: &'static str,
    pub seed: u64,
    pub params: DispersionParams,
    pub set: Vec<usize>,
    pub disp: f64,
    pub diagnostics: Option<PairDiagnostics>,
}

pub fn solve_dispersion(metric: &Metric, params: &DispersionParams, seed: u64) -> Result<DispersionResult> {
    let (algorithm, set, diagnostics) = match params.algorithm {
        SetAlgorithm::Qptas => {
            let mut rng = RngState::new(seed);
            let out = qptas_dispersion(metric, params.p, &params.config(), &mut rng)?;
            ("qptas_dispersion", out.set, Some(out.diagnostics))
        }
        SetAlgorithm::Greedy => {
            let mut set = greedy_dispersion(metric, params.p)?;
            set.sort_unstable();
            ("greedy_dispersion", set, None)
        }
    };
    let disp = metric.disp(&set)?;
    Ok(DispersionResult { algorithm, seed, params: params.clone(), set, disp, diagnostics })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiversificationResult {
    pub algorithm: &'static str,
    pub seed: u64,
    pub params: DispersionParams,
    pub set: Vec<usize>,
    pub dive: f64,
    pub disp: f64,
    pub f: f64,
    pub diagnostics: Option<PairDiagnostics>,
}

/// `params.p` overrides the instance's `p`.
pub fn solve_diversification(metric: &Metric, f: &Submodular, params: &DispersionParams, seed: u64) -> Result<DiversificationResult> {
    let dinst = DiversificationInstance::new(metric.clone(), f.clone(), params.p)?;
    let (algorithm, set, diagnostics) = match params.algorithm {
        SetAlgorithm::Qptas => {
            let mut rng = RngState::new(seed);
            let out = diversify(&dinst, &params.config(), &mut rng)?;
            ("diversify", out.set, Some(out.diagnostics))
        }
        SetAlgorithm::Greedy => {
            let mut set = greedy_diversification(&dinst)?;
            set.sort_unstable();
            ("greedy_diversification", set, None)
        }
    };
    let disp = metric.disp(&set)?;
    let fv = f.eval(&set);
    Ok(DiversificationResult { algorithm, seed, params: params.clone(), set, dive: disp + fv, disp, f: fv, diagnostics })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DksParams {
    pub gamma: f64,
    #[serde(default)]
    pub mode: MatroidMode,
    #[serde(default)]
    pub s: Option<usize>,
    #[serde(default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub enum_cap: Option<usize>,
}

impl DksParams {
    pub fn new(gamma: f64) -> Self {
        Self { gamma, mode: MatroidMode::default(), s: None, t: None, enum_cap: None }
    }

    pub fn config(&self) -> SubDksParams {
        let mut p = SubDksParams::new(self.gamma);
        p.mode = self.mode;
        p.s = self.s;
        p.t = self.t;
        if let Some(cap) = self.enum_cap {
            p.enum_cap = cap;
        }
        p
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DksResult {
    pub algorithm: &'static str,
    pub seed: u64,
    pub params: DksParams,
    pub set: Vec<usize>,
    /// `h(T) + den(T)`
    pub value: f64,
    pub h: f64,
    pub den: f64,
    pub parts: Vec<Vec<usize>>,
    pub diagnostics: SubDksDiagnostics,
}

fn check_bonus(inst: &DksInstance<f64>, h: &Submodular) -> Result<()> {
    if h.ground_size() != inst.n() {
        return Err(Error::ShapeMismatch(format!(
            "bonus function is over {} elements, instance has {} nodes",
            h.ground_size(),
            inst.n()
        )));
    }
    Ok(())
}

pub fn solve_dks(inst: &DksInstance<f64>, h: Option<&Submodular>, params: &DksParams, seed: u64) -> Result<DksResult> {
    let mut rng = RngState::new(seed);
    let cfg = params.config();
    let out: SubDksOutcome<f64> = match h {
        Some(h) => {
            check_bonus(inst, h)?;
            submodular_dks(inst, h, &cfg, &mut rng)?
        }
        None => submodular_dks(inst, &ZeroFunction { n: inst.n() }, &cfg, &mut rng)?,
    };
    Ok(DksResult {
        algorithm: "submodular_dks",
        seed,
        params: params.clone(),
        set: out.set,
        value: out.value,
        h: out.h,
        den: out.den,
        parts: out.parts,
        diagnostics: out.diagnostics,
    })
}

/// Exact optimum of one of the four problems.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum OracleResult {
    Dcg { ranking: Vec<usize>, cover_times: Vec<usize>, value: f64 },
    Dispersion { p: usize, set: Vec<usize>, value: f64 },
    Diversification { p: usize, set: Vec<usize>, value: f64, disp: f64, f: f64 },
    Dks { set: Vec<usize>, value: f64, h: f64, den: f64 },
}

impl OracleResult {
    pub fn value(&self) -> f64 {
        match *self {
            OracleResult::Dcg { value, .. }
            | OracleResult::Dispersion { value, .. }
            | OracleResult::Diversification { value, .. }
            | OracleResult::Dks { value, .. } => value,
        }
    }
}

pub fn oracle_dcg(inst: &SetSystemInstance) -> Result<OracleResult> {
    let (ranking, value) = brute_force_dcg::<f64>(inst)?;
    Ok(OracleResult::Dcg { ranking: ranking.perm().to_vec(), cover_times: ranking.cover_times().to_vec(), value })
}

pub fn oracle_dispersion(metric: &Metric, p: usize) -> Result<OracleResult> {
    let (set, value) = brute_force_dispersion(metric, p)?;
    Ok(OracleResult::Dispersion { p, set, value })
}

pub fn oracle_diversification(metric: &Metric, f: &Submodular, p: usize) -> Result<OracleResult> {
    let opt = brute_force_diversification(&DiversificationInstance::new(metric.clone(), f.clone(), p)?)?;
    Ok(OracleResult::Diversification { p, set: opt.set, value: opt.value, disp: opt.disp, f: opt.f })
}

pub fn oracle_dks(inst: &DksInstance<f64>, h: Option<&Submodular>) -> Result<OracleResult> {
    let (set, value) = match h {
        Some(h) => {
            check_bonus(inst, h)?;
            brute_force_subdks(inst, h)?
        }
        None => brute_force_subdks(inst, &ZeroFunction { n: inst.n() })?,
    };
    let hv = h.map_or(0.0, |h| h.eval(&set));
    Ok(OracleResult::Dks { den: inst.den_or_zero(&set), set, value, h: hv })
}
