//! Prefix enumeration around the LP rounding.
//!
//! Every ordered prefix of length `u` is tried; the rest of the ground set is
//! ranked by rounding the relaxation of the residual instance, whose gain is
//! the standard DCG shifted by `u` positions.

use itertools::Itertools;
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use super::{round_lp, solve_dcg_lp, tau, GainFunction, Ranking, RoundingParams};
use crate::error::{Error, Result};
use crate::lp::PivotRule;
use crate::rng::RngState;
use crate::setsystem::{CoverSet, SetSystemInstance};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PtasConfig {
    pub epsilon: f64,
    /// Prefix length; defaults to 2.
    pub u: Option<usize>,
    /// Defaults to `η / (6 ln(1/η))`.
    pub gamma: Option<f64>,
    /// Defaults to `ε`, raised to `2γ` when `γ` is given explicitly.
    pub eta: Option<f64>,
    pub trials: usize,
    /// Largest number of ordered prefixes enumerated.
    pub prefix_cap: u128,
    /// Constant used only by the `tau` diagnostic.
    pub c: f64,
    pub max_rounds: usize,
    pub pivot_rule: PivotRule,
}

impl PtasConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            u: None,
            gamma: None,
            eta: None,
            trials: 20,
            prefix_cap: 100_000,
            c: 1.0,
            max_rounds: 200,
            pivot_rule: PivotRule::Bland,
        }
    }

    pub fn rounding_params(&self) -> Result<RoundingParams> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.1) {
            return Err(Error::InvalidParameter(format!("epsilon = {} must lie in (0, 0.1]", self.epsilon)));
        }
        let (gamma, eta) = match (self.gamma, self.eta) {
            (None, None) => {
                let eta = self.epsilon;
                (eta / (6.0 * (1.0 / eta).ln()), eta)
            }
            (None, Some(eta)) => (eta / (6.0 * (1.0 / eta).ln()), eta),
            (Some(g), None) => (g, self.epsilon.max(2.0 * g)),
            (Some(g), Some(eta)) => (g, eta),
        };
        RoundingParams::new(gamma, eta, self.trials)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PtasDiagnostics {
    /// Largest `fixed prefix value + residual LP value` over the prefixes.
    pub lp_bound: f64,
    pub best_value: f64,
    pub u_requested: usize,
    pub u_used: usize,
    pub prefixes: u128,
    pub prefix_cap_hit: bool,
    pub gamma: f64,
    pub eta: f64,
    pub trials: usize,
    pub lp_rounds: usize,
    pub cuts_added: usize,
    pub lp_unconverged: usize,
    pub lp_failures: usize,
    /// `log10` of the prefix length the worst-case analysis asks for.
    pub theoretical_u_log10: f64,
    /// `tau` of the residual gain at `α = ε / 2`.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PtasOutcome<T> {
    pub ranking: Ranking,
    pub value: T,
    pub diagnostics: PtasDiagnostics,
}

fn ordered_prefix_count(n: usize, u: usize) -> u128 {
    (0..u).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128))
}

fn better<T: Real>(a: &(Vec<usize>, T), b: &(Vec<usize>, T)) -> bool {
    a.1 > b.1 || (a.1 == b.1 && a.0 < b.0)
}

struct Residual {
    rest: Vec<usize>,
    inst: Option<SetSystemInstance>,
}

/// Sets satisfied inside `prefix` are dropped; the others keep the members
/// outside the prefix (relabelled to `0..rest.len()`) and the outstanding
/// requirement.
fn residual(inst: &SetSystemInstance, prefix: &[usize]) -> Residual {
    let n = inst.n();
    let mut in_prefix = vec![false; n];
    for &e in prefix {
        in_prefix[e] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&e| !in_prefix[e]).collect();
    let mut label = vec![usize::MAX; n];
    for (i, &e) in rest.iter().enumerate() {
        label[e] = i;
    }
    let sets: Vec<CoverSet> = inst
        .sets()
        .iter()
        .filter_map(|s| {
            let inside = s.members.iter().filter(|&&e| in_prefix[e]).count();
            (inside < s.k).then(|| CoverSet {
                members: s.members.iter().filter(|&&e| !in_prefix[e]).map(|&e| label[e]).collect(),
                k: s.k - inside,
            })
        })
        .collect();
    let inst = if rest.is_empty() || sets.is_empty() {
        None
    } else {
        SetSystemInstance::new(rest.len(), sets).ok()
    };
    Residual { rest, inst }
}

#[derive(Default)]
struct PrefixStats {
    bound: f64,
    rounds: usize,
    cuts: usize,
    unconverged: usize,
    failures: usize,
}

/// Best-of ranking over all ordered prefixes and rounding trials.
pub fn ptas_dcg<T: Real>(inst: &SetSystemInstance, cfg: &PtasConfig, rng: &mut RngState) -> Result<PtasOutcome<T>> {
    let params = cfg.rounding_params()?;
    if cfg.prefix_cap == 0 {
        return Err(Error::InvalidParameter("prefix_cap must be positive".into()));
    }
    let n = inst.n();
    let f = GainFunction::DcgStandard;
    let u_requested = cfg.u.unwrap_or(2);
    let mut u = u_requested.min(n);
    while u > 0 && ordered_prefix_count(n, u) > cfg.prefix_cap {
        u -= 1;
    }
    let prefix_cap_hit = u < u_requested.min(n);
    let base_seed = rng.next_u64();
    let prefixes: Vec<Vec<usize>> = (0..n).permutations(u).collect();

    let per_prefix: Vec<((Vec<usize>, T), PrefixStats)> = prefixes
        .par_iter()
        .enumerate()
        .map(|(pi, prefix)| {
            let res = residual(inst, prefix);
            let mut stats = PrefixStats::default();
            let assemble = |tail: &[usize]| -> (Vec<usize>, T) {
                let perm: Vec<usize> = prefix.iter().copied().chain(tail.iter().map(|&i| res.rest[i])).collect();
                let value = Ranking::new(perm.clone(), inst).expect("prefix plus residual is a permutation").dcg(f);
                (perm, value)
            };
            let identity: Vec<usize> = (0..res.rest.len()).collect();
            let fallback = assemble(&identity);
            let Some(rinst) = res.inst.as_ref() else {
                stats.bound = fallback.1.as_f64();
                return (fallback, stats);
            };
            let shifted = GainFunction::DcgShifted(prefix.len());
            let relax = match solve_dcg_lp::<T>(rinst, shifted, cfg.max_rounds, cfg.pivot_rule) {
                Ok(r) if r.solution.is_optimal() => r,
                _ => {
                    stats.failures += 1;
                    stats.bound = f64::INFINITY;
                    return (fallback, stats);
                }
            };
            stats.rounds = relax.rounds;
            stats.cuts = relax.cuts_added;
            if !relax.converged {
                stats.unconverged += 1;
            }
            // sets finished inside the prefix contribute the same in every completion
            let fixed: f64 = Ranking::new(fallback.0.clone(), inst)
                .expect("valid")
                .cover_times()
                .iter()
                .filter(|&&t| t <= prefix.len())
                .map(|&t| f.at::<f64>(t))
                .sum();
            stats.bound = fixed + relax.objective().as_f64();
            let mut best: Option<(Vec<usize>, T)> = None;
            for trial in 0..params.trials {
                let mut trng = RngState::derive(base_seed, &[pi as u64, trial as u64]);
                let cand = match round_lp(relax.x(), relax.y(), rinst, shifted, &params, &mut trng) {
                    Ok(r) => assemble(r.perm()),
                    Err(_) => {
                        stats.failures += 1;
                        continue;
                    }
                };
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            (best.unwrap_or(fallback), stats)
        })
        .collect();

    let mut best: Option<(Vec<usize>, T)> = None;
    let mut diag = PtasDiagnostics {
        lp_bound: f64::NEG_INFINITY,
        best_value: 0.0,
        u_requested,
        u_used: u,
        prefixes: prefixes.len() as u128,
        prefix_cap_hit,
        gamma: params.gamma,
        eta: params.eta,
        trials: params.trials,
        lp_rounds: 0,
        cuts_added: 0,
        lp_unconverged: 0,
        lp_failures: 0,
        theoretical_u_log10: (100.0 / cfg.epsilon) * (4.0 * cfg.c / cfg.epsilon).log10(),
        tau: None,
    };
    for (cand, stats) in per_prefix {
        if best.as_ref().is_none_or(|b| better(&cand, b)) {
            best = Some(cand);
        }
        diag.lp_bound = diag.lp_bound.max(stats.bound);
        diag.lp_rounds += stats.rounds;
        diag.cuts_added += stats.cuts;
        diag.lp_unconverged += stats.unconverged;
        diag.lp_failures += stats.failures;
    }
    let (perm, value) = best.expect("at least one prefix");
    diag.best_value = value.as_f64();
    if n > u {
        diag.tau = tau::<f64>(GainFunction::DcgShifted(u), cfg.epsilon / 2.0, n - u, cfg.c).ok();
    }
    Ok(PtasOutcome {
        ranking: Ranking::new(perm, inst)?,
        value,
        diagnostics: diag,
    })
}
