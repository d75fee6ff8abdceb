//! Randomized rounding of the DCG relaxation into a ranking.

use super::{GainFunction, Ranking};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::setsystem::SetSystemInstance;
use crate::Real;

/// Parameters of [`round_lp`].
///
/// `gamma` scales the inclusion probabilities; `eta` is the threshold used in
/// the analysis (see [`super::split_times`]) and must be at least `2 gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundingParams {
    pub gamma: f64,
    pub eta: f64,
    pub trials: usize,
}

impl RoundingParams {
    pub fn new(gamma: f64, eta: f64, trials: usize) -> Result<Self> {
        let p = Self { gamma, eta, trials };
        p.validate()?;
        Ok(p)
    }

    /// `η = ε`, `γ = η / (6 ln(1/η))`.
    pub fn from_epsilon(epsilon: f64, trials: usize) -> Result<Self> {
        let eta = epsilon;
        Self::new(eta / (6.0 * (1.0 / eta).ln()), eta, trials)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 0.1) {
            return Err(Error::InvalidParameter(format!("gamma = {} must lie in (0, 0.1)", self.gamma)));
        }
        if !(self.eta > 0.0 && self.eta <= 0.1) {
            return Err(Error::InvalidParameter(format!("eta = {} must lie in (0, 0.1]", self.eta)));
        }
        if self.eta < 2.0 * self.gamma {
            return Err(Error::InvalidParameter(format!(
                "eta = {} must be at least 2 * gamma = {}",
                self.eta,
                2.0 * self.gamma
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        Ok(())
    }
}

fn check_assignment<T: Real>(x: &[T], n: usize) -> Result<()> {
    if x.len() != n * n {
        return Err(Error::ShapeMismatch(format!("x has {} entries, expected {}", x.len(), n * n)));
    }
    let tol = T::lit(1e-6);
    if let Some(i) = x.iter().position(|&v| v < -tol || v > T::one() + tol) {
        return Err(Error::InfeasibleSolution(format!("x entry {i} outside [0, 1]")));
    }
    for e in 0..n {
        let row: T = x[e * n..(e + 1) * n].iter().copied().sum();
        if (row - T::one()).abs() > tol {
            return Err(Error::InfeasibleSolution(format!("element {e} has total mass {row}")));
        }
    }
    for t in 0..n {
        let col: T = (0..n).map(|e| x[e * n + t]).sum();
        if (col - T::one()).abs() > tol {
            return Err(Error::InfeasibleSolution(format!("position {} has total mass {col}", t + 1)));
        }
    }
    Ok(())
}

/// Rounds an LP solution `(x, y)` into a ranking.
///
/// Phase `i = 1..=⌈log2 n⌉` looks at horizon `t_i = min(n, 2^i)`, includes
/// each element independently with probability
/// `min(1, z_{e,i} / (γ f(t_i)))` where `z_{e,i}` is its LP mass up to
/// `t_i`, and appends the newly drawn elements in ascending index order.
/// Elements never drawn follow in ascending order.
pub fn round_lp<T: Real>(
    x: &[T],
    y: &[T],
    inst: &SetSystemInstance,
    f: GainFunction,
    params: &RoundingParams,
    rng: &mut RngState,
) -> Result<Ranking> {
    params.validate()?;
    let n = inst.n();
    check_assignment(x, n)?;
    if y.len() != inst.m() * n {
        return Err(Error::ShapeMismatch(format!("y has {} entries, expected {}", y.len(), inst.m() * n)));
    }
    let gamma = T::lit(params.gamma);
    let phases = usize::BITS - (n.max(1) - 1).leading_zeros(); // ⌈log2 n⌉
    let mut placed = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    for i in 1..=phases {
        let horizon = n.min(1usize << i);
        let scale = gamma * f.at::<T>(horizon);
        for e in 0..n {
            let z: T = x[e * n..e * n + horizon].iter().copied().sum();
            let p = (z / scale).min(T::one()).max(T::zero());
            if rng.bernoulli(p.as_f64()) && !placed[e] {
                placed[e] = true;
                perm.push(e);
            }
        }
    }
    perm.extend((0..n).filter(|&e| !placed[e]));
    Ranking::new(perm, inst)
}

/// `min_{t ∈ [n]} f(C ln(1/α)/α · t/f(t)) / f(t)`, with `f` evaluated by its
/// closed form beyond `n`.
pub fn tau<T: Real>(f: GainFunction, alpha: f64, n: usize, c: f64) -> Result<T> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 0.5)")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("tau needs n >= 1".into()));
    }
    let stretch = T::lit(c * (1.0 / alpha).ln() / alpha);
    Ok((1..=n)
        .map(|t| {
            let ft = f.at::<T>(t);
            f.eval(stretch * T::of_usize(t) / ft) / ft
        })
        .fold(T::infinity(), T::min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{dcg_value, solve_dcg_lp};
    use crate::lp::PivotRule;
    use crate::setsystem::CoverSet;

    fn perm_matrix(perm: &[usize]) -> Vec<f64> {
        let n = perm.len();
        let mut x = vec![0.0; n * n];
        for (pos, &e) in perm.iter().enumerate() {
            x[e * n + pos] = 1.0;
        }
        x
    }

    fn toy(n: usize) -> SetSystemInstance {
        SetSystemInstance::new(n, vec![CoverSet { members: (0..n).collect(), k: 1 }]).unwrap()
    }

    #[test]
    fn inclusion_probability_saturates() {
        // z = 0.2, γ = 0.1, f = 1 → p = min(1, 2) = 1
        let p = (0.2f64 / (0.1 * GainFunction::Constant.at::<f64>(2))).min(1.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn params_validation() {
        assert!(RoundingParams::new(0.05, 0.1, 10).is_ok());
        assert!(RoundingParams::new(0.06, 0.1, 10).is_err());
        assert!(RoundingParams::new(0.0, 0.1, 10).is_err());
        assert!(RoundingParams::new(0.01, 0.1, 0).is_err());
        let p = RoundingParams::from_epsilon(0.05, 1).unwrap();
        assert!(p.eta >= 2.0 * p.gamma);
    }

    #[test]
    fn integral_solution_keeps_phase_order() {
        // x is the permutation (3, 1, 0, 2); with γ tiny every element with
        // mass inside the horizon is drawn, so phases deliver positions
        // {1,2} then {3,4}, each in ascending index order.
        let perm = [3usize, 1, 0, 2];
        let x = perm_matrix(&perm);
        let inst = toy(4);
        let y = vec![1.0; 4];
        let params = RoundingParams::new(1e-6, 0.1, 1).unwrap();
        let r = round_lp(&x, &y, &inst, GainFunction::DcgStandard, &params, &mut RngState::new(1)).unwrap();
        assert_eq!(r.perm(), &[1, 3, 0, 2]);
    }

    #[test]
    fn rejects_infeasible_input() {
        let inst = toy(2);
        let params = RoundingParams::new(0.05, 0.1, 1).unwrap();
        let x = vec![1.0, 0.0, 1.0, 0.0];
        let err = round_lp(&x, &[0.0; 2], &inst, GainFunction::DcgStandard, &params, &mut RngState::new(0));
        assert!(matches!(err, Err(Error::InfeasibleSolution(_))));
    }

    #[test]
    fn always_a_bijection_and_deterministic() {
        let n = 6;
        let inst = SetSystemInstance::new(
            n,
            vec![
                CoverSet { members: vec![0, 1, 2], k: 2 },
                CoverSet { members: vec![3, 4], k: 1 },
                CoverSet { members: vec![1, 5], k: 2 },
                CoverSet { members: vec![2, 4, 5], k: 1 },
            ],
        )
        .unwrap();
        let lp = solve_dcg_lp::<f64>(&inst, GainFunction::DcgStandard, 100, PivotRule::Bland).unwrap();
        let params = RoundingParams::new(0.05, 0.1, 1).unwrap();
        let mut total = 0.0;
        for seed in 0..500 {
            let r = round_lp(lp.x(), lp.y(), &inst, GainFunction::DcgStandard, &params, &mut RngState::new(seed)).unwrap();
            let again = round_lp(lp.x(), lp.y(), &inst, GainFunction::DcgStandard, &params, &mut RngState::new(seed)).unwrap();
            assert_eq!(r, again);
            let mut sorted = r.perm().to_vec();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..n).collect::<Vec<_>>());
            total += dcg_value::<f64>(r.perm(), &inst, GainFunction::DcgStandard).unwrap();
        }
        let mean = total / 500.0;
        assert!(mean >= 0.5 * lp.objective(), "mean {mean} vs LP {}", lp.objective());
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau::<f64>(GainFunction::Constant, 0.25, 8, 1.0).unwrap(), 1.0);
        // direct loop
        let direct = (1..=8)
            .map(|t| {
                let f = |v: f64| 1.0 / (v + 1.0).log2();
                let ft = f(t as f64);
                f((4.0f64).ln() / 0.25 * t as f64 / ft) / ft
            })
            .fold(f64::INFINITY, f64::min);
        let got = tau::<f64>(GainFunction::DcgStandard, 0.25, 8, 1.0).unwrap();
        assert!((got - direct).abs() < 1e-12);
        // grows toward 1 with the shift
        let sweep: Vec<f64> = [1usize, 10, 100, 10_000, 1_000_000, 1 << 40]
            .iter()
            .map(|&u| tau::<f64>(GainFunction::DcgShifted(u), 0.25, 8, 1.0).unwrap())
            .collect();
        assert!(sweep.windows(2).all(|w| w[1] >= w[0]));
        assert!(*sweep.last().unwrap() > 0.9 && *sweep.last().unwrap() <= 1.0);
    }
}
