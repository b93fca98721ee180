//! Preference-based bias: law enforcement weighs correct decisions against the reward.
//!
//! With weight `eta` on a loss of 1 for acquitting the guilty and `rho` for
//! convicting the innocent, the value of posterior `x` is `-eta x - phi(x)`
//! below the threshold and `-eta rho (1 - x) + (1 - eta) v - phi(x)` at or
//! above it. When the decision maker's threshold binds, the optimum has
//! support `{b, a}` and `b` solves the first-order condition with the reward
//! replaced by `(1 - eta) v + eta (a - rho (1 - a))`.

use serde::Serialize;

use crate::analysis::{outcome_probs, OutcomeProbs};
use crate::belief::{Belief, BELIEF_TOL};
use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::solver::{
    solve_by_oracle, solve_static, Regime, StaticProblem, StaticSolution, UpperPayoff, ORACLE_STEP,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreferenceParams {
    pub eta: f64,
    pub rho: f64,
    pub v: f64,
    pub a: Belief,
}

impl PreferenceParams {
    pub fn new(eta: f64, rho: f64, v: f64, a: Belief) -> Result<Self> {
        let params = PreferenceParams { eta, rho, v, a };
        params.validate()?;
        Ok(params)
    }

    /// Lowest threshold consistent with the decision maker being stricter than
    /// law enforcement; undefined (no constraint) when `eta = 0`.
    pub fn threshold_floor(&self) -> Option<f64> {
        (self.eta > 0.0).then(|| {
            (self.rho * self.eta - (1.0 - self.eta) * self.v) / (self.eta * (1.0 + self.rho))
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(Error::domain(format!("eta = {} must lie in [0, 1]", self.eta)));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::domain(format!("rho = {} must be nonnegative", self.rho)));
        }
        if !(self.v > 0.0 && self.v.is_finite()) {
            return Err(Error::domain(format!("v = {} must be positive", self.v)));
        }
        if let Some(floor) = self.threshold_floor() {
            if self.a.get() < floor - BELIEF_TOL {
                return Err(Error::ConditionViolated(format!(
                    "threshold a = {} below the preference floor (rho eta - (1 - eta) v) / (eta (1 + rho)) = {floor}",
                    self.a.get()
                )));
            }
        }
        Ok(())
    }

    fn payoff(&self) -> UpperPayoff {
        if self.eta == 0.0 {
            UpperPayoff::Flat
        } else {
            UpperPayoff::PreferenceShaped {
                eta: self.eta,
                rho: self.rho,
            }
        }
    }

    pub fn effective_reward(&self) -> f64 {
        let a = self.a.get();
        (1.0 - self.eta) * self.v + self.eta * (a - self.rho * (1.0 - a))
    }

    fn problem(&self, mu: Belief, cost: &CostSpec) -> Result<StaticProblem> {
        StaticProblem::with_payoff(mu, self.a, self.v, cost.clone(), self.payoff())
    }
}

/// Perceived value of ending at posterior `x`; the threshold itself convicts.
pub fn preference_value(x: Belief, params: &PreferenceParams, cost: &CostSpec) -> Result<f64> {
    let x = x.get();
    let phi = cost.phi(x)?;
    let (eta, rho) = (params.eta, params.rho);
    Ok(if x >= params.a.get() - BELIEF_TOL {
        -eta * rho * (1.0 - x) + (1.0 - eta) * params.v - phi
    } else {
        -eta * x - phi
    })
}

/// Which clauses of the binding-case condition hold at a candidate low posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Assumption1Report {
    pub b: f64,
    pub b_positive: bool,
    pub prior_between: bool,
    /// `phi'(a) - phi'(b)`.
    pub slope_gap: f64,
    /// `eta (1 + rho)`.
    pub slope_required: f64,
    pub slope_condition: bool,
}

impl Assumption1Report {
    pub fn holds(&self) -> bool {
        self.b_positive && self.prior_between && self.slope_condition
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.b_positive {
            out.push("low posterior b is not positive");
        }
        if !self.prior_between {
            out.push("prior not strictly between b and a");
        }
        if !self.slope_condition {
            out.push("slope condition phi'(a) - phi'(b) >= eta (1 + rho) fails");
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceBranch {
    /// Support `{b, a}` from the first-order condition.
    Binding,
    /// Grid concavification; the high posterior may exceed `a`. Experimental.
    NonBindingOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreferenceSolution {
    pub branch: PreferenceBranch,
    pub solution: StaticSolution,
    pub probs: OutcomeProbs,
    pub assumption1: Assumption1Report,
    /// `phi'(x_H) - phi'(b) - eta (1 + rho)` on the oracle branch when `x_H > a`.
    pub tangency_residual: Option<f64>,
}

fn assumption1(
    params: &PreferenceParams,
    mu: f64,
    solution: &StaticSolution,
    cost: &CostSpec,
) -> Result<Assumption1Report> {
    let a = params.a.get();
    let b = solution.low;
    let slope_gap = cost.phi_prime(a)? - cost.phi_prime(b)?;
    let slope_required = params.eta * (1.0 + params.rho);
    Ok(Assumption1Report {
        b,
        b_positive: b > 0.0 && !solution.corner,
        prior_between: solution.regime == Regime::Interior && b < mu && mu < a,
        slope_gap,
        slope_required,
        slope_condition: slope_gap >= slope_required,
    })
}

pub fn solve_preference(
    params: &PreferenceParams,
    mu: Belief,
    cost: &CostSpec,
) -> Result<PreferenceSolution> {
    params.validate()?;
    let problem = params.problem(mu, cost)?;
    let m = mu.get();

    if params.eta == 0.0 {
        let solution = solve_static(&problem)?;
        let report = assumption1(params, m, &solution, cost)?;
        return Ok(PreferenceSolution {
            branch: PreferenceBranch::Binding,
            probs: outcome_probs(&solution, mu, mu)?,
            solution,
            assumption1: report,
            tangency_residual: None,
        });
    }

    if m < params.a.get() - BELIEF_TOL {
        let solution = solve_static(&problem)?;
        let report = assumption1(params, m, &solution, cost)?;
        if report.holds() {
            return Ok(PreferenceSolution {
                branch: PreferenceBranch::Binding,
                probs: outcome_probs(&solution, mu, mu)?,
                solution,
                assumption1: report,
                tangency_residual: None,
            });
        }
        return oracle_branch(params, mu, cost, &problem, report);
    }
    let report = Assumption1Report {
        b: m,
        b_positive: m > 0.0,
        prior_between: false,
        slope_gap: 0.0,
        slope_required: params.eta * (1.0 + params.rho),
        slope_condition: false,
    };
    oracle_branch(params, mu, cost, &problem, report)
}

fn oracle_branch(
    params: &PreferenceParams,
    mu: Belief,
    cost: &CostSpec,
    problem: &StaticProblem,
    report: Assumption1Report,
) -> Result<PreferenceSolution> {
    let (solution, _) = solve_by_oracle(problem, ORACLE_STEP)?;
    let tangency_residual = if solution.regime == Regime::Interior && solution.high > params.a.get() {
        Some(
            cost.phi_prime(solution.high)?
                - cost.phi_prime(solution.low)?
                - params.eta * (1.0 + params.rho),
        )
    } else {
        None
    };
    Ok(PreferenceSolution {
        branch: PreferenceBranch::NonBindingOracle,
        probs: outcome_probs(&solution, mu, mu)?,
        solution,
        assumption1: report,
        tangency_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StaticsParameter {
    Threshold,
    Reward,
    Rho,
    Eta,
}

/// Predicted sign of a comparative static.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPrediction {
    NonPositive,
    NonNegative,
    Positive,
    Negative,
    Zero,
}

impl SignPrediction {
    fn admits(self, slope: f64) -> bool {
        const SLACK: f64 = 1e-9;
        match self {
            SignPrediction::NonPositive => slope <= SLACK,
            SignPrediction::NonNegative => slope >= -SLACK,
            SignPrediction::Positive => slope > 0.0,
            SignPrediction::Negative => slope < 0.0,
            SignPrediction::Zero => slope.abs() <= 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticsEntry {
    pub parameter: StaticsParameter,
    /// Central-difference slope of the wrongful conviction rate.
    pub slope: f64,
    pub step: f64,
    pub predicted: SignPrediction,
    pub agrees: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PreferenceStatics {
    pub threshold: StaticsEntry,
    pub reward: StaticsEntry,
    pub rho: StaticsEntry,
    pub eta: StaticsEntry,
}

impl PreferenceStatics {
    pub fn entries(&self) -> [StaticsEntry; 4] {
        [self.threshold, self.reward, self.rho, self.eta]
    }

    pub fn all_agree(&self) -> bool {
        self.entries().iter().all(|e| e.agrees)
    }
}

pub const STATICS_STEP: f64 = 1e-4;
const STATICS_SHRINKS: usize = 2;

fn perturbed(params: &PreferenceParams, which: StaticsParameter, delta: f64) -> Result<PreferenceParams> {
    let mut p = *params;
    match which {
        StaticsParameter::Threshold => p.a = Belief::new(params.a.get() + delta)?,
        StaticsParameter::Reward => p.v += delta,
        StaticsParameter::Rho => p.rho += delta,
        StaticsParameter::Eta => p.eta += delta,
    }
    Ok(p)
}

fn binding_lambda(params: &PreferenceParams, mu: Belief, cost: &CostSpec) -> Result<Option<f64>> {
    let s = solve_preference(params, mu, cost)?;
    Ok((s.branch == PreferenceBranch::Binding && s.solution.regime == Regime::Interior)
        .then_some(s.probs.lambda))
}

fn statics_entry(
    params: &PreferenceParams,
    mu: Belief,
    cost: &CostSpec,
    which: StaticsParameter,
    predicted: SignPrediction,
) -> Result<StaticsEntry> {
    let mut step = STATICS_STEP;
    for _ in 0..=STATICS_SHRINKS {
        let up_params = perturbed(params, which, step)?;
        let down_params = perturbed(params, which, -step)?;
        // one-sided at the edge of the parameter domain (rho = 0, eta = 0 or 1)
        let (up_params, down_params, span) = if down_params.validate().is_err() {
            (up_params, *params, step)
        } else if up_params.validate().is_err() {
            (*params, down_params, step)
        } else {
            (up_params, down_params, 2.0 * step)
        };
        let up = binding_lambda(&up_params, mu, cost)?;
        let down = binding_lambda(&down_params, mu, cost)?;
        if let (Some(up), Some(down)) = (up, down) {
            let slope = (up - down) / span;
            return Ok(StaticsEntry {
                parameter: which,
                slope,
                step,
                predicted,
                agrees: predicted.admits(slope),
            });
        }
        step /= 10.0;
    }
    Err(Error::numeric(format!(
        "binding regime changes inside the difference stencil for {which:?} at every step down to {step}"
    )))
}

/// Numeric slopes of the wrongful conviction rate in `a`, `v`, `rho` and `eta`,
/// each compared with its analytic sign.
pub fn preference_statics(
    params: &PreferenceParams,
    mu: Belief,
    cost: &CostSpec,
) -> Result<PreferenceStatics> {
    if binding_lambda(params, mu, cost)?.is_none() {
        return Err(Error::domain(
            "comparative statics need a binding interior solution at the evaluation point",
        ));
    }
    let a = params.a.get();
    let eta_sign = a - params.rho * (1.0 - a) - params.v;
    let eta_prediction = if eta_sign > 0.0 {
        SignPrediction::Positive
    } else if eta_sign < 0.0 {
        SignPrediction::Negative
    } else {
        SignPrediction::Zero
    };
    Ok(PreferenceStatics {
        threshold: statics_entry(params, mu, cost, StaticsParameter::Threshold, SignPrediction::NonPositive)?,
        reward: statics_entry(params, mu, cost, StaticsParameter::Reward, SignPrediction::NonNegative)?,
        rho: statics_entry(params, mu, cost, StaticsParameter::Rho, SignPrediction::NonPositive)?,
        eta: statics_entry(params, mu, cost, StaticsParameter::Eta, eta_prediction)?,
    })
}
