//! The static costly-persuasion problem.
//!
//! Law enforcement picks a distribution over posteriors with mean equal to her
//! (effective) prior. Conviction pays once the posterior reaches the effective
//! threshold. With strictly convex `phi` the optimum is either degenerate or
//! binary with support `{b, threshold}`, where `b` solves the first-order
//! condition `h(b) = phi(b) + (t - b) phi'(b) + v - phi(t) = 0`.

mod oracle;

use serde::Serialize;

use crate::belief::{Belief, BELIEF_TOL};
use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::roots::safeguarded_newton;

pub use oracle::{concavify_oracle, upper_hull, Concavification};

/// Default oracle grid step.
pub const ORACLE_STEP: f64 = 1e-4;
/// Absolute tolerance on the low posterior.
pub const ROOT_TOL: f64 = 1e-12;

/// Shape of the sender's payoff once the posterior crosses the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UpperPayoff {
    /// Reward `v` for conviction, nothing otherwise.
    Flat,
    /// Weight `eta` on a correct-decision loss with penalty `rho` for convicting the innocent.
    PreferenceShaped { eta: f64, rho: f64 },
}

#[derive(Debug, Clone)]
pub struct StaticProblem {
    pub prior: Belief,
    pub threshold: Belief,
    pub reward: f64,
    pub cost: CostSpec,
    pub payoff: UpperPayoff,
}

impl StaticProblem {
    pub fn new(prior: Belief, threshold: Belief, reward: f64, cost: CostSpec) -> Result<Self> {
        Self::with_payoff(prior, threshold, reward, cost, UpperPayoff::Flat)
    }

    pub fn with_payoff(
        prior: Belief,
        threshold: Belief,
        reward: f64,
        cost: CostSpec,
        payoff: UpperPayoff,
    ) -> Result<Self> {
        if !prior.is_interior() {
            return Err(Error::NotInterior {
                name: "effective prior",
                value: prior.get(),
            });
        }
        if !(threshold.get() > 0.0) {
            return Err(Error::domain("effective threshold must be positive"));
        }
        if !(reward > 0.0 && reward.is_finite()) {
            return Err(Error::domain(format!("reward v = {reward} must be positive and finite")));
        }
        if let UpperPayoff::PreferenceShaped { eta, rho } = payoff {
            if !(0.0..=1.0).contains(&eta) || !(rho >= 0.0 && rho.is_finite()) {
                return Err(Error::domain(format!(
                    "preference weights need eta in [0, 1] and rho >= 0; got eta = {eta}, rho = {rho}"
                )));
            }
        }
        Ok(StaticProblem {
            prior,
            threshold,
            reward,
            cost,
            payoff,
        })
    }

    /// The reward term in the first-order condition. For preference-shaped
    /// payoffs the correct-decision terms at the threshold fold into it.
    pub fn effective_reward(&self) -> f64 {
        match self.payoff {
            UpperPayoff::Flat => self.reward,
            UpperPayoff::PreferenceShaped { eta, rho } => {
                let a = self.threshold.get();
                (1.0 - eta) * self.reward + eta * (a - rho * (1.0 - a))
            }
        }
    }

    /// The perceived value of ending at posterior `x`.
    pub fn value(&self, x: f64) -> Result<f64> {
        let phi = self.cost.phi(x)?;
        let convict = x >= self.threshold.get() - BELIEF_TOL;
        Ok(match self.payoff {
            UpperPayoff::Flat => {
                if convict {
                    self.reward - phi
                } else {
                    -phi
                }
            }
            UpperPayoff::PreferenceShaped { eta, rho } => {
                if convict {
                    -eta * rho * (1.0 - x) + (1.0 - eta) * self.reward - phi
                } else {
                    -eta * x - phi
                }
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Interior,
    NoAcquisition,
    FreeConviction,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::NoAcquisition => "no_acquisition",
            Regime::FreeConviction => "free_conviction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StaticSolution {
    pub regime: Regime,
    pub low: f64,
    pub high: f64,
    /// Probability of the high posterior (conviction) under the solver's prior.
    pub p: f64,
    /// Perceived value of the optimal distribution, when known.
    pub value: Option<f64>,
    /// The low posterior sits at the lowest evaluable belief rather than at a root.
    pub corner: bool,
}

impl StaticSolution {
    fn degenerate(regime: Regime, prior: f64, value: Option<f64>) -> Self {
        StaticSolution {
            regime,
            low: prior,
            high: prior,
            p: if regime == Regime::FreeConviction { 1.0 } else { 0.0 },
            value,
            corner: false,
        }
    }

    /// `(1 - p, p)`.
    pub fn support_weights(&self) -> (f64, f64) {
        (1.0 - self.p, self.p)
    }

    /// The optimal distribution over posteriors as `(posterior, weight)` pairs.
    pub fn distribution(&self) -> Vec<(f64, f64)> {
        match self.regime {
            Regime::Interior => vec![(self.low, 1.0 - self.p), (self.high, self.p)],
            _ => vec![(self.low, 1.0)],
        }
    }

    pub fn mean(&self) -> f64 {
        (1.0 - self.p) * self.low + self.p * self.high
    }
}

/// First-order residual at low posterior `b`, and its derivative `(t - b) phi''(b)`.
fn foc_with_slope(b: f64, problem: &StaticProblem) -> Result<(f64, f64)> {
    let t = problem.threshold.get();
    let cost = &problem.cost;
    let h = cost.phi(b)? + (t - b) * cost.phi_prime(b)? + problem.effective_reward() - cost.phi(t)?;
    let dh = (t - b) * cost.phi_double_prime(b)?;
    Ok((h, dh))
}

/// The first-order residual `h(b)` (or its preference-shaped analogue).
pub fn foc_residual_h(b: f64, problem: &StaticProblem) -> Result<f64> {
    Ok(foc_with_slope(b, problem)?.0)
}

fn numeric_at(e: Error, what: &str) -> Error {
    match e {
        Error::Divergent { at, order, direction } => Error::numeric(format!(
            "{what}: derivative of order {order} of phi diverges to {direction} at {at}"
        )),
        other => other,
    }
}

/// Solve the static problem by regime detection plus a bracketed root of `h`.
pub fn solve_static(problem: &StaticProblem) -> Result<StaticSolution> {
    let mu = problem.prior.get();
    let t = problem.threshold.get();
    let flat = matches!(problem.payoff, UpperPayoff::Flat);

    if mu >= t - BELIEF_TOL {
        if !flat {
            return Err(Error::domain(
                "preference-shaped binding analysis needs the prior below the threshold",
            ));
        }
        let value = problem.value(mu).ok();
        return Ok(StaticSolution::degenerate(Regime::FreeConviction, mu, value));
    }

    if t >= 1.0 {
        if problem.cost.phi(1.0).is_err() {
            // reaching certainty of guilt is infinitely costly
            let value = problem.value(mu).ok();
            return Ok(StaticSolution::degenerate(Regime::NoAcquisition, mu, value));
        }
        if !problem.cost.certainty_prohibitive(t, problem.effective_reward())? {
            return Err(Error::domain(
                "threshold 1 requires a cost under which certainty of innocence is prohibitively costly",
            ));
        }
    }

    let no_acquisition_value = problem.value(mu).map_err(|e| numeric_at(e, "value at prior"))?;
    let h_at = |b: f64| foc_with_slope(b, problem).map_err(|e| numeric_at(e, "first-order condition"));

    let (h_mu, _) = h_at(mu)?;
    if h_mu <= 0.0 {
        return Ok(StaticSolution::degenerate(
            Regime::NoAcquisition,
            mu,
            Some(no_acquisition_value),
        ));
    }

    let lo = problem.cost.slope_floor().min(mu);
    let (h_lo, _) = h_at(lo)?;
    let (b, corner) = if h_lo >= 0.0 {
        (lo, true)
    } else {
        assert_single_crossing(&h_at, lo, mu)?;
        (safeguarded_newton(h_at, lo, mu, ROOT_TOL)?, false)
    };

    let p = (mu - b) / (t - b);
    let value = (1.0 - p) * problem.value(b).map_err(|e| numeric_at(e, "value at b"))?
        + p * problem.value(t).map_err(|e| numeric_at(e, "value at threshold"))?;
    Ok(StaticSolution {
        regime: Regime::Interior,
        low: b,
        high: t,
        p,
        value: Some(value),
        corner,
    })
}

/// `h` is strictly increasing; a second sign change means the cost is not convex.
fn assert_single_crossing<F>(h: &F, lo: f64, hi: f64) -> Result<()>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    const PROBES: usize = 16;
    let mut changes = 0;
    let mut prev_negative = true;
    for i in 1..PROBES {
        let x = lo + (hi - lo) * i as f64 / PROBES as f64;
        let negative = h(x)?.0 < 0.0;
        if negative != prev_negative {
            changes += 1;
        }
        prev_negative = negative;
    }
    if changes > 1 || (changes == 1 && prev_negative) {
        return Err(Error::numeric(format!(
            "first-order condition changes sign more than once on [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Reward ratio `d = sqrt(v / kappa)` of the variance cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RewardRatio(f64);

impl RewardRatio {
    pub fn new(v: f64, kappa: f64) -> Result<Self> {
        if !(v > 0.0 && kappa > 0.0 && v.is_finite() && kappa.is_finite()) {
            return Err(Error::domain("reward and kappa must be positive and finite"));
        }
        Ok(RewardRatio((v / kappa).sqrt()))
    }

    pub fn from_ratio(d: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::domain(format!("reward ratio d = {d} must be positive")));
        }
        Ok(RewardRatio(d))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Exact solution under the variance cost: support `{t - d, t}`.
pub fn solve_variance_closed_form(
    mu_eff: Belief,
    a_eff: Belief,
    d: RewardRatio,
) -> Result<StaticSolution> {
    let (mu, t, d) = (mu_eff.get(), a_eff.get(), d.get());
    if mu >= t - BELIEF_TOL {
        return Ok(StaticSolution::degenerate(Regime::FreeConviction, mu, None));
    }
    if t <= d {
        return Err(Error::ConditionViolated(format!(
            "Condition 1 violated: effective threshold {t} <= d = {d}"
        )));
    }
    let b = t - d;
    if mu <= b + BELIEF_TOL {
        return Ok(StaticSolution::degenerate(Regime::NoAcquisition, mu, None));
    }
    Ok(StaticSolution {
        regime: Regime::Interior,
        low: b,
        high: t,
        p: (mu + d - t) / d,
        value: None,
        corner: false,
    })
}

/// Samples of the perceived value function on a uniform grid over the cost's
/// finite domain, with the prior and threshold inserted exactly.
pub fn value_samples(problem: &StaticProblem, step: f64) -> Result<Vec<(f64, f64)>> {
    if !(step > 0.0) {
        return Err(Error::domain("grid step must be positive"));
    }
    let (lo, hi) = problem.cost.value_domain();
    let n = ((hi - lo) / step).round() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|i| (lo + i as f64 * step).min(hi)).collect();
    for extra in [problem.prior.get(), problem.threshold.get()] {
        if extra >= lo && extra <= hi {
            let k = xs.partition_point(|&x| x < extra);
            if xs.get(k) != Some(&extra) {
                xs.insert(k, extra);
            }
        }
    }
    xs.dedup();
    xs.iter().map(|&x| Ok((x, problem.value(x)?))).collect()
}

/// Solve by grid concavification instead of the first-order condition.
pub fn solve_by_oracle(problem: &StaticProblem, step: f64) -> Result<(StaticSolution, Concavification)> {
    let samples = value_samples(problem, step)?;
    let mu = problem.prior.get();
    let c = concavify_oracle(&samples, mu)?;
    let solution = if c.is_degenerate() {
        let regime = if mu >= problem.threshold.get() - BELIEF_TOL {
            Regime::FreeConviction
        } else {
            Regime::NoAcquisition
        };
        StaticSolution::degenerate(regime, mu, Some(c.value))
    } else {
        let (low, high) = c.support;
        let regime = if high < problem.threshold.get() - BELIEF_TOL {
            // chord entirely below the threshold: no conviction ever
            Regime::NoAcquisition
        } else {
            Regime::Interior
        };
        StaticSolution {
            regime,
            low,
            high,
            p: c.high_weight,
            value: Some(c.value),
            corner: low <= samples[0].0,
        }
    };
    Ok((solution, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> Belief {
        Belief::new(x).unwrap()
    }

    fn variance_problem(kappa: f64, v: f64, prior: f64, threshold: f64) -> StaticProblem {
        StaticProblem::new(
            b(prior),
            b(threshold),
            v,
            CostSpec::variance(kappa, prior).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn running_example_interior() {
        let s = solve_static(&variance_problem(4.0, 1.0, 0.3, 0.72)).unwrap();
        assert_eq!(s.regime, Regime::Interior);
        assert!((s.low - 0.22).abs() < 1e-12);
        assert_eq!(s.high, 0.72);
        assert!((s.p - 0.16).abs() < 1e-12);
        assert!((s.mean() - 0.3).abs() < 1e-12);
        // value = -(1-p) phi(b) + p (v - phi(t))
        let expected = -0.84 * 4.0 * 0.0064 + 0.16 * (1.0 - 4.0 * 0.1764);
        assert!((s.value.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn free_conviction_when_prior_reaches_threshold() {
        let s = solve_static(&variance_problem(4.0, 1.0, 0.7, 0.6)).unwrap();
        assert_eq!(s.regime, Regime::FreeConviction);
        assert_eq!(s.p, 1.0);
    }

    #[test]
    fn no_acquisition_when_reward_ratio_small() {
        // d = 0.2 < ubar_d = 0.42
        let s = solve_static(&variance_problem(25.0, 1.0, 0.3, 0.72)).unwrap();
        assert_eq!(s.regime, Regime::NoAcquisition);
        assert_eq!(s.p, 0.0);
        assert_eq!(s.low, 0.3);
    }

    #[test]
    fn indifference_resolves_to_no_acquisition() {
        // d exactly spans prior to threshold: h(mu) = 0
        let s = solve_static(&variance_problem(1.0, 0.25, 0.25, 0.75)).unwrap();
        assert_eq!(s.regime, Regime::NoAcquisition);
    }

    #[test]
    fn variance_corner_when_condition_fails() {
        // d = 0.5 > t = 0.45: the low posterior hits certainty of innocence
        let s = solve_static(&variance_problem(4.0, 1.0, 0.3, 0.45)).unwrap();
        assert_eq!(s.regime, Regime::Interior);
        assert!(s.corner);
        assert_eq!(s.low, 0.0);
        assert!((s.p - 0.3 / 0.45).abs() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let d = RewardRatio::new(1.0, 4.0).unwrap();
        let s = solve_variance_closed_form(b(0.3), b(0.72), d).unwrap();
        assert!((s.low - 0.22).abs() < 1e-15 && (s.p - 0.16).abs() < 1e-15);
        let s = solve_variance_closed_form(b(0.2), b(0.6), d).unwrap();
        assert!((s.low - 0.1).abs() < 1e-15 && (s.p - 0.2).abs() < 1e-15);
        let s = solve_variance_closed_form(b(0.1), b(0.6), d).unwrap();
        assert_eq!((s.regime, s.p), (Regime::NoAcquisition, 0.0));
        assert!(matches!(
            solve_variance_closed_form(b(0.3), b(0.45), d),
            Err(Error::ConditionViolated(_))
        ));
    }

    #[test]
    fn closed_form_matches_generic_solver() {
        for &(mu, t, kappa, v) in &[(0.3, 0.72, 4.0, 1.0), (0.2, 0.6, 4.0, 1.0), (0.5, 0.9, 2.0, 0.3)] {
            let generic = solve_static(&variance_problem(kappa, v, mu, t)).unwrap();
            let exact =
                solve_variance_closed_form(b(mu), b(t), RewardRatio::new(v, kappa).unwrap()).unwrap();
            assert_eq!(generic.regime, exact.regime);
            assert!((generic.low - exact.low).abs() < 1e-10);
            assert!((generic.p - exact.p).abs() < 1e-10);
        }
    }

    #[test]
    fn foc_examples() {
        let problem = variance_problem(4.0, 1.0, 0.3, 0.72);
        assert!(foc_residual_h(0.22, &problem).unwrap().abs() < 1e-12);
        assert!((foc_residual_h(0.72, &problem).unwrap() - 1.0).abs() < 1e-12);
        let (h1, h2, h3) = (
            foc_residual_h(0.1, &problem).unwrap(),
            foc_residual_h(0.22, &problem).unwrap(),
            foc_residual_h(0.3, &problem).unwrap(),
        );
        assert!(h1 < h2 && h2 < h3);
    }

    #[test]
    fn oracle_matches_closed_form_on_running_example() {
        let problem = variance_problem(4.0, 1.0, 0.3, 0.72);
        let exact = solve_static(&problem).unwrap();
        let (approx, _) = solve_by_oracle(&problem, ORACLE_STEP).unwrap();
        assert!((approx.low - 0.22).abs() < 2e-4);
        assert!((approx.high - 0.72).abs() < 2e-4);
        assert!((approx.value.unwrap() - exact.value.unwrap()).abs() < 1e-4);
    }

    #[test]
    fn entropy_interior_has_positive_low_posterior() {
        let problem = StaticProblem::new(b(0.2), b(0.6), 0.6, CostSpec::entropy(0.2).unwrap()).unwrap();
        let s = solve_static(&problem).unwrap();
        assert_eq!(s.regime, Regime::Interior);
        assert!(!s.corner && s.low > 0.0 && s.low < 0.2);
        assert!(foc_residual_h(s.low, &problem).unwrap().abs() < 1e-9);
        let (approx, _) = solve_by_oracle(&problem, ORACLE_STEP).unwrap();
        assert!((approx.low - s.low).abs() < 2e-4);
    }

    #[test]
    fn log_likelihood_threshold_one_never_acquires() {
        let problem =
            StaticProblem::new(b(0.3), b(1.0), 5.0, CostSpec::log_likelihood(0.3).unwrap()).unwrap();
        assert_eq!(solve_static(&problem).unwrap().regime, Regime::NoAcquisition);
    }

    #[test]
    fn variance_threshold_one_requires_prohibitive_certainty() {
        // v < kappa: interior with b = 1 - d
        let ok = variance_problem(4.0, 1.0, 0.6, 1.0);
        let s = solve_static(&ok).unwrap();
        assert!((s.low - 0.5).abs() < 1e-10);
        // v > kappa: low posterior would be 0
        let bad = variance_problem(1.0, 2.0, 0.6, 1.0);
        assert!(matches!(solve_static(&bad), Err(Error::Domain(_))));
    }
}
