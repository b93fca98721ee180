//! Conviction statistics under belief bias and the threshold constants that
//! classify when bias helps or hurts an innocent defendant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::belief::{
    effective_threshold_biased_dm, effective_threshold_biased_l, Belief, BELIEF_TOL,
};
use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::numdiff;
use crate::roots::bisect;
use crate::solver::{solve_static, Regime, RewardRatio, StaticProblem, StaticSolution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutcomeProbs {
    /// Conviction probability of a guilty defendant.
    pub gamma: f64,
    /// Conviction probability of an innocent defendant.
    pub lambda: f64,
    /// Unconditional conviction probability under the true prior.
    pub p_true: f64,
    /// Unconditional conviction probability under the solving agent's prior.
    pub p_subjective: f64,
}

/// Conditional conviction rates of a solution computed under `mu_subjective`.
///
/// Conditional on the state, the law of the evidence is prior-free, so these
/// are also the true conditional rates.
pub fn outcome_probs(
    solution: &StaticSolution,
    mu_true: Belief,
    mu_subjective: Belief,
) -> Result<OutcomeProbs> {
    let (gamma, lambda) = match solution.regime {
        Regime::NoAcquisition => (0.0, 0.0),
        Regime::FreeConviction => (1.0, 1.0),
        Regime::Interior => {
            let ms = mu_subjective.get();
            if !mu_subjective.is_interior() {
                return Err(Error::NotInterior {
                    name: "subjective prior",
                    value: ms,
                });
            }
            let (high, p) = (solution.high, solution.p);
            (high * p / ms, (1.0 - high) * p / (1.0 - ms))
        }
    };
    let mu = mu_true.get();
    Ok(OutcomeProbs {
        gamma,
        lambda,
        p_true: mu * gamma + (1.0 - mu) * lambda,
        p_subjective: solution.p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BiasHolder {
    /// Law enforcement holds the inflated prior.
    L,
    /// The decision maker holds the inflated prior.
    DM,
}

impl BiasHolder {
    pub fn as_str(self) -> &'static str {
        match self {
            BiasHolder::L => "L",
            BiasHolder::DM => "DM",
        }
    }
}

/// Base parameters shared by every point of a bias sweep.
#[derive(Debug, Clone)]
pub struct BiasScenario {
    pub mu: Belief,
    pub a: Belief,
    pub v: f64,
    pub cost: CostSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasedOutcome {
    pub who: BiasHolder,
    pub mu_b: f64,
    /// Threshold in the solving agent's belief scale.
    pub threshold: f64,
    pub solution: StaticSolution,
    pub probs: OutcomeProbs,
}

impl BiasScenario {
    pub fn new(mu: Belief, a: Belief, v: f64, cost: CostSpec) -> Result<Self> {
        if !mu.is_interior() {
            return Err(Error::NotInterior { name: "mu", value: mu.get() });
        }
        if !(a.get() > 0.0) {
            return Err(Error::domain("conviction threshold must be positive"));
        }
        Ok(BiasScenario { mu, a, v, cost })
    }

    /// Variance-cost scenario with `kappa = 1` and reward `d^2`.
    pub fn variance(mu: Belief, a: Belief, d: RewardRatio) -> Result<Self> {
        let cost = CostSpec::variance(1.0, mu.get())?;
        Self::new(mu, a, d.get() * d.get(), cost)
    }

    /// The static problem of the agent who solves when `who` holds prior `mu_b`,
    /// together with that agent's prior.
    pub fn problem(&self, who: BiasHolder, mu_b: Belief) -> Result<StaticProblem> {
        let (prior, threshold) = match who {
            BiasHolder::L => (mu_b, effective_threshold_biased_l(self.mu, mu_b, self.a)?),
            BiasHolder::DM => (self.mu, effective_threshold_biased_dm(self.mu, mu_b, self.a)?),
        };
        StaticProblem::new(prior, threshold, self.v, self.cost.with_prior(prior.get())?)
    }

    pub fn solve(&self, who: BiasHolder, mu_b: f64) -> Result<BiasedOutcome> {
        let mu_b = Belief::interior("biased prior", mu_b)?;
        let problem = self.problem(who, mu_b)?;
        let solution = solve_static(&problem)?;
        let probs = outcome_probs(&solution, self.mu, problem.prior)?;
        Ok(BiasedOutcome {
            who,
            mu_b: mu_b.get(),
            threshold: problem.threshold.get(),
            solution,
            probs,
        })
    }

    /// Wrongful conviction rate as a function of the biased prior.
    pub fn lambda(&self, who: BiasHolder, mu_b: f64) -> Result<f64> {
        Ok(self.solve(who, mu_b)?.probs.lambda)
    }
}

/// Smallest reward ratio at which a biased law enforcer acquires evidence under
/// the variance cost; equals `a_L - mu_L`.
pub fn min_reward_ratio(mu: Belief, mu_l: Belief, a: Belief) -> Result<f64> {
    let (m, l, a) = (mu.get(), mu_l.get(), a.get());
    if !(mu.is_interior() && mu_l.is_interior()) {
        return Err(Error::domain("priors must be interior"));
    }
    Ok((a - m) * (1.0 - l) * l / ((l - m) * a + (1.0 - l) * m))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum Lemma1Class {
    /// The minimal reward ratio rises with `mu_L` on `(mu, mu_l_dagger)`.
    IncreasingNearPrior { mu_l_dagger: f64 },
    AlwaysDecreasing,
}

/// Positive root of `(1 - a) mu (1 - 2x) - (a - mu) x^2`, written to avoid cancellation.
pub fn lemma1_root(mu: f64, a: f64) -> f64 {
    let c = (1.0 - a) * mu;
    c / (c + (c * c + (a - mu) * c).sqrt())
}

pub fn lemma1_classify(mu: Belief, a: Belief) -> Result<Lemma1Class> {
    let (m, a) = (mu.get(), a.get());
    if !(m < a) || !mu.is_interior() || !(a < 1.0) {
        return Err(Error::domain(format!("need 0 < mu < a < 1; got mu = {m}, a = {a}")));
    }
    if 1.0 <= m + a {
        Ok(Lemma1Class::AlwaysDecreasing)
    } else {
        Ok(Lemma1Class::IncreasingNearPrior {
            mu_l_dagger: lemma1_root(m, a),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem1Class {
    /// A small upward bias in law enforcement's prior lowers the wrongful conviction rate.
    BiasBeneficialNearPrior,
    /// Any such bias raises the wrongful conviction rate.
    BiasHarmful,
    /// Unbiased law enforcement would not investigate.
    NoInvestigationBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1Result {
    pub class: Theorem1Class,
    /// Interior minimiser of the wrongful conviction rate over `mu_L`.
    pub lambda_minimizer: Option<f64>,
}

pub fn theorem1_classify(mu: Belief, a: Belief, d: RewardRatio) -> Result<Theorem1Result> {
    let (m, a, d) = (mu.get(), a.get(), d.get());
    if !(a > d) {
        return Err(Error::ConditionViolated(format!(
            "Condition 1 violated: a = {a} <= d = {d}"
        )));
    }
    if m <= a - d {
        return Ok(Theorem1Result {
            class: Theorem1Class::NoInvestigationBaseline,
            lambda_minimizer: None,
        });
    }
    if 2.0 * a - d < 1.0 {
        let minimizer = (1.0 - a) * (1.0 + d) * m / ((d - 2.0 * a + 1.0) * m - a * d + a);
        Ok(Theorem1Result {
            class: Theorem1Class::BiasBeneficialNearPrior,
            lambda_minimizer: Some(minimizer),
        })
    } else {
        Ok(Theorem1Result {
            class: Theorem1Class::BiasHarmful,
            lambda_minimizer: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub mu_b: f64,
    pub who: BiasHolder,
    pub regime: Regime,
    pub b: f64,
    pub high: f64,
    pub p_subjective: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub p_true: f64,
    pub corner: bool,
}

impl From<&BiasedOutcome> for SweepRow {
    fn from(o: &BiasedOutcome) -> Self {
        SweepRow {
            mu_b: o.mu_b,
            who: o.who,
            regime: o.solution.regime,
            b: o.solution.low,
            high: o.solution.high,
            p_subjective: o.probs.p_subjective,
            gamma: o.probs.gamma,
            lambda: o.probs.lambda,
            p_true: o.probs.p_true,
            corner: o.solution.corner,
        }
    }
}

/// A regime change located between two grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeBoundary {
    pub mu_b: f64,
    /// Solution just below the boundary.
    pub below: SweepRow,
    /// Solution just above the boundary.
    pub above: SweepRow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub boundaries: Vec<RegimeBoundary>,
}

pub const BOUNDARY_TOL: f64 = 1e-9;

/// `start, start + step, ...` up to `stop` inclusive (allowing for rounding).
pub fn grid_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::domain("grid bounds must be finite"));
    }
    if !(step > 0.0) {
        return Err(Error::domain(format!("grid step {step} must be positive")));
    }
    if stop < start {
        return Err(Error::domain(format!("empty grid {start}:{stop}:{step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn regime_key(row: &SweepRow) -> (Regime, bool) {
    (row.regime, row.corner)
}

/// Solve at each grid point, in parallel, and locate regime changes between neighbours.
pub fn sweep_bias(scenario: &BiasScenario, who: BiasHolder, grid: &[f64]) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::domain("sweep grid is empty"));
    }
    let mu = scenario.mu.get();
    for &x in grid {
        if !(x >= mu - BELIEF_TOL && x < 1.0) {
            return Err(Error::domain(format!(
                "grid point {x} outside [mu, 1) with mu = {mu}"
            )));
        }
    }
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&x| {
            let x = x.max(mu);
            scenario
                .solve(who, x)
                .map(|o| SweepRow::from(&o))
                .map_err(|e| e.at_point(x))
        })
        .collect::<Result<_>>()?;

    let mut boundaries = Vec::new();
    for pair in rows.windows(2) {
        if regime_key(&pair[0]) == regime_key(&pair[1]) {
            continue;
        }
        let key_lo = regime_key(&pair[0]);
        let (lo, hi) = bisect(
            |x| {
                let row = SweepRow::from(&scenario.solve(who, x)?);
                Ok(if regime_key(&row) == key_lo { -1.0 } else { 1.0 })
            },
            pair[0].mu_b,
            pair[1].mu_b,
            BOUNDARY_TOL,
        )
        .map_err(|e| e.at_point(pair[0].mu_b))?;
        boundaries.push(RegimeBoundary {
            mu_b: 0.5 * (lo + hi),
            below: SweepRow::from(&scenario.solve(who, lo)?),
            above: SweepRow::from(&scenario.solve(who, hi)?),
        });
    }
    Ok(SweepTable { rows, boundaries })
}

/// `(1 + sqrt(1 - 2 mu + 2 mu^2)) / 2`: the threshold must exceed this for a
/// reversal window to exist.
pub fn prop3_abar(mu: f64) -> f64 {
    0.5 * (1.0 + (1.0 - 2.0 * mu + 2.0 * mu * mu).sqrt())
}

/// Upper end of the reward-ratio window.
pub fn prop3_dbar(mu: f64, a: f64) -> f64 {
    (4.0 * a * a - 3.0 * a * mu - 2.0 * a + mu) / (2.0 * a - mu)
}

/// Polynomial in `mu_b` with the sign of `lambda - lambda_hat` when both sides are interior.
pub fn prop3_quartic(mu: f64, a: f64, d: f64, mu_b: f64) -> f64 {
    let x = mu_b;
    let first = x
        * ((mu - a) * x + (a - 1.0) * mu).powi(2)
        * ((mu * mu + (d - 1.0) * mu + (a - 1.0) * d) * x - a * mu * mu + (a - a * d) * mu);
    let second = mu
        * ((mu + a - 1.0) * x - a * mu).powi(2)
        * ((mu - a) * x * x + (d - 1.0) * (mu - a) * x + (a - 1.0) * d * mu);
    first - second
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop3Report {
    pub abar: f64,
    pub dbar: f64,
    /// `a > abar` and `a - mu < d < dbar`.
    pub in_window: bool,
    /// Number of strict sign changes of `lambda - lambda_hat` on the scan.
    pub sign_changes: usize,
    /// The biased prior at which the preference between the two biases reverses.
    pub threshold: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    /// Largest `lambda - lambda_hat` on the scan; non-positive means L-bias is weakly preferred everywhere.
    pub max_difference: f64,
    /// Sign agreement of the polynomial with the numeric difference where both sides are interior.
    pub quartic_agrees: Option<bool>,
}

const PROP3_SCAN: usize = 200;
const SIGN_ZERO: f64 = 1e-12;

pub fn prop3_threshold(mu: Belief, a: Belief, d: RewardRatio) -> Result<Prop3Report> {
    let scenario = BiasScenario::variance(mu, a, d)?;
    let (m, a, d) = (mu.get(), a.get(), d.get());
    if !(m > a - d) {
        return Err(Error::domain(format!(
            "unbiased law enforcement must investigate: need mu > a - d, got {m} <= {}",
            a - d
        )));
    }
    let abar = prop3_abar(m);
    let dbar = prop3_dbar(m, a);
    let in_window = a > abar && a - m < d && d < dbar;

    let difference = |x: f64| -> Result<(f64, bool)> {
        let l = scenario.solve(BiasHolder::L, x)?;
        let dm = scenario.solve(BiasHolder::DM, x)?;
        let interior =
            l.solution.regime == Regime::Interior && dm.solution.regime == Regime::Interior && !dm.solution.corner;
        Ok((l.probs.lambda - dm.probs.lambda, interior))
    };

    let xs: Vec<f64> = (1..PROP3_SCAN)
        .map(|i| m + (a - m) * i as f64 / PROP3_SCAN as f64)
        .collect();
    let values: Vec<(f64, bool)> = xs.par_iter().map(|&x| difference(x)).collect::<Result<_>>()?;

    let mut sign_changes = 0;
    let mut last: Option<(usize, bool)> = None;
    let mut change_at = None;
    let mut agree = true;
    let mut compared = false;
    for (i, &(g, interior)) in values.iter().enumerate() {
        if interior && g.abs() > SIGN_ZERO {
            let q = prop3_quartic(m, a, d, xs[i]);
            compared = true;
            if (q > 0.0) != (g > 0.0) {
                agree = false;
            }
        }
        if g.abs() <= SIGN_ZERO {
            continue;
        }
        let positive = g > 0.0;
        if let Some((j, prev)) = last {
            if prev != positive {
                sign_changes += 1;
                change_at = Some((j, i));
            }
        }
        last = Some((i, positive));
    }
    let max_difference = values.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);

    let (threshold, bracket) = match (in_window, sign_changes, change_at) {
        (true, 1, Some((j, i))) => {
            let (lo, hi) = bisect(|x| Ok(difference(x)?.0), xs[j], xs[i], BOUNDARY_TOL)?;
            (Some(0.5 * (lo + hi)), Some((lo, hi)))
        }
        (true, _, _) => {
            return Err(Error::numeric(format!(
                "expected a unique reversal of lambda - lambda_hat on (mu, a); found {sign_changes} sign changes"
            )))
        }
        _ => (None, None),
    };
    Ok(Prop3Report {
        abar,
        dbar,
        in_window,
        sign_changes,
        threshold,
        bracket,
        max_difference,
        quartic_agrees: compared.then_some(agree),
    })
}

/// Smallest reward at which unbiased law enforcement investigates: `h(mu) = 0`.
pub fn v_epsilon(cost: &CostSpec, mu: Belief, a: Belief) -> Result<f64> {
    let (m, a) = (mu.get(), a.get());
    Ok(cost.phi(a)? - cost.phi(m)? - (a - m) * cost.phi_prime(m)?)
}

/// `q(a) = 2 (1 - a) a (phi'(a) - phi'(mu)) / ((a - mu) mu (1 - mu) phi''(mu))`.
pub fn theorem2_q(cost: &CostSpec, mu: Belief, a: Belief) -> Result<f64> {
    let (m, a) = (mu.get(), a.get());
    Ok(2.0 * (1.0 - a) * a * (cost.phi_prime(a)? - cost.phi_prime(m)?)
        / ((a - m) * m * (1.0 - m) * cost.phi_double_prime(m)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub a: f64,
    pub v: f64,
    pub v_epsilon: f64,
    /// One-sided slope of `lambda` in law enforcement's prior at `mu`.
    pub lambda_slope_l: f64,
    /// One-sided slope of `lambda_hat` in the decision maker's prior at `mu`.
    pub lambda_slope_dm: f64,
    pub q: f64,
    /// `lambda_slope_l > lambda_slope_dm`: decision-maker bias is better for the innocent.
    pub dm_bias_preferred: bool,
}

pub const THEOREM2_STEP: f64 = 1e-5;

pub fn theorem2_compare(cost: &CostSpec, mu: Belief, epsilon: f64, v: f64) -> Result<Theorem2Report> {
    if !(epsilon > 0.0 && epsilon < 1.0 - mu.get()) {
        return Err(Error::domain(format!("epsilon = {epsilon} must lie in (0, 1 - mu)")));
    }
    let a = Belief::new(1.0 - epsilon)?;
    let v_eps = v_epsilon(cost, mu, a)?;
    if !(v > v_eps) {
        return Err(Error::domain(format!(
            "reward v = {v} must exceed the minimal investigating reward v_epsilon = {v_eps}"
        )));
    }
    let scenario = BiasScenario::new(mu, a, v, cost.clone())?;
    let m = mu.get();
    let slope_l = numdiff::forward(|x| scenario.lambda(BiasHolder::L, x), m, THEOREM2_STEP)?;
    let slope_dm = numdiff::forward(|x| scenario.lambda(BiasHolder::DM, x), m, THEOREM2_STEP)?;
    Ok(Theorem2Report {
        a: a.get(),
        v,
        v_epsilon: v_eps,
        lambda_slope_l: slope_l,
        lambda_slope_dm: slope_dm,
        q: theorem2_q(cost, mu, a)?,
        dm_bias_preferred: slope_l > slope_dm,
    })
}

/// Rewards `v_epsilon * (1 + 1e-3) * ratio^k` probed upward from `v_epsilon`;
/// returns the last probed reward before the slope comparison first fails.
/// The returned value is a lower bound on the upper end of the interval where
/// decision-maker bias is preferred, not that end itself.
pub fn theorem2_v_probe(
    cost: &CostSpec,
    mu: Belief,
    epsilon: f64,
    ratio: f64,
    probes: usize,
) -> Result<Option<f64>> {
    if !(ratio > 1.0) {
        return Err(Error::domain("probe ratio must exceed 1"));
    }
    let a = Belief::new(1.0 - epsilon)?;
    let base = v_epsilon(cost, mu, a)? * (1.0 + 1e-3);
    let mut best = None;
    for k in 0..probes {
        let v = base * ratio.powi(k as i32);
        if theorem2_compare(cost, mu, epsilon, v)?.dm_bias_preferred {
            best = Some(v);
        } else {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64) -> Belief {
        Belief::new(x).unwrap()
    }

    fn running() -> BiasScenario {
        BiasScenario::variance(b(0.2), b(0.6), RewardRatio::from_ratio(0.5).unwrap()).unwrap()
    }

    #[test]
    fn running_example_outcomes() {
        let o = running().solve(BiasHolder::L, 0.3).unwrap();
        assert!((o.threshold - 0.72).abs() < 1e-12);
        assert!((o.solution.low - 0.22).abs() < 1e-10);
        assert!((o.probs.p_subjective - 0.16).abs() < 1e-10);
        assert!((o.probs.gamma - 0.384).abs() < 1e-10);
        assert!((o.probs.lambda - 0.064).abs() < 1e-10);
        assert!((o.probs.p_true - 0.128).abs() < 1e-10);
    }

    #[test]
    fn degenerate_outcomes() {
        let scn = running();
        let free = scn.solve(BiasHolder::DM, 0.6).unwrap();
        assert_eq!(free.solution.regime, Regime::FreeConviction);
        assert_eq!((free.probs.gamma, free.probs.lambda, free.probs.p_true), (1.0, 1.0, 1.0));
        let weak = BiasScenario::variance(b(0.05), b(0.6), RewardRatio::from_ratio(0.5).unwrap())
            .unwrap()
            .solve(BiasHolder::L, 0.05)
            .unwrap();
        assert_eq!(weak.solution.regime, Regime::NoAcquisition);
        assert_eq!((weak.probs.gamma, weak.probs.lambda, weak.probs.p_true), (0.0, 0.0, 0.0));
    }

    #[test]
    fn gamma_lambda_ratio_is_fixed_by_bayes() {
        let scn = running();
        let ratio = |o: &BiasedOutcome| o.probs.gamma / o.probs.lambda;
        let expected = (0.8 / 0.2) * (0.6 / 0.4);
        for k in 0..10 {
            let o = scn.solve(BiasHolder::L, 0.2 + 0.03 * k as f64).unwrap();
            assert!((ratio(&o) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn reward_ratio_examples() {
        assert!((min_reward_ratio(b(0.2), b(0.3), b(0.6)).unwrap() - 0.42).abs() < 1e-12);
        assert!((min_reward_ratio(b(0.2), b(0.2), b(0.6)).unwrap() - 0.4).abs() < 1e-12);
        let slope = numdiff::derivative(|x| min_reward_ratio(b(0.2), b(x), b(0.6)), 0.21).unwrap();
        assert!(slope > 0.0);
    }

    #[test]
    fn lemma1_examples() {
        match lemma1_classify(b(0.2), b(0.6)).unwrap() {
            Lemma1Class::IncreasingNearPrior { mu_l_dagger } => {
                assert!((mu_l_dagger - 0.289898).abs() < 1e-6);
                let t = 0.4 * 0.2 * (1.0 - 2.0 * mu_l_dagger) - 0.4 * mu_l_dagger * mu_l_dagger;
                assert!(t.abs() < 1e-10);
                let slope = |x| numdiff::derivative(|l| min_reward_ratio(b(0.2), b(l), b(0.6)), x).unwrap();
                assert!(slope(mu_l_dagger - 1e-3) > 0.0 && slope(mu_l_dagger + 1e-3) < 0.0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(lemma1_classify(b(0.5), b(0.6)).unwrap(), Lemma1Class::AlwaysDecreasing);
    }

    #[test]
    fn theorem1_examples() {
        let d = RewardRatio::from_ratio(0.5).unwrap();
        let r = theorem1_classify(b(0.2), b(0.6), d).unwrap();
        assert_eq!(r.class, Theorem1Class::BiasBeneficialNearPrior);
        assert!((r.lambda_minimizer.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        let scn = running();
        assert!((scn.lambda(BiasHolder::L, 0.2).unwrap() - 0.1).abs() < 1e-10);
        assert!((scn.lambda(BiasHolder::L, 1.0 / 3.0).unwrap() - 0.0625).abs() < 1e-10);
        assert!((scn.lambda(BiasHolder::L, 0.3).unwrap() - 0.064).abs() < 1e-10);

        let r = theorem1_classify(b(0.4), b(0.8), d).unwrap();
        assert_eq!(r.class, Theorem1Class::BiasHarmful);
        let r = theorem1_classify(b(0.2), b(0.75), d).unwrap();
        assert_eq!(r.class, Theorem1Class::NoInvestigationBaseline);
        assert!(theorem1_classify(b(0.2), b(0.4), d).is_err());
    }

    #[test]
    fn sweep_keeps_grid_order_and_finds_boundary() {
        let scn = running();
        let grid = grid_points(0.2, 0.6, 0.01).unwrap();
        assert_eq!(grid.len(), 41);
        let table = sweep_bias(&scn, BiasHolder::DM, &grid).unwrap();
        assert_eq!(table.rows.len(), 41);
        for (row, x) in table.rows.iter().zip(&grid) {
            assert_eq!(row.mu_b, *x);
        }
        // free conviction starts exactly at mu_DM = a
        let last = table.boundaries.last().unwrap();
        assert_eq!(last.above.regime, Regime::FreeConviction);
        assert!((last.mu_b - 0.6).abs() < 1e-8);
    }

    #[test]
    fn grid_rejects_empty_and_out_of_range() {
        assert!(grid_points(0.5, 0.4, 0.01).is_err());
        assert!(grid_points(0.2, 0.4, 0.0).is_err());
        assert!(sweep_bias(&running(), BiasHolder::L, &[0.1]).is_err());
        assert!(sweep_bias(&running(), BiasHolder::L, &[]).is_err());
    }

    #[test]
    fn prop3_constants() {
        assert!((prop3_abar(0.2) - 0.912311).abs() < 1e-6);
        assert!((prop3_dbar(0.2, 0.95) - 0.788235).abs() < 1e-6);
    }

    #[test]
    fn prop3_reversal_exists_in_window() {
        let r = prop3_threshold(b(0.2), b(0.95), RewardRatio::from_ratio(0.77).unwrap()).unwrap();
        assert!(r.in_window);
        assert_eq!(r.sign_changes, 1);
        let (lo, hi) = r.bracket.unwrap();
        assert!(hi - lo <= 1e-9);
        let x = r.threshold.unwrap();
        assert!(x > 0.2 && x < 0.95);
    }

    #[test]
    fn prop3_no_reversal_outside_window() {
        let r = prop3_threshold(b(0.2), b(0.6), RewardRatio::from_ratio(0.5).unwrap()).unwrap();
        assert!(!r.in_window);
        assert!(r.threshold.is_none());
        assert!(r.max_difference <= 1e-12);
    }

    #[test]
    fn variance_q_formula() {
        let cost = CostSpec::variance(3.0, 0.3).unwrap();
        let q = theorem2_q(&cost, b(0.3), b(0.8)).unwrap();
        assert!((q - 2.0 * 0.2 * 0.8 / (0.3 * 0.7)).abs() < 1e-12);
    }

    #[test]
    fn v_epsilon_is_investigation_threshold() {
        let cost = CostSpec::entropy(0.3).unwrap();
        let (mu, a) = (b(0.3), b(0.8));
        let v = v_epsilon(&cost, mu, a).unwrap();
        let s = solve_static(&StaticProblem::new(mu, a, v * (1.0 + 1e-9), cost).unwrap()).unwrap();
        assert_eq!(s.regime, Regime::Interior);
        assert!((s.low - 0.3).abs() < 1e-4);
    }
}
