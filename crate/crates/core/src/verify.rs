//! Named numerical checks at documented parameter points.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    grid_points, lemma1_classify, min_reward_ratio, prop3_threshold, sweep_bias, theorem1_classify,
    theorem2_compare, theorem2_q, theorem2_v_probe, v_epsilon, BiasHolder, BiasScenario, Lemma1Class,
    Theorem1Class,
};
use crate::belief::Belief;
use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::numdiff;
use crate::preference::{preference_statics, solve_preference, PreferenceBranch, PreferenceParams};
use crate::roots::bisect;
use crate::sim::{boundaries_for, validate_equivalence, SimConfig, ThetaMode};
use crate::solver::{
    solve_by_oracle, solve_static, Regime, RewardRatio, StaticProblem, ORACLE_STEP,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub parameters: BTreeMap<String, f64>,
    pub expected: String,
    pub observed: f64,
    pub pass: bool,
}

impl Verdict {
    pub fn new(
        claim: impl Into<String>,
        parameters: &[(&str, f64)],
        expected: impl Into<String>,
        observed: f64,
        pass: bool,
    ) -> Self {
        Verdict {
            claim: claim.into(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            expected: expected.into(),
            observed,
            pass,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(
            f,
            "{} {} [{}] expected {}, observed {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.claim,
            params.join(", "),
            self.expected,
            self.observed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Remark1,
    Lemma1,
    Thm1,
    Prop1,
    Prop3,
    Thm2,
    Prop4,
    Prop5,
    Equivalence,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Remark1,
        Suite::Lemma1,
        Suite::Thm1,
        Suite::Prop1,
        Suite::Prop3,
        Suite::Thm2,
        Suite::Prop4,
        Suite::Prop5,
        Suite::Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Remark1 => "remark1",
            Suite::Lemma1 => "lemma1",
            Suite::Thm1 => "thm1",
            Suite::Prop1 => "prop1",
            Suite::Prop3 => "prop3",
            Suite::Thm2 => "thm2",
            Suite::Prop4 => "prop4",
            Suite::Prop5 => "prop5",
            Suite::Equivalence => "equivalence",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VerifyOptions {
    /// Fewer simulated paths.
    pub quick: bool,
}

pub fn run_suite(suite: Suite, options: VerifyOptions) -> Result<Vec<Verdict>> {
    match suite {
        Suite::Remark1 => remark1(),
        Suite::Lemma1 => lemma1(),
        Suite::Thm1 => theorem1(),
        Suite::Prop1 => prop1(),
        Suite::Prop3 => prop3(),
        Suite::Thm2 => theorem2(),
        Suite::Prop4 => prop4(),
        Suite::Prop5 => prop5(),
        Suite::Equivalence => equivalence(options),
    }
}

fn b(x: f64) -> Belief {
    Belief::new(x).expect("constant belief in [0, 1]")
}

/// Cost family, reward, and a label; the rewards make the unbiased problem at
/// `mu = 0.2, a = 0.6` interior.
pub fn reference_costs(mu: f64) -> Result<Vec<(&'static str, CostSpec, f64)>> {
    Ok(vec![
        ("variance", CostSpec::variance(4.0, mu)?, 1.0),
        ("entropy", CostSpec::entropy(mu)?, 0.6),
        ("log_likelihood", CostSpec::log_likelihood(mu)?, 3.0),
        ("tsallis", CostSpec::tsallis(1.0, 0.5, mu)?, 0.6),
    ])
}

const ZERO_DELTA: f64 = 1e-12;

fn sign(x: f64) -> i8 {
    if x > ZERO_DELTA {
        1
    } else if x < -ZERO_DELTA {
        -1
    } else {
        0
    }
}

/// Adjacent differences of `(gamma, lambda, p_true)` along biased-L sweeps share a sign.
pub fn remark1() -> Result<Vec<Verdict>> {
    let (mu, a) = (0.2, 0.6);
    let grid = grid_points(mu, a, 0.01)?;
    let mut out = Vec::new();
    for (label, cost, v) in reference_costs(mu)? {
        let scenario = BiasScenario::new(b(mu), b(a), v, cost)?;
        let table = sweep_bias(&scenario, BiasHolder::L, &grid)?;
        let mismatches = table
            .rows
            .windows(2)
            .filter(|w| {
                let s = [
                    sign(w[1].gamma - w[0].gamma),
                    sign(w[1].lambda - w[0].lambda),
                    sign(w[1].p_true - w[0].p_true),
                ];
                !(s[0] == s[1] && s[1] == s[2])
            })
            .count();
        out.push(Verdict::new(
            format!("remark1.comonotone.{label}"),
            &[("mu", mu), ("a", a), ("v", v), ("step", 0.01)],
            "0 adjacent pairs with mixed signs",
            mismatches as f64,
            mismatches == 0,
        ));
    }
    Ok(out)
}

/// Slope sign of the minimal reward ratio on the 10 x 10 grid `mu = 0.04 + 0.05 i`, `a = 0.515 + 0.05 j`.
pub fn lemma1() -> Result<Vec<Verdict>> {
    let points: Vec<(f64, f64)> = (0..10)
        .flat_map(|i| (0..10).map(move |j| (0.04 + 0.05 * i as f64, 0.515 + 0.05 * j as f64)))
        .collect();
    let verdicts: Vec<Vec<Verdict>> = points
        .par_iter()
        .map(|&(mu, a)| lemma1_point(mu, a))
        .collect::<Result<_>>()?;
    Ok(verdicts.into_iter().flatten().collect())
}

fn lemma1_point(mu: f64, a: f64) -> Result<Vec<Verdict>> {
    let ubar = |l: f64| min_reward_ratio(b(mu), b(l), b(a));
    let at = mu + 1e-5;
    let slope = numdiff::derivative(ubar, at)?;
    let class = lemma1_classify(b(mu), b(a))?;
    let increasing = matches!(class, Lemma1Class::IncreasingNearPrior { .. });
    let params = [("mu", mu), ("a", a)];
    let mut out = vec![Verdict::new(
        "lemma1.slope_sign",
        &params,
        if increasing { "positive" } else { "negative" },
        slope,
        (slope > 0.0) == increasing && slope != 0.0,
    )];
    if let Lemma1Class::IncreasingNearPrior { mu_l_dagger } = class {
        let slope_at = |l: f64| numdiff::derivative(ubar, l);
        let (lo, hi) = bisect(slope_at, at, 1.0 - 1e-4, 1e-7)?;
        let flip = 0.5 * (lo + hi);
        out.push(Verdict::new(
            "lemma1.root_matches_sign_flip",
            &params,
            format!("|flip - root| <= 1e-3 with root {mu_l_dagger}"),
            flip,
            (flip - mu_l_dagger).abs() <= 1e-3,
        ));
    }
    Ok(out)
}

/// Wrongful conviction rate under biased L along a grid of `mu_L`.
pub fn lambda_curve(mu: f64, a: f64, d: f64, grid: &[f64]) -> Result<Vec<f64>> {
    let scenario = BiasScenario::variance(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
    grid.par_iter().map(|&x| scenario.lambda(BiasHolder::L, x)).collect()
}

pub fn theorem1() -> Result<Vec<Verdict>> {
    let mut out = Vec::new();

    // u-shape and its minimiser
    let (mu, a, d) = (0.2, 0.6, 0.5);
    let classified = theorem1_classify(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
    out.push(Verdict::new(
        "thm1.classify_beneficial",
        &[("mu", mu), ("a", a), ("d", d)],
        "bias_beneficial_near_prior",
        classified.lambda_minimizer.unwrap_or(f64::NAN),
        classified.class == Theorem1Class::BiasBeneficialNearPrior,
    ));
    let grid: Vec<f64> = (0..=7900).map(|i| mu + 1e-4 * i as f64).collect();
    let lambda = lambda_curve(mu, a, d, &grid)?;
    let k_min = (0..lambda.len())
        .min_by(|&i, &j| lambda[i].total_cmp(&lambda[j]))
        .expect("non-empty grid");
    let argmin = grid[k_min];
    out.push(Verdict::new(
        "thm1.lambda_minimised_at_root",
        &[("mu", mu), ("a", a), ("d", d)],
        "within 1e-3 of 1/3",
        argmin,
        (argmin - 1.0 / 3.0).abs() <= 1e-3,
    ));
    let root = 1.0 / 3.0;
    let bad_down = grid
        .windows(2)
        .zip(lambda.windows(2))
        .filter(|(x, l)| x[1] < root - 1e-9 && !(l[1] < l[0]))
        .count();
    let bad_up = grid
        .windows(2)
        .zip(lambda.windows(2))
        .filter(|(x, l)| x[0] > root + 1e-9 && !(l[1] > l[0]))
        .count();
    out.push(Verdict::new(
        "thm1.u_shape",
        &[("mu", mu), ("a", a), ("d", d), ("step", 1e-4)],
        "strictly decreasing before 1/3 and increasing after: 0 violations",
        (bad_down + bad_up) as f64,
        bad_down + bad_up == 0,
    ));

    // harmful bias: 2a - d >= 1
    let (mu, a, d) = (0.4, 0.8, 0.5);
    let classified = theorem1_classify(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
    out.push(Verdict::new(
        "thm1.classify_harmful",
        &[("mu", mu), ("a", a), ("d", d)],
        "bias_harmful",
        2.0 * a - d,
        classified.class == Theorem1Class::BiasHarmful,
    ));
    let grid: Vec<f64> = (0..=590).map(|i| mu + 1e-3 * i as f64).collect();
    let lambda = lambda_curve(mu, a, d, &grid)?;
    let decreases = lambda.windows(2).filter(|l| l[1] < l[0] - ZERO_DELTA).count();
    out.push(Verdict::new(
        "thm1.harmful_nondecreasing",
        &[("mu", mu), ("a", a), ("d", d), ("step", 1e-3)],
        "0 decreases",
        decreases as f64,
        decreases == 0,
    ));

    let (mu, a, d) = (0.2, 0.75, 0.5);
    let classified = theorem1_classify(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
    out.push(Verdict::new(
        "thm1.classify_no_investigation",
        &[("mu", mu), ("a", a), ("d", d)],
        "no_investigation_baseline",
        a - d,
        classified.class == Theorem1Class::NoInvestigationBaseline,
    ));

    // sign structure on a 5 x 5 grid with mu > a - d
    let mu = 0.5;
    for a in [0.55, 0.6, 0.65, 0.7, 0.75] {
        for d in [0.31, 0.36, 0.41, 0.46, 0.49] {
            let scenario = BiasScenario::variance(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
            let slope = numdiff::derivative(|x| scenario.lambda(BiasHolder::L, x), mu + 1e-5)?;
            let beneficial = 2.0 * a - d < 1.0;
            out.push(Verdict::new(
                "thm1.slope_sign",
                &[("mu", mu), ("a", a), ("d", d)],
                if beneficial { "negative" } else { "nonnegative" },
                slope,
                (slope < 0.0) == beneficial,
            ));
        }
    }
    Ok(out)
}

/// `lambda_hat` is nondecreasing in the decision maker's prior, strictly where interior.
pub fn prop1() -> Result<Vec<Verdict>> {
    let (mu, a) = (0.2, 0.6);
    let grid = grid_points(mu, a, 0.005)?;
    let mut out = Vec::new();
    for (label, cost, v) in reference_costs(mu)?.into_iter().take(3) {
        let scenario = BiasScenario::new(b(mu), b(a), v, cost)?;
        let rows = sweep_bias(&scenario, BiasHolder::DM, &grid)?.rows;
        let violations = rows
            .windows(2)
            .filter(|w| {
                let delta = w[1].lambda - w[0].lambda;
                let interior = w[0].regime == Regime::Interior && w[1].regime == Regime::Interior;
                if interior {
                    !(delta > 0.0)
                } else {
                    delta < -ZERO_DELTA
                }
            })
            .count();
        out.push(Verdict::new(
            format!("prop1.monotone.{label}"),
            &[("mu", mu), ("a", a), ("v", v), ("step", 0.005)],
            "0 violations",
            violations as f64,
            violations == 0,
        ));
    }
    // beyond the threshold the decision maker convicts outright
    let scenario = BiasScenario::variance(b(mu), b(a), RewardRatio::from_ratio(0.5)?)?;
    for x in [0.6, 0.75, 0.9] {
        let dm = scenario.solve(BiasHolder::DM, x)?.probs.lambda;
        let l = scenario.solve(BiasHolder::L, x)?.probs.lambda;
        out.push(Verdict::new(
            "remark2.dm_convicts_outright",
            &[("mu", mu), ("a", a), ("d", 0.5), ("mu_b", x)],
            "lambda_hat = 1 and lambda < 1",
            dm,
            dm == 1.0 && l < 1.0,
        ));
    }
    Ok(out)
}

pub fn prop3() -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let (mu, a, d) = (0.2, 0.95, 0.77);
    let report = prop3_threshold(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
    let width = report.bracket.map(|(lo, hi)| hi - lo).unwrap_or(f64::NAN);
    out.push(Verdict::new(
        "prop3.reversal_exists",
        &[("mu", mu), ("a", a), ("d", d)],
        "one sign change of lambda - lambda_hat in (mu, a), bracket <= 1e-9",
        report.threshold.unwrap_or(f64::NAN),
        report.in_window && report.sign_changes == 1 && width <= 1e-9,
    ));
    if let Some(x) = report.threshold {
        let scenario = BiasScenario::variance(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
        let diff = |y: f64| -> Result<f64> {
            Ok(scenario.lambda(BiasHolder::L, y)? - scenario.lambda(BiasHolder::DM, y)?)
        };
        let before = diff(0.5 * (mu + x))?;
        let after = diff(0.5 * (x + a))?;
        out.push(Verdict::new(
            "prop3.dm_bias_preferred_below_threshold",
            &[("mu", mu), ("a", a), ("d", d), ("mu_b_diamond", x)],
            "lambda - lambda_hat positive below and negative above",
            before,
            before > 0.0 && after < 0.0,
        ));
    }
    out.push(Verdict::new(
        "prop3.constants",
        &[("mu", mu), ("a", a)],
        "abar = 0.912311, dbar = 0.788235",
        report.dbar,
        (report.abar - 0.912311).abs() < 1e-6 && (report.dbar - 0.788235).abs() < 1e-6,
    ));

    let (mu, a, d) = (0.2, 0.6, 0.5);
    let report = prop3_threshold(b(mu), b(a), RewardRatio::from_ratio(d)?)?;
    out.push(Verdict::new(
        "prop3.l_bias_weakly_preferred",
        &[("mu", mu), ("a", a), ("d", d)],
        "no threshold and max(lambda - lambda_hat) <= 0",
        report.max_difference,
        report.threshold.is_none() && report.max_difference <= ZERO_DELTA,
    ));
    Ok(out)
}

pub fn theorem2() -> Result<Vec<Verdict>> {
    let (mu, epsilon) = (0.3, 0.01);
    let mut out = Vec::new();
    let costs = [
        ("log_likelihood", CostSpec::log_likelihood(mu)?),
        ("entropy", CostSpec::entropy(mu)?),
    ];
    for (label, cost) in &costs {
        let a = b(1.0 - epsilon);
        let v = 1.001 * v_epsilon(cost, b(mu), a)?;
        let r = theorem2_compare(cost, b(mu), epsilon, v)?;
        let params = [("mu", mu), ("a", r.a), ("v", v)];
        out.push(Verdict::new(
            format!("thm2.dm_bias_preferred.{label}"),
            &params,
            format!("lambda' > lambda_hat' = {}", r.lambda_slope_dm),
            r.lambda_slope_l,
            r.dm_bias_preferred,
        ));
        out.push(Verdict::new(
            format!("thm2.one_minus_q_positive.{label}"),
            &params,
            "1 - q(a) > 0",
            1.0 - r.q,
            1.0 - r.q > 0.0,
        ));
        let probe = theorem2_v_probe(cost, b(mu), epsilon, 1.5, 12)?;
        out.push(Verdict::new(
            format!("thm2.v_probe.{label}"),
            &[("mu", mu), ("a", r.a), ("v_epsilon", r.v_epsilon)],
            "some probed v above v_epsilon where decision-maker bias is preferred",
            probe.unwrap_or(f64::NAN),
            probe.is_some(),
        ));
    }
    // limits of q as the threshold approaches certainty
    let near_one = b(1.0 - 1e-7);
    let q_ll = theorem2_q(&costs[0].1, b(mu), near_one)?;
    out.push(Verdict::new(
        "thm2.q_log_likelihood_limit",
        &[("mu", mu), ("a", near_one.get())],
        "q -> 2 mu = 0.6",
        q_ll,
        (q_ll - 2.0 * mu).abs() < 1e-3,
    ));
    let q_ent = theorem2_q(&costs[1].1, b(mu), near_one)?;
    out.push(Verdict::new(
        "thm2.q_entropy_limit",
        &[("mu", mu), ("a", near_one.get())],
        "q -> 0",
        q_ent,
        q_ent.abs() < 1e-3,
    ));
    let q_var = theorem2_q(&CostSpec::variance(1.0, mu)?, b(mu), near_one)?;
    out.push(Verdict::new(
        "thm2.q_variance_limit",
        &[("mu", mu), ("a", near_one.get())],
        "q -> 0",
        q_var,
        q_var.abs() < 1e-3,
    ));
    Ok(out)
}

/// The preference example and the `(eta, rho, v)` grid of comparative statics.
pub fn preference_example() -> Result<(PreferenceParams, Belief, CostSpec)> {
    Ok((
        PreferenceParams::new(0.3, 1.0, 1.0, b(0.6))?,
        b(0.4),
        CostSpec::variance(4.0, 0.4)?,
    ))
}

pub fn preference_grid() -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    for eta in [0.2, 0.3, 0.5] {
        for rho in [0.0, 0.5, 1.0] {
            for v in [0.3, 0.7, 1.0] {
                out.push((eta, rho, v));
            }
        }
    }
    out
}

fn statics_verdicts(parameter: &str, select: usize) -> Result<Vec<Verdict>> {
    let (base, mu, cost) = preference_example()?;
    preference_grid()
        .par_iter()
        .map(|&(eta, rho, v)| {
            let params = PreferenceParams::new(eta, rho, v, base.a)?;
            let st = preference_statics(&params, mu, &cost)?;
            let e = st.entries()[select];
            Ok(Verdict::new(
                format!("statics.{parameter}"),
                &[("eta", eta), ("rho", rho), ("v", v), ("a", base.a.get()), ("mu", mu.get())],
                format!("{:?}", e.predicted),
                e.slope,
                e.agrees,
            ))
        })
        .collect()
}

pub fn prop4() -> Result<Vec<Verdict>> {
    let (params, mu, cost) = preference_example()?;
    let s = solve_preference(&params, mu, &cost)?;
    let p = [("mu", 0.4), ("a", 0.6), ("kappa", 4.0), ("v", 1.0), ("eta", 0.3), ("rho", 1.0)];
    let exact_b = 0.6 - 0.19f64.sqrt();
    let mut out = vec![
        Verdict::new(
            "prop4.example_b",
            &p,
            "0.16411 within 1e-4",
            s.solution.low,
            s.branch == PreferenceBranch::Binding && (s.solution.low - 0.16411).abs() <= 1e-4,
        ),
        Verdict::new(
            "prop4.example_lambda",
            &p,
            "0.36081 within 1e-4",
            s.probs.lambda,
            (s.probs.lambda - 0.36081).abs() <= 1e-4,
        ),
        Verdict::new(
            "prop4.example_b_exact",
            &p,
            format!("0.6 - sqrt(0.19) = {exact_b}"),
            s.solution.low,
            (s.solution.low - exact_b).abs() <= 1e-10,
        ),
    ];
    let problem = StaticProblem::with_payoff(
        mu,
        params.a,
        params.v,
        cost.clone(),
        crate::solver::UpperPayoff::PreferenceShaped { eta: params.eta, rho: params.rho },
    )?;
    let (oracle, _) = solve_by_oracle(&problem, ORACLE_STEP)?;
    out.push(Verdict::new(
        "prop4.example_oracle",
        &p,
        "oracle support within 2e-4 of {b, a}",
        oracle.low,
        (oracle.low - s.solution.low).abs() <= 2e-4 && (oracle.high - 0.6).abs() <= 2e-4,
    ));
    let lowered = PreferenceParams { a: b(0.58), ..params };
    let l_low = solve_preference(&lowered, mu, &cost)?.probs.lambda;
    out.push(Verdict::new(
        "prop4.lower_threshold_raises_lambda",
        &p,
        format!("lambda(a = 0.58) > lambda(a = 0.6) = {}", s.probs.lambda),
        l_low,
        l_low > s.probs.lambda,
    ));
    out.extend(statics_verdicts("threshold", 0)?);
    Ok(out)
}

pub fn prop5() -> Result<Vec<Verdict>> {
    let mut out = statics_verdicts("reward", 1)?;
    out.extend(statics_verdicts("rho", 2)?);
    out.extend(statics_verdicts("eta", 3)?);
    Ok(out)
}

pub fn equivalence(options: VerifyOptions) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    let sigma = 1.0;
    let n_paths = if options.quick { 20_000 } else { 200_000 };

    let prior = b(0.3);
    let cost = CostSpec::variance(4.0, 0.3)?;
    let problem = StaticProblem::new(prior, b(0.72), 1.0, cost.clone())?;
    let solution = solve_static(&problem)?;
    let config = SimConfig::new(
        sigma,
        1e-4 * sigma * sigma,
        n_paths,
        20_240_601,
        ThetaMode::DrawnFromPrior(prior),
        boundaries_for(&solution)?,
        prior,
        cost.flow_cost_preimage(sigma)?,
    )?;
    let report = validate_equivalence(&solution, &cost, &config)?;
    for c in &report.checks {
        out.push(Verdict::new(
            format!("equivalence.variance.{}", c.name),
            &[("n_paths", n_paths as f64), ("dt", config.dt), ("low", 0.22), ("high", 0.72), ("prior", 0.3)],
            format!("{} +/- {}", c.expected, c.tolerance),
            c.observed,
            c.pass,
        ));
    }

    let prior = b(0.3);
    let entropy = CostSpec::entropy(0.3)?;
    let problem = StaticProblem::new(prior, b(0.6), 0.3, entropy.clone())?;
    let solution = solve_static(&problem)?;
    let config = SimConfig::new(
        sigma,
        1e-4 * sigma * sigma,
        n_paths / 4,
        20_240_602,
        ThetaMode::DrawnFromPrior(prior),
        boundaries_for(&solution)?,
        prior,
        entropy.flow_cost_preimage(sigma)?,
    )?;
    let report = validate_equivalence(&solution, &entropy, &config)?;
    for c in &report.checks {
        out.push(Verdict::new(
            format!("equivalence.entropy.{}", c.name),
            &[("n_paths", (n_paths / 4) as f64), ("dt", config.dt), ("low", solution.low), ("high", 0.6), ("prior", 0.3)],
            format!("{} +/- {}", c.expected, c.tolerance),
            c.observed,
            c.pass,
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("thm9".parse::<Suite>().is_err());
    }

    #[test]
    fn display_is_one_line() {
        let v = Verdict::new("x", &[("mu", 0.2)], "positive", 1.0, true);
        assert_eq!(v.to_string(), "PASS x [mu=0.2] expected positive, observed 1");
    }
}
