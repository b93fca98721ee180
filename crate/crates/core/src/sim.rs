//! Monte Carlo check of the static/dynamic equivalence.
//!
//! Law enforcement observes `dZ = theta dt + sigma dW` with `theta = +1` for a
//! guilty and `-1` for an innocent defendant, updates her belief exactly, and
//! stops at the posterior boundaries of a static solution while paying flow
//! cost `c(belief) dt`. The hitting law and expected cost should match the
//! static distribution and static cost.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::belief::Belief;
use crate::cost::{CostSpec, FlowCost};
use crate::error::{Error, Result};
use crate::solver::{Regime, StaticSolution};

pub const MAX_STEPS: u64 = 10_000_000;
/// Largest admissible fraction of paths that reach `max_steps` unabsorbed.
pub const MAX_TRUNCATED_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    Guilty,
    Innocent,
    DrawnFromPrior(Belief),
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub sigma: f64,
    pub dt: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub theta_mode: ThetaMode,
    pub low: Belief,
    pub high: Belief,
    pub prior_subjective: Belief,
    pub flow_cost: FlowCost,
    /// Brownian-bridge check for crossings between grid times.
    pub bridge: bool,
    /// Also accrue cost along the belief of an observer holding this prior.
    pub true_prior: Option<Belief>,
    pub record_paths: bool,
    pub max_steps: u64,
}

impl SimConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sigma: f64,
        dt: f64,
        n_paths: u64,
        seed: u64,
        theta_mode: ThetaMode,
        boundaries: (Belief, Belief),
        prior_subjective: Belief,
        flow_cost: FlowCost,
    ) -> Result<Self> {
        let config = SimConfig {
            sigma,
            dt,
            n_paths,
            seed,
            theta_mode,
            low: boundaries.0,
            high: boundaries.1,
            prior_subjective,
            flow_cost,
            bridge: true,
            true_prior: None,
            record_paths: false,
            max_steps: MAX_STEPS,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!("sigma = {} must be positive", self.sigma)));
        }
        if !(self.dt > 0.0 && self.dt <= 1e-3 * self.sigma * self.sigma) {
            return Err(Error::domain(format!(
                "dt = {} must be positive and at most 1e-3 sigma^2 = {}",
                self.dt,
                1e-3 * self.sigma * self.sigma
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::domain("n_paths must be at least 1"));
        }
        let (lo, hi, x) = (self.low.get(), self.high.get(), self.prior_subjective.get());
        if lo > hi {
            return Err(Error::domain(format!("boundaries ({lo}, {hi}) are reversed")));
        }
        if lo < x && x < hi && !(lo > 0.0 && hi < 1.0) {
            return Err(Error::domain(format!(
                "boundaries ({lo}, {hi}) around an interior prior must lie in (0, 1)"
            )));
        }
        if !self.prior_subjective.is_interior() {
            return Err(Error::NotInterior {
                name: "subjective prior",
                value: x,
            });
        }
        if let Some(p) = self.true_prior {
            if !p.is_interior() {
                return Err(Error::NotInterior {
                    name: "true prior",
                    value: p.get(),
                });
            }
        }
        Ok(())
    }
}

/// Stopping boundaries implementing a static solution.
pub fn boundaries_for(solution: &StaticSolution) -> Result<(Belief, Belief)> {
    let (lo, hi) = match solution.regime {
        Regime::Interior => (solution.low, solution.high),
        Regime::NoAcquisition => (solution.low, solution.low),
        Regime::FreeConviction => (0.0, solution.low),
    };
    Ok((Belief::new(lo)?, Belief::new(hi)?))
}

/// Exact Bayes update of the belief after observing increment `z_increment`.
pub fn filter_belief(z_increment: f64, current: Belief, sigma: f64) -> Result<Belief> {
    if !current.is_interior() {
        return Err(Error::NotInterior {
            name: "current belief",
            value: current.get(),
        });
    }
    Ok(Belief::from_log_odds(
        current.log_odds() + 2.0 * z_increment / (sigma * sigma),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathRecord {
    pub path: u64,
    pub theta: i8,
    pub hit_high: bool,
    pub truncated: bool,
    pub stop_time: f64,
    pub cost: f64,
    pub true_cost: f64,
}

#[inline]
fn logistic(ell: f64) -> f64 {
    1.0 / (1.0 + (-ell).exp())
}

fn simulate_path(config: &SimConfig, index: u64) -> PathRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index);

    let guilty = match config.theta_mode {
        ThetaMode::Guilty => true,
        ThetaMode::Innocent => false,
        ThetaMode::DrawnFromPrior(p) => rng.random::<f64>() < p.get(),
    };
    let theta = if guilty { 1.0 } else { -1.0 };
    let mut record = PathRecord {
        path: index,
        theta: if guilty { 1 } else { -1 },
        hit_high: false,
        truncated: false,
        stop_time: 0.0,
        cost: 0.0,
        true_cost: 0.0,
    };

    let x0 = config.prior_subjective.get();
    if x0 <= config.low.get() {
        return record;
    }
    if x0 >= config.high.get() {
        record.hit_high = true;
        return record;
    }

    let (sigma, dt) = (config.sigma, config.dt);
    let upper = config.high.log_odds();
    let lower = config.low.log_odds();
    let drift = 2.0 * theta * dt / (sigma * sigma);
    let shock = 2.0 * dt.sqrt() / sigma;
    // variance rate of log-odds is 4 / sigma^2
    let bridge_scale = 2.0 / (4.0 / (sigma * sigma) * dt);
    let shift = config
        .true_prior
        .map(|p| p.log_odds() - config.prior_subjective.log_odds());
    let flow = &config.flow_cost;

    let mut ell = config.prior_subjective.log_odds();
    let mut x = x0;
    let accrue = |rec: &mut PathRecord, from: f64, to: f64, x: f64, x_next: f64, span: f64| {
        rec.cost += flow.eval(0.5 * (x + x_next)) * span;
        if let Some(s) = shift {
            let mid = logistic(0.5 * (from + to) + s);
            rec.true_cost += flow.eval(mid) * span;
        }
    };

    for step in 0..config.max_steps {
        let xi: f64 = rng.sample(StandardNormal);
        let next = ell + drift + shock * xi;
        if next >= upper || next <= lower {
            let target = if next >= upper { upper } else { lower };
            let frac = (target - ell) / (next - ell);
            let x_end = if next >= upper { config.high.get() } else { config.low.get() };
            accrue(&mut record, ell, target, x, x_end, frac * dt);
            record.stop_time = (step as f64 + frac) * dt;
            record.hit_high = next >= upper;
            return record;
        }
        let x_next = logistic(next);
        accrue(&mut record, ell, next, x, x_next, dt);
        if config.bridge {
            let u_hi: f64 = rng.random();
            let u_lo: f64 = rng.random();
            let p_hi = (-bridge_scale * (upper - ell) * (upper - next)).exp();
            let p_lo = (-bridge_scale * (ell - lower) * (next - lower)).exp();
            if u_hi < p_hi || u_lo < p_lo {
                record.stop_time = (step + 1) as f64 * dt;
                record.hit_high = u_hi < p_hi;
                return record;
            }
        }
        ell = next;
        x = x_next;
    }
    record.truncated = true;
    record.stop_time = config.max_steps as f64 * dt;
    record
}

/// A sample mean with its one-standard-error radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub radius: f64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn estimate(&self) -> Estimate {
        if self.n == 0 {
            return Estimate { value: f64::NAN, radius: f64::NAN };
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            value: mean,
            radius: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaBreakdown {
    pub n_paths: u64,
    pub hit_high: Estimate,
    pub mean_flow_cost: Estimate,
    pub mean_stop_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationStats {
    pub n_paths: u64,
    pub truncated: u64,
    /// Frequencies among absorbed paths.
    pub hit_high: Estimate,
    pub hit_low: Estimate,
    pub mean_flow_cost: Estimate,
    pub mean_stop_time: Estimate,
    pub stopped_belief: Estimate,
    pub guilty: Option<ThetaBreakdown>,
    pub innocent: Option<ThetaBreakdown>,
    pub mean_true_cost: Option<Estimate>,
    #[serde(skip)]
    pub paths: Option<Vec<PathRecord>>,
}

#[derive(Default)]
struct Accumulator {
    hit: Moments,
    cost: Moments,
    time: Moments,
    belief: Moments,
    true_cost: Moments,
}

impl Accumulator {
    fn breakdown(&self) -> Option<ThetaBreakdown> {
        (self.hit.n > 0).then(|| ThetaBreakdown {
            n_paths: self.hit.n,
            hit_high: self.hit.estimate(),
            mean_flow_cost: self.cost.estimate(),
            mean_stop_time: self.time.estimate().value,
        })
    }
}

/// Binomial estimate with radius `sqrt(p (1 - p) / n)`.
fn binomial(m: &Moments) -> Estimate {
    let n = m.n as f64;
    let p = m.sum / n;
    Estimate {
        value: p,
        radius: (p * (1.0 - p) / n).sqrt(),
    }
}

pub fn run_paths(config: &SimConfig) -> Result<SimulationStats> {
    config.validate()?;
    let records: Vec<PathRecord> = (0..config.n_paths)
        .into_par_iter()
        .map(|i| simulate_path(config, i))
        .collect();

    let (lo, hi) = (config.low.get(), config.high.get());
    let mut all = Accumulator::default();
    let mut guilty = Accumulator::default();
    let mut innocent = Accumulator::default();
    let mut truncated = 0u64;
    for r in &records {
        if r.truncated {
            truncated += 1;
            continue;
        }
        let hit = if r.hit_high { 1.0 } else { 0.0 };
        let stopped = if r.hit_high { hi } else { lo };
        let side = if r.theta > 0 { &mut guilty } else { &mut innocent };
        for acc in [&mut all, side] {
            acc.hit.push(hit);
            acc.cost.push(r.cost);
            acc.time.push(r.stop_time);
            acc.belief.push(stopped);
            acc.true_cost.push(r.true_cost);
        }
    }
    if truncated as f64 > MAX_TRUNCATED_FRACTION * config.n_paths as f64 || all.hit.n == 0 {
        return Err(Error::numeric(format!(
            "{truncated} of {} paths reached {} steps without absorption",
            config.n_paths, config.max_steps
        )));
    }
    let hit_high = binomial(&all.hit);
    let drawn = matches!(config.theta_mode, ThetaMode::DrawnFromPrior(_));
    Ok(SimulationStats {
        n_paths: config.n_paths,
        truncated,
        hit_high,
        hit_low: Estimate {
            value: 1.0 - hit_high.value,
            radius: hit_high.radius,
        },
        mean_flow_cost: all.cost.estimate(),
        mean_stop_time: all.time.estimate(),
        stopped_belief: all.belief.estimate(),
        guilty: if drawn { guilty.breakdown() } else { None },
        innocent: if drawn { innocent.breakdown() } else { None },
        mean_true_cost: config.true_prior.map(|_| all.true_cost.estimate()),
        paths: config.record_paths.then_some(records),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceCheck {
    pub name: &'static str,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl EquivalenceCheck {
    fn new(name: &'static str, expected: f64, observed: f64, tolerance: f64) -> Self {
        EquivalenceCheck {
            name,
            expected,
            observed,
            tolerance,
            // rounding floor for degenerate runs with zero spread
            pass: (observed - expected).abs() <= tolerance.max(1e-12),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub static_cost: f64,
    pub stats: SimulationStats,
    pub checks: Vec<EquivalenceCheck>,
    pub pass: bool,
}

/// Binomial radius of a frequency with true value `p` over `n` trials.
fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Simulate `config` and compare with the static solution it implements.
///
/// `config` must draw the state from its subjective prior and use the flow
/// cost whose static counterpart is `cost`.
pub fn validate_equivalence(
    solution: &StaticSolution,
    cost: &CostSpec,
    config: &SimConfig,
) -> Result<EquivalenceReport> {
    let prior = config.prior_subjective.get();
    match config.theta_mode {
        ThetaMode::DrawnFromPrior(p) if (p.get() - prior).abs() <= 1e-12 => {}
        _ => {
            return Err(Error::domain(
                "equivalence needs the state drawn from the subjective prior",
            ))
        }
    }
    let static_cost = cost.static_cost(&solution.distribution())?;
    let stats = run_paths(config)?;
    let p = match solution.regime {
        Regime::Interior => solution.p,
        Regime::NoAcquisition => 0.0,
        Regime::FreeConviction => 1.0,
    };
    let n = stats.n_paths - stats.truncated;
    let mut checks = vec![
        EquivalenceCheck::new(
            "mean_flow_cost",
            static_cost,
            stats.mean_flow_cost.value,
            (0.02 * static_cost).max(3.0 * stats.mean_flow_cost.radius),
        ),
        EquivalenceCheck::new("hit_high", p, stats.hit_high.value, 3.0 * binomial_sigma(p, n)),
        EquivalenceCheck::new(
            "stopped_belief_mean",
            prior,
            stats.stopped_belief.value,
            3.0 * stats.stopped_belief.radius,
        ),
    ];
    if solution.regime == Regime::Interior {
        let gamma = solution.high * p / prior;
        let lambda = (1.0 - solution.high) * p / (1.0 - prior);
        for (name, expected, side) in [
            ("hit_high_given_guilty", gamma, &stats.guilty),
            ("hit_high_given_innocent", lambda, &stats.innocent),
        ] {
            if let Some(b) = side {
                checks.push(EquivalenceCheck::new(
                    name,
                    expected,
                    b.hit_high.value,
                    3.0 * binomial_sigma(expected, b.n_paths),
                ));
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(EquivalenceReport {
        static_cost,
        stats,
        checks,
        pass,
    })
}
