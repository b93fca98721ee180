use std::io::Write;
use std::path::Path;

use biased_evidence::analysis::{grid_points, sweep_bias, BiasHolder, OutcomeProbs, SweepRow};
use biased_evidence::belief::{effective_threshold_biased_l, reprior};
use biased_evidence::preference::{solve_preference, Assumption1Report, PreferenceBranch, PreferenceParams};
use biased_evidence::sim::{
    boundaries_for, run_paths, validate_equivalence, EquivalenceCheck, SimConfig, SimulationStats,
    ThetaMode,
};
use biased_evidence::solver::{concavify_oracle, solve_static, StaticProblem, StaticSolution};
use biased_evidence::verify::{run_suite, Suite, Verdict, VerifyOptions};
use biased_evidence::{Belief, CostSpec, Regime};
use serde::Serialize;

use crate::error::CliError;
use crate::output::{csv_number, open_out, print_json};
use crate::scenario::{Bias, Scenario, ScenarioFile, SimBlock, ThetaName};

#[derive(Debug, Serialize)]
struct SolveReport<'a> {
    scenario: &'a ScenarioFile,
    who: &'static str,
    #[serde(rename = "mu_B", skip_serializing_if = "Option::is_none")]
    mu_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    prior_effective: f64,
    threshold_effective: f64,
    regime: Regime,
    b: f64,
    high: f64,
    p: f64,
    value: Option<f64>,
    corner: bool,
    gamma: f64,
    lambda: f64,
    p_true: f64,
    p_subjective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    branch: Option<PreferenceBranch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    assumption1: Option<Assumption1Report>,
}

pub struct Solved {
    pub who: &'static str,
    pub mu_b: Option<f64>,
    pub prior: Belief,
    pub threshold: f64,
    pub solution: StaticSolution,
    pub probs: OutcomeProbs,
    pub preference: Option<(PreferenceParams, PreferenceBranch, Assumption1Report)>,
}

pub fn solve_scenario(scenario: &Scenario) -> Result<Solved, CliError> {
    match scenario.bias {
        Bias::Belief { who, mu_b } => {
            let base = scenario.bias_scenario()?;
            let problem = base.problem(who, Belief::new(mu_b)?)?;
            let out = base.solve(who, mu_b)?;
            Ok(Solved {
                who: who.as_str(),
                mu_b: Some(mu_b),
                prior: problem.prior,
                threshold: out.threshold,
                solution: out.solution,
                probs: out.probs,
                preference: None,
            })
        }
        Bias::Preference(params) => {
            let s = solve_preference(&params, scenario.mu, &scenario.cost)?;
            Ok(Solved {
                who: "preference",
                mu_b: None,
                prior: scenario.mu,
                threshold: scenario.a.get(),
                solution: s.solution,
                probs: s.probs,
                preference: Some((params, s.branch, s.assumption1)),
            })
        }
    }
}

pub fn solve(path: &Path) -> Result<(), CliError> {
    let scenario = Scenario::load(path)?;
    let s = solve_scenario(&scenario)?;
    print_json(&SolveReport {
        scenario: &scenario.file,
        who: s.who,
        mu_b: s.mu_b,
        eta: s.preference.map(|p| p.0.eta),
        rho: s.preference.map(|p| p.0.rho),
        prior_effective: s.prior.get(),
        threshold_effective: s.threshold,
        regime: s.solution.regime,
        b: s.solution.low,
        high: s.solution.high,
        p: s.solution.p,
        value: s.solution.value,
        corner: s.solution.corner,
        gamma: s.probs.gamma,
        lambda: s.probs.lambda,
        p_true: s.probs.p_true,
        p_subjective: s.probs.p_subjective,
        branch: s.preference.map(|p| p.1),
        assumption1: s.preference.map(|p| p.2),
    })
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "grid `{spec}` must have the form start:stop:step"
        )));
    }
    let mut nums = [0.0; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("grid `{spec}`: `{part}` is not a number")))?;
    }
    Ok(grid_points(nums[0], nums[1], nums[2])?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepWho {
    L,
    DM,
    Preference,
}

const BIAS_HEADER: &str = "mu_B,who,regime,b,high,p_subjective,gamma,lambda,p_true";

fn bias_row(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        csv_number(row.mu_b),
        row.who.as_str(),
        row.regime.as_str(),
        csv_number(row.b),
        csv_number(row.high),
        csv_number(row.p_subjective),
        csv_number(row.gamma),
        csv_number(row.lambda),
        csv_number(row.p_true)
    )
}

pub fn sweep(
    path: &Path,
    who: Option<SweepWho>,
    grid: &str,
    out: Option<&Path>,
    boundaries: bool,
) -> Result<(), CliError> {
    let scenario = Scenario::load(path)?;
    let grid = parse_grid(grid)?;
    let who = who.unwrap_or(match scenario.bias {
        Bias::Belief { who: BiasHolder::L, .. } => SweepWho::L,
        Bias::Belief { who: BiasHolder::DM, .. } => SweepWho::DM,
        Bias::Preference(_) => SweepWho::Preference,
    });
    let holder = match who {
        SweepWho::L => BiasHolder::L,
        SweepWho::DM => BiasHolder::DM,
        SweepWho::Preference => return preference_sweep(&scenario, &grid, out),
    };
    let table = sweep_bias(&scenario.bias_scenario()?, holder, &grid)?;
    let mut w = open_out(out)?;
    if boundaries {
        writeln!(w, "{BIAS_HEADER},point")?;
        let mut pending = table.boundaries.iter().peekable();
        for row in &table.rows {
            while let Some(bd) = pending.next_if(|bd| bd.mu_b < row.mu_b) {
                writeln!(w, "{},boundary_below", bias_row(&bd.below))?;
                writeln!(w, "{},boundary_above", bias_row(&bd.above))?;
            }
            writeln!(w, "{},grid", bias_row(row))?;
        }
        for bd in pending {
            writeln!(w, "{},boundary_below", bias_row(&bd.below))?;
            writeln!(w, "{},boundary_above", bias_row(&bd.above))?;
        }
    } else {
        writeln!(w, "{BIAS_HEADER}")?;
        for row in &table.rows {
            writeln!(w, "{}", bias_row(row))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Sweep the preference weight `eta` over the grid.
fn preference_sweep(scenario: &Scenario, grid: &[f64], out: Option<&Path>) -> Result<(), CliError> {
    let rho = match scenario.bias {
        Bias::Preference(p) => p.rho,
        Bias::Belief { .. } => {
            return Err(CliError::Input(
                "a preference sweep needs a scenario with who = preference".into(),
            ))
        }
    };
    let mut w = open_out(out)?;
    writeln!(w, "eta,rho,who,regime,b,high,p_subjective,gamma,lambda,p_true,branch")?;
    for &eta in grid {
        let params = PreferenceParams::new(eta, rho, scenario.v, scenario.a)?;
        let s = solve_preference(&params, scenario.mu, &scenario.cost)
            .map_err(|e| CliError::from(e).at_grid(eta))?;
        let branch = match s.branch {
            PreferenceBranch::Binding => "binding",
            PreferenceBranch::NonBindingOracle => "non_binding_oracle",
        };
        writeln!(
            w,
            "{},{},preference,{},{},{},{},{},{},{},{}",
            csv_number(eta),
            csv_number(rho),
            s.solution.regime.as_str(),
            csv_number(s.solution.low),
            csv_number(s.solution.high),
            csv_number(s.probs.p_subjective),
            csv_number(s.probs.gamma),
            csv_number(s.probs.lambda),
            csv_number(s.probs.p_true),
            branch
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn verify(suite: Option<Suite>, quick: bool, out: Option<&Path>) -> Result<(), CliError> {
    let suites: Vec<Suite> = match suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let options = VerifyOptions { quick };
    let mut verdicts: Vec<Verdict> = Vec::new();
    for s in suites {
        verdicts.extend(run_suite(s, options)?);
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    match out {
        Some(path) => {
            let mut w = open_out(Some(path))?;
            serde_json::to_writer_pretty(&mut w, &verdicts)
                .map_err(|e| CliError::Numeric(e.to_string()))?;
            writeln!(w)?;
            w.flush()?;
        }
        None => print_json(&verdicts)?,
    }
    for v in verdicts.iter().filter(|v| !v.pass) {
        eprintln!("{v}");
    }
    eprintln!("{} of {} checks passed", verdicts.len() - failed, verdicts.len());
    if failed > 0 {
        return Err(CliError::VerificationFailed(failed));
    }
    Ok(())
}

/// Parameters of a figure: biased law enforcement under the variance cost.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FigureParams {
    pub mu: f64,
    pub mu_l: f64,
    pub a: f64,
    pub kappa: f64,
    pub v: f64,
}

pub fn figure_preset(case: u8) -> Result<FigureParams, CliError> {
    match case {
        1 => Ok(FigureParams { mu: 0.2, mu_l: 0.3, a: 0.6, kappa: 4.0, v: 1.0 }),
        2 => Ok(FigureParams { mu: 0.4, mu_l: 0.5, a: 0.8, kappa: 4.0, v: 1.0 }),
        _ => Err(CliError::Input(format!("unknown figure case {case}; use 1 or 2"))),
    }
}

fn figure_params_from(scenario: &Scenario) -> Result<FigureParams, CliError> {
    if !scenario.is_variance() {
        return Err(CliError::Input("figures are defined for the variance cost only".into()));
    }
    match scenario.bias {
        Bias::Belief { who: BiasHolder::L, mu_b } => Ok(FigureParams {
            mu: scenario.mu.get(),
            mu_l: mu_b,
            a: scenario.a.get(),
            kappa: scenario.file.cost.kappa.expect("variance cost has kappa"),
            v: scenario.v,
        }),
        _ => Err(CliError::Input(
            "figures illustrate a biased law enforcer: use bias.who = L".into(),
        )),
    }
}

#[derive(Debug, Serialize)]
struct FigureMeta {
    case: Option<u8>,
    params: FigureParams,
    d: f64,
    a_l: f64,
    b_l: f64,
    p_l: f64,
    b_unbiased: f64,
    #[serde(rename = "x_DM(b_L)")]
    x_dm_of_b_l: f64,
    #[serde(rename = "x_DM(b_L) > b")]
    x_dm_exceeds_b: bool,
    rows: usize,
}

const FIGURE_STEP: f64 = 1e-3;

fn figure_grid(insert: f64) -> Vec<f64> {
    let n = (1.0 / FIGURE_STEP).round() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|i| i as f64 * FIGURE_STEP).collect();
    let k = xs.partition_point(|&x| x < insert);
    if xs.get(k) != Some(&insert) {
        xs.insert(k, insert);
    }
    xs
}

pub fn figure(path: Option<&Path>, case: Option<u8>, out: &Path) -> Result<(), CliError> {
    let params = match (path, case) {
        (Some(p), _) => figure_params_from(&Scenario::load(p)?)?,
        (None, Some(c)) => figure_preset(c)?,
        (None, None) => {
            return Err(CliError::Input("figure needs a scenario file or --case".into()))
        }
    };
    let FigureParams { mu, mu_l, a, kappa, v } = params;
    let (mu_b, mu_lb, a_b) = (Belief::interior("mu", mu)?, Belief::interior("mu_L", mu_l)?, Belief::new(a)?);
    let a_l = effective_threshold_biased_l(mu_b, mu_lb, a_b)?.get();
    let perceived_cost = CostSpec::variance(kappa, mu_l)?;
    let biased = solve_static(&StaticProblem::new(mu_lb, Belief::new(a_l)?, v, perceived_cost.clone())?)?;
    let unbiased = solve_static(&StaticProblem::new(mu_b, a_b, v, CostSpec::variance(kappa, mu)?)?)?;
    let x_dm = reprior(Belief::new(biased.low)?, mu_lb, mu_b)?.get();

    let perceived = |x: f64| -> Result<f64, CliError> {
        let reward = if x >= a_l { v } else { 0.0 };
        Ok(reward - perceived_cost.phi(x)?)
    };
    let actual = |y: f64| -> Result<f64, CliError> {
        let x = reprior(Belief::new(y)?, mu_b, mu_lb)?.get();
        let reward = if y >= a { v } else { 0.0 };
        Ok(reward - perceived_cost.phi(x)?)
    };

    let mut rows: Vec<(&str, f64, f64)> = Vec::new();
    for (name, hull_name, insert, prior, value) in [
        ("perceived_V", "perceived_concavification", a_l, mu_l, &perceived as &dyn Fn(f64) -> Result<f64, CliError>),
        ("actual_V", "actual_concavification", a, mu, &actual),
    ] {
        let xs = figure_grid(insert);
        let samples: Vec<(f64, f64)> = xs.iter().map(|&x| Ok((x, value(x)?))).collect::<Result<_, CliError>>()?;
        let hull = concavify_oracle(&samples, prior)?;
        for &(x, y) in &samples {
            rows.push((name, x, y));
        }
        for &(x, _) in &samples {
            let y = hull.envelope_at(x).expect("grid inside hull range");
            rows.push((hull_name, x, y));
        }
    }

    let mut w = open_out(Some(out))?;
    writeln!(w, "series,x,y")?;
    for (series, x, y) in &rows {
        writeln!(w, "{series},{},{}", csv_number(*x), csv_number(*y))?;
    }
    w.flush()?;

    let b_unbiased = match unbiased.regime {
        Regime::Interior => unbiased.low,
        _ => mu,
    };
    print_json(&FigureMeta {
        case,
        params,
        d: (v / kappa).sqrt(),
        a_l,
        b_l: biased.low,
        p_l: biased.p,
        b_unbiased,
        x_dm_of_b_l: x_dm,
        x_dm_exceeds_b: x_dm > b_unbiased,
        rows: rows.len(),
    })
}

#[derive(Debug, Serialize)]
struct SimulateReport<'a> {
    scenario: &'a ScenarioFile,
    sim: &'a SimBlock,
    dt: f64,
    boundaries: (f64, f64),
    prior_subjective: f64,
    regime: Regime,
    static_cost: f64,
    stats: SimulationStats,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    checks: Vec<EquivalenceCheck>,
    pass: bool,
}

pub fn simulate(path: &Path, paths_csv: Option<&Path>) -> Result<(), CliError> {
    let scenario = Scenario::load(path)?;
    let sim = scenario
        .file
        .sim
        .clone()
        .ok_or_else(|| CliError::Input("scenario has no sim block".into()))?;
    let solved = solve_scenario(&scenario)?;
    if solved.solution.regime == Regime::Interior && solved.solution.low <= 0.0 {
        return Err(CliError::Input(
            "the static solution puts mass on certainty of innocence, which no finite stopping rule reaches".into(),
        ));
    }
    if solved.preference.is_some() {
        return Err(CliError::Input(
            "simulation covers belief-bias scenarios; preference payoffs do not change the stopping law".into(),
        ));
    }
    let sigma = scenario.sigma;
    let dt = sim.dt.unwrap_or(1e-4 * sigma * sigma);
    let prior = solved.prior;
    let theta_mode = match sim.theta {
        ThetaName::Prior => ThetaMode::DrawnFromPrior(prior),
        ThetaName::Guilty => ThetaMode::Guilty,
        ThetaName::Innocent => ThetaMode::Innocent,
    };
    let boundaries = boundaries_for(&solved.solution)?;
    let mut config = SimConfig::new(
        sigma,
        dt,
        sim.n_paths,
        sim.seed,
        theta_mode,
        boundaries,
        prior,
        scenario.cost.flow_cost_preimage(sigma)?,
    )?;
    config.bridge = sim.bridge;
    config.true_prior = sim.true_cost.then_some(scenario.mu);
    config.record_paths = paths_csv.is_some();

    let cost = scenario.cost.with_prior(prior.get())?;
    let static_cost = cost.static_cost(&solved.solution.distribution())?;
    let (stats, checks, pass) = if sim.theta == ThetaName::Prior {
        let report = validate_equivalence(&solved.solution, &cost, &config)?;
        (report.stats, report.checks, report.pass)
    } else {
        (run_paths(&config)?, Vec::new(), true)
    };

    if let (Some(p), Some(records)) = (paths_csv, stats.paths.as_ref()) {
        let mut w = open_out(Some(p))?;
        writeln!(w, "path,theta,hit,stop_time,cost")?;
        for r in records {
            let hit = if r.truncated {
                "truncated"
            } else if r.hit_high {
                "high"
            } else {
                "low"
            };
            writeln!(
                w,
                "{},{},{},{},{}",
                r.path,
                r.theta,
                hit,
                csv_number(r.stop_time),
                csv_number(r.cost)
            )?;
        }
        w.flush()?;
    }

    print_json(&SimulateReport {
        scenario: &scenario.file,
        sim: &sim,
        dt,
        boundaries: (boundaries.0.get(), boundaries.1.get()),
        prior_subjective: prior.get(),
        regime: solved.solution.regime,
        static_cost,
        stats,
        checks,
        pass,
    })?;
    if !pass {
        return Err(CliError::VerificationFailed(1));
    }
    Ok(())
}
