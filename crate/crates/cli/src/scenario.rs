//! Scenario files: parsing and validation.

use std::path::Path;

use biased_evidence::analysis::{BiasHolder, BiasScenario};
use biased_evidence::belief::effective_threshold_biased_dm;
use biased_evidence::cost::FlowCostFamily;
use biased_evidence::preference::PreferenceParams;
use biased_evidence::{Belief, CostSpec, BELIEF_TOL};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mu: f64,
    pub a: f64,
    pub v: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub cost: CostBlock,
    pub bias: BiasBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimBlock>,
}

fn default_sigma() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    Variance,
    Entropy,
    LogLikelihood,
    Tsallis,
    Flow,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CostBlock {
    pub family: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowCostFamily>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum Who {
    L,
    DM,
    #[serde(rename = "preference")]
    Preference,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BiasBlock {
    pub who: Who,
    #[serde(rename = "mu_B", default, skip_serializing_if = "Option::is_none")]
    pub mu_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaName {
    Prior,
    Guilty,
    Innocent,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    /// Defaults to `1e-4 sigma^2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_paths")]
    pub n_paths: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_theta")]
    pub theta: ThetaName,
    #[serde(default = "default_true")]
    pub bridge: bool,
    /// Also accrue cost along the correctly specified belief path.
    #[serde(default)]
    pub true_cost: bool,
}

fn default_paths() -> u64 {
    100_000
}

fn default_theta() -> ThetaName {
    ThetaName::Prior
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bias {
    Belief { who: BiasHolder, mu_b: f64 },
    Preference(PreferenceParams),
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub mu: Belief,
    pub a: Belief,
    pub v: f64,
    pub sigma: f64,
    pub cost: CostSpec,
    pub bias: Bias,
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn unused(field: &str, family: FamilyName, value: Option<impl Sized>) -> Result<(), CliError> {
    match value {
        Some(_) => Err(input(format!(
            "cost.{field} is not used by family {:?}",
            family
        ))),
        None => Ok(()),
    }
}

fn positive(name: &str, value: Option<f64>) -> Result<f64, CliError> {
    match value {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(input(format!("{name} = {x} must be positive and finite"))),
        None => Err(input(format!("{name} is required"))),
    }
}

fn build_cost(block: &CostBlock, prior: f64, sigma: f64) -> Result<CostSpec, CliError> {
    let family = block.family;
    let spec = match family {
        FamilyName::Variance => {
            unused("q", family, block.q)?;
            unused("flow", family, block.flow)?;
            CostSpec::variance(positive("cost.kappa", block.kappa)?, prior)
        }
        FamilyName::Entropy | FamilyName::LogLikelihood => {
            unused("kappa", family, block.kappa)?;
            unused("q", family, block.q)?;
            unused("flow", family, block.flow)?;
            if family == FamilyName::Entropy {
                CostSpec::entropy(prior)
            } else {
                CostSpec::log_likelihood(prior)
            }
        }
        FamilyName::Tsallis => {
            unused("flow", family, block.flow)?;
            let q = block.q.ok_or_else(|| input("cost.q is required for family Tsallis"))?;
            CostSpec::tsallis(positive("cost.kappa", block.kappa)?, q, prior)
        }
        FamilyName::Flow => {
            unused("q", family, block.q)?;
            let flow = block
                .flow
                .ok_or_else(|| input("cost.flow is required for family Flow"))?;
            let kappa = positive("cost.kappa", block.kappa)?;
            CostSpec::from_flow_cost(flow.build(kappa, sigma), sigma, prior)
        }
    };
    spec.map_err(CliError::from)
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| input(format!("invalid scenario: {e}")))?;
        Self::validate(file)
    }

    pub fn validate(file: ScenarioFile) -> Result<Self, CliError> {
        let mu = Belief::interior("mu", file.mu)?;
        if !(file.a > 0.0 && file.a <= 1.0) {
            return Err(input(format!("a = {} must lie in (0, 1]", file.a)));
        }
        let a = Belief::new(file.a)?;
        let v = positive("v", Some(file.v))?;
        let sigma = positive("sigma", Some(file.sigma))?;
        let cost = build_cost(&file.cost, mu.get(), sigma)?;

        let bias = match file.bias.who {
            Who::L | Who::DM => {
                if file.bias.eta.is_some() || file.bias.rho.is_some() {
                    return Err(input("bias.eta and bias.rho apply only to who = preference"));
                }
                let mu_b = file
                    .bias
                    .mu_b
                    .ok_or_else(|| input("bias.mu_B is required for belief bias"))?;
                if !(mu_b >= mu.get() - BELIEF_TOL && mu_b < 1.0) {
                    return Err(input(format!(
                        "bias.mu_B = {mu_b} must lie in [mu, 1) with mu = {}",
                        mu.get()
                    )));
                }
                let who = if file.bias.who == Who::L {
                    BiasHolder::L
                } else {
                    BiasHolder::DM
                };
                Bias::Belief {
                    who,
                    mu_b: mu_b.max(mu.get()),
                }
            }
            Who::Preference => {
                if file.bias.mu_b.is_some() {
                    return Err(input("bias.mu_B does not apply to who = preference"));
                }
                let eta = file.bias.eta.ok_or_else(|| input("bias.eta is required"))?;
                let rho = file.bias.rho.ok_or_else(|| input("bias.rho is required"))?;
                Bias::Preference(PreferenceParams::new(eta, rho, v, a)?)
            }
        };

        if let (FamilyName::Variance, Bias::Belief { who, mu_b }) = (file.cost.family, bias) {
            let kappa = file.cost.kappa.expect("checked above");
            check_condition1(mu, a, who, mu_b, (v / kappa).sqrt())?;
        }
        if let Some(sim) = &file.sim {
            if let Some(dt) = sim.dt {
                positive("sim.dt", Some(dt))?;
            }
            if sim.n_paths == 0 {
                return Err(input("sim.n_paths must be at least 1"));
            }
        }

        Ok(Scenario {
            mu,
            a,
            v,
            sigma,
            cost,
            bias,
            file,
        })
    }

    pub fn bias_scenario(&self) -> Result<BiasScenario, CliError> {
        Ok(BiasScenario::new(self.mu, self.a, self.v, self.cost.clone())?)
    }

    pub fn is_variance(&self) -> bool {
        self.file.cost.family == FamilyName::Variance
    }
}

/// Under the variance cost the decision maker's cutoff must exceed `d`
/// unless the biased prior already reaches it.
fn check_condition1(
    mu: Belief,
    a: Belief,
    who: BiasHolder,
    mu_b: f64,
    d: f64,
) -> Result<(), CliError> {
    let a_dm = match who {
        BiasHolder::L => a.get(),
        BiasHolder::DM => effective_threshold_biased_dm(mu, Belief::new(mu_b)?, a)?.get(),
    };
    if a_dm > mu.get() + BELIEF_TOL && a_dm <= d {
        return Err(CliError::Input(format!(
            "Condition 1 violated: a_DM ≤ d (a_DM = {a_dm}, d = {d})"
        )));
    }
    Ok(())
}
