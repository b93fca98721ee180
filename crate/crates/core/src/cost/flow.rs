//! Static cost induced by a dynamic flow cost.
//!
//! For flow cost `c` and noise `sigma` the static cost has curvature
//! `phi''(y) = sigma^2 c(y) / (2 (y (1 - y))^2)` and is pinned by
//! `phi(prior) = phi'(prior) = 0`. Then
//! `phi'(x) = int_prior^x phi''` and `phi(x) = int_prior^x (x - y) phi''(y) dy`,
//! so both need only single integrals. Cumulative integrals are cached on a node
//! grid uniform in log-odds; an evaluation adds one short panel integral.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FLOW_DOMAIN_LO: f64 = 1e-6;
pub const FLOW_DOMAIN_HI: f64 = 1.0 - 1e-6;

const PANELS: usize = 480;
const ABS_TOL: f64 = 1e-9;

/// A bounded positive flow cost on `(0, 1)`.
#[derive(Clone)]
pub struct FlowCost {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl FlowCost {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        FlowCost {
            label: label.into(),
            f: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, q: f64) -> f64 {
        (self.f)(q)
    }
}

impl fmt::Debug for FlowCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FlowCost({})", self.label)
    }
}

/// Named flow costs expressible in scenario files. Each is scaled so that its
/// static counterpart is `kappa` times a closed-form family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowCostFamily {
    /// `c = 2 kappa / sigma^2`; static cost `kappa * phi_LL`.
    Constant,
    /// `c = 2 kappa q (1 - q) / sigma^2`; static cost `kappa * phi_Entropy`.
    Variance,
    /// `c = 4 kappa (q (1 - q))^2 / sigma^2`; static cost `phi_Var` with that `kappa`.
    VarianceSquared,
}

impl FlowCostFamily {
    pub fn build(self, kappa: f64, sigma: f64) -> FlowCost {
        let s2 = sigma * sigma;
        match self {
            FlowCostFamily::Constant => {
                FlowCost::new(format!("constant(kappa={kappa})"), move |_| 2.0 * kappa / s2)
            }
            FlowCostFamily::Variance => FlowCost::new(format!("variance(kappa={kappa})"), move |q| {
                2.0 * kappa * q * (1.0 - q) / s2
            }),
            FlowCostFamily::VarianceSquared => {
                FlowCost::new(format!("variance_squared(kappa={kappa})"), move |q| {
                    let g = q * (1.0 - q);
                    4.0 * kappa * g * g / s2
                })
            }
        }
    }
}

/// Adaptive (tanh-sinh) integral with a convergence check.
fn integrate(f: impl Fn(f64) -> f64, lo: f64, hi: f64, target: f64) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    let out = quadrature::integrate(f, lo, hi, target);
    let slack = 1e-11 * out.integral.abs();
    if !out.integral.is_finite() || out.error_estimate > target.max(slack) {
        return Err(Error::Quadrature {
            lo,
            hi,
            achieved: out.error_estimate,
            target,
        });
    }
    Ok(out.integral)
}

pub struct NumericPhi {
    flow: FlowCost,
    sigma: f64,
    prior: f64,
    nodes: Vec<f64>,
    // int_prior^node phi''
    slope: Vec<f64>,
    // int_prior^node (y - prior) phi''(y) dy
    moment: Vec<f64>,
}

impl fmt::Debug for NumericPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericPhi")
            .field("flow", &self.flow)
            .field("sigma", &self.sigma)
            .field("prior", &self.prior)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl NumericPhi {
    pub(super) fn build(flow: FlowCost, sigma: f64, prior: f64) -> Result<Self> {
        let lo = (FLOW_DOMAIN_LO / (1.0 - FLOW_DOMAIN_LO)).ln();
        let hi = -lo;
        let mut nodes: Vec<f64> = (0..=PANELS)
            .map(|i| {
                let ell = lo + (hi - lo) * i as f64 / PANELS as f64;
                1.0 / (1.0 + (-ell).exp())
            })
            .collect();
        nodes[0] = FLOW_DOMAIN_LO;
        nodes[PANELS] = FLOW_DOMAIN_HI;
        for &x in &nodes {
            let c = flow.eval(x);
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::domain(format!(
                    "flow cost {} must be positive and bounded; c({x}) = {c}",
                    flow.label()
                )));
            }
        }
        if !(FLOW_DOMAIN_LO..=FLOW_DOMAIN_HI).contains(&prior) {
            return Err(Error::domain(format!(
                "prior {prior} outside the flow-cost domain [{FLOW_DOMAIN_LO}, {FLOW_DOMAIN_HI}]"
            )));
        }
        let at = nodes.partition_point(|&x| x < prior);
        if nodes.get(at) != Some(&prior) {
            nodes.insert(at, prior);
        }

        let mut phi = NumericPhi {
            flow,
            sigma,
            prior,
            slope: vec![0.0; nodes.len()],
            moment: vec![0.0; nodes.len()],
            nodes,
        };
        for k in at + 1..phi.nodes.len() {
            let (a, b) = (phi.nodes[k - 1], phi.nodes[k]);
            let (ds, dm) = phi.panel(a, b)?;
            phi.slope[k] = phi.slope[k - 1] + ds;
            phi.moment[k] = phi.moment[k - 1] + dm;
        }
        for k in (0..at).rev() {
            let (a, b) = (phi.nodes[k], phi.nodes[k + 1]);
            let (ds, dm) = phi.panel(a, b)?;
            phi.slope[k] = phi.slope[k + 1] - ds;
            phi.moment[k] = phi.moment[k + 1] - dm;
        }
        Ok(phi)
    }

    pub fn flow(&self) -> &FlowCost {
        &self.flow
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn phi_double_prime(&self, y: f64) -> f64 {
        let g = y * (1.0 - y);
        self.sigma * self.sigma * self.flow.eval(y) / (2.0 * g * g)
    }

    /// Integrals of `phi''` and `(y - prior) phi''` over `[a, b]`.
    fn panel(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        let scale = (b - a).abs() * self.phi_double_prime(a).max(self.phi_double_prime(b));
        let tol = ABS_TOL.max(1e-13 * scale);
        let ds = integrate(|y| self.phi_double_prime(y), a, b, tol)?;
        let dm = integrate(|y| (y - self.prior) * self.phi_double_prime(y), a, b, tol)?;
        Ok((ds, dm))
    }

    /// Cumulative integrals from the prior to `x`.
    fn cumulative(&self, x: f64) -> Result<(f64, f64)> {
        let k = self.nodes.partition_point(|&n| n <= x).saturating_sub(1);
        let anchor = if k + 1 < self.nodes.len() && (self.nodes[k + 1] - x) < (x - self.nodes[k]) {
            k + 1
        } else {
            k
        };
        let n = self.nodes[anchor];
        let (ds, dm) = if x >= n {
            self.panel(n, x)?
        } else {
            let (ds, dm) = self.panel(x, n)?;
            (-ds, -dm)
        };
        Ok((self.slope[anchor] + ds, self.moment[anchor] + dm))
    }

    pub fn phi_prime(&self, x: f64) -> Result<f64> {
        Ok(self.cumulative(x)?.0)
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        let (slope, moment) = self.cumulative(x)?;
        Ok((x - self.prior) * slope - moment)
    }
}
