//! Uniformly posterior-separable information costs.
//!
//! A cost is a strictly convex `phi` on beliefs; the cost of a distribution
//! over posteriors is `E[phi(x)]`. All closed-form families are anchored so that
//! `phi(prior) = 0` and `phi'(prior) = 0`, which is the normalisation the
//! flow-cost transform produces. The anchoring subtracts an affine term, so it
//! changes no cost difference between distributions sharing a mean.

mod flow;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Divergence, Error, Result};

pub use flow::{FlowCost, FlowCostFamily, NumericPhi, FLOW_DOMAIN_LO, FLOW_DOMAIN_HI};

/// Lowest belief at which the first-order condition is evaluated for families
/// whose slope diverges at certainty.
pub const DIVERGENT_FLOOR: f64 = 1e-9;

#[derive(Clone)]
pub enum CostFamily {
    Variance { kappa: f64 },
    Entropy,
    LogLikelihood,
    Tsallis { kappa: f64, q: f64 },
    FromFlowCost(Arc<NumericPhi>),
}

impl fmt::Debug for CostFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostFamily::Variance { kappa } => write!(f, "Variance(kappa={kappa})"),
            CostFamily::Entropy => f.write_str("Entropy"),
            CostFamily::LogLikelihood => f.write_str("LogLikelihood"),
            CostFamily::Tsallis { kappa, q } => write!(f, "Tsallis(kappa={kappa}, q={q})"),
            CostFamily::FromFlowCost(n) => {
                write!(f, "FromFlowCost({}, sigma={})", n.flow().label(), n.sigma())
            }
        }
    }
}

/// Short machine-readable tag for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    Variance,
    Entropy,
    LogLikelihood,
    Tsallis,
    Flow,
}

#[derive(Debug, Clone)]
pub struct CostSpec {
    family: CostFamily,
    prior: f64,
}

fn check_prior(prior: f64) -> Result<()> {
    if !(prior > 0.0 && prior < 1.0) {
        return Err(Error::NotInterior {
            name: "cost prior",
            value: prior,
        });
    }
    Ok(())
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::domain(format!("{name} = {value} must be positive and finite")));
    }
    Ok(())
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::BeliefOutOfRange { value: x });
    }
    Ok(())
}

/// `x ln x` with the continuous extension at zero.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn endpoint_direction(x: f64, order: u8) -> Divergence {
    // convex phi: slope runs from -inf to +inf, curvature is +inf at both ends
    if order == 1 && x < 0.5 {
        Divergence::NegativeInfinity
    } else {
        Divergence::PositiveInfinity
    }
}

impl CostSpec {
    pub fn variance(kappa: f64, prior: f64) -> Result<Self> {
        check_positive("kappa", kappa)?;
        check_prior(prior)?;
        Ok(CostSpec {
            family: CostFamily::Variance { kappa },
            prior,
        })
    }

    pub fn entropy(prior: f64) -> Result<Self> {
        check_prior(prior)?;
        Ok(CostSpec {
            family: CostFamily::Entropy,
            prior,
        })
    }

    pub fn log_likelihood(prior: f64) -> Result<Self> {
        check_prior(prior)?;
        Ok(CostSpec {
            family: CostFamily::LogLikelihood,
            prior,
        })
    }

    pub fn tsallis(kappa: f64, q: f64, prior: f64) -> Result<Self> {
        check_positive("kappa", kappa)?;
        check_positive("q", q)?;
        check_prior(prior)?;
        Ok(CostSpec {
            family: CostFamily::Tsallis { kappa, q },
            prior,
        })
    }

    /// The static cost equivalent to sampling under flow cost `flow` with noise `sigma`.
    pub fn from_flow_cost(flow: FlowCost, sigma: f64, prior: f64) -> Result<Self> {
        check_positive("sigma", sigma)?;
        check_prior(prior)?;
        let numeric = NumericPhi::build(flow, sigma, prior)?;
        Ok(CostSpec {
            family: CostFamily::FromFlowCost(Arc::new(numeric)),
            prior,
        })
    }

    pub fn family(&self) -> &CostFamily {
        &self.family
    }

    pub fn tag(&self) -> FamilyTag {
        match self.family {
            CostFamily::Variance { .. } => FamilyTag::Variance,
            CostFamily::Entropy => FamilyTag::Entropy,
            CostFamily::LogLikelihood => FamilyTag::LogLikelihood,
            CostFamily::Tsallis { .. } => FamilyTag::Tsallis,
            CostFamily::FromFlowCost(_) => FamilyTag::Flow,
        }
    }

    pub fn prior(&self) -> f64 {
        self.prior
    }

    /// Same family re-anchored at another prior. Flow-derived costs are rebuilt.
    pub fn with_prior(&self, prior: f64) -> Result<Self> {
        match &self.family {
            CostFamily::FromFlowCost(n) => {
                CostSpec::from_flow_cost(n.flow().clone(), n.sigma(), prior)
            }
            family => {
                check_prior(prior)?;
                Ok(CostSpec {
                    family: family.clone(),
                    prior,
                })
            }
        }
    }

    /// Tsallis with `q = 1` is entropy scaled by `kappa`.
    fn tsallis_is_entropy(q: f64) -> bool {
        (q - 1.0).abs() < 1e-10
    }

    /// Unanchored value, slope and curvature, without domain checks.
    fn raw(&self, x: f64) -> (f64, f64, f64) {
        match self.family {
            CostFamily::Variance { kappa } => {
                let u = x - self.prior;
                (kappa * u * u, 2.0 * kappa * u, 2.0 * kappa)
            }
            CostFamily::Entropy => entropy_raw(x, 1.0),
            CostFamily::LogLikelihood => {
                let g = x * (1.0 - x);
                let logit = x.ln() - (1.0 - x).ln();
                let value = if x == 0.0 || x == 1.0 {
                    f64::INFINITY
                } else {
                    (2.0 * x - 1.0) * logit
                };
                (value, 2.0 * logit + (2.0 * x - 1.0) / g, 1.0 / (g * g))
            }
            CostFamily::Tsallis { kappa, q } => {
                if Self::tsallis_is_entropy(q) {
                    return entropy_raw(x, kappa);
                }
                let y = 1.0 - x;
                let value = kappa / (q - 1.0) * (x.powf(q) + y.powf(q));
                let slope = kappa * q / (q - 1.0) * (x.powf(q - 1.0) - y.powf(q - 1.0));
                let curv = kappa * q * (x.powf(q - 2.0) + y.powf(q - 2.0));
                (value, slope, curv)
            }
            CostFamily::FromFlowCost(_) => unreachable!("numeric costs are evaluated directly"),
        }
    }

    /// Whether the derivative of the given order is unbounded at `x` (an endpoint).
    fn diverges_at_endpoint(&self, order: u8) -> bool {
        match self.family {
            CostFamily::Variance { .. } => false,
            CostFamily::Entropy => order >= 1,
            CostFamily::LogLikelihood => true,
            CostFamily::Tsallis { q, .. } => match order {
                0 => false,
                1 => q <= 1.0 + 1e-10,
                _ => q < 2.0,
            },
            CostFamily::FromFlowCost(_) => true,
        }
    }

    fn check_eval(&self, x: f64, order: u8) -> Result<()> {
        check_unit(x)?;
        if let CostFamily::FromFlowCost(_) = self.family {
            if !(FLOW_DOMAIN_LO..=FLOW_DOMAIN_HI).contains(&x) {
                let direction = if order == 1 && x < 0.5 {
                    Divergence::NegativeInfinity
                } else {
                    Divergence::PositiveInfinity
                };
                return Err(Error::Divergent {
                    at: x,
                    order,
                    direction,
                });
            }
            return Ok(());
        }
        if (x == 0.0 || x == 1.0) && self.diverges_at_endpoint(order) {
            return Err(Error::Divergent {
                at: x,
                order,
                direction: endpoint_direction(x, order),
            });
        }
        Ok(())
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        self.check_eval(x, 0)?;
        if let CostFamily::FromFlowCost(n) = &self.family {
            return n.phi(x);
        }
        let p = self.prior;
        let (vx, _, _) = self.raw(x);
        let (vp, sp, _) = self.raw(p);
        Ok(vx - vp - sp * (x - p))
    }

    pub fn phi_prime(&self, x: f64) -> Result<f64> {
        self.check_eval(x, 1)?;
        if let CostFamily::FromFlowCost(n) = &self.family {
            return n.phi_prime(x);
        }
        let (_, sx, _) = self.raw(x);
        let (_, sp, _) = self.raw(self.prior);
        Ok(sx - sp)
    }

    pub fn phi_double_prime(&self, x: f64) -> Result<f64> {
        self.check_eval(x, 2)?;
        if let CostFamily::FromFlowCost(n) = &self.family {
            return Ok(n.phi_double_prime(x));
        }
        Ok(self.raw(x).2)
    }

    /// Smallest belief at which `phi'` is finite and evaluable.
    pub fn slope_floor(&self) -> f64 {
        match self.family {
            CostFamily::FromFlowCost(_) => FLOW_DOMAIN_LO,
            _ if self.diverges_at_endpoint(1) => DIVERGENT_FLOOR,
            _ => 0.0,
        }
    }

    /// Largest belief at which `phi'` is finite and evaluable.
    pub fn slope_ceiling(&self) -> f64 {
        match self.family {
            CostFamily::FromFlowCost(_) => FLOW_DOMAIN_HI,
            _ if self.diverges_at_endpoint(1) => 1.0 - DIVERGENT_FLOOR,
            _ => 1.0,
        }
    }

    /// Interval on which `phi` itself is finite; used to clip oracle grids.
    pub fn value_domain(&self) -> (f64, f64) {
        match self.family {
            CostFamily::FromFlowCost(_) => (FLOW_DOMAIN_LO, FLOW_DOMAIN_HI),
            CostFamily::LogLikelihood | CostFamily::Entropy => (1e-6, 1.0 - 1e-6),
            CostFamily::Tsallis { q, .. } if q < 2.0 => (1e-6, 1.0 - 1e-6),
            _ => (0.0, 1.0),
        }
    }

    /// Whether reaching certainty of innocence is never worth it: the first-order
    /// residual for the given threshold and effective reward is negative at the
    /// lowest evaluable belief, so the optimal low posterior stays above it.
    pub fn certainty_prohibitive(&self, threshold: f64, reward: f64) -> Result<bool> {
        let lo = self.slope_floor();
        if self.diverges_at_endpoint(1) && !matches!(self.family, CostFamily::FromFlowCost(_)) {
            return Ok(true);
        }
        if threshold >= 1.0 && self.phi(1.0).is_err() {
            return Ok(true);
        }
        let h = self.phi(lo)? + (threshold - lo) * self.phi_prime(lo)? + reward - self.phi(threshold)?;
        Ok(h < 0.0)
    }

    /// `sum_i w_i phi(x_i)` over a finite distribution of posteriors.
    pub fn static_cost(&self, distribution: &[(f64, f64)]) -> Result<f64> {
        let mut total_weight = 0.0;
        let mut cost = 0.0;
        for &(x, w) in distribution {
            if !(w >= 0.0) {
                return Err(Error::domain(format!("negative weight {w} at posterior {x}")));
            }
            total_weight += w;
            if w > 0.0 {
                cost += w * self.phi(x)?;
            }
        }
        if (total_weight - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "distribution weights sum to {total_weight}, not 1"
            )));
        }
        Ok(cost)
    }

    /// The flow cost `c(q) = 2 phi''(q) (q (1 - q))^2 / sigma^2` whose transform is this cost.
    pub fn flow_cost_preimage(&self, sigma: f64) -> Result<FlowCost> {
        check_positive("sigma", sigma)?;
        let spec = self.clone();
        let label = format!("preimage of {:?}", self.family);
        Ok(FlowCost::new(label, move |q: f64| {
            let g = q * (1.0 - q);
            match spec.phi_double_prime(q) {
                Ok(c2) => 2.0 * c2 * g * g / (sigma * sigma),
                Err(_) => f64::NAN,
            }
        }))
    }
}

fn entropy_raw(x: f64, scale: f64) -> (f64, f64, f64) {
    let y = 1.0 - x;
    (
        scale * (xlogx(x) + xlogx(y)),
        scale * (x.ln() - y.ln()),
        scale / (x * y),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_closed_forms(prior: f64) -> Vec<CostSpec> {
        vec![
            CostSpec::variance(4.0, prior).unwrap(),
            CostSpec::entropy(prior).unwrap(),
            CostSpec::log_likelihood(prior).unwrap(),
            CostSpec::tsallis(1.5, 0.5, prior).unwrap(),
            CostSpec::tsallis(0.7, 1.6, prior).unwrap(),
            CostSpec::tsallis(2.0, 3.0, prior).unwrap(),
        ]
    }

    #[test]
    fn variance_examples() {
        let c = CostSpec::variance(4.0, 0.3).unwrap();
        assert_eq!(c.phi(0.3).unwrap(), 0.0);
        assert!((c.phi(0.5).unwrap() - 0.16).abs() < 1e-15);
        assert_eq!(c.phi_double_prime(0.9).unwrap(), 8.0);
        assert!(c.phi(0.0).is_ok() && c.phi(1.0).is_ok());
    }

    #[test]
    fn entropy_symmetric_at_half() {
        let c = CostSpec::entropy(0.5).unwrap();
        assert!(c.phi(0.5).unwrap().abs() < 1e-15);
        for i in 1..100 {
            let x = i as f64 / 100.0;
            assert!((c.phi(x).unwrap() - c.phi(1.0 - x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn entropy_matches_displayed_formula_plus_affine_term() {
        let p: f64 = 0.3;
        let c = CostSpec::entropy(p).unwrap();
        let displayed = |x: f64| {
            x * x.ln() + (1.0 - x) * (1.0 - x).ln() - p * p.ln() - (1.0 - p) * (1.0 - p).ln()
        };
        let slope_p = (p / (1.0 - p)).ln();
        for i in 1..50 {
            let x = i as f64 / 50.0;
            let expected = displayed(x) - slope_p * (x - p);
            assert!((c.phi(x).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn log_likelihood_matches_displayed_formula_plus_affine_term() {
        let p: f64 = 0.3;
        let c = CostSpec::log_likelihood(p).unwrap();
        let displayed = |x: f64| {
            x * (x / (1.0 - x)).ln() + (1.0 - x) * ((1.0 - x) / x).ln()
                - p * (p / (1.0 - p)).ln()
                - (1.0 - p) * ((1.0 - p) / p).ln()
        };
        let h = 1e-6;
        let slope_p = (displayed(p + h) - displayed(p - h)) / (2.0 * h);
        for i in 1..50 {
            let x = i as f64 / 50.0;
            let expected = displayed(x) - slope_p * (x - p);
            assert!((c.phi(x).unwrap() - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn anchoring_holds_for_closed_forms() {
        for prior in [0.1, 0.3, 0.5, 0.77] {
            for c in all_closed_forms(prior) {
                assert!(c.phi(prior).unwrap().abs() <= 1e-12, "{c:?}");
                assert!(c.phi_prime(prior).unwrap().abs() <= 1e-12, "{c:?}");
            }
        }
    }

    #[test]
    fn strictly_convex_on_fine_grid() {
        for c in all_closed_forms(0.35) {
            for i in 1..1000 {
                let x = i as f64 * 1e-3;
                assert!(c.phi_double_prime(x).unwrap() > 0.0, "{c:?} at {x}");
            }
        }
    }

    #[test]
    fn endpoint_divergence_reported() {
        let e = CostSpec::entropy(0.3).unwrap();
        assert!(e.phi(0.0).is_ok());
        assert_eq!(
            e.phi_prime(0.0).unwrap_err(),
            Error::Divergent {
                at: 0.0,
                order: 1,
                direction: Divergence::NegativeInfinity
            }
        );
        assert!(matches!(
            e.phi_prime(1.0),
            Err(Error::Divergent {
                direction: Divergence::PositiveInfinity,
                ..
            })
        ));
        let ll = CostSpec::log_likelihood(0.3).unwrap();
        assert!(matches!(
            ll.phi(1.0),
            Err(Error::Divergent {
                order: 0,
                direction: Divergence::PositiveInfinity,
                ..
            })
        ));
        let t = CostSpec::tsallis(1.0, 2.5, 0.3).unwrap();
        assert!(t.phi_double_prime(0.0).is_ok());
        let t = CostSpec::tsallis(1.0, 1.5, 0.3).unwrap();
        assert!(t.phi_prime(0.0).is_ok());
        assert!(t.phi_double_prime(0.0).is_err());
        assert!(CostSpec::variance(1.0, 0.3).unwrap().phi(1.2).is_err());
    }

    #[test]
    fn tsallis_at_one_is_scaled_entropy() {
        let t = CostSpec::tsallis(2.5, 1.0, 0.4).unwrap();
        let e = CostSpec::entropy(0.4).unwrap();
        for i in 1..20 {
            let x = i as f64 / 20.0;
            assert!((t.phi(x).unwrap() - 2.5 * e.phi(x).unwrap()).abs() < 1e-14);
        }
        let near = CostSpec::tsallis(2.5, 1.0 + 1e-6, 0.4).unwrap();
        assert!((near.phi(0.8).unwrap() - 2.5 * e.phi(0.8).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn static_cost_examples() {
        let c = CostSpec::variance(4.0, 0.3).unwrap();
        assert_eq!(c.static_cost(&[(0.3, 1.0)]).unwrap(), 0.0);
        let cost = c.static_cost(&[(0.22, 0.84), (0.72, 0.16)]).unwrap();
        let by_hand = 0.84 * 4.0 * 0.0064 + 0.16 * 4.0 * 0.1764;
        assert!((cost - by_hand).abs() < 1e-15);
        assert!((cost - 0.1344).abs() < 1e-12);
        assert!(c.static_cost(&[(0.2, 0.5), (0.4, 0.4)]).is_err());
        assert!(c.static_cost(&[(0.2, 1.5), (0.4, -0.5)]).is_err());
    }

    #[test]
    fn tsallis_q2_agrees_with_variance_on_plausible_distributions() {
        let prior = 0.37;
        let t = CostSpec::tsallis(1.3, 2.0, prior).unwrap();
        let v = CostSpec::variance(2.6, prior).unwrap();
        for (lo, hi) in [(0.1, 0.9), (0.0, 0.5), (0.36, 1.0)] {
            let w = (prior - lo) / (hi - lo);
            let dist = [(lo, 1.0 - w), (hi, w)];
            let diff = t.static_cost(&dist).unwrap() - v.static_cost(&dist).unwrap();
            assert!(diff.abs() < 1e-12);
        }
    }

    #[test]
    fn certainty_predicate() {
        assert!(CostSpec::entropy(0.3).unwrap().certainty_prohibitive(0.7, 10.0).unwrap());
        assert!(CostSpec::log_likelihood(0.3).unwrap().certainty_prohibitive(1.0, 10.0).unwrap());
        // variance: prohibitive iff threshold > d = sqrt(v / kappa)
        let v = CostSpec::variance(4.0, 0.3).unwrap();
        assert!(v.certainty_prohibitive(0.72, 1.0).unwrap());
        assert!(!v.certainty_prohibitive(0.45, 1.0).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(CostSpec::variance(0.0, 0.3).is_err());
        assert!(CostSpec::variance(1.0, 1.0).is_err());
        assert!(CostSpec::tsallis(1.0, -1.0, 0.3).is_err());
        assert!(CostSpec::entropy(0.0).is_err());
    }
}
