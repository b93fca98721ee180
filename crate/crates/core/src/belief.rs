//! Belief arithmetic between agents holding different priors.
//!
//! Evidence that moves an observer with prior `p` to posterior `x` moves an
//! observer with prior `q` to the posterior whose odds are `odds(x) * odds(q) / odds(p)`.
//! Everything here is a closed form built on that identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for equality between beliefs.
pub const BELIEF_TOL: f64 = 1e-12;

/// A probability that the defendant is guilty.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Belief(f64);

impl Belief {
    pub const ZERO: Belief = Belief(0.0);
    pub const ONE: Belief = Belief(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::BeliefOutOfRange { value });
        }
        Ok(Belief(value))
    }

    /// A belief that must avoid certainty, such as a prior.
    pub fn interior(name: &'static str, value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::NotInterior { name, value });
        }
        Ok(Belief(value))
    }

    /// Clamps into `[0, 1]`; for values produced by arithmetic that may overshoot by an ulp.
    pub(crate) fn clamped(value: f64) -> Self {
        Belief(value.clamp(0.0, 1.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_interior(self) -> bool {
        self.0 > 0.0 && self.0 < 1.0
    }

    pub fn odds(self) -> f64 {
        self.0 / (1.0 - self.0)
    }

    pub fn log_odds(self) -> f64 {
        (self.0 / (1.0 - self.0)).ln()
    }

    pub fn from_log_odds(ell: f64) -> Self {
        // logistic, written to stay finite for large |ell|
        if ell >= 0.0 {
            Belief(1.0 / (1.0 + (-ell).exp()))
        } else {
            let e = ell.exp();
            Belief(e / (1.0 + e))
        }
    }
}

impl TryFrom<f64> for Belief {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Belief::new(value)
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

fn require_interior(name: &'static str, b: Belief) -> Result<()> {
    if b.is_interior() {
        Ok(())
    } else {
        Err(Error::NotInterior { name, value: b.0 })
    }
}

fn require_bias_direction(name: &str, mu: Belief, biased: Belief) -> Result<()> {
    if biased.0 < mu.0 - BELIEF_TOL {
        return Err(Error::domain(format!(
            "{name} = {} is below the true prior mu = {}; only bias toward guilt is modelled",
            biased.0, mu.0
        )));
    }
    Ok(())
}

fn require_threshold(mu: Belief, a: Belief) -> Result<()> {
    if !(a.0 > mu.0 && a.0 <= 1.0) {
        return Err(Error::domain(format!(
            "conviction threshold a = {} must lie in (mu, 1] with mu = {}",
            a.0, mu.0
        )));
    }
    Ok(())
}

/// Maps a posterior `x` held under `from_prior` to the posterior an observer with
/// `to_prior` holds after seeing the same evidence.
pub fn reprior(x: Belief, from_prior: Belief, to_prior: Belief) -> Result<Belief> {
    require_interior("from_prior", from_prior)?;
    require_interior("to_prior", to_prior)?;
    let x = x.get();
    if x == 0.0 || x == 1.0 {
        return Ok(Belief(x));
    }
    let ratio = to_prior.odds() / from_prior.odds();
    let scaled = x * ratio;
    Ok(Belief::clamped(scaled / (1.0 - x + scaled)))
}

/// The belief law enforcement must reach, under her own prior `mu_l`, for a
/// decision-maker holding the true prior `mu` to cross `a`.
pub fn effective_threshold_biased_l(mu: Belief, mu_l: Belief, a: Belief) -> Result<Belief> {
    require_interior("mu", mu)?;
    require_interior("mu_L", mu_l)?;
    require_threshold(mu, a)?;
    require_bias_direction("mu_L", mu, mu_l)?;
    let (mu, mu_l, a) = (mu.0, mu_l.0, a.0);
    let value = (1.0 - mu) * mu_l * a / ((mu_l - mu) * a + mu * (1.0 - mu_l));
    Ok(Belief::clamped(value))
}

/// The belief law enforcement (holding the true prior `mu`) must induce for a
/// decision-maker with prior `mu_dm` to cross `a`.
pub fn effective_threshold_biased_dm(mu: Belief, mu_dm: Belief, a: Belief) -> Result<Belief> {
    require_interior("mu", mu)?;
    require_interior("mu_DM", mu_dm)?;
    require_threshold(mu, a)?;
    require_bias_direction("mu_DM", mu, mu_dm)?;
    let (mu, mu_dm, a) = (mu.0, mu_dm.0, a.0);
    let value = (1.0 - mu_dm) * mu * a / ((mu - mu_dm) * a + mu_dm * (1.0 - mu));
    Ok(Belief::clamped(value))
}

/// Closed-form derivative of the biased-DM threshold with respect to `mu_dm`.
pub fn effective_threshold_biased_dm_slope(mu: f64, mu_dm: f64, a: f64) -> f64 {
    let denom = (mu - mu_dm) * a + mu_dm * (1.0 - mu);
    -(1.0 - mu) * mu * (1.0 - a) * a / (denom * denom)
}

/// Closed-form derivative of the biased-L threshold with respect to `mu_l`.
pub fn effective_threshold_biased_l_slope(mu: f64, mu_l: f64, a: f64) -> f64 {
    let denom = (mu_l - mu) * a + mu * (1.0 - mu_l);
    (1.0 - mu) * mu * (1.0 - a) * a / (denom * denom)
}
