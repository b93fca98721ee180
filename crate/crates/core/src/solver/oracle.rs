//! Brute-force concavification on a sampled value function.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Concavification {
    /// Vertices of the upper concave envelope, increasing in x.
    pub envelope: Vec<(f64, f64)>,
    /// Posteriors of the optimal distribution; equal when it is degenerate.
    pub support: (f64, f64),
    /// Probability on the high posterior.
    pub high_weight: f64,
    /// Envelope value at the prior.
    pub value: f64,
}

impl Concavification {
    pub fn is_degenerate(&self) -> bool {
        self.support.0 == self.support.1
    }

    /// Envelope evaluated at `x` by linear interpolation between vertices.
    pub fn envelope_at(&self, x: f64) -> Option<f64> {
        envelope_at(&self.envelope, x)
    }
}

fn envelope_at(hull: &[(f64, f64)], x: f64) -> Option<f64> {
    let first = hull.first()?;
    let last = hull.last()?;
    if x < first.0 || x > last.0 {
        return None;
    }
    let k = hull.partition_point(|p| p.0 <= x);
    if k == 0 {
        return Some(first.1);
    }
    if k == hull.len() {
        return Some(last.1);
    }
    let (l, r) = (hull[k - 1], hull[k]);
    let t = (x - l.0) / (r.0 - l.0);
    Some(l.1 + t * (r.1 - l.1))
}

/// Upper concave envelope by monotone chain; input must be strictly increasing in x.
pub fn upper_hull(samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::domain("concavification needs at least one sample"));
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
    for (i, &p) in samples.iter().enumerate() {
        if !(p.0.is_finite() && p.1.is_finite()) {
            return Err(Error::domain(format!("non-finite sample {p:?}")));
        }
        if i > 0 && !(p.0 > samples[i - 1].0) {
            return Err(Error::domain(format!(
                "sample grid must be strictly increasing; x[{i}] = {}",
                p.0
            )));
        }
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    Ok(hull)
}

/// Optimal binary distribution with mean `prior` for the sampled value function.
///
/// When the sample at the prior already attains the envelope the optimum is
/// reported as degenerate, so indifference resolves toward not acquiring.
pub fn concavify_oracle(samples: &[(f64, f64)], prior: f64) -> Result<Concavification> {
    let hull = upper_hull(samples)?;
    let (x0, xn) = (samples[0].0, samples[samples.len() - 1].0);
    if !(prior >= x0 && prior <= xn) {
        return Err(Error::domain(format!(
            "prior {prior} outside the sample range [{x0}, {xn}]"
        )));
    }
    let value = envelope_at(&hull, prior).expect("prior within hull range");

    let at_prior = samples.partition_point(|p| p.0 < prior);
    if let Some(&(x, v)) = samples.get(at_prior) {
        let tol = 1e-12 * (1.0 + value.abs());
        if x == prior && v >= value - tol {
            return Ok(Concavification {
                envelope: hull,
                support: (prior, prior),
                high_weight: 0.0,
                value,
            });
        }
    }
    let k = hull.partition_point(|p| p.0 <= prior);
    let (l, r) = (hull[k - 1], hull[k]);
    Ok(Concavification {
        envelope: hull,
        support: (l.0, r.0),
        high_weight: (prior - l.0) / (r.0 - l.0),
        value,
    })
}
