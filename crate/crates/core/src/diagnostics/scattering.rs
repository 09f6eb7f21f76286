//! Finite-horizon scattering proxy.
//!
//! A run is called dispersing when the S-norm has essentially stopped
//! accumulating over the final window (tail below 1% of the total) and the
//! gradient inside the smallest probe radius has fallen at least fivefold
//! from its peak. Both thresholds are conventions of this harness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAIL_FRACTION: f64 = 0.01;
pub const DECAY_FACTOR: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeSeries {
    pub radius: f64,
    /// `∫_{|x| ≤ R} |∇u|²` at each record.
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScatteringProbe {
    /// Cumulative `∫∫|u|^{2(n+2)/(n−2)}` at each record.
    pub s_norm_accum: Vec<f64>,
    /// Cumulative W-norm integrand, reported only.
    pub w_norm_accum: Vec<f64>,
    /// Local gradients, sorted by increasing radius.
    pub local_grad: Vec<ProbeSeries>,
}

impl ScatteringProbe {
    pub fn new(radii: &[f64]) -> Self {
        let mut radii = radii.to_vec();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        ScatteringProbe {
            s_norm_accum: Vec::new(),
            w_norm_accum: Vec::new(),
            local_grad: radii
                .into_iter()
                .map(|radius| ProbeSeries {
                    radius,
                    values: Vec::new(),
                })
                .collect(),
        }
    }

    /// `S`-norm over the recorded interval, `accum^{(n−2)/(2(n+2))}`.
    pub fn s_norm(&self, s_exponent: f64) -> f64 {
        self.s_norm_accum.last().copied().unwrap_or(0.0).powf(1.0 / s_exponent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Dispersing,
    Inconclusive,
    /// Nothing accumulated at all (the zero solution).
    Trivial,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Dispersing => "dispersing",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Trivial => "trivial",
        }
    }
}

/// Verdict over the last `window` record intervals.
pub fn scattering_verdict(probe: &ScatteringProbe, window: usize) -> Result<Verdict> {
    let accum = &probe.s_norm_accum;
    if window == 0 {
        return Err(Error::InvalidArgument("window must be at least 1".into()));
    }
    if accum.len() < window + 1 {
        return Err(Error::InsufficientSamples {
            needed: window + 1,
            got: accum.len(),
        });
    }
    let total = *accum.last().expect("non-empty");
    if total == 0.0 {
        return Ok(Verdict::Trivial);
    }
    let tail = total - accum[accum.len() - 1 - window];
    let quiet = tail < TAIL_FRACTION * total;

    let decayed = match probe.local_grad.first() {
        Some(series) if !series.values.is_empty() => {
            let peak = series.values.iter().copied().fold(0.0, f64::max);
            let last = *series.values.last().expect("non-empty");
            peak == 0.0 || last * DECAY_FACTOR <= peak
        }
        _ => false,
    };

    Ok(if quiet && decayed {
        Verdict::Dispersing
    } else {
        Verdict::Inconclusive
    })
}
