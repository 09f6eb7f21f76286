//! Amplitude sweeps across the threshold, one row per amplitude.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Family};
use super::{region_label, run_experiment};
use crate::diagnostics::Verdict;
use crate::error::{Error, Result};
use crate::groundstate::GroundStateProfile;
use crate::solver::TerminationTag;
use crate::variational::Region;

pub const THREADS_ENV: &str = "CRITNLS_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Consistency {
    Consistent,
    Inconsistent,
    /// Above the threshold energy; nothing is predicted.
    NoClaim,
}

impl Consistency {
    pub fn as_str(self) -> &'static str {
        match self {
            Consistency::Consistent => "consistent",
            Consistency::Inconsistent => "inconsistent",
            Consistency::NoClaim => "no-claim",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "consistent" => Ok(Consistency::Consistent),
            "inconsistent" => Ok(Consistency::Inconsistent),
            "no-claim" => Ok(Consistency::NoClaim),
            other => Err(Error::Schema(format!("unknown consistency {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DichotomyRow {
    pub family: Family,
    pub params: BTreeMap<String, f64>,
    pub energy: f64,
    pub grad_sq: f64,
    pub energy_over_e_w: f64,
    pub grad_sq_over_y_c: f64,
    pub predicted_region: String,
    pub observed_termination: String,
    pub t_stop: f64,
    pub verdict: Option<Verdict>,
    pub s_norm: f64,
    pub max_grad_sq_over_y_c: f64,
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub consistency: Consistency,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub rows: Vec<DichotomyRow>,
}

impl DichotomyReport {
    pub fn count(&self, c: Consistency) -> usize {
        self.rows.iter().filter(|r| r.consistency == c).count()
    }

    pub fn all_consistent(&self) -> bool {
        self.count(Consistency::Inconsistent) == 0
    }
}

/// The dichotomy rule applied to a prediction and an observation.
pub fn consistency(region: Option<Region>, termination: TerminationTag, verdict: Option<Verdict>) -> Consistency {
    match region {
        Some(Region::ScatteringRegion) => {
            let dispersed = matches!(verdict, Some(Verdict::Dispersing) | Some(Verdict::Trivial));
            if termination == TerminationTag::ReachedTEnd && dispersed {
                Consistency::Consistent
            } else {
                Consistency::Inconsistent
            }
        }
        Some(Region::BlowupRegionCertified) | Some(Region::BlowupRegionExpected) => {
            if termination == TerminationTag::BlowupDetected {
                Consistency::Consistent
            } else {
                Consistency::Inconsistent
            }
        }
        Some(Region::AboveThreshold) => Consistency::NoClaim,
        None => Consistency::Inconsistent,
    }
}

/// Thread cap from `CRITNLS_THREADS`; `None` when unset or unparsable.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse()
        .ok()
        .filter(|&n: &usize| n > 0)
}

fn run_row(template: &ExperimentConfig, a: f64, profile: &GroundStateProfile) -> Result<DichotomyRow> {
    let mut cfg = template.clone();
    cfg.initial_data = template.initial_data.with_amplitude(a);
    let outcome = run_experiment(&cfg, profile)?;
    let rec = &outcome.record;
    let region = outcome.region.as_ref().ok().copied();
    Ok(DichotomyRow {
        family: cfg.initial_data.family,
        params: cfg.initial_data.params.clone(),
        energy: outcome.pair.energy,
        grad_sq: outcome.pair.grad_sq,
        energy_over_e_w: outcome.pair.energy / profile.energy,
        grad_sq_over_y_c: outcome.pair.grad_sq / profile.y_c(),
        predicted_region: region_label(&outcome.region),
        observed_termination: rec.termination.tag.as_str().to_string(),
        t_stop: rec.termination.t_stop,
        verdict: outcome.verdict,
        s_norm: rec.probe.s_norm(cfg.dim.s_exponent().as_f64()),
        max_grad_sq_over_y_c: rec.max_grad_sq() / profile.y_c(),
        mass_drift: rec.ledger.mass_drift_rel(),
        energy_drift: rec.ledger.energy_drift_rel(),
        consistency: consistency(region, rec.termination.tag, outcome.verdict),
    })
}

/// One row per amplitude, in input order. Rows run concurrently on at most
/// `CRITNLS_THREADS` threads.
pub fn run_dichotomy_sweep(
    template: &ExperimentConfig,
    amplitudes: &[f64],
    profile: &GroundStateProfile,
) -> Result<DichotomyReport> {
    if let Some(bad) = amplitudes.iter().find(|a| !a.is_finite()) {
        return Err(Error::InvalidArgument(format!("amplitudes must be finite, got {bad}")));
    }
    template.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let rows: Vec<Result<DichotomyRow>> =
        pool.install(|| amplitudes.par_iter().map(|&a| run_row(template, a, profile)).collect());
    Ok(DichotomyReport {
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}
