//! Experiment orchestration: configuration, initial data, single runs,
//! dichotomy sweeps and their reports.
//!
//! The region of every run is predicted from its initial threshold pair
//! before any time step is taken and is never revised afterwards.

pub mod config;
pub mod report;
pub mod sweep;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{scattering_verdict, Verdict};
use crate::error::{Error, Result};
use crate::groundstate::GroundStateProfile;
use crate::solver::{evolve_with, RunSummary, TrajectoryRecord};
use crate::variational::{classify, Region, ThresholdPair};

pub use config::{build_initial_data, ExperimentConfig, Family, InitialDataSpec, OutputPaths};
pub use report::{
    emit_report, parse_report, read_trajectory_csv, report_csv_string, trajectory_csv_string, virial_check,
    write_trajectory_csv, TrajectoryTable, VirialCheckReport,
};
pub use sweep::{run_dichotomy_sweep, thread_cap, Consistency, DichotomyReport, DichotomyRow};

/// Share of the horizon, counted back from `tEnd`, over which the S-norm
/// tail is measured.
pub const VERDICT_WINDOW_FRACTION: f64 = 0.25;

/// Number of record intervals inside the final quarter of the horizon.
pub fn verdict_window(record: &TrajectoryRecord) -> usize {
    let times = &record.ledger.times;
    let start = record.config.t_end * (1.0 - VERDICT_WINDOW_FRACTION);
    let first = times
        .iter()
        .position(|&t| t >= start)
        .unwrap_or(times.len().saturating_sub(1));
    (times.len() - 1 - first).max(1)
}

/// Finite-horizon scattering verdict; only defined for runs reaching `tEnd`.
pub fn finite_horizon_verdict(record: &TrajectoryRecord) -> Result<Verdict> {
    if !record.reached_t_end() {
        return Err(Error::WrongTermination(record.termination.tag.as_str().into()));
    }
    scattering_verdict(&record.probe, verdict_window(record))
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub pair: ThresholdPair,
    pub region: Result<Region>,
    pub record: TrajectoryRecord,
    pub verdict: Option<Verdict>,
}

/// JSON summary of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentSummary {
    pub dim: u32,
    pub family: Family,
    pub energy: f64,
    pub grad_sq: f64,
    pub energy_over_e_w: f64,
    pub grad_sq_over_y_c: f64,
    pub predicted_region: String,
    #[serde(flatten)]
    pub run: RunSummary,
    pub verdict: Option<Verdict>,
}

impl ExperimentOutcome {
    pub fn summary(&self, cfg: &ExperimentConfig, profile: &GroundStateProfile) -> ExperimentSummary {
        ExperimentSummary {
            dim: cfg.dim.get(),
            family: cfg.initial_data.family,
            energy: self.pair.energy,
            grad_sq: self.pair.grad_sq,
            energy_over_e_w: self.pair.energy / profile.energy,
            grad_sq_over_y_c: self.pair.grad_sq / profile.y_c(),
            predicted_region: region_label(&self.region),
            run: self.record.summary(),
            verdict: self.verdict,
        }
    }
}

pub(crate) fn region_label(region: &Result<Region>) -> String {
    match region {
        Ok(r) => r.as_str().to_string(),
        Err(Error::InfeasiblePair { .. }) => "Infeasible".to_string(),
        Err(_) => "Unclassified".to_string(),
    }
}

/// Builds the data, classifies it, then evolves.
pub fn run_experiment(cfg: &ExperimentConfig, profile: &GroundStateProfile) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let (u0, pair) = build_initial_data(&cfg.initial_data, &grid)?;
    let region = classify(pair, profile, cfg.side_condition);
    let record = evolve_with(&u0, &cfg.stepping, profile, &cfg.evolve_options())?;
    let verdict = if record.reached_t_end() {
        Some(finite_horizon_verdict(&record)?)
    } else {
        None
    };
    Ok(ExperimentOutcome {
        pair,
        region,
        record,
        verdict,
    })
}
