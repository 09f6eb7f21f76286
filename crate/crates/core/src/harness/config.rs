//! Experiment configuration and the initial-data families.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{grad_norm_sq, CutoffWeight};
use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::{GridSpec, RadialField, RadialGrid, C64};
use crate::groundstate::eval_w;
use crate::solver::{EvolutionConfig, EvolveOptions, Nonlinearity, DEFAULT_PROBE_RADII, DEFAULT_VIRIAL_RADIUS};
use crate::variational::{SideCondition, ThresholdPair};

/// Fraction of `rMax` where truncated ground-state data reach zero.
pub const TRUNCATION_FRACTION: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Family {
    /// `a·W(r)`, cut off smoothly between `0.4·rMax` and `0.8·rMax`.
    ScaledGroundState,
    /// `a·exp(−r²/σ²)`.
    Gaussian,
    /// `a·exp(−r²/σ²)·exp(i b r²)`.
    GaussianChirped,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::ScaledGroundState => "scaledGroundState",
            Family::Gaussian => "gaussian",
            Family::GaussianChirped => "gaussianChirped",
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            Family::ScaledGroundState => &["a"],
            Family::Gaussian => &["a", "sigma"],
            Family::GaussianChirped => &["a", "sigma", "b"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InitialDataSpec {
    pub family: Family,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl InitialDataSpec {
    pub fn new(family: Family, params: &[(&str, f64)]) -> Self {
        InitialDataSpec {
            family,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn with_amplitude(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.params.insert("a".into(), a);
        out
    }

    fn param(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match (self.params.get(key), default) {
            (Some(v), _) => Ok(*v),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::Schema(format!(
                "{}: missing parameter `{key}`",
                self.family.as_str()
            ))),
        }
    }

    pub fn amplitude(&self) -> Result<f64> {
        self.param("a", None)
    }

    pub fn validate(&self) -> Result<()> {
        let allowed = self.family.allowed();
        for (key, value) in &self.params {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Schema(format!(
                    "{}: unknown parameter `{key}` (allowed: {})",
                    self.family.as_str(),
                    allowed.join(", ")
                )));
            }
            if !value.is_finite() {
                return Err(Error::Schema(format!(
                    "{}: parameter `{key}` must be finite",
                    self.family.as_str()
                )));
            }
        }
        self.amplitude()?;
        if self.family != Family::ScaledGroundState {
            let sigma = self.param("sigma", Some(1.0))?;
            if sigma <= 0.0 {
                return Err(Error::Schema(format!(
                    "{}: sigma must be positive, got {sigma}",
                    self.family.as_str()
                )));
            }
        }
        Ok(())
    }
}

/// Samples the family on `grid` and computes its threshold pair with the
/// grid quadrature.
pub fn build_initial_data(spec: &InitialDataSpec, grid: &RadialGrid) -> Result<(RadialField, ThresholdPair)> {
    spec.validate()?;
    let a = spec.amplitude()?;
    let field = match spec.family {
        Family::ScaledGroundState => {
            let dim = grid.dim();
            let cutoff = CutoffWeight::mass(0.5 * TRUNCATION_FRACTION * grid.r_max())?;
            RadialField::from_real_fn(grid, |r| a * eval_w(r, dim) * cutoff.value(r))
        }
        Family::Gaussian => {
            let sigma = spec.param("sigma", Some(1.0))?;
            RadialField::from_real_fn(grid, |r| a * (-(r * r) / (sigma * sigma)).exp())
        }
        Family::GaussianChirped => {
            let sigma = spec.param("sigma", Some(1.0))?;
            let b = spec.param("b", Some(0.0))?;
            RadialField::from_fn(grid, |r| {
                C64::from_polar(a * (-(r * r) / (sigma * sigma)).exp(), b * r * r)
            })
        }
    };
    field
        .validate()
        .map_err(|e| Error::Schema(format!("{}: {e}", spec.family.as_str())))?;
    let pair = ThresholdPair {
        energy: crate::diagnostics::energy(&field),
        grad_sq: grad_norm_sq(&field),
    };
    Ok((field, pair))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
}

fn default_probes() -> Vec<f64> {
    DEFAULT_PROBE_RADII.to_vec()
}

fn default_virial_radius() -> f64 {
    DEFAULT_VIRIAL_RADIUS
}

fn is_default_nonlinearity(n: &Nonlinearity) -> bool {
    *n == Nonlinearity::Focusing
}

fn is_default_side(s: &SideCondition) -> bool {
    *s == SideCondition::None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dim: Dimension,
    pub grid: GridSpec,
    pub stepping: EvolutionConfig,
    pub initial_data: InitialDataSpec,
    /// Local-gradient probe radii; the smallest drives the scattering verdict.
    #[serde(default = "default_probes")]
    pub probes: Vec<f64>,
    #[serde(default)]
    pub outputs: OutputPaths,
    /// Radius of the mass cutoff and virial weight recorded along the run.
    #[serde(default = "default_virial_radius")]
    pub virial_radius: f64,
    #[serde(default, skip_serializing_if = "is_default_side")]
    pub side_condition: SideCondition,
    #[serde(default, skip_serializing_if = "is_default_nonlinearity")]
    pub nonlinearity: Nonlinearity,
}

impl ExperimentConfig {
    pub fn new(dim: Dimension, grid: GridSpec, stepping: EvolutionConfig, initial_data: InitialDataSpec) -> Self {
        ExperimentConfig {
            dim,
            grid,
            stepping,
            initial_data,
            probes: default_probes(),
            outputs: OutputPaths::default(),
            virial_radius: default_virial_radius(),
            side_condition: SideCondition::None,
            nonlinearity: Nonlinearity::Focusing,
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.build_grid()?;
        self.stepping.validate()?;
        self.initial_data.validate()?;
        if self.probes.is_empty() || self.probes.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Schema(
                "probes must be a non-empty list of positive radii".into(),
            ));
        }
        if !(self.virial_radius.is_finite() && self.virial_radius > 0.0) {
            return Err(Error::Schema(format!(
                "virialRadius must be positive, got {}",
                self.virial_radius
            )));
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<RadialGrid> {
        RadialGrid::from_spec(self.dim, self.grid).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn evolve_options(&self) -> EvolveOptions {
        EvolveOptions {
            nonlinearity: self.nonlinearity,
            virial_radius: self.virial_radius,
            probe_radii: self.probes.clone(),
            keep_frames: false,
            companion_estimate: false,
        }
    }
}
