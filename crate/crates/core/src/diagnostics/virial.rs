//! Localized virial quantities.
//!
//! For a radial weight `φ`,
//!
//! ```text
//! d/dt ∫|u|²φ   = 2 Im ∫ ū ∇u·∇φ
//! d²/dt² ∫|u|²φ = 4 ∫ φ'' |∂_r u|² − ∫ Δ²φ |u|² − (4/n) ∫ Δφ |u|^{2*}
//! ```
//!
//! (the Hessian term collapses to `φ''` because `∇u` is radial). With
//! `φ = |x|²` everywhere the second identity is `8(∫|∇u|² − ∫|u|^{2*})`.

use serde::{Deserialize, Serialize};

use super::cutoff::CutoffWeight;
use crate::error::{Error, Result};
use crate::field::RadialField;

/// `∫|u|²φ`.
pub fn localized_mass(f: &RadialField, weight: &CutoffWeight) -> f64 {
    f.values()
        .iter()
        .zip(f.grid().volumes())
        .zip(f.grid().nodes())
        .map(|((u, w), r)| w * weight.value(r) * u.norm_sqr())
        .sum()
}

/// `2 Im ∫ ū ∂_r u φ'`, evaluated on cell faces with `ū` averaged to the face.
pub fn virial_first_rhs(f: &RadialField, weight: &CutoffWeight) -> f64 {
    let grid = f.grid();
    let h = grid.spacing();
    let v = f.values();
    grid.faces()
        .iter()
        .enumerate()
        .map(|(j, &area)| {
            let r = (j as f64 + 0.5) * h;
            // Im(ū_{j+1/2} (u_{j+1} − u_j)) = Im(ū_j u_{j+1})
            area * weight.first(r) * (v[j].conj() * v[j + 1]).im
        })
        .sum::<f64>()
        * 2.0
}

/// Right-hand side of the second localized virial identity.
pub fn virial_second_rhs(f: &RadialField, weight: &CutoffWeight) -> f64 {
    let grid = f.grid();
    let dim = grid.dim();
    let h = grid.spacing();
    let v = f.values();
    let two_star = dim.two_star().as_f64();

    let kinetic: f64 = grid
        .faces()
        .iter()
        .enumerate()
        .map(|(j, &area)| {
            let r = (j as f64 + 0.5) * h;
            area * h * weight.second(r) * (v[j + 1] - v[j]).norm_sqr() / (h * h)
        })
        .sum();

    let mut bilap = 0.0;
    let mut lap = 0.0;
    for ((u, w), r) in v.iter().zip(grid.volumes()).zip(grid.nodes()) {
        let m = u.norm_sqr();
        if m == 0.0 {
            continue;
        }
        bilap += w * weight.bilaplacian(r, dim) * m;
        lap += w * weight.laplacian(r, dim) * m.powf(two_star / 2.0);
    }
    4.0 * kinetic - bilap - 4.0 / dim.as_f64() * lap
}

/// Localized virial quantities aligned with the ledger times.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VirialSeries {
    pub radius: f64,
    /// `∫|u|²φ_R` with the mass cutoff.
    pub y_r: Vec<f64>,
    /// First-identity right-hand side for the mass cutoff.
    pub y_r_dot: Vec<f64>,
    /// Second-identity right-hand side for the virial weight.
    pub z_r_second: Vec<f64>,
    /// `8(∫|∇u|² − ∫|u|^{2*})`.
    pub global_rhs: Vec<f64>,
}

impl VirialSeries {
    pub fn new(radius: f64) -> Self {
        VirialSeries {
            radius,
            ..Default::default()
        }
    }

    pub fn record(
        &mut self,
        f: &RadialField,
        mass_cutoff: &CutoffWeight,
        virial_weight: &CutoffWeight,
        grad_sq: f64,
        pot_sq: f64,
    ) {
        self.y_r.push(localized_mass(f, mass_cutoff));
        self.y_r_dot.push(virial_first_rhs(f, mass_cutoff));
        self.z_r_second.push(virial_second_rhs(f, virial_weight));
        self.global_rhs.push(8.0 * (grad_sq - pot_sq));
    }

    pub fn len(&self) -> usize {
        self.y_r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_r.is_empty()
    }
}

// Second-order derivative at the middle of three possibly unevenly spaced samples.
fn three_point_derivative(t: [f64; 3], y: [f64; 3]) -> f64 {
    let hm = t[1] - t[0];
    let hp = t[2] - t[1];
    (hm * hm * (y[2] - y[1]) + hp * hp * (y[1] - y[0])) / (hm * hp * (hm + hp))
}

/// `d/dt y_R − 2 Im ∫ ū ∇u·∇φ` at each interior sample, with the time
/// derivative taken by finite differences on the recorded times.
pub fn residual_from_series(times: &[f64], y_r: &[f64], y_r_dot: &[f64]) -> Result<Vec<f64>> {
    let len = times.len();
    if len < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: len });
    }
    if y_r.len() != len || y_r_dot.len() != len {
        return Err(Error::InvalidArgument("virial series not aligned with times".into()));
    }
    Ok((1..len - 1)
        .map(|k| {
            let dy = three_point_derivative([times[k - 1], times[k], times[k + 1]], [y_r[k - 1], y_r[k], y_r[k + 1]]);
            dy - y_r_dot[k]
        })
        .collect())
}

/// First-identity residual over a slice of `(t, u(t))` frames.
pub fn virial_first_identity_residual(frames: &[(f64, &RadialField)], weight: &CutoffWeight) -> Result<Vec<f64>> {
    if frames.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: frames.len(),
        });
    }
    let times: Vec<f64> = frames.iter().map(|(t, _)| *t).collect();
    let y_r: Vec<f64> = frames.iter().map(|(_, f)| localized_mass(f, weight)).collect();
    let rhs: Vec<f64> = frames.iter().map(|(_, f)| virial_first_rhs(f, weight)).collect();
    residual_from_series(&times, &y_r, &rhs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualStats {
    pub samples: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub rms: f64,
}

impl ResidualStats {
    pub fn of(residual: &[f64]) -> Self {
        let samples = residual.len();
        if samples == 0 {
            return ResidualStats {
                samples,
                max_abs: 0.0,
                mean_abs: 0.0,
                rms: 0.0,
            };
        }
        let max_abs = residual.iter().map(|r| r.abs()).fold(0.0, f64::max);
        let mean_abs = residual.iter().map(|r| r.abs()).sum::<f64>() / samples as f64;
        let rms = (residual.iter().map(|r| r * r).sum::<f64>() / samples as f64).sqrt();
        ResidualStats {
            samples,
            max_abs,
            mean_abs,
            rms,
        }
    }
}
