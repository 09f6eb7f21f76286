//! Threshold geometry of the energy/gradient plane.
//!
//! The sharp Sobolev inequality bounds the energy from below by
//! `f1(‖∇u‖²)`, a concave profile peaking at `(y_C, E(W))`. Data strictly
//! below the peak energy are trapped on whichever side of `y_C` they start,
//! with a quantitative gap `δ̄` computed here as the exact root of
//! `f1(y) = (1 − δ₀) E(W)`.

use serde::{Deserialize, Serialize};

use crate::diagnostics::ConservedLedger;
use crate::error::{Error, Result};
use crate::groundstate::GroundStateProfile;

/// `f1(y) = y/2 − (C^{2*}/2*) y^{2*/2}`.
pub fn f1(y: f64, profile: &GroundStateProfile) -> f64 {
    let two_star = profile.dim.two_star().as_f64();
    0.5 * y - profile.sobolev_const_pow_two_star() / two_star * y.powf(two_star / 2.0)
}

/// `g1(y) = y − C^{2*} y^{n/(n−2)}`.
pub fn g1(y: f64, profile: &GroundStateProfile) -> f64 {
    let two_star = profile.dim.two_star().as_f64();
    y - profile.sobolev_const_pow_two_star() * y.powf(two_star / 2.0)
}

/// Coercivity gap associated with an energy deficit `delta0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CoercivityBounds {
    pub delta0: f64,
    pub delta_bar: f64,
}

const BISECTION_REL_TOL: f64 = 1e-12;

/// Computes `δ̄ = 1 − y*/y_C` where `y*` is the root of
/// `f1(y) = (1 − δ₀) E(W)` on `[0, y_C)`.
pub fn delta_bar(delta0: f64, profile: &GroundStateProfile) -> Result<CoercivityBounds> {
    if !(delta0 > 0.0 && delta0 <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta0 must lie in (0, 1], got {delta0}"
        )));
    }
    let y_c = profile.y_c();
    let target = (1.0 - delta0) * profile.energy;
    let residual = |y: f64| f1(y, profile) - target;

    let (mut lo, mut hi) = (0.0, y_c);
    if residual(lo) > 0.0 || residual(hi) < 0.0 {
        return Err(Error::RootBracketFailure(format!(
            "f1 - target has signs {} and {} at the ends of [0, y_C]",
            residual(lo),
            residual(hi)
        )));
    }
    while hi - lo > BISECTION_REL_TOL * y_c {
        let mid = 0.5 * (lo + hi);
        let r = residual(mid);
        if !r.is_finite() {
            return Err(Error::RootBracketFailure(format!("non-finite residual at {mid}")));
        }
        if r <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y_star = 0.5 * (lo + hi);
    let y_star = if residual(0.0) == 0.0 { 0.0 } else { y_star };
    Ok(CoercivityBounds {
        delta0,
        delta_bar: 1.0 - y_star / y_c,
    })
}

/// Energy deficit `δ₀ = 1 − E/E(W)`, clamped to `(0, 1]`. Requires `E < E(W)`.
pub fn delta0_for_energy(energy: f64, profile: &GroundStateProfile) -> Result<f64> {
    if energy.is_nan() || energy >= profile.energy {
        return Err(Error::InvalidArgument(format!(
            "energy {energy} is not below E(W) = {}",
            profile.energy
        )));
    }
    Ok((1.0 - energy / profile.energy).min(1.0))
}

/// `(E(u₀), ‖∇u₀‖²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdPair {
    pub energy: f64,
    pub grad_sq: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    ScatteringRegion,
    BlowupRegionCertified,
    BlowupRegionExpected,
    AboveThreshold,
}

impl Region {
    pub fn is_blowup(self) -> bool {
        matches!(self, Region::BlowupRegionCertified | Region::BlowupRegionExpected)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::ScatteringRegion => "ScatteringRegion",
            Region::BlowupRegionCertified => "BlowupRegionCertified",
            Region::BlowupRegionExpected => "BlowupRegionExpected",
            Region::AboveThreshold => "AboveThreshold",
        }
    }
}

/// Extra integrability known about the data, which upgrades a blow-up
/// prediction to a certified one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideCondition {
    /// `|x| u₀ ∈ L²`.
    FiniteVariance,
    /// `u₀ ∈ L²`.
    L2,
    #[default]
    None,
}

impl std::str::FromStr for SideCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite-variance" => Ok(SideCondition::FiniteVariance),
            "l2" => Ok(SideCondition::L2),
            "none" => Ok(SideCondition::None),
            other => Err(Error::InvalidArgument(format!("unknown side condition {other:?}"))),
        }
    }
}

/// Slack on the Sobolev feasibility test, relative to `E(W)`.
pub const FEASIBILITY_SLACK: f64 = 1e-9;

pub fn classify(pair: ThresholdPair, profile: &GroundStateProfile, side: SideCondition) -> Result<Region> {
    let ThresholdPair { energy, grad_sq } = pair;
    if !(energy.is_finite() && grad_sq.is_finite()) {
        return Err(Error::InvalidArgument("threshold pair must be finite".into()));
    }
    if grad_sq < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gradSq must be nonnegative, got {grad_sq}"
        )));
    }
    let e_w = profile.energy;
    let y_c = profile.y_c();
    if energy >= e_w {
        return Ok(Region::AboveThreshold);
    }
    if grad_sq == y_c {
        return Err(Error::InfeasiblePair {
            energy,
            grad_sq,
            reason: "gradSq equals y_C with energy below E(W)".into(),
        });
    }
    if grad_sq < y_c {
        let floor = f1(grad_sq, profile);
        if energy < floor - FEASIBILITY_SLACK * e_w {
            return Err(Error::InfeasiblePair {
                energy,
                grad_sq,
                reason: format!("energy below the sharp Sobolev floor f1(gradSq) = {floor}"),
            });
        }
        return Ok(Region::ScatteringRegion);
    }
    // Negative energy with finite variance is the classical obstruction; it
    // lies entirely on this side of y_C for realizable pairs.
    Ok(match side {
        SideCondition::FiniteVariance | SideCondition::L2 => Region::BlowupRegionCertified,
        SideCondition::None => Region::BlowupRegionExpected,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassifyReport {
    pub region: Region,
    pub e_w: f64,
    pub y_c: f64,
    pub margins: Margins,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Margins {
    /// `E(W) − E`.
    pub energy: f64,
    /// `y_C − ‖∇u‖²`.
    pub grad_sq: f64,
    /// `E − f1(‖∇u‖²)`.
    pub sobolev: f64,
}

pub fn classify_report(
    pair: ThresholdPair,
    profile: &GroundStateProfile,
    side: SideCondition,
) -> Result<ClassifyReport> {
    let region = classify(pair, profile, side)?;
    Ok(ClassifyReport {
        region,
        e_w: profile.energy,
        y_c: profile.y_c(),
        margins: Margins {
            energy: profile.energy - pair.energy,
            grad_sq: profile.y_c() - pair.grad_sq,
            sobolev: pair.energy - f1(pair.grad_sq, profile),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TrappingInequality {
    /// `‖∇u(t)‖² ≤ (1 − δ̄) y_C`.
    GradientCap,
    /// `‖∇u(t)‖² − ‖u(t)‖_{2*}^{2*} ≥ δ̄ ‖∇u(t)‖²`.
    VirialCoercivity,
    /// `E(u(t)) ≥ 0`.
    EnergyNonnegative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrappingViolation {
    pub step: usize,
    pub time: f64,
    pub inequality: TrappingInequality,
    /// Amount by which the inequality fails after the margin is applied.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrappingReport {
    pub delta_bar: f64,
    pub margin: f64,
    pub steps_checked: usize,
    /// Largest observed `‖∇u(t)‖² / y_C`.
    pub max_grad_ratio: f64,
    pub first_violation: Option<TrappingViolation>,
}

impl TrappingReport {
    pub fn is_clean(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Additive margin used by the trajectory checks: ten times the observed
/// energy drift, floored at rounding level.
pub fn discretization_margin(ledger: &ConservedLedger, profile: &GroundStateProfile) -> f64 {
    10.0 * ledger.energy_drift_abs() + 1e-12 * profile.y_c()
}

/// Checks the three trapping inequalities at every recorded step.
pub fn energy_trapping_check(
    ledger: &ConservedLedger,
    bounds: CoercivityBounds,
    profile: &GroundStateProfile,
) -> TrappingReport {
    let margin = discretization_margin(ledger, profile);
    let y_c = profile.y_c();
    let cap = (1.0 - bounds.delta_bar) * y_c;
    let mut first_violation = None;
    let mut max_grad_ratio: f64 = 0.0;

    for step in 0..ledger.len() {
        let g = ledger.grad_sq[step];
        let p = ledger.pot_sq[step];
        let e = ledger.energy[step];
        max_grad_ratio = max_grad_ratio.max(g / y_c);
        if first_violation.is_some() {
            continue;
        }
        let checks = [
            (TrappingInequality::GradientCap, g - cap),
            (TrappingInequality::VirialCoercivity, bounds.delta_bar * g - (g - p)),
            (TrappingInequality::EnergyNonnegative, -e),
        ];
        for (inequality, defect) in checks {
            if defect > margin {
                first_violation = Some(TrappingViolation {
                    step,
                    time: ledger.times[step],
                    inequality,
                    excess: defect - margin,
                });
                break;
            }
        }
    }

    TrappingReport {
        delta_bar: bounds.delta_bar,
        margin,
        steps_checked: ledger.len(),
        max_grad_ratio,
        first_violation,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", tag = "status")]
pub enum ComparabilityReport {
    /// Every recorded gradient vanished; no ratio is defined.
    Vacuous,
    Checked {
        c1: f64,
        c2: f64,
        min_ratio: f64,
        max_ratio: f64,
        /// First step where `c1 g − m ≤ E ≤ c2 g + m` failed.
        first_violation: Option<usize>,
    },
}

impl ComparabilityReport {
    pub fn holds(&self) -> bool {
        match self {
            ComparabilityReport::Vacuous => true,
            ComparabilityReport::Checked { first_violation, .. } => first_violation.is_none(),
        }
    }
}

/// Checks `c1 ‖∇u‖² ≤ E ≤ c2 ‖∇u‖²` along a trajectory with
/// `c2 = 1/2` and `c1 = δ̄/2* + 1/2 − 1/2*`.
pub fn comparability_check(
    ledger: &ConservedLedger,
    bounds: CoercivityBounds,
    profile: &GroundStateProfile,
) -> ComparabilityReport {
    let two_star = profile.dim.two_star().as_f64();
    let c1 = bounds.delta_bar / two_star + (0.5 - 1.0 / two_star);
    let c2 = 0.5;
    let margin = discretization_margin(ledger, profile);

    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut first_violation = None;
    let mut any = false;
    for step in 0..ledger.len() {
        let g = ledger.grad_sq[step];
        if g <= 0.0 {
            continue;
        }
        any = true;
        let e = ledger.energy[step];
        let ratio = e / g;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        if first_violation.is_none() && (e < c1 * g - margin || e > c2 * g + margin) {
            first_violation = Some(step);
        }
    }
    if !any {
        return ComparabilityReport::Vacuous;
    }
    ComparabilityReport::Checked {
        c1,
        c2,
        min_ratio,
        max_ratio,
        first_violation,
    }
}

/// Ceiling `−2δ̄/((n−2) C_n^n)` on `‖∇u‖² − ‖u‖_{2*}^{2*}` for data in the
/// blow-up region with `E ≤ (1 − δ₀) E(W)`.
pub fn blowup_virial_bound(pair: ThresholdPair, profile: &GroundStateProfile, bounds: CoercivityBounds) -> Result<f64> {
    let e_w = profile.energy;
    if !(pair.energy < e_w && pair.grad_sq > profile.y_c()) {
        return Err(Error::RegionMismatch(format!(
            "need E < E(W) = {e_w} and gradSq > y_C = {}, got ({}, {})",
            profile.y_c(),
            pair.energy,
            pair.grad_sq
        )));
    }
    if pair.energy > (1.0 - bounds.delta0) * e_w * (1.0 + 1e-12) {
        return Err(Error::RegionMismatch(format!(
            "energy {} exceeds (1 - delta0) E(W) for delta0 = {}",
            pair.energy, bounds.delta0
        )));
    }
    Ok(virial_ceiling(bounds.delta_bar, profile))
}

/// `−2δ̄/((n−2) C_n^n)`, i.e. `−2δ̄ y_C/(n−2)`.
pub fn virial_ceiling(delta_bar: f64, profile: &GroundStateProfile) -> f64 {
    let n = profile.dim.as_f64();
    -2.0 * delta_bar / ((n - 2.0) * profile.sobolev_const.powf(n))
}
