//! Split-step time evolution with adaptive steps and blow-up detection.
//!
//! One step is `L(dt/2) ∘ N(dt) ∘ L(dt/2)` with `L` the Crank–Nicolson
//! free propagator and `N` the exact nonlinear phase rotation. Both factors
//! are unitary in the cell-volume inner product, so discrete mass is
//! conserved to rounding; the discrete energy is the Hamiltonian of the
//! semi-discrete system and drifts only at `O(dt²)`.

pub mod operators;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    grad_norm_sq, local_grad_sq, outer_mass_fraction, power_integral, w_norm_increment, ConservedLedger, CutoffWeight,
    ScatteringProbe, VirialSeries,
};
use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::{GridSpec, RadialField, RadialGrid, C64};
use crate::groundstate::GroundStateProfile;

pub use operators::{
    laplacian_radial, linear_step, nonlinear_phase_step, nonlinear_phase_step_with, solve_tridiagonal, strang_step,
    LaplacianStencil, Nonlinearity, Stepper,
};

fn default_blowup_factor() -> f64 {
    10.0
}

fn default_safety() -> f64 {
    0.5
}

fn default_record_every() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt_init: f64,
    pub dt_min: f64,
    pub t_end: f64,
    #[serde(default = "default_blowup_factor")]
    pub blowup_factor: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

impl EvolutionConfig {
    pub fn new(dt_init: f64, dt_min: f64, t_end: f64) -> Self {
        EvolutionConfig {
            dt_init,
            dt_min,
            t_end,
            blowup_factor: default_blowup_factor(),
            safety: default_safety(),
            record_every: default_record_every(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Schema(msg));
        if !(self.dt_init.is_finite() && self.dt_init > 0.0) {
            return bad(format!("dtInit must be positive, got {}", self.dt_init));
        }
        if !(self.dt_min.is_finite() && self.dt_min > 0.0 && self.dt_min <= self.dt_init) {
            return bad(format!("dtMin must lie in (0, dtInit], got {}", self.dt_min));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return bad(format!("tEnd must be positive, got {}", self.t_end));
        }
        if !(self.blowup_factor.is_finite() && self.blowup_factor > 1.0) {
            return bad(format!("blowupFactor must exceed 1, got {}", self.blowup_factor));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return bad(format!("safety must lie in (0, 1], got {}", self.safety));
        }
        if self.record_every == 0 {
            return bad("recordEvery must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationTag {
    ReachedTEnd,
    BlowupDetected,
    StepUnderflow,
}

impl TerminationTag {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminationTag::ReachedTEnd => "ReachedTEnd",
            TerminationTag::BlowupDetected => "BlowupDetected",
            TerminationTag::StepUnderflow => "StepUnderflow",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TerminationReason {
    pub tag: TerminationTag,
    pub t_stop: f64,
    pub detail: String,
}

/// How the gradient behaved up to an abnormal stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlowupKind {
    /// `‖∇u‖²` crossed the detection threshold.
    GradientGrowth,
    /// Steps underflowed while `‖∇u‖²` stayed below the threshold.
    BoundedGradient,
}

/// Diagnostics and flow options that are not part of the stepping schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolveOptions {
    pub nonlinearity: Nonlinearity,
    /// Radius of the mass cutoff and virial weight in the virial series.
    pub virial_radius: f64,
    /// Radii of the local-gradient probes.
    pub probe_radii: Vec<f64>,
    /// Keep a copy of the field at every record.
    pub keep_frames: bool,
    /// Rerun on the grid with half the points to estimate the spatial error
    /// of `‖∇u(t_stop)‖²`.
    pub companion_estimate: bool,
}

pub const DEFAULT_VIRIAL_RADIUS: f64 = 8.0;
pub const DEFAULT_PROBE_RADII: [f64; 3] = [2.0, 4.0, 8.0];

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            nonlinearity: Nonlinearity::Focusing,
            virial_radius: DEFAULT_VIRIAL_RADIUS,
            probe_radii: DEFAULT_PROBE_RADII.to_vec(),
            keep_frames: false,
            companion_estimate: false,
        }
    }
}

/// Everything recorded along one run.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub dim: Dimension,
    pub grid: GridSpec,
    pub config: EvolutionConfig,
    pub ledger: ConservedLedger,
    pub virial: VirialSeries,
    pub probe: ScatteringProbe,
    pub termination: TerminationReason,
    pub steps: usize,
    pub min_dt: f64,
    pub max_outer_mass_fraction: f64,
    /// `|‖∇u_h‖² − ‖∇u_{2h}‖²|` at the stop time, when a companion run on the
    /// coarse grid reached the same time.
    pub spatial_error_estimate: Option<f64>,
    pub blowup_kind: Option<BlowupKind>,
    pub final_field: RadialField,
    /// `(t, u(t))` at every record when frames were requested.
    pub frames: Vec<(f64, RadialField)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Drifts {
    pub mass_rel: f64,
    pub energy_rel: f64,
    pub energy_abs: f64,
}

/// JSON summary of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunSummary {
    pub termination: TerminationTag,
    pub t_stop: f64,
    pub detail: String,
    pub steps: usize,
    pub records: usize,
    pub min_dt: f64,
    pub drifts: Drifts,
    pub s_norm: f64,
    pub final_grad_sq: f64,
    pub max_grad_sq: f64,
    pub max_outer_mass_fraction: f64,
    pub spatial_error_estimate: Option<f64>,
    pub blowup_kind: Option<BlowupKind>,
}

impl TrajectoryRecord {
    pub fn drifts(&self) -> Drifts {
        Drifts {
            mass_rel: self.ledger.mass_drift_rel(),
            energy_rel: self.ledger.energy_drift_rel(),
            energy_abs: self.ledger.energy_drift_abs(),
        }
    }

    pub fn max_grad_sq(&self) -> f64 {
        self.ledger.grad_sq.iter().copied().fold(0.0, f64::max)
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            termination: self.termination.tag,
            t_stop: self.termination.t_stop,
            detail: self.termination.detail.clone(),
            steps: self.steps,
            records: self.ledger.len(),
            min_dt: self.min_dt,
            drifts: self.drifts(),
            s_norm: self.probe.s_norm(self.dim.s_exponent().as_f64()),
            final_grad_sq: self.ledger.grad_sq.last().copied().unwrap_or(0.0),
            max_grad_sq: self.max_grad_sq(),
            max_outer_mass_fraction: self.max_outer_mass_fraction,
            spatial_error_estimate: self.spatial_error_estimate,
            blowup_kind: self.blowup_kind,
        }
    }

    pub fn reached_t_end(&self) -> bool {
        self.termination.tag == TerminationTag::ReachedTEnd
    }
}

struct Recorder {
    ledger: ConservedLedger,
    virial: VirialSeries,
    probe: ScatteringProbe,
    mass_cutoff: CutoffWeight,
    virial_weight: CutoffWeight,
    frames: Vec<(f64, RadialField)>,
    keep_frames: bool,
    max_outer: f64,
}

impl Recorder {
    fn new(opts: &EvolveOptions) -> Result<Self> {
        Ok(Recorder {
            ledger: ConservedLedger::default(),
            virial: VirialSeries::new(opts.virial_radius),
            probe: ScatteringProbe::new(&opts.probe_radii),
            mass_cutoff: CutoffWeight::mass(opts.virial_radius)?,
            virial_weight: CutoffWeight::virial(opts.virial_radius)?,
            frames: Vec::new(),
            keep_frames: opts.keep_frames,
            max_outer: 0.0,
        })
    }

    fn record(&mut self, t: f64, u: &RadialField, s_accum: f64, w_accum: f64) {
        self.ledger.record(t, u);
        let k = self.ledger.len() - 1;
        let (g, p) = (self.ledger.grad_sq[k], self.ledger.pot_sq[k]);
        self.virial.record(u, &self.mass_cutoff, &self.virial_weight, g, p);
        self.probe.s_norm_accum.push(s_accum);
        self.probe.w_norm_accum.push(w_accum);
        for series in &mut self.probe.local_grad {
            series.values.push(local_grad_sq(u, series.radius));
        }
        self.max_outer = self.max_outer.max(outer_mass_fraction(u));
        if self.keep_frames {
            self.frames.push((t, u.clone()));
        }
    }

    fn last_time(&self) -> Option<f64> {
        self.ledger.times.last().copied()
    }
}

/// Evolves with the focusing nonlinearity and default diagnostics.
pub fn evolve(u0: &RadialField, cfg: &EvolutionConfig, profile: &GroundStateProfile) -> Result<TrajectoryRecord> {
    evolve_with(u0, cfg, profile, &EvolveOptions::default())
}

pub fn evolve_with(
    u0: &RadialField,
    cfg: &EvolutionConfig,
    profile: &GroundStateProfile,
    opts: &EvolveOptions,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    u0.validate()?;
    if u0.dim() != profile.dim {
        return Err(Error::InvalidArgument(format!(
            "field is {}-dimensional but the profile is {}-dimensional",
            u0.dim(),
            profile.dim
        )));
    }
    let mut record = run(u0, cfg, profile, opts)?;

    if opts.companion_estimate && record.reached_t_end() && u0.grid().n_points().is_multiple_of(2) {
        let fine = u0.grid();
        let coarse_grid = RadialGrid::new(fine.dim(), fine.r_max(), fine.n_points() / 2)?;
        let coarse_u0 = restrict(u0, &coarse_grid);
        let coarse_opts = EvolveOptions {
            keep_frames: false,
            companion_estimate: false,
            ..opts.clone()
        };
        let coarse = run(&coarse_u0, cfg, profile, &coarse_opts)?;
        if coarse.reached_t_end() {
            let g_fine = *record.ledger.grad_sq.last().expect("recorded");
            let g_coarse = *coarse.ledger.grad_sq.last().expect("recorded");
            record.spatial_error_estimate = Some((g_fine - g_coarse).abs());
        }
    }
    Ok(record)
}

/// Every other node of `f`, as a field on `coarse` (half the points).
fn restrict(f: &RadialField, coarse: &RadialGrid) -> RadialField {
    let values: Vec<C64> = f.values().iter().step_by(2).copied().collect();
    RadialField::from_values_unchecked(coarse, values)
}

fn run(
    u0: &RadialField,
    cfg: &EvolutionConfig,
    profile: &GroundStateProfile,
    opts: &EvolveOptions,
) -> Result<TrajectoryRecord> {
    let dim = u0.dim();
    let grid = u0.grid().clone();
    let s_exp = dim.s_exponent().as_f64();
    let threshold = cfg.blowup_factor * profile.y_c();
    let mut stepper = Stepper::new(&grid, opts.nonlinearity);
    let mut rec = Recorder::new(opts)?;

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut min_dt = f64::INFINITY;
    let mut s_accum = 0.0;
    let mut w_accum = 0.0;
    let mut s_density = power_integral(&u, s_exp);
    let mut w_density = w_norm_increment(&u, 1.0);
    rec.record(0.0, &u, 0.0, 0.0);

    let termination = loop {
        let remaining = cfg.t_end - t;
        if remaining <= 0.0 {
            break TerminationReason {
                tag: TerminationTag::ReachedTEnd,
                t_stop: cfg.t_end,
                detail: format!("{steps} steps"),
            };
        }
        let peak = u.values().iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        let freq = operators::nonlinear_frequency(dim, peak) * opts.nonlinearity.coefficient().abs();
        let dt_adapt = cfg.dt_init.min(cfg.safety / freq.max(1.0));
        if dt_adapt < cfg.dt_min {
            break TerminationReason {
                tag: TerminationTag::StepUnderflow,
                t_stop: t,
                detail: format!("adaptive step {dt_adapt:e} below dtMin {:e}", cfg.dt_min),
            };
        }
        let last = dt_adapt >= remaining;
        let dt = if last { remaining } else { dt_adapt };

        let before = u.clone();
        stepper.strang_step(&mut u, dt)?;
        if u.check_finite().is_err() {
            u = before;
            break TerminationReason {
                tag: TerminationTag::StepUnderflow,
                t_stop: t,
                detail: "step produced non-finite samples".into(),
            };
        }
        t = if last { cfg.t_end } else { t + dt };
        steps += 1;
        min_dt = min_dt.min(dt);

        let s_next = power_integral(&u, s_exp);
        let w_next = w_norm_increment(&u, 1.0);
        s_accum += 0.5 * dt * (s_density + s_next);
        w_accum += 0.5 * dt * (w_density + w_next);
        s_density = s_next;
        w_density = w_next;

        let g = grad_norm_sq(&u);
        if g >= threshold {
            rec.record(t, &u, s_accum, w_accum);
            break TerminationReason {
                tag: TerminationTag::BlowupDetected,
                t_stop: t,
                detail: format!(
                    "gradSq {g:.6e} reached {:.1}x the ground-state level",
                    cfg.blowup_factor
                ),
            };
        }
        if steps.is_multiple_of(cfg.record_every) || last {
            rec.record(t, &u, s_accum, w_accum);
        }
    };

    if rec.last_time() != Some(termination.t_stop) {
        rec.record(termination.t_stop, &u, s_accum, w_accum);
    }

    let blowup_kind = match termination.tag {
        TerminationTag::ReachedTEnd => None,
        TerminationTag::BlowupDetected => Some(BlowupKind::GradientGrowth),
        TerminationTag::StepUnderflow => Some(BlowupKind::BoundedGradient),
    };

    Ok(TrajectoryRecord {
        dim,
        grid: grid.spec(),
        config: *cfg,
        ledger: rec.ledger,
        virial: rec.virial,
        probe: rec.probe,
        termination,
        steps,
        min_dt: if steps == 0 { 0.0 } else { min_dt },
        max_outer_mass_fraction: rec.max_outer,
        spatial_error_estimate: None,
        blowup_kind,
        final_field: u,
        frames: rec.frames,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{energy, mass_norm};

    fn reference_grid(n: u32) -> RadialGrid {
        RadialGrid::new(Dimension::new(n).unwrap(), 40.0, 4096).unwrap()
    }

    fn free_gaussian(r: f64, t: f64, n: f64) -> C64 {
        let z = C64::new(1.0, 4.0 * t);
        z.powf(-n / 2.0) * (-(r * r) / z).exp()
    }

    fn free_opts() -> EvolveOptions {
        EvolveOptions {
            nonlinearity: Nonlinearity::Disabled,
            ..EvolveOptions::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(EvolutionConfig::new(0.01, 1e-8, 1.0).validate().is_ok());
        assert!(EvolutionConfig::new(0.01, 0.1, 1.0).validate().is_err());
        assert!(EvolutionConfig::new(0.01, 1e-8, 0.0).validate().is_err());
        let mut c = EvolutionConfig::new(0.01, 1e-8, 1.0);
        c.blowup_factor = 1.0;
        assert!(c.validate().is_err());
        c.blowup_factor = 10.0;
        c.record_every = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_json_defaults_and_unknown_keys() {
        let c: EvolutionConfig = serde_json::from_str(r#"{"dtInit":0.01,"dtMin":1e-9,"tEnd":2}"#).unwrap();
        assert_eq!(c.blowup_factor, 10.0);
        assert_eq!(c.safety, 0.5);
        assert!(serde_json::from_str::<EvolutionConfig>(r#"{"dtInit":0.01,"dtMin":1e-9,"tEnd":2,"bogus":1}"#).is_err());
    }

    #[test]
    fn zero_data_reaches_t_end_with_zero_diagnostics() {
        let grid = RadialGrid::new(Dimension::THREE, 10.0, 128).unwrap();
        let p = GroundStateProfile::cached(Dimension::THREE);
        let rec = evolve(&RadialField::zeros(&grid), &EvolutionConfig::new(0.1, 1e-6, 1.0), p).unwrap();
        assert_eq!(rec.termination.tag, TerminationTag::ReachedTEnd);
        assert_eq!(rec.termination.t_stop, 1.0);
        for series in [
            &rec.ledger.mass,
            &rec.ledger.energy,
            &rec.ledger.grad_sq,
            &rec.probe.s_norm_accum,
        ] {
            assert!(series.iter().all(|v| *v == 0.0));
        }
        assert!(rec.final_field.is_zero());
    }

    #[test]
    fn free_gaussian_matches_closed_form_at_second_order() {
        let p = GroundStateProfile::cached(Dimension::THREE);
        let err = |points: usize, dt: f64| {
            let grid = RadialGrid::new(Dimension::THREE, 40.0, points).unwrap();
            let u0 = RadialField::from_real_fn(&grid, |r| (-r * r).exp());
            let rec = evolve_with(&u0, &EvolutionConfig::new(dt, dt / 100.0, 0.1), p, &free_opts()).unwrap();
            let exact = RadialField::from_fn(&grid, |r| free_gaussian(r, 0.1, 3.0));
            rec.final_field.distance(&exact)
        };
        let e1 = err(4096, 0.01);
        let e2 = err(8192, 0.005);
        let ratio = e1 / e2;
        assert!(e1 < 1e-3, "{e1}");
        assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn strang_is_second_order_in_time() {
        let grid = RadialGrid::new(Dimension::THREE, 20.0, 1024).unwrap();
        let u0 = RadialField::from_real_fn(&grid, |r| 0.3 * (-r * r).exp());
        let run = |dt: f64| {
            let steps = (0.5 / dt).round() as usize;
            let mut st = Stepper::new(&grid, Nonlinearity::Focusing);
            let mut u = u0.clone();
            for _ in 0..steps {
                st.strang_step(&mut u, dt).unwrap();
            }
            u
        };
        let reference = run(0.05 / 16.0);
        let errs: Vec<f64> = [0.05, 0.025, 0.0125]
            .iter()
            .map(|&dt| run(dt).distance(&reference))
            .collect();
        for pair in errs.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!((3.0..=5.5).contains(&ratio), "ratio {ratio}, errors {errs:?}");
        }
    }

    #[test]
    fn strang_step_conserves_mass() {
        let grid = reference_grid(5);
        let u0 = RadialField::from_fn(&grid, |r| C64::from_polar(0.8 * (-r * r / 2.0).exp(), 0.2 * r * r));
        let m0 = mass_norm(&u0);
        let mut u = u0.clone();
        let mut st = Stepper::new(&grid, Nonlinearity::Focusing);
        for _ in 0..20 {
            st.strang_step(&mut u, 0.01).unwrap();
            assert!(((mass_norm(&u) - m0) / m0).abs() < 1e-12);
        }
    }

    #[test]
    fn splitting_is_time_reversible() {
        let grid = RadialGrid::new(Dimension::FOUR, 20.0, 800).unwrap();
        let p = GroundStateProfile::cached(Dimension::FOUR);
        let u0 = RadialField::from_fn(&grid, |r| C64::from_polar(0.6 * (-r * r).exp(), 0.3 * r * r));
        let cfg = EvolutionConfig::new(0.01, 1e-6, 0.2);
        let forward = evolve(&u0, &cfg, p).unwrap();
        let back = evolve(&forward.final_field.conj(), &cfg, p).unwrap();
        let returned = back.final_field.conj();
        assert!(returned.distance(&u0) < 1e-8, "{}", returned.distance(&u0));
    }

    #[test]
    fn negative_energy_gaussian_blows_up() {
        let grid = reference_grid(3);
        let p = GroundStateProfile::cached(Dimension::THREE);
        let u0 = RadialField::from_real_fn(&grid, |r| 3.0 * (-r * r).exp());
        assert!(energy(&u0) < 0.0);
        let rec = evolve(&u0, &EvolutionConfig::new(1e-3, 1e-9, 5.0), p).unwrap();
        assert_eq!(rec.termination.tag, TerminationTag::BlowupDetected);
        assert!(rec.termination.t_stop < 5.0);
        let g_stop = *rec.ledger.grad_sq.last().unwrap();
        assert!(g_stop >= 10.0 * p.y_c());
        assert_eq!(*rec.ledger.times.last().unwrap(), rec.termination.t_stop);
        assert_eq!(rec.blowup_kind, Some(BlowupKind::GradientGrowth));
    }

    #[test]
    fn detection_is_monotone_in_blowup_factor() {
        let grid = RadialGrid::new(Dimension::THREE, 20.0, 2048).unwrap();
        let p = GroundStateProfile::cached(Dimension::THREE);
        let u0 = RadialField::from_real_fn(&grid, |r| 3.0 * (-r * r).exp());
        let mut cfg = EvolutionConfig::new(1e-3, 1e-9, 5.0);
        let t10 = evolve(&u0, &cfg, p).unwrap();
        cfg.blowup_factor = 5.0;
        let t5 = evolve(&u0, &cfg, p).unwrap();
        assert_eq!(t10.termination.tag, TerminationTag::BlowupDetected);
        assert_eq!(t5.termination.tag, TerminationTag::BlowupDetected);
        assert!(t5.termination.t_stop <= t10.termination.t_stop);
    }

    #[test]
    fn step_underflow_is_reported() {
        let grid = RadialGrid::new(Dimension::THREE, 10.0, 256).unwrap();
        let p = GroundStateProfile::cached(Dimension::THREE);
        let u0 = RadialField::from_real_fn(&grid, |r| 3.0 * (-r * r).exp());
        // max|u|^4 = 81, so the adaptive step is 0.5/81 < dtMin.
        let rec = evolve(&u0, &EvolutionConfig::new(0.01, 0.009, 1.0), p).unwrap();
        assert_eq!(rec.termination.tag, TerminationTag::StepUnderflow);
        assert_eq!(rec.termination.t_stop, 0.0);
        assert_eq!(rec.blowup_kind, Some(BlowupKind::BoundedGradient));
    }

    #[test]
    fn records_follow_schedule() {
        let grid = RadialGrid::new(Dimension::FIVE, 10.0, 128).unwrap();
        let p = GroundStateProfile::cached(Dimension::FIVE);
        let u0 = RadialField::from_real_fn(&grid, |r| 0.1 * (-r * r).exp());
        let mut cfg = EvolutionConfig::new(0.01, 1e-6, 0.105);
        cfg.record_every = 3;
        let rec = evolve(&u0, &cfg, p).unwrap();
        // steps at 0.01 .. 0.10 and a clipped final step; records at 0, 3, 6, 9 and the end
        assert_eq!(rec.steps, 11);
        assert_eq!(rec.ledger.len(), 5);
        assert_eq!(*rec.ledger.times.last().unwrap(), 0.105);
        assert_eq!(rec.virial.len(), rec.ledger.len());
        assert_eq!(rec.probe.s_norm_accum.len(), rec.ledger.len());
        assert!(rec.probe.s_norm_accum.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn companion_estimate_bounds_refinement_change() {
        let dim = Dimension::THREE;
        let p = GroundStateProfile::cached(dim);
        let cfg = EvolutionConfig::new(0.01, 1e-8, 0.5);
        let opts = EvolveOptions {
            companion_estimate: true,
            ..EvolveOptions::default()
        };
        let run = |points: usize| {
            let grid = RadialGrid::new(dim, 20.0, points).unwrap();
            let u0 = RadialField::from_real_fn(&grid, |r| 0.5 * (-r * r).exp());
            evolve_with(&u0, &cfg, p, &opts).unwrap()
        };
        let coarse = run(512);
        let fine = run(1024);
        let est = coarse.spatial_error_estimate.unwrap();
        let change = (fine.ledger.grad_sq.last().unwrap() - coarse.ledger.grad_sq.last().unwrap()).abs();
        assert!(change < est, "change {change} vs estimate {est}");
    }
}
