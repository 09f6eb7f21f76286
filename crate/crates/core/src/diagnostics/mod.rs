//! Observables along trajectories: conserved quantities, space-time norms,
//! localized virial quantities, scattering proxies and concentration.
//!
//! All integrals are finite-volume sums over the grid cells. Gradients are
//! staggered differences on the cell faces, i.e. exactly the quadratic form
//! of the solver's Laplacian, so `∫|∇u|²` here is `−⟨u, Δ_h u⟩`.

pub mod cutoff;
pub mod scattering;
pub mod virial;

use serde::{Deserialize, Serialize};

use crate::field::RadialField;
use crate::groundstate::GroundStateProfile;

pub use cutoff::{CutoffKind, CutoffWeight};
pub use scattering::{scattering_verdict, ProbeSeries, ScatteringProbe, Verdict};
pub use virial::{
    localized_mass, virial_first_identity_residual, virial_first_rhs, virial_second_rhs, ResidualStats, VirialSeries,
};

/// Iterator over `(face radius, face area, |u_{j+1} − u_j|² / h²)`.
fn face_gradients(f: &RadialField) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    let grid = f.grid();
    let h = grid.spacing();
    let v = f.values();
    grid.faces().iter().enumerate().map(move |(j, &area)| {
        let du = (v[j + 1] - v[j]).norm_sqr() / (h * h);
        ((j as f64 + 0.5) * h, area, du)
    })
}

/// `∫|u|²`.
pub fn mass_norm(f: &RadialField) -> f64 {
    f.values()
        .iter()
        .zip(f.grid().volumes())
        .map(|(u, w)| w * u.norm_sqr())
        .sum()
}

/// `∫|∇u|²`.
pub fn grad_norm_sq(f: &RadialField) -> f64 {
    let h = f.grid().spacing();
    face_gradients(f).map(|(_, a, du)| a * h * du).sum()
}

/// `∫_{|x| ≤ R} |∇u|²`, summing faces with radius at most `R`.
pub fn local_grad_sq(f: &RadialField, radius: f64) -> f64 {
    let h = f.grid().spacing();
    face_gradients(f)
        .take_while(|(r, _, _)| *r <= radius)
        .map(|(_, a, du)| a * h * du)
        .sum()
}

/// `∫|u|^p`.
pub fn power_integral(f: &RadialField, p: f64) -> f64 {
    f.values()
        .iter()
        .zip(f.grid().volumes())
        .map(|(u, w)| w * u.norm().powf(p))
        .sum()
}

/// `∫|u|^{2*}`.
pub fn pot_norm_sq(f: &RadialField) -> f64 {
    power_integral(f, f.dim().two_star().as_f64())
}

/// `E(u) = ½∫|∇u|² − (1/2*)∫|u|^{2*}`.
pub fn energy(f: &RadialField) -> f64 {
    let two_star = f.dim().two_star().as_f64();
    0.5 * grad_norm_sq(f) - pot_norm_sq(f) / two_star
}

/// `dt · ∫|u|^{2(n+2)/(n−2)}`, one increment of the S-norm raised to its exponent.
pub fn s_norm_increment(f: &RadialField, dt: f64) -> f64 {
    if dt == 0.0 {
        return 0.0;
    }
    dt * power_integral(f, f.dim().s_exponent().as_f64())
}

/// `dt · ‖∇u‖_{L^r}^q` with the Strichartz pair of the W-norm,
/// `q = 2(n+2)/(n−2)`, `r = 2n(n+2)/(n²+4)`. Reporting only.
pub fn w_norm_increment(f: &RadialField, dt: f64) -> f64 {
    if dt == 0.0 {
        return 0.0;
    }
    let n = f.dim().as_f64();
    let q = f.dim().s_exponent().as_f64();
    let r = 2.0 * n * (n + 2.0) / (n * n + 4.0);
    let h = f.grid().spacing();
    let lr: f64 = face_gradients(f).map(|(_, a, du)| a * h * du.powf(r / 2.0)).sum();
    dt * lr.powf(q / r)
}

/// Fraction of the mass sitting in `r > r_max/2`.
pub fn outer_mass_fraction(f: &RadialField) -> f64 {
    let total = mass_norm(f);
    if total == 0.0 {
        return 0.0;
    }
    let half = 0.5 * f.grid().r_max();
    let outer: f64 = f
        .values()
        .iter()
        .zip(f.grid().volumes())
        .zip(f.grid().nodes())
        .filter(|(_, r)| *r > half)
        .map(|((u, w), _)| w * u.norm_sqr())
        .sum();
    outer / total
}

/// Time series of the conserved quantities and the two integrals they are
/// built from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConservedLedger {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub grad_sq: Vec<f64>,
    pub pot_sq: Vec<f64>,
}

impl ConservedLedger {
    pub fn push(&mut self, t: f64, mass: f64, grad_sq: f64, pot_sq: f64, two_star: f64) {
        self.times.push(t);
        self.mass.push(mass);
        self.grad_sq.push(grad_sq);
        self.pot_sq.push(pot_sq);
        self.energy.push(0.5 * grad_sq - pot_sq / two_star);
    }

    pub fn record(&mut self, t: f64, f: &RadialField) {
        let two_star = f.dim().two_star().as_f64();
        self.push(t, mass_norm(f), grad_norm_sq(f), pot_norm_sq(f), two_star);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max_t |E(t) − E(0)|`.
    pub fn energy_drift_abs(&self) -> f64 {
        max_deviation(&self.energy)
    }

    /// Energy drift relative to `|E(0)|` (absolute when `E(0) = 0`).
    pub fn energy_drift_rel(&self) -> f64 {
        relative(max_deviation(&self.energy), self.energy.first().copied())
    }

    pub fn mass_drift_rel(&self) -> f64 {
        relative(max_deviation(&self.mass), self.mass.first().copied())
    }
}

fn max_deviation(series: &[f64]) -> f64 {
    match series.first() {
        Some(&first) => series.iter().map(|v| (v - first).abs()).fold(0.0, f64::max),
        None => 0.0,
    }
}

fn relative(dev: f64, base: Option<f64>) -> f64 {
    match base {
        Some(b) if b != 0.0 => dev / b.abs(),
        _ => dev,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConcentrationReport {
    pub radius: f64,
    pub local_grad_sq: f64,
    /// Ratio to `(2/n) ∫|∇W|²`.
    pub liminf_ratio: f64,
    /// Ratio to `∫|∇W|²`.
    pub limsup_ratio: f64,
    pub meets_liminf_bound: bool,
    pub meets_limsup_bound: bool,
}

/// Gradient mass inside `r ≤ R` compared with the ground-state levels
/// `(2/n)∫|∇W|²` and `∫|∇W|²`.
pub fn concentration_window(f: &RadialField, radius: f64, profile: &GroundStateProfile) -> ConcentrationReport {
    let local = local_grad_sq(f, radius);
    let y_c = profile.y_c();
    let liminf_ratio = local / (2.0 / profile.dim.as_f64() * y_c);
    let limsup_ratio = local / y_c;
    ConcentrationReport {
        radius,
        local_grad_sq: local,
        liminf_ratio,
        limsup_ratio,
        meets_liminf_bound: liminf_ratio >= 1.0,
        meets_limsup_bound: limsup_ratio >= 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dim::Dimension;
    use crate::field::RadialGrid;
    use crate::groundstate::rescaled_w;
    use crate::quadrature::{integrate, QuadOptions};

    #[test]
    fn zero_field_gives_zero() {
        let grid = RadialGrid::new(Dimension::THREE, 10.0, 64).unwrap();
        let z = RadialField::zeros(&grid);
        assert_eq!(mass_norm(&z), 0.0);
        assert_eq!(grad_norm_sq(&z), 0.0);
        assert_eq!(pot_norm_sq(&z), 0.0);
        assert_eq!(energy(&z), 0.0);
        assert_eq!(s_norm_increment(&z, 0.1), 0.0);
        let p = GroundStateProfile::cached(Dimension::THREE);
        let c = concentration_window(&z, 1.0, p);
        assert_eq!(c.limsup_ratio, 0.0);
        assert!(!c.meets_liminf_bound && !c.meets_limsup_bound);
    }

    #[test]
    fn gaussian_norms_match_quadrature() {
        let grid = RadialGrid::new(Dimension::THREE, 8.0, 8192).unwrap();
        let f = RadialField::from_real_fn(&grid, |r| (-r * r).exp());
        let omega = Dimension::THREE.sphere_area();
        let q = |g: &dyn Fn(f64) -> f64| {
            integrate(|r| g(r) * omega * r * r, 0.0, 8.0, QuadOptions::relative(1e-13))
                .unwrap()
                .value
        };
        let mass = q(&|r: f64| (-2.0 * r * r).exp());
        let grad = q(&|r: f64| 4.0 * r * r * (-2.0 * r * r).exp());
        let pot = q(&|r: f64| (-6.0 * r * r).exp());
        assert!(
            (mass_norm(&f) - mass).abs() < 1e-6 * mass,
            "{} vs {}",
            mass_norm(&f),
            mass
        );
        assert!((grad_norm_sq(&f) - grad).abs() < 1e-5 * grad);
        assert!((pot_norm_sq(&f) - pot).abs() < 1e-5 * pot);
    }

    #[test]
    fn s_norm_increment_is_linear_in_dt() {
        let grid = RadialGrid::new(Dimension::FOUR, 8.0, 200).unwrap();
        let f = RadialField::from_real_fn(&grid, |r| 0.7 * (-r * r).exp());
        assert_eq!(s_norm_increment(&f, 0.0), 0.0);
        let direct = 2.5 * power_integral(&f, 6.0);
        let accumulated: f64 = (0..25).map(|_| s_norm_increment(&f, 0.1)).sum();
        assert!((accumulated - direct).abs() < 1e-12 * direct);
        assert!(w_norm_increment(&f, 0.1) > 0.0);
    }

    #[test]
    fn exact_w_window_close_to_one() {
        let dim = Dimension::FIVE;
        let grid = RadialGrid::new(dim, 200.0, 20000).unwrap();
        let w = rescaled_w(0.0, 1.0, &grid).unwrap();
        let p = GroundStateProfile::cached(dim);
        // The face next to the wall carries the jump to the Dirichlet value.
        let c = concentration_window(&w, grid.r_max() - grid.spacing(), p);
        assert!((c.limsup_ratio - 1.0).abs() < 1e-2, "{}", c.limsup_ratio);
        assert!(c.meets_liminf_bound);
    }

    #[test]
    fn ledger_is_internally_consistent() {
        let grid = RadialGrid::new(Dimension::FIVE, 10.0, 300).unwrap();
        let mut l = ConservedLedger::default();
        for a in [0.2, 0.9, 1.4] {
            l.record(a, &RadialField::from_real_fn(&grid, |r| a * (-r * r).exp()));
        }
        for k in 0..l.len() {
            let e = l.grad_sq[k] / 2.0 - l.pot_sq[k] / (10.0 / 3.0);
            assert!((l.energy[k] - e).abs() <= 1e-12 * (1.0 + e.abs()));
        }
    }
}
