//! The explicit stationary solution `W` and the sharp Sobolev constants.
//!
//! `W(r) = (1 + r^2/(n(n-2)))^{-(n-2)/2}` solves `ΔW + W^{(n+2)/(n-2)} = 0`
//! and extremizes `||u||_{2*} <= C_n ||∇u||_2`. Everything downstream
//! (thresholds, coercivity gaps, blow-up ceilings) is measured against the
//! constants computed here, so they are integrated to a tight tolerance once
//! per dimension and cached.

use std::sync::OnceLock;

use serde::Serialize;

use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::{RadialField, RadialGrid, C64};
use crate::quadrature::{integrate, QuadOptions};

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

fn scale_sq(dim: Dimension) -> f64 {
    let n = dim.as_f64();
    n * (n - 2.0)
}

/// `W(r)`.
pub fn eval_w(r: f64, dim: Dimension) -> f64 {
    let n = dim.as_f64();
    (1.0 + r * r / scale_sq(dim)).powf(-(n - 2.0) / 2.0)
}

/// `W'(r)`, differentiated analytically.
pub fn eval_w_prime(r: f64, dim: Dimension) -> f64 {
    let n = dim.as_f64();
    let c2 = scale_sq(dim);
    -(n - 2.0) * r / c2 * (1.0 + r * r / c2).powf(-n / 2.0)
}

/// `W''(r)`, differentiated analytically.
pub fn eval_w_second(r: f64, dim: Dimension) -> f64 {
    let n = dim.as_f64();
    let c2 = scale_sq(dim);
    let s = 1.0 + r * r / c2;
    -(n - 2.0) / c2 * (s.powf(-n / 2.0) - n * r * r / c2 * s.powf(-n / 2.0 - 1.0))
}

/// `W'' + (n-1)/r W' + W^{1+4/(n-2)}`; vanishes up to rounding.
pub fn residual_elliptic_w(r: f64, dim: Dimension) -> f64 {
    let n = dim.as_f64();
    let power = 1.0 + dim.critical_power().as_f64();
    eval_w_second(r, dim) + (n - 1.0) / r * eval_w_prime(r, dim) + eval_w(r, dim).powf(power)
}

/// `W` with its sharp constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GroundStateProfile {
    pub dim: Dimension,
    /// `∫|∇W|^2`, also written `y_C`.
    pub grad_norm_sq: f64,
    /// `E(W) = ½∫|∇W|^2 − (1/2*)∫|W|^{2*}`.
    pub energy: f64,
    /// Sharp Sobolev constant `C_n = (∫|∇W|^2)^{-1/n}`.
    pub sobolev_const: f64,
    /// `∫|W|^{2*}`.
    pub potential_norm_sq: f64,
    /// Sum of the adaptive quadrature error estimates of both integrals.
    pub quad_error_bound: f64,
}

// r = c tan(s) maps [0, inf) onto [0, pi/2).
fn tan_mapped<F: Fn(f64) -> f64>(radial: F, c: f64) -> impl Fn(f64) -> f64 {
    move |s: f64| {
        let (sin, cos) = s.sin_cos();
        if cos <= 0.0 {
            return 0.0;
        }
        radial(c * sin / cos) * c / (cos * cos)
    }
}

impl GroundStateProfile {
    /// Integrates both norms of `W` and checks the Pohozaev, energy and
    /// Sobolev-constant identities at `quad_tol`.
    pub fn compute(dim: Dimension, quad_tol: f64) -> Result<Self> {
        if !(quad_tol.is_finite() && quad_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadTol must be positive, got {quad_tol}"
            )));
        }
        let n = dim.as_f64();
        let omega = dim.sphere_area();
        let c = scale_sq(dim).sqrt();
        let two_star = dim.two_star().as_f64();
        let opts = QuadOptions::relative(quad_tol);

        let grad_density = |r: f64| {
            let d = eval_w_prime(r, dim);
            d * d * omega * r.powf(n - 1.0)
        };
        let pot_density = |r: f64| eval_w(r, dim).powf(two_star) * omega * r.powf(n - 1.0);

        let half_pi = std::f64::consts::FRAC_PI_2;
        let grad = integrate(tan_mapped(grad_density, c), 0.0, half_pi, opts)?;
        let pot = integrate(tan_mapped(pot_density, c), 0.0, half_pi, opts)?;

        let grad_norm_sq = grad.value;
        let potential_norm_sq = pot.value;
        let energy = 0.5 * grad_norm_sq - potential_norm_sq / two_star;
        let sobolev_const = grad_norm_sq.powf(-1.0 / n);

        let profile = GroundStateProfile {
            dim,
            grad_norm_sq,
            energy,
            sobolev_const,
            potential_norm_sq,
            quad_error_bound: grad.error + pot.error,
        };
        profile.check_identities(quad_tol)?;
        Ok(profile)
    }

    /// Cached profile at the default tolerance.
    pub fn cached(dim: Dimension) -> &'static GroundStateProfile {
        static CACHE: [OnceLock<GroundStateProfile>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
        CACHE[(dim.get() - 3) as usize].get_or_init(|| {
            GroundStateProfile::compute(dim, DEFAULT_QUAD_TOL).expect("ground-state quadrature at default tolerance")
        })
    }

    pub fn check_identities(&self, tol: f64) -> Result<()> {
        let n = self.dim.as_f64();
        let scale = self.grad_norm_sq;
        let slack = tol.max(1e-14) * scale;
        let pohozaev = (self.grad_norm_sq - self.potential_norm_sq).abs();
        if pohozaev > slack {
            return Err(Error::ProfileInconsistent(format!("Pohozaev defect {pohozaev:e}")));
        }
        let energy_defect = (self.energy - self.grad_norm_sq / n).abs();
        if energy_defect > slack {
            return Err(Error::ProfileInconsistent(format!("energy defect {energy_defect:e}")));
        }
        let sobolev_defect = (self.sobolev_const.powf(-n) - self.grad_norm_sq).abs();
        if sobolev_defect > slack {
            return Err(Error::ProfileInconsistent(format!("Sobolev defect {sobolev_defect:e}")));
        }
        Ok(())
    }

    /// `y_C`, the threshold value of `∫|∇u|^2`.
    pub fn y_c(&self) -> f64 {
        self.grad_norm_sq
    }

    /// `C_n^{2*}`.
    pub fn sobolev_const_pow_two_star(&self) -> f64 {
        self.sobolev_const.powf(self.dim.two_star().as_f64())
    }
}

/// Samples `e^{iθ} λ^{(n-2)/2} W(λ r)` on the grid (wall node zeroed).
pub fn rescaled_w(theta: f64, lambda: f64, grid: &RadialGrid) -> Result<RadialField> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    let dim = grid.dim();
    let amp = lambda.powf((dim.as_f64() - 2.0) / 2.0);
    let phase = C64::from_polar(1.0, theta);
    Ok(RadialField::from_fn(grid, |r| phase * (amp * eval_w(lambda * r, dim))))
}
