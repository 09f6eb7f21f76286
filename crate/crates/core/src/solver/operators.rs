//! Discrete radial Laplacian and the two split flows.

use serde::{Deserialize, Serialize};

use crate::dim::Dimension;
use crate::error::{Error, Result};
use crate::field::{RadialField, RadialGrid, C64};

/// Tridiagonal coefficients of `Δ_h` on nodes `0..n_points` (the wall node
/// is held at zero). Row `j` reads
/// `(A_{j+1/2}(u_{j+1} − u_j) − A_{j−1/2}(u_j − u_{j−1})) / (h V_j)`;
/// at the origin this is `2n(u_1 − u_0)/h²`, the symmetric stencil for
/// `n u''(0)`.
#[derive(Clone, Debug)]
pub struct LaplacianStencil {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl LaplacianStencil {
    pub fn new(grid: &RadialGrid) -> Self {
        let n = grid.n_points();
        let h = grid.spacing();
        let vol = grid.volumes();
        let face = grid.faces();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for j in 0..n {
            let left = if j == 0 { 0.0 } else { face[j - 1] };
            let right = face[j];
            lower[j] = left / (h * vol[j]);
            upper[j] = right / (h * vol[j]);
            diag[j] = -(lower[j] + upper[j]);
        }
        LaplacianStencil { lower, diag, upper }
    }

    pub fn rows(&self) -> usize {
        self.diag.len()
    }

    /// Applies the stencil to raw samples (length `n_points + 1`), using
    /// `values[n_points]` as given. The wall row of the output is zero.
    pub fn apply(&self, values: &[C64]) -> Vec<C64> {
        let n = self.rows();
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for j in 0..n {
            let mut acc = self.diag[j] * values[j] + self.upper[j] * values[j + 1];
            if j > 0 {
                acc += self.lower[j] * values[j - 1];
            }
            out[j] = acc;
        }
        out
    }
}

/// `Δ_h u` with the Dirichlet wall.
pub fn laplacian_radial(f: &RadialField) -> RadialField {
    let stencil = LaplacianStencil::new(f.grid());
    RadialField::from_values_unchecked(f.grid(), stencil.apply(f.values()))
}

/// Solves a complex tridiagonal system in place (Thomas algorithm).
/// `lower[0]` and `upper[last]` are ignored.
pub fn solve_tridiagonal(lower: &[C64], diag: &[C64], upper: &[C64], rhs: &mut [C64]) -> Result<()> {
    let n = diag.len();
    let mut c_prime = vec![C64::new(0.0, 0.0); n];
    let mut pivot = diag[0];
    if pivot.norm() == 0.0 || !pivot.is_finite() {
        return Err(Error::SolveFailure { row: 0 });
    }
    c_prime[0] = upper[0] / pivot;
    rhs[0] /= pivot;
    for j in 1..n {
        pivot = diag[j] - lower[j] * c_prime[j - 1];
        if pivot.norm() == 0.0 || !pivot.is_finite() {
            return Err(Error::SolveFailure { row: j });
        }
        if j + 1 < n {
            c_prime[j] = upper[j] / pivot;
        }
        let prev = rhs[j - 1];
        rhs[j] = (rhs[j] - lower[j] * prev) / pivot;
    }
    for j in (0..n - 1).rev() {
        let next = rhs[j + 1];
        rhs[j] -= c_prime[j] * next;
    }
    Ok(())
}

/// Coefficient `σ` of the nonlinearity in `i u_t + Δu + σ|u|^{4/(n−2)} u = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Nonlinearity {
    #[default]
    Focusing,
    Defocusing,
    /// Free Schrödinger flow.
    Disabled,
}

impl Nonlinearity {
    pub fn coefficient(self) -> f64 {
        match self {
            Nonlinearity::Focusing => 1.0,
            Nonlinearity::Defocusing => -1.0,
            Nonlinearity::Disabled => 0.0,
        }
    }
}

/// `|u|^{4/(n−2)}` from `|u|²`.
pub(crate) fn nonlinear_frequency(dim: Dimension, modulus_sq: f64) -> f64 {
    match dim.get() {
        3 => modulus_sq * modulus_sq,
        4 => modulus_sq,
        _ => modulus_sq.powf(2.0 / (dim.as_f64() - 2.0)),
    }
}

/// Split-step propagator for a fixed grid.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: RadialGrid,
    stencil: LaplacianStencil,
    nonlinearity: Nonlinearity,
    // scratch
    lower: Vec<C64>,
    diag: Vec<C64>,
    upper: Vec<C64>,
    rhs: Vec<C64>,
}

impl Stepper {
    pub fn new(grid: &RadialGrid, nonlinearity: Nonlinearity) -> Self {
        let rows = grid.n_points();
        Stepper {
            grid: grid.clone(),
            stencil: LaplacianStencil::new(grid),
            nonlinearity,
            lower: vec![C64::new(0.0, 0.0); rows],
            diag: vec![C64::new(0.0, 0.0); rows],
            upper: vec![C64::new(0.0, 0.0); rows],
            rhs: vec![C64::new(0.0, 0.0); rows],
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    /// Crank–Nicolson step `(I − i dt/2 Δ_h) u⁺ = (I + i dt/2 Δ_h) u`.
    pub fn linear_step(&mut self, f: &mut RadialField, dt: f64) -> Result<()> {
        if !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt must be finite, got {dt}")));
        }
        let tau = C64::new(0.0, 0.5 * dt);
        let s = &self.stencil;
        let rows = s.rows();
        let lap = s.apply(f.values());
        let values = f.values();
        for j in 0..rows {
            self.lower[j] = -tau * s.lower[j];
            self.diag[j] = C64::new(1.0, 0.0) - tau * s.diag[j];
            self.upper[j] = -tau * s.upper[j];
            self.rhs[j] = values[j] + tau * lap[j];
        }
        solve_tridiagonal(&self.lower, &self.diag, &self.upper, &mut self.rhs)?;
        let out = f.values_mut();
        out[..rows].copy_from_slice(&self.rhs);
        out[rows] = C64::new(0.0, 0.0);
        Ok(())
    }

    /// Exact flow of `i u_t = −σ|u|^{4/(n−2)} u`: a pointwise phase rotation.
    pub fn nonlinear_phase_step(&self, f: &mut RadialField, dt: f64) {
        nonlinear_phase_step_with(f, dt, self.nonlinearity.coefficient());
    }

    /// `L(dt/2) ∘ N(dt) ∘ L(dt/2)`.
    pub fn strang_step(&mut self, f: &mut RadialField, dt: f64) -> Result<()> {
        self.linear_step(f, 0.5 * dt)?;
        self.nonlinear_phase_step(f, dt);
        self.linear_step(f, 0.5 * dt)
    }
}

/// `u ↦ u exp(i σ dt |u|^{4/(n−2)})`.
pub fn nonlinear_phase_step_with(f: &mut RadialField, dt: f64, coefficient: f64) {
    if dt == 0.0 || coefficient == 0.0 {
        return;
    }
    let dim = f.dim();
    for v in f.values_mut() {
        let freq = nonlinear_frequency(dim, v.norm_sqr());
        *v *= C64::from_polar(1.0, coefficient * dt * freq);
    }
}

/// Focusing phase step on a copy.
pub fn nonlinear_phase_step(f: &RadialField, dt: f64) -> RadialField {
    let mut out = f.clone();
    nonlinear_phase_step_with(&mut out, dt, 1.0);
    out
}

/// One Crank–Nicolson step on a copy.
pub fn linear_step(f: &RadialField, dt: f64) -> Result<RadialField> {
    let mut out = f.clone();
    Stepper::new(f.grid(), Nonlinearity::Disabled).linear_step(&mut out, dt)?;
    Ok(out)
}

/// One focusing Strang step on a copy.
pub fn strang_step(f: &RadialField, dt: f64) -> Result<RadialField> {
    let mut out = f.clone();
    Stepper::new(f.grid(), Nonlinearity::Focusing).strang_step(&mut out, dt)?;
    Ok(out)
}
