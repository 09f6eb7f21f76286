//! Uniform radial grids and complex radial fields sampled on them.
//!
//! Node `j` sits at `r_j = j h`. Each node owns the spherical shell
//! `[r_j - h/2, r_j + h/2]` (a ball of radius `h/2` at the origin, a half
//! shell at `r_max`), so discrete integrals are finite-volume sums whose
//! weights add up to the exact ball volume. Neighbouring cells exchange flux
//! through the sphere of radius `r_{j+1/2}`; the discrete Laplacian built
//! from these faces is self-adjoint in the volume-weighted inner product.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dim::Dimension;
use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug)]
struct Geometry {
    /// Cell volumes, length `n_points + 1`.
    volumes: Vec<f64>,
    /// Face areas at `r_{j+1/2}`, length `n_points`.
    faces: Vec<f64>,
}

/// Uniform grid on `[0, r_max]` with `n_points + 1` nodes.
#[derive(Clone, Debug)]
pub struct RadialGrid {
    dim: Dimension,
    r_max: f64,
    n_points: usize,
    geom: Arc<Geometry>,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.r_max == other.r_max && self.n_points == other.n_points
    }
}

/// Serializable grid description.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GridSpec {
    pub r_max: f64,
    pub n_points: usize,
}

pub const MIN_POINTS: usize = 16;

// b^n - a^n for b > a >= 0 without the cancellation of the direct form.
fn power_difference(a: f64, b: f64, n: u32) -> f64 {
    let mut sum = 0.0;
    for k in 0..n {
        sum += a.powi(k as i32) * b.powi((n - 1 - k) as i32);
    }
    (b - a) * sum
}

impl RadialGrid {
    pub fn new(dim: Dimension, r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidGrid(format!("rMax must be positive, got {r_max}")));
        }
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "nPoints must be at least {MIN_POINTS}, got {n_points}"
            )));
        }
        let n = dim.get();
        let omega = dim.sphere_area();
        let h = r_max / n_points as f64;
        let half = 0.5 * h;
        let nf = dim.as_f64();

        let mut volumes = Vec::with_capacity(n_points + 1);
        volumes.push(omega * half.powi(n as i32) / nf);
        for j in 1..n_points {
            let r = j as f64 * h;
            volumes.push(omega * power_difference(r - half, r + half, n) / nf);
        }
        volumes.push(omega * power_difference(r_max - half, r_max, n) / nf);

        let faces = (0..n_points)
            .map(|j| omega * ((j as f64 + 0.5) * h).powi(n as i32 - 1))
            .collect();

        Ok(RadialGrid {
            dim,
            r_max,
            n_points,
            geom: Arc::new(Geometry { volumes, faces }),
        })
    }

    pub fn from_spec(dim: Dimension, spec: GridSpec) -> Result<Self> {
        RadialGrid::new(dim, spec.r_max, spec.n_points)
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            r_max: self.r_max,
            n_points: self.n_points,
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Number of nodes, `n_points + 1`.
    pub fn len(&self) -> usize {
        self.n_points + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j == self.n_points {
            self.r_max
        } else {
            j as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| self.node(j))
    }

    pub fn volumes(&self) -> &[f64] {
        &self.geom.volumes
    }

    pub fn faces(&self) -> &[f64] {
        &self.geom.faces
    }

    /// Same domain with twice the resolution.
    pub fn refined(&self) -> RadialGrid {
        RadialGrid::new(self.dim, self.r_max, 2 * self.n_points).expect("refinement of a valid grid")
    }
}

/// Complex samples `u(r_j)`; the last node is the Dirichlet wall.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<C64>,
}

impl RadialField {
    pub fn zeros(grid: &RadialGrid) -> Self {
        RadialField {
            grid: grid.clone(),
            values: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f` at every node and clamps the wall value to zero.
    pub fn from_fn<F: Fn(f64) -> C64>(grid: &RadialGrid, f: F) -> Self {
        let mut values: Vec<C64> = grid.nodes().map(f).collect();
        values[grid.n_points] = C64::new(0.0, 0.0);
        RadialField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: &RadialGrid, f: F) -> Self {
        Self::from_fn(grid, |r| C64::new(f(r), 0.0))
    }

    /// Wraps raw values, checking length, finiteness and the wall condition.
    pub fn from_values(grid: &RadialGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let field = RadialField {
            grid: grid.clone(),
            values,
        };
        field.check_finite()?;
        if field.values[grid.n_points] != C64::new(0.0, 0.0) {
            return Err(Error::InvalidArgument("field must vanish at rMax".into()));
        }
        Ok(field)
    }

    pub(crate) fn from_values_unchecked(grid: &RadialGrid, values: Vec<C64>) -> Self {
        RadialField {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn dim(&self) -> Dimension {
        self.grid.dim
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == C64::new(0.0, 0.0))
    }

    pub fn scaled(&self, a: f64) -> RadialField {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v * a).collect(),
        }
    }

    pub fn conj(&self) -> RadialField {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Pointwise product with a real profile evaluated at the nodes.
    pub fn multiplied_by<F: Fn(f64) -> f64>(&self, g: F) -> RadialField {
        let values = self
            .values
            .iter()
            .zip(self.grid.nodes())
            .map(|(v, r)| v * g(r))
            .collect();
        RadialField {
            grid: self.grid.clone(),
            values,
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            Some(j) => Err(Error::InvalidArgument(format!("non-finite sample at node {j}"))),
            None => Ok(()),
        }
    }

    /// One-sided estimate of `d|u|/dr` at the origin.
    pub fn origin_slope(&self) -> f64 {
        (self.values[1].norm() - self.values[0].norm()) / self.grid.spacing()
    }

    /// Full invariant check: finite samples, zero wall value, and an origin
    /// slope small enough that the first cell changes `|u|` by at most a
    /// quarter of `max |u|`.
    pub fn validate(&self) -> Result<()> {
        self.check_finite()?;
        if self.values[self.grid.n_points] != C64::new(0.0, 0.0) {
            return Err(Error::InvalidArgument("field must vanish at rMax".into()));
        }
        let bound = 0.25 * self.max_abs() / self.grid.spacing();
        if self.origin_slope().abs() > bound {
            return Err(Error::InvalidArgument(format!(
                "field unresolved at the origin: slope {} exceeds {}",
                self.origin_slope(),
                bound
            )));
        }
        Ok(())
    }

    /// Weighted `L^2` distance, `sqrt(sum V_j |u_j - v_j|^2)`.
    pub fn distance(&self, other: &RadialField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .zip(self.grid.volumes())
            .map(|((a, b), w)| w * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes_sum_to_ball() {
        for dim in Dimension::ALL {
            let grid = RadialGrid::new(dim, 7.0, 300).unwrap();
            let total: f64 = grid.volumes().iter().sum();
            let ball = dim.sphere_area() * 7f64.powi(dim.get() as i32) / dim.as_f64();
            assert!((total - ball).abs() < 1e-12 * ball, "{dim}: {total} vs {ball}");
        }
    }

    #[test]
    fn grid_invariants() {
        let grid = RadialGrid::new(Dimension::THREE, 10.0, 64).unwrap();
        assert_eq!(grid.node(0), 0.0);
        assert_eq!(grid.node(64), 10.0);
        let nodes: Vec<f64> = grid.nodes().collect();
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(RadialGrid::new(Dimension::THREE, 10.0, 15).is_err());
        assert!(RadialGrid::new(Dimension::THREE, -1.0, 64).is_err());
        assert!(RadialGrid::new(Dimension::THREE, f64::NAN, 64).is_err());
    }

    #[test]
    fn field_clamps_wall_and_validates() {
        let grid = RadialGrid::new(Dimension::FOUR, 5.0, 100).unwrap();
        let f = RadialField::from_real_fn(&grid, |r| (-r * r).exp());
        assert_eq!(f.values()[100], C64::new(0.0, 0.0));
        f.validate().unwrap();

        let mut bad = f.clone().into_values();
        bad[3] = C64::new(f64::NAN, 0.0);
        assert!(RadialField::from_values(&grid, bad).is_err());

        let cusp = RadialField::from_real_fn(&grid, |r| if r == 0.0 { 1.0 } else { 0.1 });
        assert!(cusp.validate().is_err());
    }
}
