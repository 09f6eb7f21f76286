//! Fixtures shared by the benchmarks.

use critnls_core::{Dimension, RadialField, RadialGrid};

pub const R_MAX: f64 = 40.0;

/// `exp(-r²)` on a grid of `n_points` nodes over `[0, R_MAX]`.
pub fn gaussian_field(dim: Dimension, n_points: usize) -> RadialField {
    let grid = RadialGrid::new(dim, R_MAX, n_points).expect("valid benchmark grid");
    RadialField::from_real_fn(&grid, |r| (-r * r).exp())
}
