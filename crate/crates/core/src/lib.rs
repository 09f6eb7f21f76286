//! Radial simulation and verification toolkit for the focusing
//! energy-critical nonlinear Schrödinger equation
//! `i u_t + Δu + |u|^{4/(n−2)} u = 0` in dimensions 3, 4 and 5.

pub mod diagnostics;
pub mod dim;
pub mod error;
pub mod field;
pub mod groundstate;
pub mod harness;
pub mod quadrature;
pub mod solver;
pub mod variational;

pub use dim::{Dimension, Exponent};
pub use error::{Error, Result};
pub use field::{GridSpec, RadialField, RadialGrid, C64};
pub use groundstate::GroundStateProfile;
pub use harness::{ExperimentConfig, InitialDataSpec};
pub use solver::{EvolutionConfig, EvolveOptions, TerminationReason, TerminationTag, TrajectoryRecord};
pub use variational::{CoercivityBounds, Region, SideCondition, ThresholdPair};
