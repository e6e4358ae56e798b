//! Numerical toolkit for the liquid drop model with Riesz repulsion,
//! `E(m) = inf { Per Ω + ½∬_{Ω×Ω} |x-y|^{-λ} dx dy : |Ω| = m }`.
//!
//! * [`params`]: problem parameters and the exact dilation law.
//! * [`analytic`]: ball constants, critical mass and related thresholds.
//! * [`inequalities`]: the scalar inequalities behind the binding and
//!   uniqueness arguments, as checkable functions and grid scans.
//! * [`quadrature`]: perimeter and Riesz double integrals of explicit shapes.
//! * [`optimizer`]: volume-constrained pattern search over star-shaped domains.
//! * [`splits`]: infinitely separated multi-ball configurations and the
//!   necessary condition for minimality with its mass bounds.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod inequalities;
pub mod mc;
pub mod numerics;
pub mod optimizer;
pub mod params;
pub mod quadrature;
pub mod splits;

pub use error::{Error, Result};
pub use mc::Estimate;
pub use params::{energy_scale, unit_ball_volume, unit_sphere_area, EnergyBreakdown, Mass, RieszParams};
