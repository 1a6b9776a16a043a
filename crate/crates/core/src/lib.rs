//! Grinevich-Zakharov rational solutions of the Novikov-Veselov equation
//! at positive energy.
//!
//! The solution for a parameter set of `N` blocks is
//!
//! ```text
//! v = -4 d_z d_zbar ln det A,    w = 12 d_z^2 ln det A
//! ```
//!
//! with `A` the `4N x 4N` matrix assembled in [`potential`]. The crate
//! provides:
//!
//! - [`params`]: parameter sets, their constraints and gamma translations;
//! - [`velocity`]: block velocities, the forbidden velocity region and the
//!   inverse velocity problem;
//! - [`potential`]: exact evaluation of `v`, `w` and the per-block soliton
//!   profiles through [`derivative`] and [`linalg`];
//! - [`verify`]: residual, travel-wave and large-time splitting checks.

pub mod config;
pub mod derivative;
pub mod error;
pub mod linalg;
pub mod params;
pub mod potential;
pub mod velocity;
pub mod verify;

pub use derivative::{DerivativeIndex, Direction};
pub use error::{Error, Result};
pub use linalg::C64;
pub use params::{
    expand_blocks, translate_gammas, validate, BlockSeed, ParameterSet, ValidationReport,
};
pub use potential::{FieldSample, PotentialEvaluator, ProfileSample, SpacetimePoint};
pub use velocity::{
    forbidden_bound, forbidden_region_contains, solve_velocity_inverse, velocity, InverseVelocity,
    LambdaSet, Velocity,
};
