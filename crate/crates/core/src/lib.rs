//! Lindstedt–Poincaré normal forms for perturbations of singular completely
//! integrable holomorphic vector fields, truncated at finite order.
//!
//! The crate is organized bottom-up:
//! - [`psalg`]: truncated power series in `(x, u - b)`, vector fields and Lie brackets;
//! - [`resonance`]: weights of the linear morphism `S` and resonant monomials;
//! - [`normalform`]: the cohomological equation and the quadratic Newton step;
//! - [`kam`]: diophantine schedules, radii, compact-set filtering and measure bounds;
//! - [`verify`]: scenario generators and numerical checks of invariance.

pub mod error;
pub mod kam;
pub mod psalg;
pub mod normalform;
pub mod resonance;
pub mod verify;

pub use error::{Error, Result};
