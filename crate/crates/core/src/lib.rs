//! Closed-form evaluation and verification of logarithmic-spiral
//! vortex-sheet flows in the plane.
//!
//! A spiral family is a pitch `a > 0`, a self-similarity exponent `mu`,
//! and `M` logarithmic-spiral branches with circulation coefficients `g_m`
//! and phases `theta_m`. The crate evaluates the induced velocity,
//! complex potential and pressure in closed form ([`field`]), decides
//! whether a family is a weak solution of the 2D incompressible Euler
//! equations via a single complex algebraic constraint and solves for
//! parameters that satisfy it ([`constraint`]), and cross-checks the
//! closed forms with independent numerical oracles ([`oracle`]):
//! Biot-Savart quadrature, finite-difference interior Euler residuals,
//! sheet matching residuals and space-time weak-form residuals.

pub mod constraint;
pub mod error;
pub mod field;
pub mod geometry;
pub mod model;
pub mod oracle;
pub mod parallel;
pub mod quadrature;

pub use error::{Error, Result};
pub use model::{FamilyConfig, PolarPoint, SpiralFamily};
