//! Parameters of a logarithmic spiral family and their validation.
//!
//! A family consists of a pitch `a > 0`, a self-similarity exponent `mu`,
//! and `M` branches, each carrying a nonzero circulation coefficient
//! `g[m]` and a phase `theta[m]`. Branch `m` is the curve
//! `r = exp(a * (theta - theta[m]))`, dilated by `t^mu` at time `t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Raw parameter record, exactly the JSON config schema:
/// `{"a": <number>, "mu": <number>, "g": [...], "theta": [...]}` with
/// `theta` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub a: f64,
    pub mu: f64,
    pub g: Vec<f64>,
    pub theta: Vec<f64>,
}

/// The complex exponent constant of a family with pitch `a`,
/// `-2ai / (a + i)`. Its real part is negative for every `a > 0`.
pub fn growth_constant(a: f64) -> Result<Complex64> {
    if !(a > 0.0) {
        return Err(Error::NonPositivePitch(a));
    }
    Ok(Complex64::new(0.0, -2.0 * a) / Complex64::new(a, 1.0))
}

/// A validated, immutable spiral family. Safe to share across threads;
/// every operation taking `&SpiralFamily` is pure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpiralFamily {
    a: f64,
    mu: f64,
    g: Vec<f64>,
    theta: Vec<f64>,
    growth: Complex64,
}

impl SpiralFamily {
    /// Validates a raw record.
    ///
    /// Requires `a > 0`, equal-length nonempty `g`/`theta` lists, every
    /// `g[m] != 0`, and phases strictly increasing within `[0, 2*pi)`.
    pub fn new(cfg: FamilyConfig) -> Result<Self> {
        let FamilyConfig { a, mu, g, theta } = cfg;
        let growth = growth_constant(a)?;
        if g.len() != theta.len() || g.is_empty() {
            return Err(Error::LengthMismatch);
        }
        if let Some(m) = g.iter().position(|&gm| gm == 0.0 || !gm.is_finite()) {
            return Err(Error::ZeroCirculation(m));
        }
        let sorted = theta.windows(2).all(|w| w[0] < w[1]);
        let in_range = theta.first().map_or(false, |&t0| t0 >= 0.0)
            && theta.last().map_or(false, |&tl| tl < TAU);
        if !sorted || !in_range || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::UnsortedPhases);
        }
        if !mu.is_finite() {
            return Err(Error::LengthMismatch);
        }
        Ok(Self { a, mu, g, theta, growth })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Number of branches `M`.
    pub fn branches(&self) -> usize {
        self.g.len()
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Cached value of [`growth_constant`] for this family's pitch.
    pub fn growth(&self) -> Complex64 {
        self.growth
    }

    pub fn to_config(&self) -> FamilyConfig {
        FamilyConfig {
            a: self.a,
            mu: self.mu,
            g: self.g.clone(),
            theta: self.theta.clone(),
        }
    }

    /// Same family with a different self-similarity exponent.
    pub fn with_mu(&self, mu: f64) -> Self {
        let mut out = self.clone();
        out.mu = mu;
        out
    }

    /// Same family with rescaled circulation coefficients.
    pub fn with_g_scaled(&self, factor: f64) -> Result<Self> {
        let mut cfg = self.to_config();
        for gm in &mut cfg.g {
            *gm *= factor;
        }
        Self::new(cfg)
    }
}

/// A plane point in polar coordinates with an *unreduced* angle: any real
/// `theta` is admitted and `z = r exp(i theta)` identifies the same point
/// for `theta + 2*pi*l`. Winding-number arithmetic keeps field values
/// consistent across that redundancy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        debug_assert!(r > 0.0, "polar radius must be positive");
        Self { r, theta }
    }

    /// Principal-angle representation of a nonzero complex point.
    pub fn from_complex(z: Complex64) -> Option<Self> {
        let r = z.norm();
        if r > 0.0 && r.is_finite() {
            Some(Self { r, theta: z.arg() })
        } else {
            None
        }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}
