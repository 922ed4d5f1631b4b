//! Winding numbers, sheet parametrization, region location and
//! distance-to-sheet queries.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::model::{PolarPoint, SpiralFamily};

/// One winding number per branch at a query point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindingVector(pub Vec<i64>);

impl WindingVector {
    pub fn get(&self, k: usize) -> i64 {
        self.0[k]
    }
}

/// Winding number of branch `k` at a point: the least integer `j` with
/// `a*(2*pi*j + theta_k - theta) + ln r > 0`. Computed in closed form as
/// `floor(s) + 1` with `s = (theta - theta_k - ln(r)/a) / (2*pi)`; the
/// floor-plus-one form also resolves the strict inequality when `s` is an
/// exact integer (a point on the branch itself).
pub fn winding_number(family: &SpiralFamily, p: PolarPoint, k: usize) -> i64 {
    let s = (p.theta - family.theta()[k] - p.r.ln() / family.a()) / TAU;
    s.floor() as i64 + 1
}

/// All branch winding numbers at once.
pub fn winding_vector(family: &SpiralFamily, p: PolarPoint) -> WindingVector {
    WindingVector(
        (0..family.branches())
            .map(|k| winding_number(family, p, k))
            .collect(),
    )
}

/// One-sided winding limits of branch `k` at a point of branch `m`:
/// `(J_right, J_left) = (1 if theta_k < theta_m, 1 if theta_k <= theta_m)`.
/// "Right" and "left" are relative to the orientation of increasing
/// parameter along branch `m`.
pub fn winding_limits(family: &SpiralFamily, m: usize, k: usize) -> Result<(i64, i64)> {
    let branches = family.branches();
    for index in [m, k] {
        if index >= branches {
            return Err(Error::BranchOutOfRange { index, branches });
        }
    }
    let (tm, tk) = (family.theta()[m], family.theta()[k]);
    Ok(((tk < tm) as i64, (tk <= tm) as i64))
}

/// A point of branch `m` at parameter `theta` and time `t`, with tangent,
/// unit normal (left of the tangent), cumulative circulation and vorticity
/// density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetPoint {
    pub branch: usize,
    pub theta: f64,
    pub t: f64,
    /// Position `Z = t^mu * exp(a*(theta - theta_m)) * exp(i*theta)`.
    pub position: Complex64,
    /// Parameter derivative; always `(a + i) * Z`.
    pub tangent: Complex64,
    /// Unit normal, the tangent rotated by +pi/2.
    pub unit_normal: Complex64,
    /// Circulation `g_m * t^(2mu-1) * exp(2a*(theta - theta_m))`.
    pub circulation: f64,
    /// Vorticity density, circulation derivative per unit arc length.
    pub density: f64,
}

/// Evaluates branch `m` of the sheet at parameter `theta`, time `t`.
pub fn sheet_point(family: &SpiralFamily, m: usize, theta: f64, t: f64) -> Result<SheetPoint> {
    let branches = family.branches();
    if m >= branches {
        return Err(Error::BranchOutOfRange { index: m, branches });
    }
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let a = family.a();
    let mu = family.mu();
    let gm = family.g()[m];
    let dtheta = theta - family.theta()[m];
    let radial = (a * dtheta).exp();
    let position = t.powf(mu) * radial * Complex64::from_polar(1.0, theta);
    let tangent = Complex64::new(a, 1.0) * position;
    let unit_normal = Complex64::i() * tangent / tangent.norm();
    let circulation = gm * t.powf(2.0 * mu - 1.0) * (2.0 * a * dtheta).exp();
    // d(circulation)/dtheta / |tangent|
    let density = 2.0 * a * gm * t.powf(mu - 1.0) * radial / (1.0 + a * a).sqrt();
    Ok(SheetPoint {
        branch: m,
        theta,
        t,
        position,
        tangent,
        unit_normal,
        circulation,
        density,
    })
}

/// Cheap signed-parameter proximity to the sheet at time 1: first-order
/// geometric distance `r * |delta| / sqrt(1 + a^2)` where `delta` is the
/// defect of the nearest winding equality. Accurate near the sheet, an
/// underestimate far from it; used to gate exact-formula evaluation.
pub fn sheet_proximity(family: &SpiralFamily, p: PolarPoint) -> f64 {
    let a = family.a();
    let ln_r = p.r.ln();
    let mut best = f64::INFINITY;
    for &tk in family.theta() {
        let j_star = (a * (p.theta - tk) - ln_r) / (TAU * a);
        let frac = (j_star - j_star.round()).abs();
        let delta = TAU * a * frac;
        best = best.min(p.r * delta / (1.0 + a * a).sqrt());
    }
    best
}

/// Default relative on-sheet tolerance; branch spacing scales with `r`.
pub fn on_sheet_tol(r: f64) -> f64 {
    1e-12 * r.max(1.0)
}

/// Result of locating a point relative to the sheet at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedPoint {
    /// Index of the inter-spiral gap containing the point: the branch whose
    /// arm is nearest radially outward.
    pub region: usize,
    pub winding: WindingVector,
    /// Distance to the nearest sheet branch.
    pub distance: f64,
}

/// Locates a point: region index, winding vector, and distance to the
/// sheet at time `t`. Fails with [`Error::OnSheet`] within tolerance.
pub fn locate_point(family: &SpiralFamily, p: PolarPoint, t: f64) -> Result<LocatedPoint> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let a = family.a();
    let mu = family.mu();
    let scale = t.powf(mu);
    let ln_r_scaled = (p.r / scale).ln();
    let z = p.to_complex();

    // Region: branch whose arm at this angle is nearest radially outward.
    let mut region = 0usize;
    let mut best_outer = f64::INFINITY;
    for (k, &tk) in family.theta().iter().enumerate() {
        let j = ((ln_r_scaled / a - p.theta + tk) / TAU).floor();
        let outer = a * (p.theta + TAU * (j + 1.0) - tk);
        if outer < best_outer {
            best_outer = outer;
            region = k;
        }
    }

    let mut distance = f64::INFINITY;
    for k in 0..family.branches() {
        distance = distance.min(branch_distance(family, k, z, p, t));
    }
    if distance <= on_sheet_tol(p.r) {
        return Err(Error::OnSheet);
    }

    // Winding is defined at the self-similar slice.
    let scaled = PolarPoint::new(p.r / scale, p.theta);
    Ok(LocatedPoint {
        region,
        winding: winding_vector(family, scaled),
        distance,
    })
}

/// Distance from `z` to branch `k` at time `t`, searching the winding
/// loops bracketing `|z|` plus one loop of margin on each side.
fn branch_distance(family: &SpiralFamily, k: usize, z: Complex64, p: PolarPoint, t: f64) -> f64 {
    let a = family.a();
    let tk = family.theta()[k];
    let scale = t.powf(family.mu());
    let arm = |theta_p: f64| scale * (a * (theta_p - tk)).exp() * Complex64::from_polar(1.0, theta_p);
    let d = |theta_p: f64| (z - arm(theta_p)).norm();

    let j0 = (((p.r / scale).ln() / a - p.theta + tk) / TAU).floor();
    let lo = p.theta + TAU * (j0 - 1.0) - PI;
    let hi = p.theta + TAU * (j0 + 2.0) + PI;

    const SAMPLES: usize = 512;
    let step = (hi - lo) / SAMPLES as f64;
    let mut best_i = 0usize;
    let mut best = f64::INFINITY;
    for i in 0..=SAMPLES {
        let v = d(lo + step * i as f64);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut lo_b = lo + step * best_i.saturating_sub(1) as f64;
    let mut hi_b = lo + step * (best_i + 1).min(SAMPLES) as f64;

    // Golden-section refinement.
    let inv_phi = 0.618_033_988_749_894_9_f64;
    let mut x1 = hi_b - inv_phi * (hi_b - lo_b);
    let mut x2 = lo_b + inv_phi * (hi_b - lo_b);
    let (mut f1, mut f2) = (d(x1), d(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi_b = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi_b - inv_phi * (hi_b - lo_b);
            f1 = d(x1);
        } else {
            lo_b = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo_b + inv_phi * (hi_b - lo_b);
            f2 = d(x2);
        }
    }
    f1.min(f2).min(best)
}
