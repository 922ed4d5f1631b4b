//! Closed-form evaluation of the self-similar velocity profile `w`, the
//! complex potential `Phi` and the pressure profile `q`, together with
//! one-sided sheet limits, space-time scalings and energy integrals.
//!
//! Complex powers `z^(iA)` are always computed as `exp(iA * (ln r + i theta))`
//! with the unreduced angle carried by `PolarPoint`; the winding number and
//! the phase must stay coupled or well-definedness under `theta -> theta + 2pi`
//! breaks.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{
    self, on_sheet_tol, sheet_proximity, winding_vector, WindingVector,
};
use crate::model::{PolarPoint, SpiralFamily};
use crate::quadrature::adaptive_integral;

fn ensure_off_sheet(family: &SpiralFamily, p: PolarPoint) -> Result<()> {
    if sheet_proximity(family, p) <= on_sheet_tol(p.r) {
        Err(Error::OnSheet)
    } else {
        Ok(())
    }
}

/// Branch-phase sum `D = sum_k g_k exp(A (theta_k + 2 pi J_k)) / (1 - exp(2 pi A))`
/// for a given winding vector.
fn phase_sum(family: &SpiralFamily, winding: &WindingVector) -> Complex64 {
    let growth = family.growth();
    let denom = Complex64::new(1.0, 0.0) - (TAU * growth).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, &gk) in family.g().iter().enumerate() {
        let exponent = growth * (family.theta()[k] + TAU * winding.get(k) as f64);
        sum += gk * exponent.exp();
    }
    sum / denom
}

fn wstar_from_phase_sum(family: &SpiralFamily, p: PolarPoint, d: Complex64) -> Complex64 {
    let ia = Complex64::i() * family.growth();
    let log_z = Complex64::new(p.r.ln(), p.theta);
    ia * d * ((ia - 1.0) * log_z).exp()
}

fn phi_from_phase_sum(family: &SpiralFamily, p: PolarPoint, d: Complex64) -> Complex64 {
    let ia = Complex64::i() * family.growth();
    let log_z = Complex64::new(p.r.ln(), p.theta);
    d * (ia * log_z).exp()
}

/// Velocity profile `w` at an off-sheet point, via the compact
/// `w* = D iA z^(iA-1)` form.
pub fn profile_w(family: &SpiralFamily, p: PolarPoint) -> Result<Complex64> {
    ensure_off_sheet(family, p)?;
    let d = phase_sum(family, &winding_vector(family, p));
    Ok(wstar_from_phase_sum(family, p, d).conj())
}

/// Velocity profile evaluated term by term from the defining branch sum.
/// Algebraically identical to [`profile_w`]; kept as a second route so the
/// two can be checked against each other.
pub fn profile_w_termwise(family: &SpiralFamily, p: PolarPoint) -> Result<Complex64> {
    ensure_off_sheet(family, p)?;
    let a = family.a();
    let growth = family.growth();
    let denom = Complex64::new(1.0, 0.0) - (TAU * growth).exp();
    let r_pow = (Complex64::new(2.0 * a, 0.0) / Complex64::new(a, 1.0) * p.r.ln()).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, &gk) in family.g().iter().enumerate() {
        let j = geometry::winding_number(family, p, k) as f64;
        let term = r_pow
            * (growth * (family.theta()[k] - p.theta)).exp()
            * (growth * TAU * j).exp()
            / denom;
        sum += 2.0 * a * gk / (p.r * Complex64::new(a, -1.0)) * term.conj();
    }
    Ok(Complex64::from_polar(1.0, p.theta) * sum)
}

/// Complex potential `Phi` at an off-sheet point; `w* = iA Phi / z`.
pub fn potential(family: &SpiralFamily, p: PolarPoint) -> Result<Complex64> {
    ensure_off_sheet(family, p)?;
    let d = phase_sum(family, &winding_vector(family, p));
    Ok(phi_from_phase_sum(family, p, d))
}

/// Pressure profile `q = -Re((2mu - 1) Phi - mu z w*) - |w|^2 / 2`.
pub fn pressure(family: &SpiralFamily, p: PolarPoint) -> Result<f64> {
    ensure_off_sheet(family, p)?;
    let d = phase_sum(family, &winding_vector(family, p));
    let wstar = wstar_from_phase_sum(family, p, d);
    let phi = phi_from_phase_sum(family, p, d);
    Ok(pressure_from_parts(family.mu(), p.to_complex(), phi, wstar))
}

fn pressure_from_parts(mu: f64, z: Complex64, phi: Complex64, wstar: Complex64) -> f64 {
    -((2.0 * mu - 1.0) * phi - mu * z * wstar).re - 0.5 * wstar.norm_sqr()
}

/// A full profile sample: velocity, potential, pressure and the region /
/// winding metadata of the query point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub w: Complex64,
    pub phi: Complex64,
    pub q: f64,
    pub region: usize,
    pub winding: WindingVector,
}

pub fn sample(family: &SpiralFamily, p: PolarPoint) -> Result<FieldSample> {
    let located = geometry::locate_point(family, p, 1.0)?;
    let d = phase_sum(family, &located.winding);
    let wstar = wstar_from_phase_sum(family, p, d);
    let phi = phi_from_phase_sum(family, p, d);
    Ok(FieldSample {
        w: wstar.conj(),
        phi,
        q: pressure_from_parts(family.mu(), p.to_complex(), phi, wstar),
        region: located.region,
        winding: located.winding,
    })
}

/// Physical velocity and pressure at a space-time point:
/// `v = t^(mu-1) w(z / t^mu)`, `p = t^(2mu-2) q(z / t^mu)`.
pub fn spacetime_fields(family: &SpiralFamily, z: Complex64, t: f64) -> Result<(Complex64, f64)> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let scale = t.powf(family.mu());
    let p = PolarPoint::from_complex(z / scale).ok_or(Error::OnSheet)?;
    let d = {
        ensure_off_sheet(family, p)?;
        phase_sum(family, &winding_vector(family, p))
    };
    let wstar = wstar_from_phase_sum(family, p, d);
    let phi = phi_from_phase_sum(family, p, d);
    let q = pressure_from_parts(family.mu(), p.to_complex(), phi, wstar);
    Ok((
        t.powf(family.mu() - 1.0) * wstar.conj(),
        t.powf(2.0 * family.mu() - 2.0) * q,
    ))
}

/// One-sided limits of velocity and pressure on a sheet branch, together
/// with their jump and average. All values are at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetTrace {
    pub w_right: Complex64,
    pub w_left: Complex64,
    pub jump: Complex64,
    pub average: Complex64,
    pub q_right: f64,
    pub q_left: f64,
}

/// Evaluates one-sided limits on branch `m` at parameter `theta`, time `t`,
/// by substituting the one-sided winding limits into the closed form.
pub fn sheet_trace(family: &SpiralFamily, m: usize, theta: f64, t: f64) -> Result<SheetTrace> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let branches = family.branches();
    if m >= branches {
        return Err(Error::BranchOutOfRange { index: m, branches });
    }
    let a = family.a();
    let mu = family.mu();
    let r = (a * (theta - family.theta()[m])).exp();
    let p = PolarPoint::new(r, theta);
    let z = p.to_complex();

    let mut j_right = Vec::with_capacity(branches);
    let mut j_left = Vec::with_capacity(branches);
    for k in 0..branches {
        let (jr, jl) = geometry::winding_limits(family, m, k)?;
        j_right.push(jr);
        j_left.push(jl);
    }
    let d_right = phase_sum(family, &WindingVector(j_right));
    let d_left = phase_sum(family, &WindingVector(j_left));

    let vel_scale = t.powf(mu - 1.0);
    let prs_scale = t.powf(2.0 * mu - 2.0);
    let wstar_r = wstar_from_phase_sum(family, p, d_right);
    let wstar_l = wstar_from_phase_sum(family, p, d_left);
    let phi_r = phi_from_phase_sum(family, p, d_right);
    let phi_l = phi_from_phase_sum(family, p, d_left);
    let w_right = vel_scale * wstar_r.conj();
    let w_left = vel_scale * wstar_l.conj();
    Ok(SheetTrace {
        w_right,
        w_left,
        jump: w_right - w_left,
        average: 0.5 * (w_right + w_left),
        q_right: prs_scale * pressure_from_parts(mu, z, phi_r, wstar_r),
        q_left: prs_scale * pressure_from_parts(mu, z, phi_l, wstar_l),
    })
}

/// Closed-form tangential velocity jump across branch `m`:
/// `(2a/(a^2+1)) g_m t^(mu-1) exp(a(theta - theta_m)) exp(i theta) (a + i)`.
pub fn jump_closed_form(family: &SpiralFamily, m: usize, theta: f64, t: f64) -> Complex64 {
    let a = family.a();
    let gm = family.g()[m];
    2.0 * a / (a * a + 1.0)
        * gm
        * t.powf(family.mu() - 1.0)
        * (a * (theta - family.theta()[m])).exp()
        * Complex64::from_polar(1.0, theta)
        * Complex64::new(a, 1.0)
}

/// Kinetic energy of the profile in a ball of radius `r` around the origin.
/// Equals `C(family) * r^4`; the constant is a one-dimensional integral of
/// `|w|^2` over the unit circle in spiral coordinates, split at the branch
/// crossing angles where the integrand jumps.
pub fn energy_in_ball(family: &SpiralFamily, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    let integrand = |theta_p: f64| {
        let p = PolarPoint::new(1.0, theta_p);
        let value = profile_w(family, p)
            .or_else(|_| profile_w(family, PolarPoint::new(1.0, theta_p + 1e-11)))
            .expect("integration nodes lie off the sheet");
        Complex64::new(value.norm_sqr(), 0.0)
    };
    // The unit circle crosses branch k exactly at angle theta_k.
    let mut splits = vec![0.0];
    for &tk in family.theta() {
        if tk > 0.0 && tk < TAU {
            splits.push(tk);
        }
    }
    splits.push(TAU);
    splits.sort_by(|a, b| a.partial_cmp(b).unwrap());
    splits.dedup();
    let (value, _err, _n) = adaptive_integral(&integrand, &splits, 1e-12, 1e-11, 4000)
        .expect("energy integrand is piecewise smooth");
    Ok(r.powi(4) / 4.0 * value.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FamilyConfig;
    use std::f64::consts::PI;

    fn family(a: f64, mu: f64, g: &[f64], theta: &[f64]) -> SpiralFamily {
        SpiralFamily::new(FamilyConfig { a, mu, g: g.to_vec(), theta: theta.to_vec() }).unwrap()
    }

    fn prandtl_solved() -> SpiralFamily {
        family(1.0, 0.0, &[PI.tanh()], &[0.0])
    }

    #[test]
    fn profile_value_at_half() {
        let fam = prandtl_solved();
        let w = profile_w(&fam, PolarPoint::new(0.5, 0.0)).unwrap();
        assert!((w - Complex64::new(0.0026247, 0.0002427)).norm() < 1e-6, "w = {w}");
    }

    #[test]
    fn termwise_agrees_with_closed_form() {
        let fam = family(0.8, 0.3, &[1.0, -0.5, 2.0], &[0.1, 1.9, 4.0]);
        for &(r, th) in &[(0.3, 0.4), (2.0, -7.7), (17.0, 12.0), (1e-4, 0.05)] {
            let p = PolarPoint::new(r, th);
            let w1 = profile_w(&fam, p).unwrap();
            let w2 = profile_w_termwise(&fam, p).unwrap();
            assert!((w1 - w2).norm() <= 1e-13 * w1.norm().max(1e-300), "{w1} vs {w2}");
        }
    }

    #[test]
    fn scaling_equivariance() {
        let fam = family(1.3, 0.2, &[0.7, 1.1], &[0.5, 3.0]);
        let p = PolarPoint::new(0.9, 1.3);
        let w = profile_w(&fam, p).unwrap();
        for &alpha in &[0.3, -1.7, 5.0] {
            let shifted = PolarPoint::new(p.r * (fam.a() * alpha).exp(), p.theta + alpha);
            let ws = profile_w(&fam, shifted).unwrap();
            let factor = Complex64::new(fam.a() * alpha, alpha).exp();
            assert!((ws - factor * w).norm() < 1e-12 * ws.norm());
        }
    }

    #[test]
    fn full_turn_well_defined() {
        let fam = family(0.6, -0.4, &[1.0, 2.0], &[0.0, 2.5]);
        for &(r, th) in &[(0.45, 0.8), (6.0, -2.0)] {
            let w0 = profile_w(&fam, PolarPoint::new(r, th)).unwrap();
            let w1 = profile_w(&fam, PolarPoint::new(r, th + TAU)).unwrap();
            let w2 = profile_w(&fam, PolarPoint::new(r, th - 3.0 * TAU)).unwrap();
            assert!((w0 - w1).norm() < 1e-12 * w0.norm());
            assert!((w0 - w2).norm() < 1e-12 * w0.norm());
        }
    }

    #[test]
    fn potential_is_w_over_ia_times_z() {
        let fam = family(1.0, 0.1, &[0.9], &[1.0]);
        let p = PolarPoint::new(0.7, 0.2);
        let phi = potential(&fam, p).unwrap();
        let wstar = profile_w(&fam, p).unwrap().conj();
        let ia = Complex64::i() * fam.growth();
        let expect = p.to_complex() / ia * wstar;
        assert!((phi - expect).norm() < 1e-14 * phi.norm());
    }

    #[test]
    fn potential_derivative_matches_wstar() {
        let fam = prandtl_solved();
        let z = Complex64::new(0.6, 0.35);
        let wstar = profile_w(&fam, PolarPoint::from_complex(z).unwrap())
            .unwrap()
            .conj();
        let phi_at = |z: Complex64| {
            potential(&fam, PolarPoint::from_complex(z).unwrap()).unwrap()
        };
        let mut errs = Vec::new();
        for &h in &[1e-4, 5e-5] {
            let d = (phi_at(z + h) - phi_at(z - h)) / (2.0 * h);
            errs.push((d - wstar).norm());
        }
        assert!(errs[1] < errs[0] / 3.0, "not O(h^2): {errs:?}");
        assert!(errs[1] < 1e-8);
    }

    #[test]
    fn pressure_half_mu_drops_potential_term() {
        let fam = family(1.0, 0.5, &[1.2], &[0.3]);
        let p = PolarPoint::new(0.8, 1.1);
        let q = pressure(&fam, p).unwrap();
        let w = profile_w(&fam, p).unwrap();
        let wstar = w.conj();
        let expect = (0.5 * p.to_complex() * wstar).re - 0.5 * w.norm_sqr();
        assert!((q - expect).abs() < 1e-14 * q.abs().max(1.0));
    }

    #[test]
    fn spacetime_scalings() {
        let fam = family(0.9, 0.35, &[1.0, -1.4], &[0.2, 3.3]);
        let z = Complex64::new(0.4, 0.9);
        let (v1, p1) = spacetime_fields(&fam, z, 1.0).unwrap();
        let p = PolarPoint::from_complex(z).unwrap();
        assert!((v1 - profile_w(&fam, p).unwrap()).norm() < 1e-15);
        assert!((p1 - pressure(&fam, p).unwrap()).abs() < 1e-15);

        let mu = fam.mu();
        let (v2, p2) = spacetime_fields(&fam, z * 2.0_f64.powf(mu), 2.0).unwrap();
        assert!((v2 * 2.0_f64.powf(1.0 - mu) - v1).norm() < 1e-13 * v1.norm());
        assert!((p2 * 2.0_f64.powf(2.0 - 2.0 * mu) - p1).abs() < 1e-13 * p1.abs().max(1.0));
    }

    #[test]
    fn jump_example_and_tangency() {
        let fam = family(1.0, 0.0, &[1.0], &[0.0]);
        let tr = sheet_trace(&fam, 0, 0.0, 1.0).unwrap();
        assert!((tr.jump - Complex64::new(1.0, 1.0)).norm() < 1e-12);
        assert!((tr.jump - jump_closed_form(&fam, 0, 0.0, 1.0)).norm() < 1e-12);

        let fam2 = family(0.7, 0.4, &[1.0, -2.0, 0.5], &[0.1, 2.0, 4.4]);
        for m in 0..3 {
            for &th in &[-2.0, 0.4, 9.0] {
                let tr = sheet_trace(&fam2, m, th, 1.3).unwrap();
                let sp = geometry::sheet_point(&fam2, m, th, 1.3).unwrap();
                // normal component of the jump vanishes
                let n_dot = (tr.jump * sp.unit_normal.conj()).re;
                assert!(n_dot.abs() < 1e-12 * tr.jump.norm());
                // tangential component equals the vorticity density
                let t_dot = (tr.jump * (sp.tangent / sp.tangent.norm()).conj()).re;
                assert!((t_dot - sp.density).abs() < 1e-10 * sp.density.abs());
                // closed form
                let cf = jump_closed_form(&fam2, m, th, 1.3);
                assert!((tr.jump - cf).norm() < 1e-12 * cf.norm());
            }
        }
    }

    #[test]
    fn one_sided_limits_attained() {
        let fam = family(1.1, 0.2, &[1.0, 0.8], &[0.4, 2.9]);
        let m = 1;
        let theta = 0.9;
        let tr = sheet_trace(&fam, m, theta, 1.0).unwrap();
        let sp = geometry::sheet_point(&fam, m, theta, 1.0).unwrap();
        let eps = 1e-9 * sp.position.norm();
        // left is the +normal side
        let z_left = sp.position + eps * sp.unit_normal;
        let z_right = sp.position - eps * sp.unit_normal;
        let wl = profile_w(&fam, PolarPoint::from_complex(z_left).unwrap()).unwrap();
        let wr = profile_w(&fam, PolarPoint::from_complex(z_right).unwrap()).unwrap();
        assert!((wl - tr.w_left).norm() < 1e-8, "left err {}", (wl - tr.w_left).norm());
        assert!((wr - tr.w_right).norm() < 1e-8, "right err {}", (wr - tr.w_right).norm());
    }

    #[test]
    fn energy_r4_law() {
        let fam = family(0.8, 0.15, &[1.0, -0.6], &[0.3, 2.2]);
        let e1 = energy_in_ball(&fam, 1.0).unwrap();
        let e2 = energy_in_ball(&fam, 2.0).unwrap();
        assert!((e2 / e1 - 16.0).abs() < 1e-10);
        assert!(energy_in_ball(&fam, 0.0).is_err());
    }

    #[test]
    fn energy_matches_2d_quadrature() {
        let fam = prandtl_solved();
        let e = energy_in_ball(&fam, 1.0).unwrap();
        // brute-force 2D polar quadrature of |w|^2 over the unit ball
        let (n_r, n_t) = (600, 600);
        let mut total = 0.0;
        for i in 0..n_r {
            let rho = (i as f64 + 0.5) / n_r as f64;
            for j in 0..n_t {
                let th = TAU * (j as f64 + 0.5) / n_t as f64;
                let w = profile_w(&fam, PolarPoint::new(rho, th)).unwrap();
                total += w.norm_sqr() * rho;
            }
        }
        total *= TAU / (n_r as f64 * n_t as f64);
        assert!((e - total).abs() < 0.01 * e, "closed {e} vs 2d {total}");
    }
}
