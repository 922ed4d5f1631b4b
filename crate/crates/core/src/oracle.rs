//! Independent numerical cross-checks of the closed forms: a Biot-Savart
//! quadrature route to the velocity, finite-difference interior Euler
//! residuals, sheet matching residuals from one-sided limits, and a
//! space-time weak-form residual against random divergence-free test
//! fields.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use crate::constraint::compatibility_check;
use crate::error::{Error, Result};
use crate::field;
use crate::geometry::{self, on_sheet_tol, sheet_proximity};
use crate::model::{PolarPoint, SpiralFamily};
use crate::parallel::par_map;
use crate::quadrature::adaptive_integral;

/// Outcome of one Biot-Savart quadrature evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureResult {
    /// Velocity at the query space-time point.
    pub value: Complex64,
    /// Propagated quadrature error estimate on the velocity.
    pub error_estimate: f64,
    /// Number of adaptive subintervals used across both integrand forms.
    pub splits: usize,
    /// Truncation bounds `(sigma_minus, sigma_plus)` of the real line.
    pub tail_cutoffs: (f64, f64),
}

/// Location of the integrand pole indexed by `(k, l)` for a query at
/// log-radius `ln r`, in the complex sigma plane.
pub fn pole_location(a: f64, ln_r: f64, delta_k: f64, l: i64) -> Complex64 {
    // solves exp((a+i) sigma + i delta_k) = r
    Complex64::new(ln_r, -(delta_k + TAU * l as f64)) / Complex64::new(a, 1.0)
}

/// Closed-form value of the line integral `I = (1/2 pi i) int f`, obtained
/// by summing the geometric residue series. Used as the internal
/// consistency target for both the explicit residue sum and the
/// quadrature.
pub fn closed_form_integral(family: &SpiralFamily, p: PolarPoint) -> Complex64 {
    let a = family.a();
    let growth = family.growth();
    let winding = geometry::winding_vector(family, p);
    let denom = Complex64::new(1.0, 0.0) - (TAU * growth).exp();
    let r_pow = (Complex64::new(2.0 * a, 0.0) / Complex64::new(a, 1.0) * p.r.ln()).exp();
    let mut sum = Complex64::new(0.0, 0.0);
    for (k, &gk) in family.g().iter().enumerate() {
        let delta = family.theta()[k] - p.theta;
        sum += gk * (growth * (delta + TAU * winding.get(k) as f64)).exp();
    }
    r_pow / (Complex64::new(a, 1.0) * p.r) * sum / denom
}

/// The same integral summed residue by residue, truncating the geometric
/// series once terms stop contributing. Cross-checks [`closed_form_integral`]
/// without invoking any quadrature.
pub fn residue_sum_integral(family: &SpiralFamily, p: PolarPoint) -> Complex64 {
    let a = family.a();
    let winding = geometry::winding_vector(family, p);
    let mut total = Complex64::new(0.0, 0.0);
    for (k, &gk) in family.g().iter().enumerate() {
        let delta = family.theta()[k] - p.theta;
        for l in winding.get(k)..winding.get(k) + 400 {
            let sigma = pole_location(a, p.r.ln(), delta, l);
            let term = gk * (2.0 * a * sigma).exp() / (Complex64::new(a, 1.0) * p.r);
            total += term;
            if term.norm() < 1e-18 * total.norm().max(1e-300) {
                break;
            }
        }
    }
    total
}

fn integrand_forms(
    family: &SpiralFamily,
    r: f64,
    theta: f64,
) -> (impl Fn(f64) -> Complex64 + '_, impl Fn(f64) -> Complex64 + '_) {
    let a = family.a();
    let deltas: Vec<f64> = family.theta().iter().map(|tk| tk - theta).collect();
    let g = family.g().to_vec();
    let deltas2 = deltas.clone();
    let g2 = g.clone();
    let near = move |sigma: f64| {
        let mut sum = Complex64::new(0.0, 0.0);
        for (gk, dk) in g.iter().zip(&deltas) {
            let e = (Complex64::new(a, 1.0) * sigma + Complex64::new(0.0, *dk)).exp();
            sum += gk * (2.0 * a * sigma).exp() / (r - e);
        }
        sum
    };
    let far = move |sigma: f64| {
        let mut sum = Complex64::new(0.0, 0.0);
        for (gk, dk) in g2.iter().zip(&deltas2) {
            let e = (Complex64::new(a, 1.0) * sigma + Complex64::new(0.0, *dk)).exp();
            sum += gk * r * r * Complex64::from_polar(1.0, -2.0 * (sigma + dk)) / (r - e);
        }
        sum
    };
    (near, far)
}

/// Biot-Savart velocity at `(z, t)` by adaptive quadrature over the real
/// sigma line, with the default split between the two integrand forms at 0.
pub fn biot_savart_quadrature(
    family: &SpiralFamily,
    z: Complex64,
    t: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    biot_savart_quadrature_split(family, z, t, tol, 0.0)
}

/// Same as [`biot_savart_quadrature`] but with a caller-chosen form split
/// point; the result must not depend on it, which the caller can use as an
/// extra consistency check.
pub fn biot_savart_quadrature_split(
    family: &SpiralFamily,
    z: Complex64,
    t: f64,
    tol: f64,
    sigma_split: f64,
) -> Result<QuadratureResult> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if !compatibility_check(family).0 {
        return Err(Error::CompatibilityViolated);
    }
    let a = family.a();
    let mu = family.mu();
    let scale = t.powf(mu);
    let p = PolarPoint::from_complex(z / scale).ok_or(Error::OnSheet)?;
    if sheet_proximity(family, p) <= on_sheet_tol(p.r) {
        return Err(Error::OnSheet);
    }
    let r = p.r;
    let gsum: f64 = family.g().iter().map(|g| g.abs()).sum();
    let vel_scale = t.powf(mu - 1.0);
    // |velocity| = (a/pi) * |int f| * t^(mu-1), so the tolerance on the raw
    // integral is scaled the other way.
    let quad_tol = (tol * PI / (a * vel_scale)).max(1e-15);

    // Tail cutoffs: beyond them each form is bounded by an explicit
    // geometric envelope whose tail integral stays below quad_tol / 20.
    let sigma_minus = ((r / 2.0).ln() / a).min((quad_tol * a * r / (20.0 * gsum)).ln() / (2.0 * a));
    let sigma_plus = ((2.0 * r).ln() / a).max(-(quad_tol * a / (40.0 * r * r * gsum)).ln() / a);
    if sigma_split <= sigma_minus || sigma_split >= sigma_plus {
        return Err(Error::ToleranceNotMet { estimate: f64::INFINITY });
    }

    let (near, far) = integrand_forms(family, r, p.theta);

    // The two forms agree pointwise exactly when the compatibility sums
    // vanish; assert rather than assume.
    for probe in [sigma_split - 0.4, sigma_split, sigma_split + 0.4] {
        let (n, f) = (near(probe), far(probe));
        let envelope = gsum * ((a * probe).exp() + r);
        if (n - f).norm() > 1e-8 * (n.norm() + f.norm()) + 1e-8 * envelope {
            return Err(Error::CompatibilityViolated);
        }
    }

    // Subdivision seeds at the real parts of every pole inside the window.
    let mut left = vec![sigma_minus, sigma_split];
    let mut right = vec![sigma_split, sigma_plus];
    let ln_r = r.ln();
    for &tk in family.theta() {
        let delta = tk - p.theta;
        let l_lo = ((a * ln_r - delta - (1.0 + a * a) * sigma_plus) / TAU).ceil() as i64;
        let l_hi = ((a * ln_r - delta - (1.0 + a * a) * sigma_minus) / TAU).floor() as i64;
        for l in l_lo..=l_hi {
            let re = pole_location(a, ln_r, delta, l).re;
            if re > sigma_minus && re < sigma_split {
                left.push(re);
            } else if re > sigma_split && re < sigma_plus {
                right.push(re);
            }
        }
    }
    for list in [&mut left, &mut right] {
        list.sort_by(|x, y| x.partial_cmp(y).unwrap());
        list.dedup();
    }

    let (v1, e1, n1) = adaptive_integral(&near, &left, quad_tol / 2.0, 0.0, 6000)?;
    let (v2, e2, n2) = adaptive_integral(&far, &right, quad_tol / 2.0, 0.0, 6000)?;
    let integral = (v1 + v2) / Complex64::new(0.0, TAU);
    let velocity =
        vel_scale * Complex64::from_polar(1.0, p.theta) * (2.0 * a * integral).conj();
    Ok(QuadratureResult {
        value: velocity,
        error_estimate: (e1 + e2) * a / PI * vel_scale,
        splits: n1 + n2,
        tail_cutoffs: (sigma_minus, sigma_plus),
    })
}

/// Max-norm of the self-similar interior Euler residual
/// `grad q + (mu - 1) w - mu (z . grad) w + (w . grad) w`
/// assembled by second-order central differences with step `h`.
pub fn interior_euler_residual(family: &SpiralFamily, z: Complex64, h: f64) -> Result<f64> {
    let p = PolarPoint::from_complex(z).ok_or(Error::OnSheet)?;
    let located = geometry::locate_point(family, p, 1.0)?;
    if located.distance <= 4.0 * h {
        return Err(Error::StencilCrossesSheet { h, distance: located.distance });
    }
    let w_at = |z: Complex64| -> Result<Complex64> {
        field::profile_w(family, PolarPoint::from_complex(z).ok_or(Error::OnSheet)?)
    };
    let q_at = |z: Complex64| -> Result<f64> {
        field::pressure(family, PolarPoint::from_complex(z).ok_or(Error::OnSheet)?)
    };
    let ex = Complex64::new(h, 0.0);
    let ey = Complex64::new(0.0, h);
    let wx = (w_at(z + ex)? - w_at(z - ex)?) / (2.0 * h);
    let wy = (w_at(z + ey)? - w_at(z - ey)?) / (2.0 * h);
    let grad_q = Complex64::new(
        (q_at(z + ex)? - q_at(z - ex)?) / (2.0 * h),
        (q_at(z + ey)? - q_at(z - ey)?) / (2.0 * h),
    );
    let w = w_at(z)?;
    let mu = family.mu();
    let residual = grad_q + (mu - 1.0) * w - mu * (z.re * wx + z.im * wy) + (w.re * wx + w.im * wy);
    Ok(residual.re.abs().max(residual.im.abs()))
}

/// Normalized matching residuals at `t = 1` from one-sided sheet limits:
/// the normal component of the pseudovelocity (using the average of the
/// two limits) and the pressure jump, each with the `exp(2a(theta -
/// theta_m))` growth divided out.
pub fn matching_residuals(
    family: &SpiralFamily,
    samples: &[(usize, f64)],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mu = family.mu();
    let a = family.a();
    let mut vel = Vec::with_capacity(samples.len());
    let mut pres = Vec::with_capacity(samples.len());
    for &(m, theta) in samples {
        let trace = field::sheet_trace(family, m, theta, 1.0)?;
        let sp = geometry::sheet_point(family, m, theta, 1.0)?;
        let pseudo = trace.average - mu * sp.position;
        let normal_part = (pseudo * sp.unit_normal.conj()).re;
        vel.push(normal_part * sp.tangent.norm() / sp.position.norm_sqr());
        let growth = family.g()[m] * (2.0 * a * (theta - family.theta()[m])).exp();
        pres.push((trace.q_right - trace.q_left) / growth);
    }
    Ok((vel, pres))
}

/// A divergence-free space-time test field: the perpendicular gradient of
/// `psi(x, t) = (1 - |x - center|^2 / radius^2)^4 (1 - ((t - t_center) /
/// t_half)^2)^4`, supported on a disc times a time interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestField {
    pub center: Complex64,
    pub radius: f64,
    pub t_center: f64,
    pub t_half: f64,
}

/// Spatial bump factor and its first two radial-polynomial derivatives at
/// squared offset `m = |x - center|^2`.
fn bump_parts(radius: f64, m: f64) -> (f64, f64, f64) {
    let r2 = radius * radius;
    let u = 1.0 - m / r2;
    if u <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let s = u.powi(4);
    let sp = -4.0 * u.powi(3) / r2;
    let spp = 12.0 * u.powi(2) / (r2 * r2);
    (s, sp, spp)
}

struct TestFieldEval {
    /// phi as a complex vector (phi_1 + i phi_2)
    dt_phi: Complex64,
    /// entries (d1 phi1, d1 phi2, d2 phi1, d2 phi2)
    grad: [f64; 4],
}

impl TestField {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let rho: f64 = rng.gen_range(0.5..2.0);
        let angle: f64 = rng.gen_range(0.0..TAU);
        let center = Complex64::from_polar(rho, angle);
        let radius = rng.gen_range(0.2..0.5) * rho;
        let t_center = rng.gen_range(0.8..1.2);
        Self { center, radius, t_center, t_half: 0.2 * t_center }
    }

    fn eval(&self, x: Complex64, t: f64) -> TestFieldEval {
        let dx = x - self.center;
        let (_s, sp, spp) = bump_parts(self.radius, dx.norm_sqr());
        let tau = (t - self.t_center) / self.t_half;
        let ut = 1.0 - tau * tau;
        let (b, bdot) = if ut <= 0.0 {
            (0.0, 0.0)
        } else {
            (ut.powi(4), -8.0 * tau * ut.powi(3) / self.t_half)
        };
        // psi = S(x) B(t), phi = (-psi_y, psi_x)
        let sx = sp * 2.0 * dx.re;
        let sy = sp * 2.0 * dx.im;
        let sxx = spp * 4.0 * dx.re * dx.re + 2.0 * sp;
        let syy = spp * 4.0 * dx.im * dx.im + 2.0 * sp;
        let sxy = spp * 4.0 * dx.re * dx.im;
        TestFieldEval {
            dt_phi: bdot * Complex64::new(-sy, sx),
            grad: [-b * sxy, b * sxx, -b * syy, b * sxy],
        }
    }
}

/// Resolution and budget for the weak-form quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakFormQuadSpec {
    /// Base cell count per axis (radius, angle, time around the support).
    pub cells: usize,
    /// Extra halvings allowed for cells near the sheet.
    pub refine_depth: u8,
    /// Maximum number of leaf cells before giving up.
    pub budget: usize,
}

impl Default for WeakFormQuadSpec {
    fn default() -> Self {
        Self { cells: 6, refine_depth: 4, budget: 400_000 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    rho: (f64, f64),
    phi: (f64, f64),
    t: (f64, f64),
    depth: u8,
}

const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Distance from the space point `x` to the sheet at time `t`, via the
/// cheap proximity estimate on the self-similar slice.
fn sheet_distance_estimate(family: &SpiralFamily, x: Complex64, t: f64) -> f64 {
    let scale = t.powf(family.mu());
    match PolarPoint::from_complex(x / scale) {
        Some(p) => sheet_proximity(family, p) * scale,
        None => 0.0,
    }
}

/// Relative size of the weak-form defect of one test field:
/// `|int int (v . dt_phi + sum v_i v_j d_i phi_j)|` over the same integral
/// of absolute values. Zero (up to quadrature error) exactly when the
/// family is a weak Euler solution on the field's support.
pub fn weak_form_ratio(
    family: &SpiralFamily,
    tf: &TestField,
    spec: &WeakFormQuadSpec,
) -> Result<f64> {
    let n = spec.cells.max(1);
    let mut stack: Vec<Cell> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let f = |idx: usize, lo: f64, hi: f64| {
                    let w = (hi - lo) / n as f64;
                    (lo + w * idx as f64, lo + w * (idx + 1) as f64)
                };
                stack.push(Cell {
                    rho: f(i, 0.0, tf.radius),
                    phi: f(j, 0.0, TAU),
                    t: f(k, tf.t_center - tf.t_half, tf.t_center + tf.t_half),
                    depth: 0,
                });
            }
        }
    }

    let mu = family.mu();
    let mut leaves: Vec<Cell> = Vec::new();
    while let Some(cell) = stack.pop() {
        if leaves.len() + stack.len() > spec.budget {
            return Err(Error::QuadratureBudgetExceeded(spec.budget));
        }
        let rho_c = 0.5 * (cell.rho.0 + cell.rho.1);
        let phi_c = 0.5 * (cell.phi.0 + cell.phi.1);
        let t_c = 0.5 * (cell.t.0 + cell.t.1);
        let x_c = tf.center + Complex64::from_polar(rho_c, phi_c);
        let d = sheet_distance_estimate(family, x_c, t_c);
        // sheet motion over the cell's time extent, first order in mu
        let sweep = mu.abs() * x_c.norm() / t_c * (cell.t.1 - cell.t.0);
        let extent = (cell.rho.1 - cell.rho.0)
            .max(cell.rho.1 * (cell.phi.1 - cell.phi.0))
            .max(sweep);
        if cell.depth < spec.refine_depth && d < 1.5 * extent {
            let mids = (
                0.5 * (cell.rho.0 + cell.rho.1),
                0.5 * (cell.phi.0 + cell.phi.1),
                0.5 * (cell.t.0 + cell.t.1),
            );
            for &r_half in &[(cell.rho.0, mids.0), (mids.0, cell.rho.1)] {
                for &p_half in &[(cell.phi.0, mids.1), (mids.1, cell.phi.1)] {
                    for &t_half in &[(cell.t.0, mids.2), (mids.2, cell.t.1)] {
                        stack.push(Cell {
                            rho: r_half,
                            phi: p_half,
                            t: t_half,
                            depth: cell.depth + 1,
                        });
                    }
                }
            }
        } else {
            leaves.push(cell);
        }
    }

    let contributions = par_map(&leaves, |cell| -> Result<(f64, f64)> {
        let half = |lohi: (f64, f64)| (0.5 * (lohi.1 - lohi.0), 0.5 * (lohi.0 + lohi.1));
        let (hr, cr) = half(cell.rho);
        let (hp, cp) = half(cell.phi);
        let (ht, ct) = half(cell.t);
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, &xi) in GL4_X.iter().enumerate() {
            let rho = cr + hr * xi;
            for (j, &xj) in GL4_X.iter().enumerate() {
                let ang = cp + hp * xj;
                let x = tf.center + Complex64::from_polar(rho, ang);
                for (k, &xk) in GL4_X.iter().enumerate() {
                    let t = ct + ht * xk;
                    let v = match field::spacetime_fields(family, x, t) {
                        Ok((v, _p)) => v,
                        Err(Error::OnSheet) => {
                            // nudge a quadrature node that happens to land
                            // on the sheet
                            let x2 = tf.center
                                + Complex64::from_polar(rho + 1e-9 * tf.radius, ang);
                            field::spacetime_fields(family, x2, t)?.0
                        }
                        Err(e) => return Err(e),
                    };
                    let fe = tf.eval(x, t);
                    let dot_t = v.re * fe.dt_phi.re + v.im * fe.dt_phi.im;
                    let quad = v.re * v.re * fe.grad[0]
                        + v.re * v.im * (fe.grad[1] + fe.grad[2])
                        + v.im * v.im * fe.grad[3];
                    let grad_norm = (fe.grad.iter().map(|g| g * g).sum::<f64>()).sqrt();
                    let weight = GL4_W[i] * GL4_W[j] * GL4_W[k] * hr * hp * ht * rho;
                    num += weight * (dot_t + quad);
                    den += weight
                        * (v.norm() * fe.dt_phi.norm() + v.norm_sqr() * grad_norm);
                }
            }
        }
        Ok((num, den))
    });

    let mut num = 0.0;
    let mut den = 0.0;
    for c in contributions {
        let (n, d) = c?;
        num += n;
        den += d;
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(num.abs() / den)
}

/// Weak-form ratios against `test_count` seeded random test fields.
pub fn weak_form_residual(
    family: &SpiralFamily,
    test_count: usize,
    spec: &WeakFormQuadSpec,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fields: Vec<TestField> = (0..test_count).map(|_| TestField::random(&mut rng)).collect();
    fields.iter().map(|tf| weak_form_ratio(family, tf, spec)).collect()
}
