//! Verification suites behind `spiralsheet verify`.
//!
//! Each check exercises one library operation against an independent
//! computation (randomized identities, brute-force oracles, or quadrature
//! cross-checks) and reports a worst-case residual against a tolerance.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;

use spiral_sheet::constraint::compatibility_check;
use spiral_sheet::{field, geometry, oracle, Error, PolarPoint, SpiralFamily};

#[derive(Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
}

fn check(name: &str, max_residual: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        max_residual: Some(max_residual),
        pass: max_residual <= tolerance,
        tolerance,
        skipped: None,
    }
}

fn skipped(name: &str, tolerance: f64, reason: &str) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        max_residual: None,
        tolerance,
        pass: true,
        skipped: Some(reason.to_string()),
    }
}

fn random_polar<R: Rng>(rng: &mut R) -> PolarPoint {
    let r = 10f64.powf(rng.gen_range(-3.0..3.0));
    let theta = rng.gen_range(-12.0..12.0);
    PolarPoint::new(r, theta)
}

fn winding_suite(family: &SpiralFamily, tol: Option<f64>, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let a = family.a();
    let n = 100_000;
    let mut shift_res: f64 = 0.0;
    let mut bounds_res: f64 = 0.0;
    let mut least_res: f64 = 0.0;
    for _ in 0..n {
        let p = random_polar(rng);
        let k = rng.gen_range(0..family.branches());
        let tk = family.theta()[k];
        let j = geometry::winding_number(family, p, k);
        let shifted = geometry::winding_number(family, PolarPoint::new(p.r, p.theta + TAU), k);
        shift_res = shift_res.max((shifted - j - 1).abs() as f64);
        // strict bounds: s < J <= s + 1 with s = -(ln r / a + tk - theta)/2pi
        let s = -(p.r.ln() / a + tk - p.theta) / TAU;
        if !(s < j as f64 && j as f64 <= s + 1.0) {
            bounds_res = bounds_res.max((j as f64 - s).abs().max(1.0));
        }
        // defining inequality holds at J and fails at J - 1
        let ineq = |jj: i64| a * (TAU * jj as f64 + tk - p.theta) + p.r.ln() > 0.0;
        if !ineq(j) || ineq(j - 1) {
            least_res = 1.0;
        }
    }
    let mut limit_res = 0.0;
    for m in 0..family.branches() {
        for k in 0..family.branches() {
            let (jr, jl) = geometry::winding_limits(family, m, k).unwrap();
            let (tm, tk) = (family.theta()[m], family.theta()[k]);
            let want = ((tk < tm) as i64, (tk <= tm) as i64);
            if (jr, jl) != want {
                limit_res = 1.0;
            }
        }
    }
    vec![
        check("winding_full_turn_shift", shift_res, tol.unwrap_or(0.0)),
        check("winding_bounds", bounds_res, tol.unwrap_or(0.0)),
        check("winding_least_integer", least_res, tol.unwrap_or(0.0)),
        check("winding_one_sided_limits", limit_res, tol.unwrap_or(0.0)),
    ]
}

fn field_suite(family: &SpiralFamily, tol: Option<f64>, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut form_res: f64 = 0.0;
    for _ in 0..20_000 {
        let p = random_polar(rng);
        if let (Ok(w1), Ok(w2)) = (
            field::profile_w(family, p),
            field::profile_w_termwise(family, p),
        ) {
            form_res = form_res.max((w1 - w2).norm() / w1.norm().max(1e-300));
        }
    }

    let mut scale_res: f64 = 0.0;
    for _ in 0..2_000 {
        let p = random_polar(rng);
        let alpha = rng.gen_range(-2.0..2.0);
        let shifted = PolarPoint::new(p.r * (family.a() * alpha).exp(), p.theta + alpha);
        if let (Ok(w), Ok(ws)) = (field::profile_w(family, p), field::profile_w(family, shifted)) {
            let factor = Complex64::new(family.a() * alpha, alpha).exp();
            scale_res = scale_res.max((ws - factor * w).norm() / ws.norm().max(1e-300));
        }
    }

    let mut turn_res: f64 = 0.0;
    for _ in 0..2_000 {
        let p = random_polar(rng);
        let l = rng.gen_range(-3i64..=3);
        let shifted = PolarPoint::new(p.r, p.theta + TAU * l as f64);
        if let (Ok(w), Ok(ws)) = (field::profile_w(family, p), field::profile_w(family, shifted)) {
            turn_res = turn_res.max((ws - w).norm() / w.norm().max(1e-300));
        }
    }

    // |w| / |z| over the lowest and highest decade of a 12-decade span
    let decade_max = |lo: f64, hi: f64, rng: &mut ChaCha8Rng| {
        let mut best: f64 = 0.0;
        for _ in 0..5_000 {
            let r = 10f64.powf(rng.gen_range(lo..hi));
            let p = PolarPoint::new(r, rng.gen_range(0.0..TAU));
            if let Ok(w) = field::profile_w(family, p) {
                best = best.max(w.norm() / r);
            }
        }
        best
    };
    let low = decade_max(-6.0, -5.0, rng);
    let high = decade_max(5.0, 6.0, rng);
    let growth_res = (low - high).abs() / low.max(high);

    vec![
        check("field_form_agreement", form_res, tol.unwrap_or(1e-13)),
        check("field_scaling_equivariance", scale_res, tol.unwrap_or(1e-12)),
        check("field_full_turn_well_defined", turn_res, tol.unwrap_or(1e-12)),
        check("field_growth_bound_stability", growth_res, tol.unwrap_or(0.05)),
    ]
}

fn matching_suite(
    family: &SpiralFamily,
    tol: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Vec<CheckResult> {
    let samples: Vec<(usize, f64)> = (0..100)
        .map(|_| (rng.gen_range(0..family.branches()), rng.gen_range(-3.0..3.0)))
        .collect();
    match oracle::matching_residuals(family, &samples) {
        Ok((vel, pres)) => {
            let vmax = vel.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let pmax = pres.iter().fold(0.0f64, |m, p| m.max(p.abs()));
            vec![
                check("matching_velocity", vmax, tol.unwrap_or(1e-8)),
                check("matching_pressure", pmax, tol.unwrap_or(1e-8)),
            ]
        }
        Err(e) => vec![skipped("matching_velocity", tol.unwrap_or(1e-8), &e.to_string())],
    }
}

fn random_off_sheet_point(
    family: &SpiralFamily,
    rng: &mut ChaCha8Rng,
    min_distance: f64,
) -> Option<(Complex64, f64)> {
    for _ in 0..200 {
        let z = Complex64::from_polar(rng.gen_range(0.3..2.0), rng.gen_range(0.0..TAU));
        if let Ok(loc) = geometry::locate_point(family, PolarPoint::from_complex(z)?, 1.0) {
            if loc.distance > min_distance {
                return Some((z, loc.distance));
            }
        }
    }
    None
}

fn oracle_suite(family: &SpiralFamily, tol: Option<f64>, rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let mut out = Vec::new();

    let bs_tol = tol.unwrap_or(1e-6);
    if !compatibility_check(family).0 {
        out.push(skipped("biot_savart", bs_tol, &Error::CompatibilityViolated.to_string()));
    } else {
        let mut worst: f64 = 0.0;
        let mut failures = 0usize;
        for _ in 0..10 {
            let Some((z, _)) = random_off_sheet_point(family, rng, 1e-4) else {
                failures += 1;
                continue;
            };
            match (
                field::spacetime_fields(family, z, 1.0),
                oracle::biot_savart_quadrature(family, z, 1.0, 1e-9),
            ) {
                (Ok((v, _)), Ok(quad)) => {
                    worst = worst.max((quad.value - v).norm() / v.norm().max(1e-12));
                }
                _ => failures += 1,
            }
        }
        if failures > 0 {
            worst = f64::INFINITY;
        }
        out.push(check("biot_savart", worst, bs_tol));
    }

    // interior Euler residual: magnitude and second-order convergence
    let mut euler_res: f64 = 0.0;
    let mut order_res: f64 = 0.0;
    for _ in 0..20 {
        let Some((z, _)) = random_off_sheet_point(family, rng, 2e-3) else {
            euler_res = f64::INFINITY;
            break;
        };
        let scale = match field::profile_w(family, PolarPoint::from_complex(z).unwrap()) {
            Ok(w) => (w.norm_sqr() / z.norm()).max(w.norm()).max(1e-8),
            Err(_) => continue,
        };
        match (
            oracle::interior_euler_residual(family, z, 1e-4),
            oracle::interior_euler_residual(family, z, 5e-5),
        ) {
            (Ok(r1), Ok(r2)) => {
                euler_res = euler_res.max(r2 / scale);
                if r2 > 1e-12 * scale {
                    let ratio = r1 / r2;
                    order_res = order_res.max((ratio - 4.0).abs());
                }
            }
            _ => euler_res = f64::INFINITY,
        }
    }
    out.push(check("interior_euler_residual", euler_res, tol.unwrap_or(1e-5)));
    out.push(check("interior_euler_order", order_res, tol.unwrap_or(1.5)));
    out
}

fn weak_suite(family: &SpiralFamily, tol: Option<f64>, seed: u64) -> Vec<CheckResult> {
    let spec = oracle::WeakFormQuadSpec::default();
    match oracle::weak_form_residual(family, 3, &spec, seed) {
        Ok(ratios) => {
            let worst = ratios.iter().cloned().fold(0.0, f64::max);
            vec![check("weak_form_ratio", worst, tol.unwrap_or(1e-3))]
        }
        Err(e) => vec![skipped("weak_form_ratio", tol.unwrap_or(1e-3), &e.to_string())],
    }
}

fn energy_suite(family: &SpiralFamily, tol: Option<f64>) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let radii = [0.5, 1.0, 2.0];
    let cs: Vec<f64> = radii
        .iter()
        .filter_map(|&r| field::energy_in_ball(family, r).ok().map(|e| e / r.powi(4)))
        .collect();
    if cs.len() == radii.len() {
        let spread = (cs.iter().cloned().fold(f64::MIN, f64::max)
            - cs.iter().cloned().fold(f64::MAX, f64::min))
            / cs[0].abs();
        out.push(check("energy_r4_law", spread, tol.unwrap_or(1e-10)));
    } else {
        out.push(skipped("energy_r4_law", tol.unwrap_or(1e-10), "quadrature failed"));
    }

    // brute-force 2D polar quadrature of |w|^2 over the unit ball
    if let Ok(e) = field::energy_in_ball(family, 1.0) {
        let (n_r, n_t) = (400, 400);
        let mut total = 0.0;
        for i in 0..n_r {
            let rho = (i as f64 + 0.5) / n_r as f64;
            for j in 0..n_t {
                let th = TAU * (j as f64 + 0.5) / n_t as f64;
                if let Ok(w) = field::profile_w(family, PolarPoint::new(rho, th)) {
                    total += w.norm_sqr() * rho;
                }
            }
        }
        total *= TAU / (n_r as f64 * n_t as f64);
        out.push(check("energy_2d_cross_check", (e - total).abs() / e, tol.unwrap_or(0.01)));
    }
    out
}

pub fn run_suite(
    family: &SpiralFamily,
    suite: &str,
    tol: Option<f64>,
    seed: u64,
) -> Result<VerifyReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    let known = ["all", "winding", "field", "matching", "oracle", "weak", "energy"];
    if !known.contains(&suite) {
        return Err(format!("unknown suite '{suite}'; expected one of {known:?}"));
    }
    let run = |name: &str| suite == "all" || suite == name;
    if run("winding") {
        checks.extend(winding_suite(family, tol, &mut rng));
    }
    if run("field") {
        checks.extend(field_suite(family, tol, &mut rng));
    }
    if run("matching") {
        checks.extend(matching_suite(family, tol, &mut rng));
    }
    if run("oracle") {
        checks.extend(oracle_suite(family, tol, &mut rng));
    }
    if run("weak") {
        checks.extend(weak_suite(family, tol, seed));
    }
    if run("energy") {
        checks.extend(energy_suite(family, tol));
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { suite: suite.to_string(), seed, checks, all_pass })
}
