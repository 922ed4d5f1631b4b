//! The algebraic constraint that makes a spiral family a weak Euler
//! solution: the branch coupling matrix, per-branch aggregates, velocity
//! and pressure matching residuals, the compatibility sums, and solvers
//! (closed form for symmetric families, damped Gauss-Newton in general).

use nalgebra::{Complex, DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::model::{FamilyConfig, SpiralFamily};

/// `exp(pi * A)` etc. stay bounded: `Re(pi A) in (-2 pi a, 0)` is at most
/// `2 pi` in magnitude, so plain exponentials are stable.
fn exp_pi_a(family_growth: Complex64, factor: f64) -> Complex64 {
    (family_growth * PI * factor).exp()
}

fn sinh_pi_a(growth: Complex64) -> Complex64 {
    0.5 * (exp_pi_a(growth, 1.0) - exp_pi_a(growth, -1.0))
}

fn cosh_pi_a(growth: Complex64) -> Complex64 {
    0.5 * (exp_pi_a(growth, 1.0) + exp_pi_a(growth, -1.0))
}

/// `coth(pi A / M)` via exponentials.
fn coth_pi_a_over(growth: Complex64, m: f64) -> Complex64 {
    let e_plus = exp_pi_a(growth, 1.0 / m);
    let e_minus = exp_pi_a(growth, -1.0 / m);
    (e_plus + e_minus) / (e_plus - e_minus)
}

/// Branch coupling matrix: entry `(m, k)` is `exp(A (theta_k - theta_m))`
/// weighted by `exp(-pi A)` above the diagonal, `cosh(pi A)` on it and
/// `exp(pi A)` below.
pub fn coupling_matrix(family: &SpiralFamily) -> DMatrix<Complex64> {
    let growth = family.growth();
    let n = family.branches();
    let theta = family.theta();
    DMatrix::from_fn(n, n, |m, k| {
        let weight = match k.cmp(&m) {
            std::cmp::Ordering::Greater => exp_pi_a(growth, -1.0),
            std::cmp::Ordering::Equal => cosh_pi_a(growth),
            std::cmp::Ordering::Less => exp_pi_a(growth, 1.0),
        };
        (growth * (theta[k] - theta[m])).exp() * weight
    })
}

/// Closed form of the symmetric-phase row sum `sum_k A_mk` when
/// `theta_k = 2 pi k / M` and all rows coincide:
/// `sinh(pi A) (1 + exp(2 pi A / M)) / (exp(2 pi A / M) - 1)`.
pub fn symmetric_row_sum(a: f64, branches: usize) -> Result<Complex64> {
    let growth = crate::model::growth_constant(a)?;
    let e = (growth * TAU / branches as f64).exp();
    Ok(sinh_pi_a(growth) * (Complex64::new(1.0, 0.0) + e) / (e - Complex64::new(1.0, 0.0)))
}

/// Everything the constraint says about one family.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    /// The M x M coupling matrix.
    pub amk: DMatrix<Complex64>,
    /// Per-branch aggregates `K_m = (1 / sinh(pi A)) sum_k A_mk g_k`.
    pub k: Vec<Complex64>,
    /// The common right-hand side `-(a^2 + 1 - 2 mu + 2 a mu i) / (2 a^2)`.
    pub rhs: Complex64,
    /// `K_m - rhs` per branch; the family is a weak Euler solution iff all
    /// entries vanish.
    pub residual: Vec<Complex64>,
    /// `Im(a K_m + mu (a + i))` per branch; zero iff the velocity matching
    /// condition holds on branch m.
    pub velocity_residual: Vec<f64>,
    /// `Re K_m - (2 mu - a^2 - 1) / (2 a^2)` per branch; zero iff the
    /// pressure matching condition holds on branch m.
    pub pressure_residual: Vec<f64>,
    /// `sum_k g_k exp(-i theta_k)`.
    pub compat1: Complex64,
    /// `sum_k g_k exp(-2 i theta_k)`.
    pub compat2: Complex64,
}

impl ConstraintReport {
    pub fn max_residual(&self) -> f64 {
        self.residual.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    pub fn is_weak_solution(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

pub fn constraint_report(family: &SpiralFamily) -> ConstraintReport {
    let a = family.a();
    let mu = family.mu();
    let growth = family.growth();
    let amk = coupling_matrix(family);
    let sinh = sinh_pi_a(growth);
    let n = family.branches();
    let g = family.g();

    let k: Vec<Complex64> = (0..n)
        .map(|m| (0..n).map(|j| amk[(m, j)] * g[j]).sum::<Complex64>() / sinh)
        .collect();
    let rhs = -Complex64::new(a * a + 1.0 - 2.0 * mu, 2.0 * a * mu) / (2.0 * a * a);
    let residual: Vec<Complex64> = k.iter().map(|km| km - rhs).collect();
    let velocity_residual: Vec<f64> = k
        .iter()
        .map(|km| (a * km + mu * Complex64::new(a, 1.0)).im)
        .collect();
    let pressure_target = (2.0 * mu - a * a - 1.0) / (2.0 * a * a);
    let pressure_residual: Vec<f64> = k.iter().map(|km| km.re - pressure_target).collect();

    let (mut compat1, mut compat2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (idx, &gk) in g.iter().enumerate() {
        let tk = family.theta()[idx];
        compat1 += gk * Complex64::from_polar(1.0, -tk);
        compat2 += gk * Complex64::from_polar(1.0, -2.0 * tk);
    }

    ConstraintReport {
        amk,
        k,
        rhs,
        residual,
        velocity_residual,
        pressure_residual,
        compat1,
        compat2,
    }
}

/// Checks the large-scale cancellation sums. `holds` iff both vanish to
/// `1e-12 * sum |g_k|`.
pub fn compatibility_check(family: &SpiralFamily) -> (bool, Complex64, Complex64) {
    let report = constraint_report(family);
    let tol = 1e-12 * family.g().iter().map(|g| g.abs()).sum::<f64>();
    (
        report.compat1.norm() <= tol && report.compat2.norm() <= tol,
        report.compat1,
        report.compat2,
    )
}

/// Closed-form solve for the symmetric family `g_m = g`,
/// `theta_m = 2 pi m / M`: the unique real `(g, mu)` with
/// `a^2 + 1 - 2 mu + 2 a mu i = -2 a^2 g coth(pi A / M)`.
pub fn alexander_solve(a: f64, branches: usize) -> Result<(f64, f64)> {
    let growth = crate::model::growth_constant(a)?;
    if branches == 0 {
        return Err(Error::LengthMismatch);
    }
    let c = coth_pi_a_over(growth, branches as f64);
    let direction = c.im + a * c.re;
    if direction.abs() <= 1e-12 {
        return Err(Error::DegenerateDirection);
    }
    let g = -(a * a + 1.0) / (2.0 * a * direction);
    let mu = -a * g * c.im;
    Ok((g, mu))
}

/// The symmetric family configuration for given `(a, M)` with `(g, mu)`
/// from [`alexander_solve`].
pub fn alexander_family(a: f64, branches: usize) -> Result<SpiralFamily> {
    let (g, mu) = alexander_solve(a, branches)?;
    SpiralFamily::new(FamilyConfig {
        a,
        mu,
        g: vec![g; branches],
        theta: (0..branches).map(|m| TAU * m as f64 / branches as f64).collect(),
    })
}

/// A parameter the general solver may adjust. `theta[0]` fixes the
/// rotation gauge and is never free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeVar {
    Mu,
    Circulation(usize),
    Phase(usize),
}

/// Outcome of [`general_solve`].
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub family: SpiralFamily,
    pub residual_max: f64,
    pub iterations: usize,
}

fn read_vars(cfg: &FamilyConfig, free: &[FreeVar]) -> Vec<f64> {
    free.iter()
        .map(|v| match *v {
            FreeVar::Mu => cfg.mu,
            FreeVar::Circulation(i) => cfg.g[i],
            FreeVar::Phase(i) => cfg.theta[i],
        })
        .collect()
}

fn write_vars(base: &FamilyConfig, free: &[FreeVar], x: &[f64]) -> FamilyConfig {
    let mut cfg = base.clone();
    for (v, &xi) in free.iter().zip(x) {
        match *v {
            FreeVar::Mu => cfg.mu = xi,
            FreeVar::Circulation(i) => cfg.g[i] = xi,
            FreeVar::Phase(i) => cfg.theta[i] = xi,
        }
    }
    cfg
}

fn residual_vector(family: &SpiralFamily) -> DVector<f64> {
    let report = constraint_report(family);
    let mut out = DVector::zeros(2 * report.residual.len());
    for (m, r) in report.residual.iter().enumerate() {
        out[2 * m] = r.re;
        out[2 * m + 1] = r.im;
    }
    out
}

/// Damped Gauss-Newton on the constraint residual with the pitch `a` and
/// the gauge phase `theta[0]` held fixed. The residual has `2M` real
/// components; the Jacobian is formed by central differences and each step
/// is solved in the least-squares sense, halving until the residual norm
/// decreases.
pub fn general_solve(
    initial: &SpiralFamily,
    free: &[FreeVar],
    max_iter: usize,
    tol: f64,
) -> Result<SolveOutcome> {
    for v in free {
        match *v {
            FreeVar::Phase(0) => return Err(Error::InvalidGauge),
            FreeVar::Phase(i) | FreeVar::Circulation(i) if i >= initial.branches() => {
                return Err(Error::BranchOutOfRange {
                    index: i,
                    branches: initial.branches(),
                })
            }
            _ => {}
        }
    }

    let base = initial.to_config();
    let mut x = read_vars(&base, free);
    let mut family = initial.clone();
    let mut res = residual_vector(&family);

    for iter in 0..=max_iter {
        let res_max = res.amax();
        if res_max <= tol {
            return Ok(SolveOutcome { family, residual_max: res_max, iterations: iter });
        }
        if free.is_empty() || iter == max_iter {
            return Err(Error::NoConvergence { iterations: iter, residual: res_max });
        }

        // Numeric Jacobian by central differences.
        let m_rows = res.len();
        let n_cols = x.len();
        let mut jac = DMatrix::zeros(m_rows, n_cols);
        for col in 0..n_cols {
            let h = 1e-7 * x[col].abs().max(1.0);
            let eval_at = |xi: f64| -> Result<DVector<f64>> {
                let mut xs = x.clone();
                xs[col] = xi;
                let fam = SpiralFamily::new(write_vars(&base, free, &xs))
                    .map_err(|_| Error::SingularJacobian)?;
                Ok(residual_vector(&fam))
            };
            let plus = eval_at(x[col] + h)?;
            let minus = eval_at(x[col] - h)?;
            for row in 0..m_rows {
                jac[(row, col)] = (plus[row] - minus[row]) / (2.0 * h);
            }
        }

        let svd = jac.clone().svd(true, true);
        let s_max = svd.singular_values.amax();
        if s_max <= 0.0 || svd.singular_values.iter().any(|s| *s < 1e-12 * s_max) {
            return Err(Error::SingularJacobian);
        }
        let step = svd
            .solve(&(-res.clone()), 1e-12 * s_max)
            .map_err(|_| Error::SingularJacobian)?;

        // Step halving until the 2-norm of the residual decreases.
        let current_norm = res.norm();
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<f64> =
                x.iter().zip(step.iter()).map(|(xi, si)| xi + lambda * si).collect();
            if let Ok(fam) = SpiralFamily::new(write_vars(&base, free, &trial)) {
                let trial_res = residual_vector(&fam);
                if trial_res.norm() < current_norm {
                    x = trial;
                    family = fam;
                    res = trial_res;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iterations: iter + 1, residual: res.amax() });
        }
    }
    unreachable!("loop returns on every path");
}

// nalgebra's Complex re-export matches num_complex; keep the alias local so
// matrix types read uniformly.
#[allow(dead_code)]
type C64 = Complex<f64>;
