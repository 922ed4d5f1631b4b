//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands on the
//! real line, with caller-supplied subdivision seeds.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Embedded 7/15 rule on `[a, b]`: returns the 15-point value and an error
/// estimate from the Gauss/Kronrod difference.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK15[7] * fc;
    let mut gauss = WG7[3] * fc;
    for (i, &x) in XGK15.iter().take(7).enumerate() {
        let lo = f(center - half * x);
        let hi = f(center + half * x);
        kronrod += WGK15[i] * (lo + hi);
        if i % 2 == 1 {
            gauss += WG7[i / 2] * (lo + hi);
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).norm();
    (value, err)
}

/// Adaptively integrates `f` over the union of intervals delimited by the
/// sorted `splits` list (at least two entries). Bisects the worst interval
/// until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)` or the interval budget is exhausted.
///
/// Returns `(value, error_estimate, interval_count)`.
pub fn adaptive_integral<F: Fn(f64) -> Complex64>(
    f: &F,
    splits: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<(Complex64, f64, usize)> {
    assert!(splits.len() >= 2, "need at least one interval");
    struct Piece {
        a: f64,
        b: f64,
        value: Complex64,
        err: f64,
    }
    let mut pieces: Vec<Piece> = splits
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, err) = gk15(f, w[0], w[1]);
            Piece { a: w[0], b: w[1], value, err }
        })
        .collect();

    loop {
        let total: Complex64 = pieces.iter().map(|p| p.value).sum();
        let total_err: f64 = pieces.iter().map(|p| p.err).sum();
        let target = abs_tol.max(rel_tol * total.norm());
        if total_err <= target {
            return Ok((total, total_err, pieces.len()));
        }
        if pieces.len() >= max_intervals {
            return Err(Error::ToleranceNotMet { estimate: total_err });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let Piece { a, b, .. } = pieces[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // interval collapsed to machine precision
            return Err(Error::ToleranceNotMet { estimate: total_err });
        }
        let (v1, e1) = gk15(f, a, mid);
        let (v2, e2) = gk15(f, mid, b);
        pieces[worst] = Piece { a, b: mid, value: v1, err: e1 };
        pieces.push(Piece { a: mid, b, value: v2, err: e2 });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_oscillatory_exponential() {
        // int_0^pi exp(i x) dx = 2i
        let f = |x: f64| Complex64::from_polar(1.0, x);
        let (v, err, _) = adaptive_integral(&f, &[0.0, PI], 1e-13, 1e-13, 100).unwrap();
        assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-12);
        assert!(err < 1e-12);
    }

    #[test]
    fn adaptivity_resolves_sharp_peak() {
        // int_-1^1 1/(x^2 + 1e-6) dx = 2*atan(1e3)/1e-3
        let f = |x: f64| Complex64::new(1.0 / (x * x + 1e-6), 0.0);
        let exact = 2.0 * 1e3 * (1e3_f64).atan();
        let (v, _, n) = adaptive_integral(&f, &[-1.0, 0.0, 1.0], 1e-10, 1e-12, 2000).unwrap();
        assert!((v.re - exact).abs() < 1e-8 * exact);
        assert!(n > 4);
    }

    #[test]
    fn budget_exhaustion_reported() {
        let f = |x: f64| Complex64::new(1.0 / (x * x + 1e-14), 0.0);
        let out = adaptive_integral(&f, &[-1.0, 1.0], 1e-14, 1e-14, 3);
        assert!(matches!(out, Err(Error::ToleranceNotMet { .. })));
    }
}
