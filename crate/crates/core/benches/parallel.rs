//! Compares batch field evaluation with and without the rayon pool.
//!
//! Run `cargo bench -p spiral-sheet` and
//! `cargo bench -p spiral-sheet --no-default-features` to compare the
//! parallel and sequential code paths.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use spiral_sheet::constraint::alexander_family;
use spiral_sheet::field;
use spiral_sheet::oracle::{weak_form_ratio, TestField, WeakFormQuadSpec};
use spiral_sheet::parallel::par_map;

fn grid_points(n: usize) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = 0.05 + 2.0 * i as f64 / n as f64;
            let y = 0.05 + 2.0 * j as f64 / n as f64;
            pts.push(Complex64::new(x, y));
        }
    }
    pts
}

fn bench_grid_sampling(c: &mut Criterion) {
    let family = alexander_family(1.0, 3).unwrap();
    let mut group = c.benchmark_group("grid_sampling");
    for n in [32usize, 64] {
        let pts = grid_points(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &pts, |b, pts| {
            b.iter(|| {
                par_map(pts, |z| field::spacetime_fields(&family, *z, 1.0).ok())
                    .iter()
                    .flatten()
                    .map(|(v, _)| v.norm_sqr())
                    .sum::<f64>()
            })
        });
    }
    group.finish();
}

fn bench_weak_form(c: &mut Criterion) {
    let family = alexander_family(1.0, 3).unwrap();
    let tf = TestField {
        center: Complex64::new(1.0, 0.4),
        radius: 0.35,
        t_center: 1.0,
        t_half: 0.2,
    };
    let spec = WeakFormQuadSpec { cells: 4, refine_depth: 3, budget: 80_000 };
    c.bench_function("weak_form_ratio", |b| {
        b.iter(|| weak_form_ratio(&family, &tf, &spec).unwrap())
    });
}

criterion_group!(benches, bench_grid_sampling, bench_weak_form);
criterion_main!(benches);
