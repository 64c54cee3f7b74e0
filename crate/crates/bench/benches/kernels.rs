use std::hint::black_box;

use chardyn::dynamics::{render_real_chart, RealWindow, Sheet};
use chardyn::periodic::{find_periodic, seeds, SearchOptions, SeedPlan};
use chardyn::schrodinger::{fibonacci, spectrum_estimate, tridiagonal_oracle, SchrodingerConfig};
use chardyn::{Automorphism, GroupWord, SurfaceParams, SurfacePoint};
use criterion::{criterion_group, criterion_main, Criterion};

fn xyz() -> GroupWord {
    "xyz".parse().unwrap()
}

fn orbits(c: &mut Criterion) {
    let params = SurfaceParams::pt_real(2.0);
    let f = Automorphism::from_word(&params, &xyz()).unwrap();
    // A point of the sphere component, where orbits stay bounded.
    let (x, y) = (0.5f64, 0.5);
    let z = (x * y + ((x * y) * (x * y) - 4.0 * (x * x + y * y - 2.0)).sqrt()) / 2.0;
    let start = SurfacePoint::real(x, y, z);
    c.bench_function("escape_time 1000 steps", |b| {
        b.iter(|| f.escape_time(black_box(&start), 1000, 1e4))
    });
    let far = SurfacePoint::real(3.0, 2.0, 5.0);
    c.bench_function("green 60", |b| b.iter(|| f.green(black_box(&far), 60)));
}

fn raster(c: &mut Criterion) {
    let params = SurfaceParams::pt_real(5.0);
    c.bench_function("real chart 128²", |b| {
        b.iter(|| {
            render_real_chart(
                &params,
                &xyz(),
                RealWindow::square(-10.0, 10.0),
                Sheet::Upper,
                128,
                128,
                200,
                1e4,
            )
            .unwrap()
        })
    });
}

fn periodic(c: &mut Criterion) {
    let params = SurfaceParams::pt_real(5.0);
    let plan = SeedPlan {
        real_grid: 30,
        complex: 300,
        ..SeedPlan::default()
    };
    let pts = seeds(&params, &plan);
    let mut g = c.benchmark_group("find_periodic");
    g.sample_size(10);
    g.bench_function("PT D=5 n=2", |b| {
        b.iter(|| find_periodic(&params, &xyz(), 2, &pts, &SearchOptions::default()).unwrap())
    });
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let sub = fibonacci();
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    let config = SchrodingerConfig {
        kappa: 2.0,
        window: (-2.0, 4.0),
        grid: 2001,
        ..SchrodingerConfig::default()
    };
    g.bench_function("estimate grid 2001", |b| {
        b.iter(|| spectrum_estimate(&sub, &config).unwrap())
    });
    g.bench_function("oracle N=987", |b| {
        b.iter(|| tridiagonal_oracle(&sub, 2.0, 987).unwrap())
    });
    g.finish();
}

criterion_group!(benches, orbits, raster, periodic, spectrum);
criterion_main!(benches);
