use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ruledgeo::numeric::Grid;
use ruledgeo::ruled_surface::RulingSweep;
use ruledgeo::striction::find_striction_numeric;
use ruledgeo::{MetricPreset, Profile, Vec3};
use ruledgeo_bench::surface;

fn riemann(c: &mut Criterion) {
    let mut group = c.benchmark_group("riemann_at");
    let metrics = [
        ("half_space", MetricPreset::HalfSpace { k: -1.0 }),
        ("product_revolution", MetricPreset::ProductRevolution { profile: Profile::sin_plus(2.0) }),
        ("warped", MetricPreset::Warped { profile: Profile::sin_plus(0.0) }),
    ];
    let p = Vec3::new(0.3, -0.2, 1.1);
    for (name, preset) in metrics {
        let m = preset.build().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &m, |b, m| b.iter(|| m.riemann_at(black_box(&p)).unwrap()));
    }
    group.finish();
}

fn jacobi_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi_sweep");
    for name in ["helicoid", "example1", "example2"] {
        let spec = surface(name);
        group.bench_function(name, |b| b.iter(|| RulingSweep::new(&spec, black_box(0.7), -1.0, 1.0).unwrap()));
    }
    group.finish();
}

fn striction_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("striction_search");
    group.sample_size(10);
    let grid = Grid::new(0.0, 6.0, 16).unwrap();
    for (name, range) in [("example1", (-5.0, 5.0)), ("example2", (0.0, 7.0))] {
        let spec = surface(name);
        group.bench_function(name, |b| b.iter(|| find_striction_numeric(&spec, &grid, black_box(range)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, riemann, jacobi_sweep, striction_search);
criterion_main!(benches);
