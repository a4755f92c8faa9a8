use criterion::{black_box, criterion_group, criterion_main, Criterion};

use shrinker_core::calculus::{frame_field, laplace_beltrami, sample_frames};
use shrinker_core::gallery::inequality_chain_check;
use shrinker_core::omission::{coverage_raster, RasterBox, SampleSet};
use shrinker_core::{Cap, ParamGrid, RadialProfile, SpiralCurve, SurfaceKind, SurfaceSpec};

fn ellipsoid() -> SurfaceSpec {
    SurfaceSpec::inward(SurfaceKind::Ellipsoid { axes: [1.0, 1.5, 2.0], cap: Cap::North }).unwrap()
}

fn arctan() -> SpiralCurve {
    SpiralCurve::new(RadialProfile::Arctan { m: 1.0, a: 1.0 }, 1.0).unwrap()
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn frames(c: &mut Criterion) {
    let spec = ellipsoid();
    let grid = ParamGrid::new(vec![(-1.0, 1.0); 2], vec![161, 161]).unwrap();
    c.bench_function("sample_frames ellipsoid 161x161", |b| {
        b.iter(|| sample_frames(black_box(&spec), &grid).unwrap())
    });
}

fn laplacian(c: &mut Criterion) {
    let spec = ellipsoid();
    let grid = ParamGrid::new(vec![(-1.0, 1.0); 2], vec![161, 161]).unwrap();
    let frames = sample_frames(&spec, &grid).unwrap();
    let f = frame_field(&grid, &frames, |fr| fr.f).unwrap();
    c.bench_function("laplace_beltrami ellipsoid 161x161", |b| {
        b.iter(|| laplace_beltrami(black_box(&f), &frames).unwrap())
    });
}

fn raster(c: &mut Criterion) {
    let spec = SurfaceSpec::inward(SurfaceKind::Circle { radius: 1.0 }).unwrap();
    let samples = SampleSet::linspace(-std::f64::consts::PI, std::f64::consts::PI, 629);
    let bx = RasterBox::square(-2.0, 2.0, 100).unwrap();
    c.bench_function("coverage_raster circle 100x100", |b| {
        b.iter(|| coverage_raster(black_box(&spec), &samples, &bx, None).unwrap())
    });
}

fn chain(c: &mut Criterion) {
    let curve = arctan();
    let t = linspace(-50.0, 50.0, 401);
    let s = linspace(-100.0, 100.0, 401);
    c.bench_function("inequality_chain arctan 401x401", |b| {
        b.iter(|| inequality_chain_check(black_box(&curve), &t, &s).unwrap())
    });
}

criterion_group! {
    name = kernels;
    config = Criterion::default().sample_size(10);
    targets = frames, laplacian, raster, chain
}
criterion_main!(kernels);
