use shrinker_core::calculus::{drift_laplacian, frame_field, sample_frames};
use shrinker_core::identity::{check_div_identity, check_grad_identity, check_master_identity, check_shrinker_pde};
use shrinker_core::{frame_at, Cap, DriftOperator, GeomFrame, ParamGrid, SpiralCurve, RadialProfile, SurfaceKind, SurfaceSpec};

fn ellipsoid() -> SurfaceSpec {
    SurfaceSpec::inward(SurfaceKind::Ellipsoid { axes: [1.0, 1.5, 2.0], cap: Cap::North }).unwrap()
}

fn torus() -> SurfaceSpec {
    SurfaceSpec::inward(SurfaceKind::Torus { major: 2.0, minor: 0.5 }).unwrap()
}

fn grid_for(spec: &SurfaceSpec, n: usize) -> ParamGrid {
    ParamGrid::new(spec.default_ranges(), vec![n; 2]).unwrap()
}

#[test]
fn master_identity_converges_at_second_order() {
    for spec in [ellipsoid(), torus()] {
        let study = check_master_identity(&spec, &grid_for(&spec, 161)).unwrap();
        let order = study.order().unwrap();
        assert!((order - 2.0).abs() <= 0.3, "{}: order {order}", spec.name());
        assert!(study.fine.residual_inf < 1e-3);
        assert!(study.fine.interior_nodes >= 161 * 161);
    }
}

#[test]
fn gradient_identity_converges_at_second_order() {
    for spec in [ellipsoid(), torus()] {
        let study = check_grad_identity(&spec, &grid_for(&spec, 161)).unwrap();
        let order = study.order().unwrap();
        assert!((order - 2.0).abs() <= 0.3, "{}: order {order}", spec.name());
        assert!(study.fine.residual_inf < 1e-3);
    }
}

#[test]
fn divergence_identity_converges() {
    for spec in [ellipsoid(), torus()] {
        let study = check_div_identity(&spec, &grid_for(&spec, 41)).unwrap();
        let order = study.order().unwrap();
        assert!((order - 2.0).abs() <= 0.3, "{}: order {order}", spec.name());
    }
}

#[test]
fn spiral_cylinder_gradient_identity() {
    let curve = SpiralCurve::unit(RadialProfile::arctan(1.0, 1.0).unwrap());
    let spec = SurfaceSpec::inward(SurfaceKind::SpiralCylinder { curve }).unwrap();
    let grid = ParamGrid::new(vec![(-10.0, 10.0), (-1.0, 1.0)], vec![201, 21]).unwrap();
    let study = check_grad_identity(&spec, &grid).unwrap();
    let order = study.order().unwrap();
    assert!((order - 2.0).abs() <= 0.3, "order {order}");
}

#[test]
fn shrinker_pde_vanishes_on_round_shrinkers() {
    let sphere = SurfaceSpec::inward(SurfaceKind::Sphere { radius: 2.0, cap: Cap::North }).unwrap();
    let cylinder = SurfaceSpec::inward(SurfaceKind::Cylinder { radius: 2.0f64.sqrt() }).unwrap();
    for spec in [sphere, cylinder] {
        for n in [9, 33] {
            let rep = check_shrinker_pde(&spec, &grid_for(&spec, n)).unwrap();
            assert!(rep.pde.coarse.residual_inf < 1e-8 && rep.pde.fine.residual_inf < 1e-8);
            assert!(rep.max_soliton_residual < 1e-12);
        }
    }
}

/// Fourth-order central difference of `H + f/2` along `X⊤`, from exact frames at shifted parameters.
fn weighted_drift_oracle(spec: &SurfaceSpec, u: &[f64], step: f64) -> f64 {
    let hf = |p: &[f64]| frame_at(&spec.eval_jet(p).unwrap(), spec.orientation).unwrap().weighted_mean_curvature();
    let fr = frame_at(&spec.eval_jet(u).unwrap(), spec.orientation).unwrap();
    let mut drift = 0.0;
    for i in 0..u.len() {
        let at = |k: f64| {
            let mut p = u.to_vec();
            p[i] += k * step;
            hf(&p)
        };
        let d = (-at(2.0) + 8.0 * at(1.0) - 8.0 * at(-1.0) + at(-2.0)) / (12.0 * step);
        drift += fr.x_tan[i] * d;
    }
    -(fr.weighted_mean_curvature() + drift)
}

#[test]
fn ellipsoid_pde_residual_matches_weighted_curvature_prediction() {
    let spec = ellipsoid();
    let mut previous = f64::INFINITY;
    for n in [41, 81] {
        let grid = grid_for(&spec, n);
        let frames: Vec<GeomFrame> = sample_frames(&spec, &grid).unwrap();
        let f = frame_field(&grid, &frames, |fr| fr.f).unwrap();
        let lf = drift_laplacian(DriftOperator::SHRINKER, &f, &frames).unwrap();
        let mut worst = 0.0f64;
        for idx in 0..grid.len() {
            if !grid.is_interior(idx, 2) {
                continue;
            }
            let fr = &frames[idx];
            let pde = lf.values[idx] + (fr.norm_a_sq - 0.5) * fr.f;
            let oracle = weighted_drift_oracle(&spec, &grid.point(idx), 1e-3);
            worst = worst.max((pde - oracle).abs());
        }
        assert!(worst < previous / 3.0, "n = {n}: {worst} vs {previous}");
        previous = worst;
    }
    assert!(previous < 2e-2, "{previous}");
    let rep = check_shrinker_pde(&spec, &grid_for(&spec, 41)).unwrap();
    assert!(rep.max_soliton_residual > 0.1);
    assert!(rep.decomposition.fine.residual_inf < rep.decomposition.coarse.residual_inf / 3.0);
}
