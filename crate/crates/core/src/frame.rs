//! Pointwise codimension-one geometry: metric, unit normal, second fundamental
//! form, shape operator, mean curvature `H = tr A` (no `1/n`), `|A|²`, the
//! support value `f = ⟨X, N⟩` and the tangential part of the position vector.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::surface::{ImmersionJet, Orientation};

#[derive(Debug, Clone, PartialEq)]
pub struct GeomFrame {
    pub position: DVector<f64>,
    /// First fundamental form `g_ij = ⟨∂ᵢX, ∂ⱼX⟩`.
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub normal: DVector<f64>,
    /// Second fundamental form `h_ij = ⟨∂ᵢ∂ⱼX, N⟩`.
    pub h: DMatrix<f64>,
    /// Shape operator `A = g⁻¹h` as a mixed tensor `A^i_j`.
    pub shape: DMatrix<f64>,
    pub mean_h: f64,
    pub norm_a_sq: f64,
    pub f: f64,
    /// Contravariant components of `X⊤` in the coordinate basis.
    pub x_tan: DVector<f64>,
}

/// Generalized cross product of `n` vectors in ℝⁿ⁺¹ (`n ∈ {1, 2}`).
fn raw_normal(dx: &[DVector<f64>]) -> Result<DVector<f64>> {
    match dx.len() {
        1 => Ok(DVector::from_vec(vec![-dx[0][1], dx[0][0]])),
        2 => {
            let (a, b) = (&dx[0], &dx[1]);
            Ok(DVector::from_vec(vec![
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ]))
        }
        n => Err(GeomError::BadDimension(format!("intrinsic dimension {n} (supported: 1 or 2)"))),
    }
}

/// Derives the full codimension-one frame from a jet.
pub fn frame_at(jet: &ImmersionJet, orientation: Orientation) -> Result<GeomFrame> {
    let n = jet.intrinsic_dim();
    let g = DMatrix::from_fn(n, n, |i, j| jet.dx[i].dot(&jet.dx[j]));
    let g_inv = g.clone().try_inverse().ok_or(GeomError::DegenerateJet {
        normalized_det: jet.normalized_gram_det(),
        tol: crate::surface::JET_RANK_TOL,
    })?;

    let mut normal = raw_normal(&jet.dx)?.normalize();
    let flip = match orientation {
        Orientation::AsComputed => false,
        Orientation::Inward | Orientation::Outward => {
            let reference = jet.inward_ref.as_ref().ok_or(GeomError::OrientationUnknown(
                if orientation == Orientation::Inward { "inward" } else { "outward" },
            ))?;
            let points_inward = normal.dot(reference) >= 0.0;
            points_inward != (orientation == Orientation::Inward)
        }
    };
    if flip {
        normal = -normal;
    }

    let h = DMatrix::from_fn(n, n, |i, j| jet.second(i, j).dot(&normal));
    let shape = &g_inv * &h;
    let mean_h = shape.trace();
    let norm_a_sq = (&shape * &shape).trace();
    let f = jet.x.dot(&normal);
    let x_cov = DVector::from_fn(n, |i, _| jet.x.dot(&jet.dx[i]));
    let x_tan = &g_inv * x_cov;

    Ok(GeomFrame {
        position: jet.x.clone(),
        g,
        g_inv,
        normal,
        h,
        shape,
        mean_h,
        norm_a_sq,
        f,
        x_tan,
    })
}

impl GeomFrame {
    pub fn intrinsic_dim(&self) -> usize {
        self.g.nrows()
    }

    /// `√det g`.
    pub fn area_element(&self) -> f64 {
        self.g.determinant().sqrt()
    }

    /// Weighted mean curvature `H + f/2` for the Gaussian weight `|X|²/4`.
    pub fn weighted_mean_curvature(&self) -> f64 {
        self.mean_h + 0.5 * self.f
    }

    /// Ambient length of a tangent vector given by its coordinate components.
    pub fn tangent_length(&self, components: &DVector<f64>) -> f64 {
        components.dot(&(&self.g * components)).max(0.0).sqrt()
    }

    /// `A X⊤` in coordinate components.
    pub fn shape_of_x_tan(&self) -> DVector<f64> {
        &self.shape * &self.x_tan
    }

    /// Names of the frame invariants that fail for this frame and its jet.
    pub fn invariant_violations(&self, jet: &ImmersionJet) -> Vec<String> {
        let n = self.intrinsic_dim();
        let mut out = Vec::new();
        let scale = self.g.amax().max(1.0);
        let ident = &self.g * &self.g_inv - DMatrix::identity(n, n);
        if ident.amax() >= 1e-10 {
            out.push(format!("g·g⁻¹ deviates from I by {:e}", ident.amax()));
        }
        if (&self.g - self.g.transpose()).amax() > 0.0 || (&self.h - self.h.transpose()).amax() > 1e-12 * scale {
            out.push("g or h not symmetric".into());
        }
        if (self.normal.norm() - 1.0).abs() > 1e-12 {
            out.push(format!("|N| = {}", self.normal.norm()));
        }
        for (i, col) in jet.dx.iter().enumerate() {
            let dot = self.normal.dot(col);
            if dot.abs() > 1e-10 * col.norm().max(1.0) {
                out.push(format!("⟨N, ∂{i}X⟩ = {dot:e}"));
            }
        }
        if self.norm_a_sq < self.mean_h * self.mean_h / n as f64 - 1e-12 * self.norm_a_sq.max(1.0) {
            out.push(format!(
                "Newton inequality |A|² = {} < H²/n = {}",
                self.norm_a_sq,
                self.mean_h * self.mean_h / n as f64
            ));
        }
        let mut rebuilt = &self.normal * self.f;
        for (i, col) in jet.dx.iter().enumerate() {
            rebuilt += col * self.x_tan[i];
        }
        let err = (rebuilt - &self.position).norm();
        if err > 1e-10 * self.position.norm().max(1.0) {
            out.push(format!("X⊤ + fN misses X by {err:e}"));
        }
        out
    }
}

/// Support function based at `p0`: `⟨X − p0, N⟩`.
pub fn support_based(frame: &GeomFrame, p0: &[f64]) -> Result<f64> {
    if p0.len() != frame.position.len() {
        return Err(GeomError::BadDimension(format!(
            "base point of dimension {} in ambient dimension {}",
            p0.len(),
            frame.position.len()
        )));
    }
    Ok(frame
        .position
        .iter()
        .zip(p0)
        .zip(frame.normal.iter())
        .map(|((x, p), n)| (x - p) * n)
        .sum())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    use proptest::prelude::*;

    use super::*;
    use crate::surface::{Cap, SurfaceKind, SurfaceSpec};

    fn frame(kind: SurfaceKind, orientation: Orientation, u: &[f64]) -> GeomFrame {
        let spec = SurfaceSpec::new(kind, orientation).unwrap();
        frame_at(&spec.eval_jet(u).unwrap(), orientation).unwrap()
    }

    #[test]
    fn sphere_radius_two_inward() {
        for u in [[0.0, 0.0], [0.4, -1.1], [-1.2, 2.5]] {
            let fr = frame(SurfaceKind::Sphere { radius: 2.0, cap: Cap::North }, Orientation::Inward, &u);
            assert!((fr.f + 2.0).abs() < 1e-14);
            assert!((fr.mean_h - 1.0).abs() < 1e-14);
            assert!((fr.norm_a_sq - 0.5).abs() < 1e-14);
            assert!((&fr.shape - DMatrix::identity(2, 2) * 0.5).amax() < 1e-14);
        }
    }

    #[test]
    fn cylinder_sqrt_two_inward() {
        let fr = frame(SurfaceKind::Cylinder { radius: SQRT_2 }, Orientation::Inward, &[0.7, 0.2]);
        assert!((fr.f + SQRT_2).abs() < 1e-14);
        assert!((fr.shape[(0, 0)] - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!(fr.shape[(1, 1)].abs() < 1e-15 && fr.shape[(0, 1)].abs() < 1e-15);
        assert!((fr.mean_h - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((fr.norm_a_sq - 0.5).abs() < 1e-14);
    }

    #[test]
    fn plane_at_distance_three() {
        let inward = frame(SurfaceKind::Plane { offset: 3.0 }, Orientation::Inward, &[1.0, -4.0]);
        assert_eq!(inward.f, -3.0);
        assert_eq!(inward.normal.as_slice(), &[0.0, 0.0, -1.0]);
        assert_eq!(inward.mean_h, 0.0);
        assert_eq!(inward.norm_a_sq, 0.0);
        let outward = frame(SurfaceKind::Plane { offset: 3.0 }, Orientation::Outward, &[1.0, -4.0]);
        assert_eq!(outward.f, 3.0);
    }

    #[test]
    fn support_based_examples() {
        let fr = frame(SurfaceKind::Sphere { radius: 2.0, cap: Cap::North }, Orientation::Inward, &[0.3, 0.2]);
        assert!((support_based(&fr, &[0.0; 3]).unwrap() + 2.0).abs() < 1e-14);
        assert_eq!(support_based(&fr, &[0.0; 3]).unwrap(), fr.f);

        // (2, 0, 0) sits at u = 0, v = π/2 on the north cap.
        let fr = frame(
            SurfaceKind::Sphere { radius: 2.0, cap: Cap::North },
            Orientation::Inward,
            &[0.0, std::f64::consts::FRAC_PI_2],
        );
        assert!((fr.position[0] - 2.0).abs() < 1e-15);
        assert!((support_based(&fr, &[1.0, 0.0, 0.0]).unwrap() + 1.0).abs() < 1e-14);

        let fr = frame(SurfaceKind::Plane { offset: 0.0 }, Orientation::Outward, &[0.5, 0.5]);
        assert_eq!(fr.normal.as_slice(), &[0.0, 0.0, 1.0]);
        assert_eq!(support_based(&fr, &[0.0, 0.0, 5.0]).unwrap(), -5.0);
        assert!(support_based(&fr, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn orientation_requires_reference() {
        let spec = SurfaceSpec::inward(SurfaceKind::Circle { radius: 1.0 }).unwrap();
        let mut jet = spec.eval_jet(&[0.0]).unwrap();
        jet.inward_ref = None;
        assert!(matches!(frame_at(&jet, Orientation::Inward), Err(GeomError::OrientationUnknown(_))));
        assert!(frame_at(&jet, Orientation::AsComputed).is_ok());
    }

    fn any_surface() -> impl Strategy<Value = (SurfaceKind, Vec<f64>)> {
        let uv = (-1.2f64..1.2, -3.0f64..3.0);
        prop_oneof![
            (0.3f64..3.0, uv.clone())
                .prop_map(|(r, (u, v))| (SurfaceKind::Sphere { radius: r, cap: Cap::South }, vec![u, v])),
            (0.5f64..2.0, 0.5f64..2.0, 0.5f64..2.0, uv.clone()).prop_map(|(a, b, c, (u, v))| (
                SurfaceKind::Ellipsoid { axes: [a, b, c], cap: Cap::North },
                vec![u, v]
            )),
            (1.5f64..3.0, 0.1f64..1.0, uv.clone())
                .prop_map(|(rr, r, (u, v))| (SurfaceKind::Torus { major: rr, minor: r }, vec![u, v])),
            (-20.0f64..20.0, -1.0f64..1.0, 0.1f64..1.0).prop_map(|(t, z, a)| (
                SurfaceKind::SpiralCylinder {
                    curve: crate::gallery::profile::SpiralCurve::unit(
                        crate::gallery::profile::RadialProfile::arctan(1.0, a).unwrap()
                    )
                },
                vec![t, z]
            )),
        ]
    }

    proptest! {
        #[test]
        fn frame_invariants_hold((kind, u) in any_surface()) {
            let spec = SurfaceSpec::inward(kind).unwrap();
            let jet = spec.eval_jet(&u).unwrap();
            let fr = frame_at(&jet, Orientation::Inward).unwrap();
            let bad = fr.invariant_violations(&jet);
            prop_assert!(bad.is_empty(), "{:?}", bad);
        }

        #[test]
        fn orientation_flip((kind, u) in any_surface()) {
            let spec = SurfaceSpec::inward(kind).unwrap();
            let jet = spec.eval_jet(&u).unwrap();
            let a = frame_at(&jet, Orientation::Inward).unwrap();
            let b = frame_at(&jet, Orientation::Outward).unwrap();
            prop_assert_eq!(&a.g, &b.g);
            prop_assert_eq!(&a.normal, &(-&b.normal));
            prop_assert_eq!(a.f, -b.f);
            prop_assert_eq!(&a.h, &(-&b.h));
            prop_assert!((a.mean_h + b.mean_h).abs() <= 1e-14 * a.mean_h.abs().max(1.0));
            prop_assert!((a.norm_a_sq - b.norm_a_sq).abs() <= 1e-14 * a.norm_a_sq.max(1.0));
        }
    }
}
