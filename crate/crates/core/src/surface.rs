//! Parametric hypersurfaces described by exact second-order jets.
//!
//! Every analytic builder returns the position, the first partials and the
//! distinct second partials of its chart in closed form. Builders also attach
//! an *inward reference* vector so that [`Orientation::Inward`] is well
//! defined without inspecting the geometry:
//!
//! | builder           | chart                                              | inward side            |
//! |-------------------|----------------------------------------------------|------------------------|
//! | sphere, ellipsoid | `(a cos u sin v, b sin u, ±c cos u cos v)`, one cap per sign | towards the centre (`f < 0`) |
//! | torus             | `((R + r cos v) cos u, (R + r cos v) sin u, r sin v)` | towards the tube core |
//! | cylinder          | `(ρ cos u, ρ sin u, z)`                           | towards the axis       |
//! | plane             | `(u, v, d)`                                       | towards the origin; `−z` when `d = 0` |
//! | circle, line      | planar analogues (`n = 1`)                         | as above               |
//! | spiral, spiral cylinder | `Γ(t)` and `(Γ(t), z)`                      | towards the origin (`⟨Γ, N⟩ < 0`) |

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::gallery::profile::SpiralCurve;
use crate::grid::ParamGrid;

/// Relative Gram-determinant threshold below which a jet is rejected.
pub const JET_RANK_TOL: f64 = 1e-8;

/// Second-order jet of an immersion `X: U ⊂ ℝⁿ → ℝⁿ⁺¹` at one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersionJet {
    pub x: DVector<f64>,
    pub dx: Vec<DVector<f64>>,
    /// Distinct second partials `∂ᵢ∂ⱼX`, `i ≤ j`, in the order given by [`pair_index`].
    pub ddx: Vec<DVector<f64>>,
    /// A vector on the inward side of the hypersurface, when the builder knows it.
    pub inward_ref: Option<DVector<f64>>,
}

/// Packed position of the unordered pair `{i, j}` among the `n(n+1)/2` second partials.
pub fn pair_index(i: usize, j: usize, n: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * (2 * n - i + 1) / 2 + (j - i)
}

impl ImmersionJet {
    pub fn new(
        x: DVector<f64>,
        dx: Vec<DVector<f64>>,
        ddx: Vec<DVector<f64>>,
        inward_ref: Option<DVector<f64>>,
    ) -> Result<Self> {
        let n = dx.len();
        let ambient = x.len();
        if n == 0 || ambient != n + 1 {
            return Err(GeomError::BadDimension(format!(
                "jet with {n} tangent columns in ambient dimension {ambient}; codimension must be 1"
            )));
        }
        if ddx.len() != n * (n + 1) / 2 {
            return Err(GeomError::BadDimension(format!(
                "{} second partials, expected {}",
                ddx.len(),
                n * (n + 1) / 2
            )));
        }
        let vectors = dx.iter().chain(&ddx).chain(inward_ref.iter());
        if vectors.into_iter().any(|v| v.len() != ambient) {
            return Err(GeomError::BadDimension("jet vectors differ in length".into()));
        }
        let jet = Self { x, dx, ddx, inward_ref };
        jet.check_rank()?;
        Ok(jet)
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.dx.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.len()
    }

    pub fn second(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.ddx[pair_index(i, j, self.intrinsic_dim())]
    }

    /// `det(g) / scale^{2n}` with `scale` the largest column norm of `dx`.
    pub fn normalized_gram_det(&self) -> f64 {
        let n = self.intrinsic_dim();
        let scale = self.dx.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let gram = nalgebra::DMatrix::from_fn(n, n, |i, j| self.dx[i].dot(&self.dx[j]));
        gram.determinant() / scale.powi(2 * n as i32)
    }

    fn check_rank(&self) -> Result<()> {
        let det = self.normalized_gram_det();
        if det > JET_RANK_TOL {
            Ok(())
        } else {
            Err(GeomError::DegenerateJet {
                normalized_det: det,
                tol: JET_RANK_TOL,
            })
        }
    }
}

/// Which of the two unit normals a frame uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    Inward,
    Outward,
    /// The raw generalized cross product of the tangent columns.
    AsComputed,
}

impl std::str::FromStr for Orientation {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inward" => Ok(Self::Inward),
            "outward" => Ok(Self::Outward),
            "as-computed" => Ok(Self::AsComputed),
            other => Err(GeomError::InvalidParameter(format!("unknown orientation `{other}`"))),
        }
    }
}

/// Polar cap of a sphere or ellipsoid chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cap {
    North,
    South,
}

impl Cap {
    fn sign(self) -> f64 {
        match self {
            Cap::North => 1.0,
            Cap::South => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SurfaceKind {
    Sphere { radius: f64, cap: Cap },
    Ellipsoid { axes: [f64; 3], cap: Cap },
    Torus { major: f64, minor: f64 },
    /// Round cylinder `𝕊¹(radius) × ℝ`.
    Cylinder { radius: f64 },
    /// Horizontal plane `z = offset`.
    Plane { offset: f64 },
    /// Circle of the given radius about the origin in ℝ².
    Circle { radius: f64 },
    /// Horizontal line `y = offset` in ℝ².
    Line { offset: f64 },
    /// The planar spiral `Γ(t)` itself.
    Spiral { curve: SpiralCurve },
    /// `Γ × ℝ ⊂ ℝ³`.
    SpiralCylinder { curve: SpiralCurve },
    /// Stored jets at the nodes of a grid.
    #[serde(skip)]
    Tabulated { grid: ParamGrid, jets: Vec<ImmersionJet> },
}

/// A hypersurface together with its normal-orientation convention.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub orientation: Orientation,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(GeomError::InvalidParameter(format!("{name} = {v} must be > 0")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(GeomError::InvalidParameter(format!("{name} must be finite")))
    }
}

fn v3(x: f64, y: f64, z: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y, z])
}

fn v2(x: f64, y: f64) -> DVector<f64> {
    DVector::from_vec(vec![x, y])
}

impl SurfaceSpec {
    pub fn new(kind: SurfaceKind, orientation: Orientation) -> Result<Self> {
        match &kind {
            SurfaceKind::Sphere { radius, .. } => positive("radius", *radius)?,
            SurfaceKind::Ellipsoid { axes, .. } => {
                for (name, a) in ["a", "b", "c"].iter().zip(axes) {
                    positive(name, *a)?;
                }
            }
            SurfaceKind::Torus { major, minor } => {
                positive("R", *major)?;
                positive("r", *minor)?;
                if minor >= major {
                    return Err(GeomError::InvalidParameter(format!(
                        "torus needs r < R (got r = {minor}, R = {major})"
                    )));
                }
            }
            SurfaceKind::Cylinder { radius } | SurfaceKind::Circle { radius } => {
                positive("radius", *radius)?
            }
            SurfaceKind::Plane { offset } | SurfaceKind::Line { offset } => finite("offset", *offset)?,
            SurfaceKind::Spiral { curve } | SurfaceKind::SpiralCylinder { curve } => {
                positive("d", curve.d)?
            }
            SurfaceKind::Tabulated { grid, jets } => {
                if jets.len() != grid.len() {
                    return Err(GeomError::GridMismatch(format!(
                        "{} jets for {} grid nodes",
                        jets.len(),
                        grid.len()
                    )));
                }
                if jets.iter().any(|j| j.intrinsic_dim() != grid.dim()) {
                    return Err(GeomError::BadDimension(
                        "tabulated jet dimension differs from grid dimension".into(),
                    ));
                }
            }
        }
        Ok(Self { kind, orientation })
    }

    /// Builder with the inward orientation.
    pub fn inward(kind: SurfaceKind) -> Result<Self> {
        Self::new(kind, Orientation::Inward)
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn name(&self) -> &'static str {
        match &self.kind {
            SurfaceKind::Sphere { .. } => "sphere",
            SurfaceKind::Ellipsoid { .. } => "ellipsoid",
            SurfaceKind::Torus { .. } => "torus",
            SurfaceKind::Cylinder { .. } => "cylinder",
            SurfaceKind::Plane { .. } => "plane",
            SurfaceKind::Circle { .. } => "circle",
            SurfaceKind::Line { .. } => "line",
            SurfaceKind::Spiral { .. } => "spiral",
            SurfaceKind::SpiralCylinder { .. } => "spiral-cylinder",
            SurfaceKind::Tabulated { .. } => "tabulated",
        }
    }

    pub fn intrinsic_dim(&self) -> usize {
        match &self.kind {
            SurfaceKind::Circle { .. } | SurfaceKind::Line { .. } | SurfaceKind::Spiral { .. } => 1,
            SurfaceKind::Tabulated { grid, .. } => grid.dim(),
            _ => 2,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.intrinsic_dim() + 1
    }

    /// A parameter box on which every builder chart is regular.
    pub fn default_ranges(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            SurfaceKind::Sphere { .. } | SurfaceKind::Ellipsoid { .. } => vec![(-1.0, 1.0); 2],
            SurfaceKind::Torus { .. } => vec![(-FRAC_PI_2, FRAC_PI_2), (-PI, PI)],
            SurfaceKind::Cylinder { .. } => vec![(-PI, PI), (-1.0, 1.0)],
            SurfaceKind::Plane { .. } => vec![(-2.0, 2.0); 2],
            SurfaceKind::Circle { .. } => vec![(-PI, PI)],
            SurfaceKind::Line { .. } => vec![(-2.0, 2.0)],
            SurfaceKind::Spiral { .. } => vec![(-10.0, 10.0)],
            SurfaceKind::SpiralCylinder { .. } => vec![(-10.0, 10.0), (-1.0, 1.0)],
            SurfaceKind::Tabulated { grid, .. } => grid.ranges().to_vec(),
        }
    }

    /// For vertical cylinders over a planar curve, the curve itself.
    ///
    /// Tangent planes of `Γ × ℝ` are vertical planes over the tangent lines of `Γ`,
    /// so questions about the tangent-plane union reduce to the plane.
    pub fn planar_section(&self) -> Option<SurfaceSpec> {
        let kind = match &self.kind {
            SurfaceKind::Cylinder { radius } => SurfaceKind::Circle { radius: *radius },
            SurfaceKind::SpiralCylinder { curve } => SurfaceKind::Spiral { curve: curve.clone() },
            _ => return None,
        };
        Some(SurfaceSpec { kind, orientation: self.orientation })
    }

    fn out_of_domain(&self, u: &[f64]) -> GeomError {
        GeomError::OutOfDomain {
            surface: self.name().to_string(),
            point: u.to_vec(),
        }
    }

    /// Exact jet of the chart at `u`.
    pub fn eval_jet(&self, u: &[f64]) -> Result<ImmersionJet> {
        if u.len() != self.intrinsic_dim() || u.iter().any(|c| !c.is_finite()) {
            return Err(self.out_of_domain(u));
        }
        match &self.kind {
            SurfaceKind::Sphere { radius, cap } => {
                if u[0].abs() >= FRAC_PI_2 || u[1].abs() > PI {
                    return Err(self.out_of_domain(u));
                }
                ellipsoid_jet([*radius; 3], *cap, u[0], u[1])
            }
            SurfaceKind::Ellipsoid { axes, cap } => {
                if u[0].abs() >= FRAC_PI_2 || u[1].abs() > PI {
                    return Err(self.out_of_domain(u));
                }
                ellipsoid_jet(*axes, *cap, u[0], u[1])
            }
            SurfaceKind::Torus { major, minor } => torus_jet(*major, *minor, u[0], u[1]),
            SurfaceKind::Cylinder { radius } => {
                let (s, c) = u[0].sin_cos();
                let r = *radius;
                ImmersionJet::new(
                    v3(r * c, r * s, u[1]),
                    vec![v3(-r * s, r * c, 0.0), v3(0.0, 0.0, 1.0)],
                    vec![v3(-r * c, -r * s, 0.0), v3(0.0, 0.0, 0.0), v3(0.0, 0.0, 0.0)],
                    Some(v3(-c, -s, 0.0)),
                )
            }
            SurfaceKind::Plane { offset } => {
                let side = if *offset >= 0.0 { -1.0 } else { 1.0 };
                ImmersionJet::new(
                    v3(u[0], u[1], *offset),
                    vec![v3(1.0, 0.0, 0.0), v3(0.0, 1.0, 0.0)],
                    vec![DVector::zeros(3), DVector::zeros(3), DVector::zeros(3)],
                    Some(v3(0.0, 0.0, side)),
                )
            }
            SurfaceKind::Circle { radius } => {
                let (s, c) = u[0].sin_cos();
                let r = *radius;
                ImmersionJet::new(
                    v2(r * c, r * s),
                    vec![v2(-r * s, r * c)],
                    vec![v2(-r * c, -r * s)],
                    Some(v2(-c, -s)),
                )
            }
            SurfaceKind::Line { offset } => {
                let side = if *offset >= 0.0 { -1.0 } else { 1.0 };
                ImmersionJet::new(
                    v2(u[0], *offset),
                    vec![v2(1.0, 0.0)],
                    vec![DVector::zeros(2)],
                    Some(v2(0.0, side)),
                )
            }
            SurfaceKind::Spiral { curve } => {
                let t = u[0];
                let [px, py] = curve.point(t);
                let [vx, vy] = curve.velocity(t);
                let [ax, ay] = curve.acceleration(t);
                let [nx, ny] = curve.inward_normal(t);
                ImmersionJet::new(v2(px, py), vec![v2(vx, vy)], vec![v2(ax, ay)], Some(v2(nx, ny)))
            }
            SurfaceKind::SpiralCylinder { curve } => {
                let t = u[0];
                let [px, py] = curve.point(t);
                let [vx, vy] = curve.velocity(t);
                let [ax, ay] = curve.acceleration(t);
                let [nx, ny] = curve.inward_normal(t);
                ImmersionJet::new(
                    v3(px, py, u[1]),
                    vec![v3(vx, vy, 0.0), v3(0.0, 0.0, 1.0)],
                    vec![v3(ax, ay, 0.0), DVector::zeros(3), DVector::zeros(3)],
                    Some(v3(nx, ny, 0.0)),
                )
            }
            SurfaceKind::Tabulated { grid, jets } => {
                let mut multi = Vec::with_capacity(grid.dim());
                for (axis, &c) in u.iter().enumerate() {
                    let (lo, _) = grid.ranges()[axis];
                    let h = grid.spacing()[axis];
                    let k = ((c - lo) / h).round();
                    let snap = (c - lo - k * h).abs() <= 1e-9 * h;
                    if k < 0.0 || k as usize >= grid.counts()[axis] || !snap {
                        return Err(self.out_of_domain(u));
                    }
                    multi.push(k as usize);
                }
                Ok(jets[grid.flat_index(&multi)].clone())
            }
        }
    }
}

fn ellipsoid_jet(axes: [f64; 3], cap: Cap, u: f64, v: f64) -> Result<ImmersionJet> {
    let [a, b, c] = axes;
    let c = c * cap.sign();
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let x = v3(a * cu * sv, b * su, c * cu * cv);
    let inward = -x.clone();
    ImmersionJet::new(
        x,
        vec![v3(-a * su * sv, b * cu, -c * su * cv), v3(a * cu * cv, 0.0, -c * cu * sv)],
        vec![
            v3(-a * cu * sv, -b * su, -c * cu * cv),
            v3(-a * su * cv, 0.0, c * su * sv),
            v3(-a * cu * sv, 0.0, -c * cu * cv),
        ],
        Some(inward),
    )
}

fn torus_jet(major: f64, minor: f64, u: f64, v: f64) -> Result<ImmersionJet> {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let rho = major + minor * cv;
    ImmersionJet::new(
        v3(rho * cu, rho * su, minor * sv),
        vec![v3(-rho * su, rho * cu, 0.0), v3(-minor * sv * cu, -minor * sv * su, minor * cv)],
        vec![
            v3(-rho * cu, -rho * su, 0.0),
            v3(minor * sv * su, -minor * sv * cu, 0.0),
            v3(-minor * cv * cu, -minor * cv * su, -minor * sv),
        ],
        Some(v3(-cv * cu, -cv * su, -sv)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::profile::RadialProfile;

    fn central_jet_check(spec: &SurfaceSpec, u: &[f64]) {
        let h = 1e-5;
        let jet = spec.eval_jet(u).unwrap();
        let n = u.len();
        for i in 0..n {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[i] += h;
            dn[i] -= h;
            let (jp, jm) = (spec.eval_jet(&up).unwrap(), spec.eval_jet(&dn).unwrap());
            let fd = (&jp.x - &jm.x) / (2.0 * h);
            assert!((fd - &jet.dx[i]).norm() < 1e-8, "{} dx{i}", spec.name());
            for j in 0..n {
                let fd2 = (&jp.dx[j] - &jm.dx[j]) / (2.0 * h);
                assert!((fd2 - jet.second(i, j)).norm() < 1e-8, "{} ddx{i}{j}", spec.name());
            }
        }
    }

    #[test]
    fn pair_index_packs_upper_triangle() {
        assert_eq!(pair_index(0, 0, 1), 0);
        assert_eq!(pair_index(0, 0, 2), 0);
        assert_eq!(pair_index(0, 1, 2), 1);
        assert_eq!(pair_index(1, 0, 2), 1);
        assert_eq!(pair_index(1, 1, 2), 2);
    }

    #[test]
    fn analytic_jets_are_consistent() {
        let spiral = SpiralCurve::unit(RadialProfile::arctan(1.0, 1.0).unwrap());
        let specs = [
            SurfaceKind::Sphere { radius: 2.0, cap: Cap::North },
            SurfaceKind::Ellipsoid { axes: [1.0, 1.5, 2.0], cap: Cap::South },
            SurfaceKind::Torus { major: 2.0, minor: 0.5 },
            SurfaceKind::Cylinder { radius: 2f64.sqrt() },
            SurfaceKind::SpiralCylinder { curve: spiral.clone() },
        ];
        for kind in specs {
            let spec = SurfaceSpec::inward(kind).unwrap();
            central_jet_check(&spec, &[0.3, -0.4]);
        }
        let planar = [SurfaceKind::Circle { radius: 1.3 }, SurfaceKind::Spiral { curve: spiral }];
        for kind in planar {
            central_jet_check(&SurfaceSpec::inward(kind).unwrap(), &[0.7]);
        }
    }

    #[test]
    fn sphere_chart_center_is_north_pole() {
        let spec = SurfaceSpec::inward(SurfaceKind::Sphere { radius: 2.0, cap: Cap::North }).unwrap();
        let jet = spec.eval_jet(&[0.0, 0.0]).unwrap();
        assert_eq!(jet.x.as_slice(), &[0.0, 0.0, 2.0]);
        assert_eq!(jet.dx[0].dot(&jet.dx[1]), 0.0);
        // Gram det = r⁴ cos²u, normalized by scale⁴ = r⁴.
        assert!((jet.normalized_gram_det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plane_jet_is_flat() {
        let spec = SurfaceSpec::inward(SurfaceKind::Plane { offset: 0.0 }).unwrap();
        for u in [[0.0, 0.0], [1.5, -0.7]] {
            let jet = spec.eval_jet(&u).unwrap();
            assert!(jet.ddx.iter().all(|v| v.iter().all(|&c| c == 0.0)));
        }
    }

    #[test]
    fn exp_spiral_cylinder_starts_at_two() {
        let curve = SpiralCurve::unit(RadialProfile::Exp);
        let spec = SurfaceSpec::inward(SurfaceKind::SpiralCylinder { curve }).unwrap();
        let jet = spec.eval_jet(&[0.0, 0.0]).unwrap();
        assert_eq!(jet.x.as_slice(), &[2.0, 0.0, 0.0]);
    }

    #[test]
    fn domain_and_degeneracy_errors() {
        let spec = SurfaceSpec::inward(SurfaceKind::Sphere { radius: 2.0, cap: Cap::North }).unwrap();
        assert!(matches!(spec.eval_jet(&[2.0, 0.0]), Err(GeomError::OutOfDomain { .. })));
        assert!(matches!(spec.eval_jet(&[0.0]), Err(GeomError::OutOfDomain { .. })));
        assert!(matches!(
            spec.eval_jet(&[FRAC_PI_2 - 1e-6, 0.0]),
            Err(GeomError::DegenerateJet { .. })
        ));
        let flat = ImmersionJet::new(
            v3(0.0, 0.0, 0.0),
            vec![v3(1.0, 0.0, 0.0), v3(2.0, 0.0, 0.0)],
            vec![DVector::zeros(3); 3],
            None,
        );
        assert!(matches!(flat, Err(GeomError::DegenerateJet { .. })));
    }

    #[test]
    fn tabulated_lookup_snaps_to_nodes() {
        let grid = ParamGrid::new(vec![(0.0, 1.0)], vec![5]).unwrap();
        let circle = SurfaceSpec::inward(SurfaceKind::Circle { radius: 1.0 }).unwrap();
        let jets = grid.points().iter().map(|p| circle.eval_jet(p).unwrap()).collect();
        let spec = SurfaceSpec::inward(SurfaceKind::Tabulated { grid, jets }).unwrap();
        let j = spec.eval_jet(&[0.5]).unwrap();
        assert_eq!(j, circle.eval_jet(&[0.5]).unwrap());
        assert!(spec.eval_jet(&[0.3]).is_err());
        assert!(spec.eval_jet(&[1.25]).is_err());
    }

    #[test]
    fn invalid_builders_rejected() {
        assert!(SurfaceSpec::inward(SurfaceKind::Sphere { radius: -1.0, cap: Cap::North }).is_err());
        assert!(SurfaceSpec::inward(SurfaceKind::Torus { major: 1.0, minor: 2.0 }).is_err());
    }
}
