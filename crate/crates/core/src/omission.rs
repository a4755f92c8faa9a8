//! Tangent affine subspaces, their distances to query points, and the set `W`
//! of ambient points that no tangent plane passes through.
//!
//! Everything here works on finite parameter samples. A nonvanishing
//! certificate or an uncovered raster cell says nothing about parameters
//! between the samples; reports carry the sample density so that claims can
//! be audited.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::frame::{frame_at, support_based, GeomFrame};
use crate::grid::ParamGrid;
use crate::surface::{ImmersionJet, SurfaceSpec};

/// `X(p) + dX_p(T_pΣ)` with an orthonormal basis and unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineTangent {
    pub base: DVector<f64>,
    pub basis: Vec<DVector<f64>>,
    pub normal: DVector<f64>,
}

impl AffineTangent {
    pub fn new(base: DVector<f64>, basis: Vec<DVector<f64>>, normal: DVector<f64>) -> Result<Self> {
        let dim = base.len();
        if basis.len() + 1 != dim || normal.len() != dim || basis.iter().any(|b| b.len() != dim) {
            return Err(GeomError::BadDimension("tangent plane must have codimension one".into()));
        }
        let orthonormal = basis.iter().enumerate().all(|(i, a)| {
            basis.iter().enumerate().all(|(j, b)| {
                let target = if i == j { 1.0 } else { 0.0 };
                (a.dot(b) - target).abs() < 1e-10
            }) && a.dot(&normal).abs() < 1e-10
        });
        if !orthonormal || (normal.norm() - 1.0).abs() > 1e-10 {
            return Err(GeomError::InvalidParameter("tangent basis is not orthonormal".into()));
        }
        Ok(Self { base, basis, normal })
    }

    /// Tangent plane at a jet, basis from Gram–Schmidt on the coordinate columns.
    pub fn from_jet(jet: &ImmersionJet, frame: &GeomFrame) -> Result<Self> {
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(jet.dx.len());
        for col in &jet.dx {
            let mut v = col.clone();
            for b in &basis {
                v -= b * b.dot(col);
            }
            basis.push(v.normalize());
        }
        Self::new(jet.x.clone(), basis, frame.normal.clone())
    }

    /// `⟨base, normal⟩`: the plane is `{q : ⟨q, N⟩ = offset}`.
    pub fn offset(&self) -> f64 {
        self.base.dot(&self.normal)
    }
}

/// `|⟨q − base, N⟩|`; in codimension one the normal component is the whole distance.
pub fn point_plane_distance(q: &[f64], plane: &AffineTangent) -> f64 {
    q.iter()
        .zip(plane.base.iter())
        .zip(plane.normal.iter())
        .map(|((q, b), n)| (q - b) * n)
        .sum::<f64>()
        .abs()
}

/// Orthogonal projection `q − ⟨q − base, N⟩ N`.
pub fn project_onto_tangent(q: &[f64], plane: &AffineTangent) -> Vec<f64> {
    let s: f64 = q
        .iter()
        .zip(plane.base.iter())
        .zip(plane.normal.iter())
        .map(|((q, b), n)| (q - b) * n)
        .sum();
    q.iter().zip(plane.normal.iter()).map(|(q, n)| q - s * n).collect()
}

/// Finite set of parameter points, with the grid spacing when it came from a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub points: Vec<Vec<f64>>,
    pub spacing: Option<Vec<f64>>,
}

impl SampleSet {
    pub fn from_grid(grid: &ParamGrid) -> Self {
        Self {
            points: grid.points(),
            spacing: Some(grid.spacing().to_vec()),
        }
    }

    pub fn from_points(points: Vec<Vec<f64>>) -> Self {
        Self { points, spacing: None }
    }

    /// `count` equally spaced values of a single parameter on `[lo, hi]`.
    pub fn linspace(lo: f64, hi: f64, count: usize) -> Self {
        let step = if count > 1 { (hi - lo) / (count - 1) as f64 } else { 0.0 };
        Self {
            points: (0..count).map(|i| vec![lo + i as f64 * step]).collect(),
            spacing: Some(vec![step]),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmissionCertificate {
    /// `min |⟨X − p0, N⟩|` over the samples.
    pub min_support: f64,
    pub argmin: Vec<f64>,
    /// `min |proj(p0) − p0|` over the sampled tangent planes.
    pub min_plane_distance: f64,
    pub cert_tol: f64,
    /// True when `min_support > cert_tol`: `p0` avoids every *sampled* tangent plane.
    pub all_nonzero: bool,
    pub samples: usize,
    pub sample_spacing: Option<Vec<f64>>,
}

/// Relative scale of the default nonvanishing tolerance.
pub const CERT_TOL_REL: f64 = 1e-6;

fn tangents(spec: &SurfaceSpec, samples: &SampleSet) -> Result<Vec<(ImmersionJet, GeomFrame)>> {
    samples
        .points
        .par_iter()
        .map(|u| {
            let jet = spec.eval_jet(u)?;
            let frame = frame_at(&jet, spec.orientation)?;
            Ok((jet, frame))
        })
        .collect()
}

/// Checks that `p0` lies on none of the sampled tangent planes.
pub fn omission_certificate(
    spec: &SurfaceSpec,
    samples: &SampleSet,
    p0: &[f64],
    cert_tol: Option<f64>,
) -> Result<OmissionCertificate> {
    if samples.is_empty() {
        return Err(GeomError::EmptySample);
    }
    let sampled = tangents(spec, samples)?;
    let mut lo = p0.to_vec();
    let mut hi = p0.to_vec();
    let mut best = (f64::INFINITY, 0usize);
    let mut min_plane = f64::INFINITY;
    for (k, (jet, frame)) in sampled.iter().enumerate() {
        let s = support_based(frame, p0)?.abs();
        if s < best.0 {
            best = (s, k);
        }
        let plane = AffineTangent::from_jet(jet, frame)?;
        let proj = project_onto_tangent(p0, &plane);
        let d = proj.iter().zip(p0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        min_plane = min_plane.min(d);
        for (i, x) in jet.x.iter().enumerate() {
            lo[i] = lo[i].min(*x);
            hi[i] = hi[i].max(*x);
        }
    }
    let scale = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    let cert_tol = cert_tol.unwrap_or(CERT_TOL_REL * if scale > 0.0 { scale } else { 1.0 });
    Ok(OmissionCertificate {
        min_support: best.0,
        argmin: samples.points[best.1].clone(),
        min_plane_distance: min_plane,
        cert_tol,
        all_nonzero: best.0 > cert_tol,
        samples: samples.len(),
        sample_spacing: samples.spacing.clone(),
    })
}

/// Axis-aligned box divided into equal cells; cells are stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RasterBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells: Vec<usize>,
}

impl RasterBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>) -> Result<Self> {
        if lo.len() != hi.len() || lo.len() != cells.len() || !(2..=3).contains(&lo.len()) {
            return Err(GeomError::BadDimension("raster box must be 2- or 3-dimensional".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && b > a)) || cells.contains(&0) {
            return Err(GeomError::InvalidParameter("raster box must have positive extent and cells".into()));
        }
        Ok(Self { lo, hi, cells })
    }

    /// Square planar box `[lo, hi]²` with `cells × cells` cells.
    pub fn square(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        Self::new(vec![lo; 2], vec![hi; 2], vec![cells; 2])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_size(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| (self.hi[i] - self.lo[i]) / self.cells[i] as f64)
            .collect()
    }

    pub fn cell_diagonal(&self) -> f64 {
        self.cell_size().iter().map(|s| s * s).sum::<f64>().sqrt()
    }

    pub fn center(&self, mut idx: usize) -> Vec<f64> {
        let size = self.cell_size();
        let mut out = vec![0.0; self.dim()];
        for axis in (0..self.dim()).rev() {
            let i = idx % self.cells[axis];
            idx /= self.cells[axis];
            out[axis] = self.lo[axis] + (i as f64 + 0.5) * size[axis];
        }
        out
    }
}

/// Default covering tolerance as a multiple of the cell diagonal.
pub const COVER_TOL_DIAGONALS: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRaster {
    pub raster_box: RasterBox,
    pub min_dist: Vec<f64>,
    pub covered: Vec<bool>,
    pub cover_tol: f64,
    pub planes: usize,
    /// Set when a vertical cylinder `Γ × ℝ` was rasterized through its planar section.
    pub planar_reduction: bool,
    pub sample_spacing: Option<Vec<f64>>,
}

impl CoverageRaster {
    pub fn centers(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.raster_box.len()).map(|i| self.raster_box.center(i))
    }

    /// Number of covered cells among those whose center satisfies `pred`.
    pub fn count_covered(&self, pred: impl Fn(&[f64]) -> bool) -> (usize, usize) {
        let mut hit = 0;
        let mut total = 0;
        for (i, c) in self.centers().enumerate() {
            if pred(&c) {
                total += 1;
                hit += usize::from(self.covered[i]);
            }
        }
        (hit, total)
    }

    /// Covered fraction of cells whose center norm lies in `[r_lo, r_hi]`.
    pub fn covered_fraction_in_shell(&self, r_lo: f64, r_hi: f64) -> f64 {
        let (hit, total) = self.count_covered(|c| {
            let r = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            r >= r_lo && r <= r_hi
        });
        if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        }
    }
}

fn min_distance<const D: usize>(q: &[f64], planes: &[[f64; 4]]) -> f64 {
    let mut best = f64::INFINITY;
    for p in planes {
        let mut s = -p[3];
        for k in 0..D {
            s += q[k] * p[k];
        }
        best = best.min(s.abs());
    }
    best
}

/// Rasterizes the distance from each cell center to the nearest of the given tangent planes.
pub fn coverage_from_tangents(
    planes: &[AffineTangent],
    raster_box: &RasterBox,
    cover_tol: Option<f64>,
) -> Result<CoverageRaster> {
    if planes.is_empty() {
        return Err(GeomError::EmptySample);
    }
    let dim = raster_box.dim();
    if planes.iter().any(|p| p.base.len() != dim) {
        return Err(GeomError::BadDimension(format!(
            "tangent planes do not live in the {dim}-dimensional raster space"
        )));
    }
    let packed: Vec<[f64; 4]> = planes
        .iter()
        .map(|p| {
            let mut row = [0.0; 4];
            for (k, n) in p.normal.iter().enumerate() {
                row[k] = *n;
            }
            row[3] = p.offset();
            row
        })
        .collect();
    let cover_tol = cover_tol.unwrap_or(COVER_TOL_DIAGONALS * raster_box.cell_diagonal());
    let min_dist: Vec<f64> = (0..raster_box.len())
        .into_par_iter()
        .map(|i| {
            let q = raster_box.center(i);
            match dim {
                2 => min_distance::<2>(&q, &packed),
                _ => min_distance::<3>(&q, &packed),
            }
        })
        .collect();
    let covered = min_dist.iter().map(|&d| d <= cover_tol).collect();
    Ok(CoverageRaster {
        raster_box: raster_box.clone(),
        min_dist,
        covered,
        cover_tol,
        planes: planes.len(),
        planar_reduction: false,
        sample_spacing: None,
    })
}

/// Coverage of a raster box by the tangent planes at the sampled parameters.
///
/// When the box is planar and the surface is a vertical cylinder over a plane
/// curve, the first parameter of each sample is used on the curve and the
/// raster describes every horizontal slice.
pub fn coverage_raster(
    spec: &SurfaceSpec,
    samples: &SampleSet,
    raster_box: &RasterBox,
    cover_tol: Option<f64>,
) -> Result<CoverageRaster> {
    if samples.is_empty() {
        return Err(GeomError::EmptySample);
    }
    let (surface, points, reduced) = if raster_box.dim() == spec.ambient_dim() {
        (spec.clone(), samples.points.clone(), false)
    } else if let (2, Some(section)) = (raster_box.dim(), spec.planar_section()) {
        let mut ts: Vec<f64> = samples.points.iter().map(|u| u[0]).collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        (section, ts.into_iter().map(|t| vec![t]).collect(), true)
    } else {
        return Err(GeomError::BadDimension(format!(
            "{}-dimensional raster for {} in ℝ^{}",
            raster_box.dim(),
            spec.name(),
            spec.ambient_dim()
        )));
    };
    let planes: Vec<AffineTangent> = tangents(&surface, &SampleSet::from_points(points))?
        .iter()
        .map(|(jet, frame)| AffineTangent::from_jet(jet, frame))
        .collect::<Result<_>>()?;
    let mut raster = coverage_from_tangents(&planes, raster_box, cover_tol)?;
    raster.planar_reduction = reduced;
    raster.sample_spacing = samples.spacing.clone();
    Ok(raster)
}
