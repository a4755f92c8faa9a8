//! Closed-form shrinkers and the spiral-cylinder family.

pub mod conditions;
pub mod profile;
pub mod spiral;

pub use conditions::{profile_conditions_check, ConditionReport, ConditionResult};
pub use profile::{Limit, ProfileTable, RadialProfile, SpiralCurve};
pub use spiral::{
    exp_remark_check, inequality_chain_check, properness_diagnostic, spiral_curvature, tangent_norm_sq,
    weighted_mean_curvature_scan, ChainReport, ExpRemarkReport, ExpRemarkTerms, LinkResult, ProperReport,
    TangentNorm, TrapRow, TrapVerdict, WeightedScan,
};

use crate::error::{GeomError, Result};
use crate::surface::{Cap, SurfaceKind, SurfaceSpec};

/// `𝕊ᵖ(√(2p)) × ℝ^{n−p}` with the inward normal; `p = 0` is the hyperplane through the origin.
pub fn canonical_shrinker(p: usize, n: usize) -> Result<SurfaceSpec> {
    if p > n {
        return Err(GeomError::BadDimension(format!("p = {p} exceeds n = {n}")));
    }
    let radius = (2.0 * p as f64).sqrt();
    let kind = match (p, n) {
        (2, 2) => SurfaceKind::Sphere { radius, cap: Cap::North },
        (1, 2) => SurfaceKind::Cylinder { radius },
        (0, 2) => SurfaceKind::Plane { offset: 0.0 },
        (1, 1) => SurfaceKind::Circle { radius },
        (0, 1) => SurfaceKind::Line { offset: 0.0 },
        _ => return Err(GeomError::BadDimension(format!("only n = 1, 2 are supported (got n = {n})"))),
    };
    SurfaceSpec::inward(kind)
}
