//! Geometry of hypersurfaces in ℝⁿ⁺¹ as seen by self-shrinker identities:
//! local frames, discrete operators and residual studies, tangent-plane
//! omission, and a gallery of closed-form examples.

pub mod calculus;
pub mod error;
pub mod frame;
pub mod gallery;
pub mod grid;
pub mod identity;
pub mod omission;
pub mod surface;

pub use calculus::{DriftOperator, RESIDUAL_MARGIN};
pub use error::{GeomError, Result};
pub use frame::{frame_at, support_based, GeomFrame};
pub use gallery::{canonical_shrinker, RadialProfile, SpiralCurve};
pub use grid::{ParamGrid, ScalarField, VectorField};
pub use identity::{shrinker_residual, Identity, IdentityReport, IdentityStudy};
pub use omission::{
    coverage_raster, omission_certificate, AffineTangent, CoverageRaster, OmissionCertificate, RasterBox, SampleSet,
};
pub use surface::{Cap, ImmersionJet, Orientation, SurfaceKind, SurfaceSpec};
