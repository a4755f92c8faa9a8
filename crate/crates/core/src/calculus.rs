//! Second-order finite-difference tangential calculus on parameter grids.
//!
//! Operators act on node values together with the exact [`GeomFrame`] at each
//! node. Derivatives are central in the interior and one-sided (second order)
//! on the grid faces; nodes within [`RESIDUAL_MARGIN`] of a face are excluded
//! from residual norms by the identity checks.

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::frame::{frame_at, GeomFrame};
use crate::grid::{partial, ParamGrid, ScalarField, VectorField};
use crate::surface::SurfaceSpec;

/// Nodes this close to a face see at least one one-sided stencil.
pub const RESIDUAL_MARGIN: usize = 2;

/// Jets and frames at every node, evaluated in parallel, returned in node order.
pub fn sample_frames(spec: &SurfaceSpec, grid: &ParamGrid) -> Result<Vec<GeomFrame>> {
    if grid.dim() != spec.intrinsic_dim() {
        return Err(GeomError::GridMismatch(format!(
            "{}-dimensional grid for {}-dimensional {}",
            grid.dim(),
            spec.intrinsic_dim(),
            spec.name()
        )));
    }
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let jet = spec.eval_jet(&grid.point(i))?;
            frame_at(&jet, spec.orientation)
        })
        .collect()
}

/// Scalar field obtained by reading one quantity off each frame.
pub fn frame_field(grid: &ParamGrid, frames: &[GeomFrame], f: impl Fn(&GeomFrame) -> f64) -> Result<ScalarField> {
    check(grid, frames)?;
    ScalarField::new(grid.clone(), frames.iter().map(f).collect())
}

fn check(grid: &ParamGrid, frames: &[GeomFrame]) -> Result<()> {
    if frames.len() != grid.len() {
        return Err(GeomError::GridMismatch(format!(
            "{} frames for {} nodes",
            frames.len(),
            grid.len()
        )));
    }
    if let Some(fr) = frames.first() {
        if fr.intrinsic_dim() != grid.dim() {
            return Err(GeomError::GridMismatch("frame dimension differs from grid dimension".into()));
        }
    }
    Ok(())
}

fn coordinate_gradient(field: &ScalarField) -> Vec<Vec<f64>> {
    let grid = &field.grid;
    (0..grid.dim())
        .map(|axis| {
            (0..grid.len())
                .map(|i| partial(grid, &field.values, axis, i))
                .collect()
        })
        .collect()
}

/// `grad f = g^{ij} ∂ⱼf ∂ᵢ`, in coordinate components.
pub fn surface_gradient(field: &ScalarField, frames: &[GeomFrame]) -> Result<VectorField> {
    check(&field.grid, frames)?;
    let n = field.grid.dim();
    let d = coordinate_gradient(field);
    let mut components = vec![vec![0.0; field.grid.len()]; n];
    for (node, fr) in frames.iter().enumerate() {
        for i in 0..n {
            components[i][node] = (0..n).map(|j| fr.g_inv[(i, j)] * d[j][node]).sum();
        }
    }
    Ok(VectorField {
        grid: field.grid.clone(),
        components,
    })
}

/// `div V = (1/√g) ∂ᵢ(√g Vⁱ)`.
pub fn divergence(field: &VectorField, frames: &[GeomFrame]) -> Result<ScalarField> {
    let grid = &field.grid;
    check(grid, frames)?;
    if field.components.len() != grid.dim() {
        return Err(GeomError::GridMismatch("vector field component count".into()));
    }
    let sqrt_g: Vec<f64> = frames.iter().map(GeomFrame::area_element).collect();
    let mut out = vec![0.0; grid.len()];
    for (axis, comp) in field.components.iter().enumerate() {
        let flux: Vec<f64> = comp.iter().zip(&sqrt_g).map(|(v, s)| v * s).collect();
        for (node, o) in out.iter_mut().enumerate() {
            *o += partial(grid, &flux, axis, node);
        }
    }
    for (o, s) in out.iter_mut().zip(&sqrt_g) {
        *o /= s;
    }
    ScalarField::new(grid.clone(), out)
}

/// Laplace–Beltrami operator `Δf = (1/√g) ∂ᵢ(√g g^{ij} ∂ⱼf)`.
///
/// Pure second derivatives use the compact three-point flux stencil with
/// coefficients averaged to half nodes; mixed terms and face nodes use nested
/// central (or one-sided) differences.
pub fn laplace_beltrami(field: &ScalarField, frames: &[GeomFrame]) -> Result<ScalarField> {
    let grid = &field.grid;
    check(grid, frames)?;
    for (axis, &n) in grid.counts().iter().enumerate() {
        if n < 2 * RESIDUAL_MARGIN + 1 {
            return Err(GeomError::GridMismatch(format!("axis {axis} has no interior")));
        }
    }
    let dim = grid.dim();
    let sqrt_g: Vec<f64> = frames.iter().map(GeomFrame::area_element).collect();
    let coeff = |i: usize, j: usize| -> Vec<f64> {
        frames.iter().zip(&sqrt_g).map(|(fr, s)| s * fr.g_inv[(i, j)]).collect()
    };
    let d = coordinate_gradient(field);
    let f = &field.values;
    let mut out = vec![0.0; grid.len()];
    for i in 0..dim {
        let k_ii = coeff(i, i);
        let nested: Vec<f64> = k_ii.iter().zip(&d[i]).map(|(k, g)| k * g).collect();
        let (n, h, s) = (grid.counts()[i], grid.spacing()[i], grid.stride(i));
        for (node, o) in out.iter_mut().enumerate() {
            let pos = grid.multi_index(node)[i];
            *o += if pos == 0 || pos == n - 1 {
                partial(grid, &nested, i, node)
            } else {
                let k_up = 0.5 * (k_ii[node] + k_ii[node + s]);
                let k_dn = 0.5 * (k_ii[node] + k_ii[node - s]);
                (k_up * (f[node + s] - f[node]) - k_dn * (f[node] - f[node - s])) / (h * h)
            };
        }
        for j in (0..dim).filter(|&j| j != i) {
            let flux: Vec<f64> = coeff(i, j).iter().zip(&d[j]).map(|(k, g)| k * g).collect();
            for (node, o) in out.iter_mut().enumerate() {
                *o += partial(grid, &flux, i, node);
            }
        }
    }
    for (o, s) in out.iter_mut().zip(&sqrt_g) {
        *o /= s;
    }
    ScalarField::new(grid.clone(), out)
}

/// `⟨X⊤, grad f⟩ = X⊤ⁱ ∂ᵢf`.
pub fn along_x_tan(field: &ScalarField, frames: &[GeomFrame]) -> Result<ScalarField> {
    check(&field.grid, frames)?;
    let d = coordinate_gradient(field);
    let values = frames
        .iter()
        .enumerate()
        .map(|(node, fr)| fr.x_tan.iter().enumerate().map(|(i, x)| x * d[i][node]).sum())
        .collect();
    ScalarField::new(field.grid.clone(), values)
}

/// The tangential position field `X⊤`.
pub fn x_tan_field(grid: &ParamGrid, frames: &[GeomFrame]) -> Result<VectorField> {
    check(grid, frames)?;
    let components = (0..grid.dim())
        .map(|i| frames.iter().map(|fr| fr.x_tan[i]).collect())
        .collect();
    Ok(VectorField {
        grid: grid.clone(),
        components,
    })
}

/// Soliton constant of the drift operator `L f = Δf + ε⟨X, grad f⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftOperator {
    pub epsilon: f64,
}

impl DriftOperator {
    pub const SHRINKER: Self = Self { epsilon: -0.5 };
    pub const EXPANDER: Self = Self { epsilon: 0.5 };
}

/// `L f = Δf + ε⟨X⊤, grad f⟩`; only the tangential part of `X` pairs with a gradient.
pub fn drift_laplacian(op: DriftOperator, field: &ScalarField, frames: &[GeomFrame]) -> Result<ScalarField> {
    let lap = laplace_beltrami(field, frames)?;
    let drift = along_x_tan(field, frames)?;
    let values = lap
        .values
        .iter()
        .zip(&drift.values)
        .map(|(l, d)| l + op.epsilon * d)
        .collect();
    ScalarField::new(field.grid.clone(), values)
}

/// Metric length of each node's tangent vector.
pub fn tangent_lengths(field: &VectorField, frames: &[GeomFrame]) -> Vec<f64> {
    frames
        .iter()
        .enumerate()
        .map(|(node, fr)| fr.tangent_length(&DVector::from_vec(field.at(node))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Cap, SurfaceKind};

    fn plane_setup(n: usize) -> (ParamGrid, Vec<GeomFrame>) {
        let spec = SurfaceSpec::inward(SurfaceKind::Plane { offset: 0.0 }).unwrap();
        let grid = ParamGrid::new(vec![(-1.0, 1.0), (-0.5, 2.0)], vec![n, n + 2]).unwrap();
        let frames = sample_frames(&spec, &grid).unwrap();
        (grid, frames)
    }

    #[test]
    fn constants_are_annihilated_exactly() {
        let (grid, frames) = plane_setup(9);
        let c = ScalarField::from_fn(&grid, |_| 3.25).unwrap();
        let grad = surface_gradient(&c, &frames).unwrap();
        assert!(grad.components.iter().flatten().all(|&v| v == 0.0));
        assert!(laplace_beltrami(&c, &frames).unwrap().values.iter().all(|&v| v == 0.0));
        let lf = drift_laplacian(DriftOperator::SHRINKER, &c, &frames).unwrap();
        assert!(lf.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_functions_on_the_plane() {
        let (grid, frames) = plane_setup(11);
        let x = ScalarField::from_fn(&grid, |p| p[0]).unwrap();
        let grad = surface_gradient(&x, &frames).unwrap();
        for node in 0..grid.len() {
            assert!((grad.components[0][node] - 1.0).abs() < 1e-12);
            assert!(grad.components[1][node].abs() < 1e-12);
        }
        let lin = ScalarField::from_fn(&grid, |p| 2.0 * p[0] - 0.5 * p[1] + 1.0).unwrap();
        let lap = laplace_beltrami(&lin, &frames).unwrap();
        assert!(lap.sup_abs() < 1e-12);
    }

    #[test]
    fn sphere_height_function_is_an_eigenfunction() {
        let spec = SurfaceSpec::inward(SurfaceKind::Sphere { radius: 1.0, cap: Cap::North }).unwrap();
        let mut errs = Vec::new();
        for n in [41, 81] {
            let grid = ParamGrid::new(vec![(-1.0, 1.0); 2], vec![n, n]).unwrap();
            let frames = sample_frames(&spec, &grid).unwrap();
            let height = frame_field(&grid, &frames, |fr| fr.position[2]).unwrap();
            let lap = laplace_beltrami(&height, &frames).unwrap();
            let err = (0..grid.len())
                .filter(|&i| grid.is_interior(i, RESIDUAL_MARGIN))
                .map(|i| (lap.values[i] + 2.0 * height.values[i]).abs())
                .fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < 1e-2, "{errs:?}");
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order}, {errs:?}");
    }

    #[test]
    fn mismatched_frames_are_rejected() {
        let (grid, frames) = plane_setup(9);
        let c = ScalarField::from_fn(&grid, |_| 1.0).unwrap();
        assert!(matches!(
            surface_gradient(&c, &frames[1..]),
            Err(GeomError::GridMismatch(_))
        ));
    }
}
