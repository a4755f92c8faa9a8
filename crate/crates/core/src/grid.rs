//! Rectilinear parameter grids and the node-indexed fields that live on them.

use serde::Serialize;

use crate::error::{GeomError, Result};

/// Minimum samples per axis: second-order central differences plus one-sided
/// boundary stencils need five nodes.
pub const MIN_COUNT: usize = 5;

/// A tensor-product grid over a box in parameter space (intrinsic dimension 1 or 2).
///
/// Nodes are stored row-major: the last axis varies fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamGrid {
    ranges: Vec<(f64, f64)>,
    counts: Vec<usize>,
    spacing: Vec<f64>,
}

impl ParamGrid {
    pub fn new(ranges: Vec<(f64, f64)>, counts: Vec<usize>) -> Result<Self> {
        if ranges.is_empty() || ranges.len() > 2 {
            return Err(GeomError::BadDimension(format!(
                "grid dimension {} (supported: 1 or 2)",
                ranges.len()
            )));
        }
        if ranges.len() != counts.len() {
            return Err(GeomError::InvalidParameter(format!(
                "{} ranges but {} counts",
                ranges.len(),
                counts.len()
            )));
        }
        for (axis, (&(lo, hi), &n)) in ranges.iter().zip(&counts).enumerate() {
            if n < MIN_COUNT {
                return Err(GeomError::InvalidParameter(format!(
                    "axis {axis}: {n} samples, need at least {MIN_COUNT}"
                )));
            }
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(GeomError::InvalidParameter(format!(
                    "axis {axis}: range [{lo}, {hi}] is not a finite increasing interval"
                )));
            }
        }
        let spacing = ranges
            .iter()
            .zip(&counts)
            .map(|(&(lo, hi), &n)| (hi - lo) / (n - 1) as f64)
            .collect();
        Ok(Self {
            ranges,
            counts,
            spacing,
        })
    }

    /// Same box with every axis refined so that the spacing halves.
    pub fn refined(&self) -> Self {
        let counts = self.counts.iter().map(|&n| 2 * n - 1).collect();
        Self::new(self.ranges.clone(), counts).expect("refinement of a valid grid")
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    /// Largest per-axis step.
    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distance in the flat index between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.counts[axis + 1..].iter().product()
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            out[axis] = idx % self.counts[axis];
            idx /= self.counts[axis];
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.counts)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Parameter coordinates of a node.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.ranges[axis].0 + i as f64 * self.spacing[axis])
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// True when the node is at least `margin` nodes away from every face.
    pub fn is_interior(&self, idx: usize, margin: usize) -> bool {
        self.multi_index(idx)
            .iter()
            .zip(&self.counts)
            .all(|(&i, &n)| i >= margin && i + margin < n)
    }

    /// Number of nodes satisfying [`ParamGrid::is_interior`] for `margin`.
    pub fn interior_len(&self, margin: usize) -> usize {
        self.counts
            .iter()
            .map(|&n| n.saturating_sub(2 * margin))
            .product()
    }
}

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub grid: ParamGrid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: ParamGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(GeomError::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GeomError::InvalidParameter(format!(
                "non-finite field value at node {i}"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &ParamGrid, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self::new(grid.clone(), values)
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Parametric components of a tangent vector field, stored per component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: ParamGrid,
    /// `components[i][node]` is the i-th contravariant component.
    pub components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn at(&self, node: usize) -> Vec<f64> {
        self.components.iter().map(|c| c[node]).collect()
    }
}

/// Central difference along one axis; second-order one-sided stencils on the faces.
pub(crate) fn partial(grid: &ParamGrid, values: &[f64], axis: usize, idx: usize) -> f64 {
    let n = grid.counts()[axis];
    let h = grid.spacing()[axis];
    let s = grid.stride(axis);
    let i = grid.multi_index(idx)[axis];
    if i == 0 {
        (-3.0 * values[idx] + 4.0 * values[idx + s] - values[idx + 2 * s]) / (2.0 * h)
    } else if i == n - 1 {
        (3.0 * values[idx] - 4.0 * values[idx - s] + values[idx - 2 * s]) / (2.0 * h)
    } else {
        (values[idx + s] - values[idx - s]) / (2.0 * h)
    }
}
