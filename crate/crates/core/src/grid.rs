//! Structured coordinate grids and rectangular sub-regions with
//! trapezoid/uniform quadrature weights.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Minimum number of samples per axis: five-point stencils must fit.
pub const MIN_EXTENT: usize = 5;

/// A structured grid of chart coordinates.
///
/// Node `idx` along axis `d` sits at `origin[d] + idx * spacing[d]`.
/// Flat indices are row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartGrid<T> {
    extents: Vec<usize>,
    spacing: Vec<T>,
    periodic: Vec<bool>,
    origin: Vec<T>,
    strides: Vec<usize>,
}

impl<T: Scalar> ChartGrid<T> {
    /// Builds a grid centred on the coordinate origin.
    pub fn new(extents: Vec<usize>, spacing: Vec<T>, periodic: Vec<bool>) -> Result<Self> {
        let origin = extents
            .iter()
            .zip(&spacing)
            .map(|(&e, &h)| -T::from_usize_lossy(e.saturating_sub(1)) * h * T::lit(0.5))
            .collect();
        Self::with_origin(extents, spacing, periodic, origin)
    }

    pub fn with_origin(
        extents: Vec<usize>,
        spacing: Vec<T>,
        periodic: Vec<bool>,
        origin: Vec<T>,
    ) -> Result<Self> {
        let dim = extents.len();
        if dim < 1 {
            return Err(Error::InvalidGrid("grid needs at least one axis".into()));
        }
        if spacing.len() != dim || periodic.len() != dim || origin.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "axis descriptors disagree: {} extents, {} spacings, {} periodic flags, {} origins",
                dim,
                spacing.len(),
                periodic.len(),
                origin.len()
            )));
        }
        if let Some(d) = extents.iter().position(|&e| e < MIN_EXTENT) {
            return Err(Error::GridTooSmall(format!(
                "axis {d} has {} samples, need at least {MIN_EXTENT}",
                extents[d]
            )));
        }
        if let Some(d) = spacing.iter().position(|&h| !(h > T::zero()) || !h.is_finite()) {
            return Err(Error::InvalidGrid(format!("axis {d} has non-positive spacing")));
        }
        let mut strides = vec![1; dim];
        for d in (0..dim.saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * extents[d + 1];
        }
        Ok(Self { extents, spacing, periodic, origin, strides })
    }

    /// Grid of `n` samples per axis, spacing `h`, centred at `center`.
    pub fn cube(dim: usize, n: usize, h: T, center: &[T]) -> Result<Self> {
        let half = T::from_usize_lossy(n.saturating_sub(1)) * h * T::lit(0.5);
        Self::with_origin(
            vec![n; dim],
            vec![h; dim],
            vec![false; dim],
            center.iter().map(|&c| c - half).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }
    pub fn extents(&self) -> &[usize] {
        &self.extents
    }
    pub fn spacing(&self) -> &[T] {
        &self.spacing
    }
    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }
    pub fn origin(&self) -> &[T] {
        &self.origin
    }
    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn multi_into(&self, mut flat: usize, out: &mut [usize]) {
        for d in 0..self.dim() {
            out[d] = flat / self.strides[d];
            flat %= self.strides[d];
        }
    }

    pub fn multi(&self, flat: usize) -> Vec<usize> {
        let mut m = vec![0; self.dim()];
        self.multi_into(flat, &mut m);
        m
    }

    pub fn coord_into(&self, multi: &[usize], out: &mut [T]) {
        for d in 0..self.dim() {
            out[d] = self.origin[d] + T::from_usize_lossy(multi[d]) * self.spacing[d];
        }
    }

    pub fn coord(&self, multi: &[usize]) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim()];
        self.coord_into(multi, &mut x);
        x
    }

    /// Flat index of `flat` shifted by `offset` nodes along `axis`, wrapping
    /// on periodic axes. `None` when the shift leaves a bounded axis.
    pub fn shift(&self, flat: usize, axis: usize, offset: isize) -> Option<usize> {
        let e = self.extents[axis] as isize;
        let i = ((flat / self.strides[axis]) % self.extents[axis]) as isize;
        let mut j = i + offset;
        if self.periodic[axis] {
            j = j.rem_euclid(e);
        } else if j < 0 || j >= e {
            return None;
        }
        Some((flat as isize + (j - i) * self.strides[axis] as isize) as usize)
    }

    /// Region covering every node.
    pub fn full_region(&self) -> Region {
        Region {
            lo: vec![0; self.dim()],
            hi: self.extents.iter().map(|e| e - 1).collect(),
            periodic: self.periodic.clone(),
        }
    }

    /// Region inset by `margin` nodes on every bounded axis.
    pub fn interior(&self, margin: usize) -> Result<Region> {
        let mut lo = Vec::with_capacity(self.dim());
        let mut hi = Vec::with_capacity(self.dim());
        for d in 0..self.dim() {
            if self.periodic[d] {
                lo.push(0);
                hi.push(self.extents[d] - 1);
            } else {
                if self.extents[d] < 2 * margin + 1 {
                    return Err(Error::GridTooSmall(format!(
                        "axis {d} has {} samples, cannot inset by {margin}",
                        self.extents[d]
                    )));
                }
                lo.push(margin);
                hi.push(self.extents[d] - 1 - margin);
            }
        }
        Ok(Region { lo, hi, periodic: self.periodic.clone() })
    }

    /// Per-axis quadrature weights of `region` along `axis`, indexed from `region.lo[axis]`.
    pub fn axis_weights(&self, region: &Region, axis: usize) -> Vec<T> {
        let h = self.spacing[axis];
        let n = region.hi[axis] - region.lo[axis] + 1;
        let mut w = vec![h; n];
        if !region.periodic[axis] && n > 1 {
            w[0] = h * T::lit(0.5);
            w[n - 1] = h * T::lit(0.5);
        }
        w
    }

    /// Quadrature weights for every node of `region`, in region order.
    pub fn region_weights(&self, region: &Region) -> Vec<T> {
        let axis_w: Vec<Vec<T>> = (0..self.dim()).map(|d| self.axis_weights(region, d)).collect();
        let mut out = Vec::with_capacity(region.len());
        let mut local = vec![0usize; self.dim()];
        for k in 0..region.len() {
            region.local_multi_into(k, &mut local);
            let mut w = T::one();
            for d in 0..self.dim() {
                w *= axis_w[d][local[d]];
            }
            out.push(w);
        }
        out
    }

    /// True if the grid has the same shape, spacing and origin.
    pub fn same_as(&self, other: &Self) -> bool {
        self == other
    }
}

/// Axis-aligned box of grid nodes, inclusive bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
    pub periodic: Vec<bool>,
}

impl Region {
    pub fn len(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l + 1).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> Vec<usize> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l + 1).collect()
    }

    /// Local multi-index (offset from `lo`) of the `k`-th node in region order.
    pub fn local_multi_into(&self, mut k: usize, out: &mut [usize]) {
        let shape = self.shape();
        for d in (0..shape.len()).rev() {
            out[d] = k % shape[d];
            k /= shape[d];
        }
    }

    /// Grid multi-index of the `k`-th node in region order.
    pub fn multi_into(&self, k: usize, out: &mut [usize]) {
        self.local_multi_into(k, out);
        for (o, l) in out.iter_mut().zip(&self.lo) {
            *o += l;
        }
    }

    /// Flat grid indices of every node, in region order.
    pub fn grid_nodes<T: Scalar>(&self, grid: &ChartGrid<T>) -> Vec<usize> {
        let mut m = vec![0; self.lo.len()];
        (0..self.len())
            .map(|k| {
                self.multi_into(k, &mut m);
                grid.flat(&m)
            })
            .collect()
    }

    pub fn contains(&self, multi: &[usize]) -> bool {
        multi.iter().zip(self.lo.iter().zip(&self.hi)).all(|(&i, (&l, &h))| i >= l && i <= h)
    }

    /// Position of a grid multi-index in region order, if inside.
    pub fn position(&self, multi: &[usize]) -> Option<usize> {
        if !self.contains(multi) {
            return None;
        }
        let shape = self.shape();
        let mut k = 0;
        for d in 0..shape.len() {
            k = k * shape[d] + (multi[d] - self.lo[d]);
        }
        Some(k)
    }
}

/// Scalar values attached to the nodes of a region, in region order.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionField<T> {
    pub region: Region,
    pub values: Vec<T>,
}

impl<T: Copy> RegionField<T> {
    /// Value at a grid multi-index, if inside the region.
    pub fn get(&self, multi: &[usize]) -> Option<T> {
        self.region.position(multi).map(|k| self.values[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_and_degenerate_grids() {
        assert!(matches!(
            ChartGrid::<f64>::new(vec![4, 8], vec![0.1, 0.1], vec![false, false]),
            Err(Error::GridTooSmall(_))
        ));
        assert!(ChartGrid::<f64>::new(vec![6, 8], vec![0.0, 0.1], vec![false, false]).is_err());
        assert!(ChartGrid::<f64>::new(vec![6, 8], vec![0.1], vec![false, false]).is_err());
    }

    #[test]
    fn flat_and_multi_roundtrip() {
        let g = ChartGrid::<f64>::new(vec![5, 6, 7], vec![1.0; 3], vec![false; 3]).unwrap();
        for f in 0..g.len() {
            assert_eq!(g.flat(&g.multi(f)), f);
        }
    }

    #[test]
    fn shift_wraps_periodic_axes_only() {
        let g = ChartGrid::<f64>::new(vec![5, 6], vec![1.0; 2], vec![true, false]).unwrap();
        let f = g.flat(&[0, 0]);
        assert_eq!(g.shift(f, 0, -1), Some(g.flat(&[4, 0])));
        assert_eq!(g.shift(f, 1, -1), None);
        assert_eq!(g.shift(f, 1, 2), Some(g.flat(&[0, 2])));
    }

    #[test]
    fn periodic_unit_torus_weights_sum_to_one() {
        let k = 8;
        let g = ChartGrid::<f64>::with_origin(
            vec![k; 3],
            vec![1.0 / k as f64; 3],
            vec![true; 3],
            vec![0.0; 3],
        )
        .unwrap();
        let s: f64 = g.region_weights(&g.full_region()).iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_weights_integrate_box_volume() {
        let g = ChartGrid::<f64>::cube(2, 11, 0.2, &[0.0, 0.0]).unwrap();
        let r = g.interior(2).unwrap();
        let s: f64 = g.region_weights(&r).iter().sum();
        assert!((s - 1.2 * 1.2).abs() < 1e-12);
        let nodes = r.grid_nodes(&g);
        assert_eq!(nodes.len(), r.len());
        assert_eq!(r.position(&g.multi(nodes[5])), Some(5));
    }
}
