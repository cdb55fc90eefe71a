//! Trial functions for the Yamabe quotient on a chart.

use crate::error::{Error, Result};
use crate::grid::{ChartGrid, Region};
use crate::scalar::Scalar;

/// Factors applied at depth `0, 1, 2, ≥3` nodes inside a compact support box.
pub const TAPER: [f64; 4] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub enum Support {
    Full,
    /// Zero outside the box and tapered to zero on its faces.
    Compact(Region),
}

/// Nodal values on a chart grid.
#[derive(Debug, Clone)]
pub struct TrialFunction<T> {
    grid: ChartGrid<T>,
    values: Vec<T>,
    support: Support,
}

impl<T: Scalar> TrialFunction<T> {
    pub fn from_values(grid: ChartGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().all(|v| *v == T::zero()) {
            return Err(Error::ZeroTrialFunction);
        }
        Ok(Self { grid, values, support: Support::Full })
    }

    /// `f(x)` at every node.
    pub fn from_fn<F: Fn(&[T]) -> T>(grid: ChartGrid<T>, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(&grid.coord(&grid.multi(k)))).collect();
        Self::from_values(grid, values)
    }

    pub fn constant(grid: ChartGrid<T>, c: T) -> Result<Self> {
        let values = vec![c; grid.len()];
        Self::from_values(grid, values)
    }

    /// `f(x)` inside `support`, tapered over two nodes to zero on its faces
    /// and zero outside.
    pub fn compact<F: Fn(&[T]) -> T>(grid: ChartGrid<T>, support: Region, f: F) -> Result<Self> {
        if support.lo.len() != grid.dim()
            || (0..grid.dim()).any(|d| support.lo[d] > support.hi[d] || support.hi[d] >= grid.extents()[d])
        {
            return Err(Error::InvalidArgument("support box does not fit the grid".into()));
        }
        let mut values = vec![T::zero(); grid.len()];
        let mut m = vec![0usize; grid.dim()];
        for (k, v) in values.iter_mut().enumerate() {
            grid.multi_into(k, &mut m);
            if !support.contains(&m) {
                continue;
            }
            let depth = (0..grid.dim())
                .map(|d| (m[d] - support.lo[d]).min(support.hi[d] - m[d]))
                .min()
                .unwrap_or(0);
            *v = f(&grid.coord(&m)) * T::lit(TAPER[depth.min(3)]);
        }
        if values.iter().all(|v| *v == T::zero()) {
            return Err(Error::ZeroTrialFunction);
        }
        Ok(Self { grid, values, support: Support::Compact(support) })
    }

    pub fn grid(&self) -> &ChartGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn scaled(&self, c: T) -> Result<Self> {
        if c == T::zero() {
            return Err(Error::ZeroTrialFunction);
        }
        Ok(Self { grid: self.grid.clone(), values: self.values.iter().map(|v| *v * c).collect(), support: self.support.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_support_is_zero_on_faces_and_outside() {
        let grid = ChartGrid::<f64>::cube(2, 12, 0.1, &[0.0, 0.0]).unwrap();
        let region = Region { lo: vec![2, 3], hi: vec![9, 10], periodic: vec![false; 2] };
        let f = TrialFunction::compact(grid.clone(), region.clone(), |_| 1.0).unwrap();
        for k in 0..grid.len() {
            let m = grid.multi(k);
            let v = f.values()[k];
            if !region.contains(&m) || m[0] == 2 || m[0] == 9 || m[1] == 3 || m[1] == 10 {
                assert_eq!(v, 0.0);
            }
        }
        assert_eq!(f.values()[grid.flat(&[3, 5])], 1.0 / 3.0);
        assert_eq!(f.values()[grid.flat(&[5, 6])], 1.0);
    }

    #[test]
    fn rejects_identically_zero() {
        let grid = ChartGrid::<f64>::cube(2, 6, 0.1, &[0.0, 0.0]).unwrap();
        assert_eq!(TrialFunction::constant(grid.clone(), 0.0).unwrap_err(), Error::ZeroTrialFunction);
        let tiny = Region { lo: vec![1, 1], hi: vec![2, 2], periodic: vec![false; 2] };
        assert_eq!(TrialFunction::compact(grid, tiny, |_| 1.0).unwrap_err(), Error::ZeroTrialFunction);
    }
}
