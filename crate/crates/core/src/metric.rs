//! Metrics sampled on a chart grid, plus the closed-form generators used as
//! test beds (flat space, round sphere, Fubini–Study).

use crate::error::{Error, Result};
use crate::grid::ChartGrid;
use crate::linalg::cholesky;
use crate::scalar::Scalar;

/// Number of independent entries of a symmetric `n × n` matrix.
pub const fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Position of entry `(i, j)` in packed upper-triangular storage.
#[inline]
pub fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

/// Symmetric positive-definite matrix field `g_ij` on a [`ChartGrid`].
#[derive(Debug, Clone)]
pub struct ChartMetric<T> {
    grid: ChartGrid<T>,
    packed: Vec<T>,
}

impl<T: Scalar> ChartMetric<T> {
    /// Samples `f(x, g)` at every node; `f` writes the full row-major matrix.
    pub fn from_fn<F>(grid: ChartGrid<T>, f: F) -> Result<Self>
    where
        F: Fn(&[T], &mut [T]),
    {
        let n = grid.dim();
        let np = packed_len(n);
        let mut packed = Vec::with_capacity(grid.len() * np);
        let mut x = vec![T::zero(); n];
        let mut m = vec![0usize; n];
        let mut g = vec![T::zero(); n * n];
        for flat in 0..grid.len() {
            grid.multi_into(flat, &mut m);
            grid.coord_into(&m, &mut x);
            f(&x, &mut g);
            push_checked(&g, n, &m, &mut packed)?;
        }
        Ok(Self { grid, packed })
    }

    /// Builds a metric from explicit full matrices, one per node in flat order.
    pub fn from_matrices(grid: ChartGrid<T>, matrices: &[Vec<T>]) -> Result<Self> {
        let n = grid.dim();
        if matrices.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} component matrices for {} nodes",
                matrices.len(),
                grid.len()
            )));
        }
        let mut packed = Vec::with_capacity(grid.len() * packed_len(n));
        for (flat, g) in matrices.iter().enumerate() {
            if g.len() != n * n {
                return Err(Error::Dimension { expected: n * n, got: g.len() });
            }
            push_checked(g, n, &grid.multi(flat), &mut packed)?;
        }
        Ok(Self { grid, packed })
    }

    pub fn grid(&self) -> &ChartGrid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Packed components at a node.
    #[inline]
    pub fn packed_at(&self, flat: usize) -> &[T] {
        let np = packed_len(self.dim());
        &self.packed[flat * np..(flat + 1) * np]
    }

    /// Full row-major matrix at a node.
    pub fn at_into(&self, flat: usize, out: &mut [T]) {
        let n = self.dim();
        let p = self.packed_at(flat);
        for i in 0..n {
            for j in i..n {
                let v = p[packed_index(n, i, j)];
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
    }

    pub fn at(&self, flat: usize) -> Vec<T> {
        let n = self.dim();
        let mut g = vec![T::zero(); n * n];
        self.at_into(flat, &mut g);
        g
    }

    /// Pointwise map `g ↦ F(x, g)`, revalidated.
    pub fn map<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&[T], &[T], &mut [T]),
    {
        let n = self.dim();
        let mut packed = Vec::with_capacity(self.packed.len());
        let mut x = vec![T::zero(); n];
        let mut m = vec![0usize; n];
        let mut g = vec![T::zero(); n * n];
        let mut out = vec![T::zero(); n * n];
        for flat in 0..self.grid.len() {
            self.grid.multi_into(flat, &mut m);
            self.grid.coord_into(&m, &mut x);
            self.at_into(flat, &mut g);
            f(&x, &g, &mut out);
            push_checked(&out, n, &m, &mut packed)?;
        }
        Ok(Self { grid: self.grid.clone(), packed })
    }

    /// Conformal rescaling `u^{4/(n-2)} g` by a positive function `u(x)`.
    pub fn conformal_rescale<F>(&self, u: F) -> Result<Self>
    where
        F: Fn(&[T]) -> T,
    {
        let n = self.dim();
        let p = T::lit(4.0) / T::from_usize_lossy(n - 2);
        self.map(|x, g, out| {
            let s = u(x).powf(p);
            for (o, v) in out.iter_mut().zip(g) {
                *o = s * *v;
            }
        })
    }

    /// `√det g` at a node.
    pub fn sqrt_det(&self, flat: usize) -> T {
        let n = self.dim();
        let mut g = [T::zero(); 36];
        let mut l = [T::zero(); 36];
        self.at_into(flat, &mut g[..n * n]);
        cholesky(&g[..n * n], n, &mut l);
        (0..n).fold(T::one(), |acc, i| acc * l[i * n + i])
    }
}

/// Symmetric 2-tensor field `θ_ij` on a chart grid (no definiteness required).
#[derive(Debug, Clone)]
pub struct SymTensorField<T> {
    grid: ChartGrid<T>,
    packed: Vec<T>,
}

impl<T: Scalar> SymTensorField<T> {
    /// Samples `f(x, θ)`; `f` writes the full row-major matrix, whose upper
    /// triangle is kept.
    pub fn from_fn<F>(grid: ChartGrid<T>, f: F) -> Self
    where
        F: Fn(&[T], &mut [T]),
    {
        let n = grid.dim();
        let mut packed = Vec::with_capacity(grid.len() * packed_len(n));
        let mut x = vec![T::zero(); n];
        let mut m = vec![0usize; n];
        let mut t = vec![T::zero(); n * n];
        for flat in 0..grid.len() {
            grid.multi_into(flat, &mut m);
            grid.coord_into(&m, &mut x);
            f(&x, &mut t);
            for i in 0..n {
                for j in i..n {
                    packed.push(t[i * n + j]);
                }
            }
        }
        Self { grid, packed }
    }

    pub fn zeros(grid: ChartGrid<T>) -> Self {
        let len = grid.len() * packed_len(grid.dim());
        Self { grid, packed: vec![T::zero(); len] }
    }

    pub fn grid(&self) -> &ChartGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn packed_at(&self, flat: usize) -> &[T] {
        let np = packed_len(self.grid.dim());
        &self.packed[flat * np..(flat + 1) * np]
    }

    pub fn at_into(&self, flat: usize, out: &mut [T]) {
        let n = self.grid.dim();
        let p = self.packed_at(flat);
        for i in 0..n {
            for j in i..n {
                out[i * n + j] = p[packed_index(n, i, j)];
                out[j * n + i] = p[packed_index(n, i, j)];
            }
        }
    }
}

impl<T: Scalar> ChartMetric<T> {
    /// `g + θ`, rejected with the node location if not positive definite.
    pub fn perturbed(&self, theta: &SymTensorField<T>) -> Result<Self> {
        if !self.grid.same_as(theta.grid()) {
            return Err(Error::GridMismatch("metric and perturbation live on different grids".into()));
        }
        let n = self.dim();
        let mut packed = Vec::with_capacity(self.packed.len());
        let mut g = vec![T::zero(); n * n];
        let mut t = vec![T::zero(); n * n];
        let mut m = vec![0usize; n];
        for flat in 0..self.grid.len() {
            self.at_into(flat, &mut g);
            theta.at_into(flat, &mut t);
            for (a, b) in g.iter_mut().zip(&t) {
                *a += *b;
            }
            self.grid.multi_into(flat, &mut m);
            push_checked(&g, n, &m, &mut packed)?;
        }
        Ok(Self { grid: self.grid.clone(), packed })
    }
}

fn push_checked<T: Scalar>(g: &[T], n: usize, node: &[usize], packed: &mut Vec<T>) -> Result<()> {
    for i in 0..n {
        for j in (i + 1)..n {
            if g[i * n + j] != g[j * n + i] {
                return Err(Error::NotSymmetric { node: node.to_vec() });
            }
        }
    }
    let mut l = [T::zero(); 36];
    if n > 6 || !cholesky(g, n, &mut l) {
        return Err(Error::NotPositiveDefinite { node: node.to_vec() });
    }
    for i in 0..n {
        for j in i..n {
            packed.push(g[i * n + j]);
        }
    }
    Ok(())
}

/// Closed-form metrics on charts.
pub mod generators {
    use super::*;

    /// Euclidean metric `δ_ij`.
    pub fn flat<T: Scalar>(grid: ChartGrid<T>) -> Result<ChartMetric<T>> {
        let n = grid.dim();
        ChartMetric::from_fn(grid, move |_, g| {
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = if i == j { T::one() } else { T::zero() };
                }
            }
        })
    }

    /// Unit round sphere `Sⁿ` in stereographic coordinates,
    /// `g = (2 / (1 + |x|²))² δ`, with scalar curvature `n(n-1)`.
    pub fn round_sphere_stereographic<T: Scalar>(grid: ChartGrid<T>) -> Result<ChartMetric<T>> {
        let n = grid.dim();
        ChartMetric::from_fn(grid, move |x, g| {
            let r2: T = x.iter().map(|v| *v * *v).sum();
            let s = T::lit(2.0) / (T::one() + r2);
            let s2 = s * s;
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = if i == j { s2 } else { T::zero() };
                }
            }
        })
    }

    /// Unit round sphere in stretched stereographic coordinates `x_i = sinh ξ_i`:
    /// `g = (2 / (1 + |x|²))² diag(cosh² ξ_i)`. A box of half-width `Ξ`
    /// misses roughly a fraction `3 / sinh⁴ Ξ` of the volume.
    pub fn round_sphere_sinh<T: Scalar>(grid: ChartGrid<T>) -> Result<ChartMetric<T>> {
        let n = grid.dim();
        ChartMetric::from_fn(grid, move |xi, g| {
            let r2: T = xi.iter().map(|v| v.sinh() * v.sinh()).sum();
            let s = T::lit(2.0) / (T::one() + r2);
            let s2 = s * s;
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = if i == j { s2 * xi[i].cosh() * xi[i].cosh() } else { T::zero() };
                }
            }
        })
    }

    /// Conformal factor `u` with `u^{4/(n-2)} δ` the stereographic round metric.
    pub fn stereographic_factor<T: Scalar>(x: &[T]) -> T {
        let n = x.len();
        let r2: T = x.iter().map(|v| *v * *v).sum();
        (T::lit(2.0) / (T::one() + r2)).powf(T::from_usize_lossy(n - 2) / T::lit(2.0))
    }

    /// A smooth non-conformally-flat test metric, `2π`-periodic in every
    /// coordinate: `(1 + a cos(x₁ + 2x₂)) δ + a v vᵀ` with `v_i = sin(x_i + i)`.
    /// Positive definite for `0 ≤ a < 1`.
    pub fn trig_perturbed<T: Scalar>(grid: ChartGrid<T>, a: T) -> Result<ChartMetric<T>> {
        let n = grid.dim();
        ChartMetric::from_fn(grid, move |x, g| trig_perturbed_at(a, x, g, n))
    }

    pub fn trig_perturbed_at<T: Scalar>(a: T, x: &[T], g: &mut [T], n: usize) {
        let c = T::one() + a * (x[0] + T::lit(2.0) * x[1]).cos();
        for i in 0..n {
            let vi = (x[i] + T::from_usize_lossy(i)).sin();
            for j in 0..n {
                let vj = (x[j] + T::from_usize_lossy(j)).sin();
                g[i * n + j] = a * (vi * vj) + if i == j { c } else { T::zero() };
            }
        }
    }

    /// Fubini–Study metric on an affine chart of CP², coordinates
    /// `(x₁, y₁, x₂, y₂)` with `z_k = x_k + i y_k`, real part of
    /// `∂∂̄ log(1 + |z|²)`. Holomorphic sectional curvature 4, scalar curvature 24.
    pub fn fubini_study_affine<T: Scalar>(grid: ChartGrid<T>) -> Result<ChartMetric<T>> {
        if grid.dim() != 4 {
            return Err(Error::Dimension { expected: 4, got: grid.dim() });
        }
        ChartMetric::from_fn(grid, fubini_study_at)
    }

    /// Fubini–Study on the whole affine chart in stretched coordinates
    /// `x_k = sinh ξ_k`. Components stay bounded as `|ξ| → ∞` and the volume
    /// density decays exponentially, so a finite box captures almost all of
    /// CP² at modest resolution.
    pub fn fubini_study_sinh<T: Scalar>(grid: ChartGrid<T>) -> Result<ChartMetric<T>> {
        if grid.dim() != 4 {
            return Err(Error::Dimension { expected: 4, got: grid.dim() });
        }
        ChartMetric::from_fn(grid, |xi, g| {
            let x: Vec<T> = xi.iter().map(|v| v.sinh()).collect();
            let jac: Vec<T> = xi.iter().map(|v| v.cosh()).collect();
            let mut ga = [T::zero(); 16];
            fubini_study_at(&x, &mut ga);
            for i in 0..4 {
                for j in 0..4 {
                    g[i * 4 + j] = (jac[i] * jac[j]) * ga[i * 4 + j];
                }
            }
        })
    }

    pub fn fubini_study_at<T: Scalar>(x: &[T], g: &mut [T]) {
        let z = [(x[0], x[1]), (x[2], x[3])];
        let r2 = x.iter().map(|v| *v * *v).sum::<T>();
        let s = T::one() + r2;
        let s2 = s * s;
        // h_jk = (s δ_jk − z̄_j z_k) / s²
        let mut hr = [[T::zero(); 2]; 2];
        let mut hi = [[T::zero(); 2]; 2];
        for j in 0..2 {
            for k in 0..2 {
                let (aj, bj) = z[j];
                let (ak, bk) = z[k];
                // z̄_j z_k = (aj − i bj)(ak + i bk)
                let re = aj * ak + bj * bk;
                let im = aj * bk - bj * ak;
                let d = if j == k { s } else { T::zero() };
                hr[j][k] = (d - re) / s2;
                hi[j][k] = -im / s2;
            }
        }
        // Real basis (∂x₁, ∂y₁, ∂x₂, ∂y₂): g(∂x_j, ∂x_k) = g(∂y_j, ∂y_k) = Re h_jk,
        // g(∂x_j, ∂y_k) = Im h_jk.
        for j in 0..2 {
            for k in 0..2 {
                let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
                g[xj * 4 + xk] = hr[j][k];
                g[yj * 4 + yk] = hr[j][k];
                g[xj * 4 + yk] = hi[j][k];
                g[yj * 4 + xk] = -hi[j][k];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;

    #[test]
    fn packed_index_is_bijective() {
        for n in 2..6 {
            let mut seen = vec![false; packed_len(n)];
            for i in 0..n {
                for j in i..n {
                    let p = packed_index(n, i, j);
                    assert!(!seen[p]);
                    seen[p] = true;
                    assert_eq!(p, packed_index(n, j, i));
                }
            }
        }
    }

    #[test]
    fn rejects_indefinite_node_with_location() {
        let grid = ChartGrid::<f64>::new(vec![5, 5], vec![0.1, 0.1], vec![false, false]).unwrap();
        let err = ChartMetric::from_fn(grid, |x, g| {
            g[0] = if x[0] > 0.15 { -1.0 } else { 1.0 };
            g[1] = 0.0;
            g[2] = 0.0;
            g[3] = 1.0;
        })
        .unwrap_err();
        assert_eq!(err, Error::NotPositiveDefinite { node: vec![4, 0] });
    }

    #[test]
    fn fubini_study_is_symmetric_positive_definite() {
        let grid = ChartGrid::<f64>::cube(4, 5, 0.7, &[0.3, -0.2, 0.1, 0.5]).unwrap();
        let m = fubini_study_affine(grid).unwrap();
        // √det g = (1 + |z|²)^{-3}
        for flat in [0, 17, 312] {
            let x = m.grid().coord(&m.grid().multi(flat));
            let r2: f64 = x.iter().map(|v| v * v).sum();
            assert!((m.sqrt_det(flat) - (1.0 + r2).powi(-3)).abs() < 1e-12);
        }
    }

    #[test]
    fn conformal_rescale_scales_components() {
        let grid = ChartGrid::<f64>::cube(4, 5, 0.5, &[0.0; 4]).unwrap();
        let m = flat(grid).unwrap();
        let r = m.conformal_rescale(|_| 2.0).unwrap();
        assert_eq!(r.at(0)[0], 4.0);
    }
}
