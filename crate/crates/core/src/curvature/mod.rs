//! Chart curvature by finite differences.
//!
//! Metric derivatives come from fourth-order five-point stencils (mixed
//! second derivatives use the tensor product of two first-derivative
//! stencils). Christoffel symbols and their derivatives are then formed
//! analytically from the 2-jet `(g, ∂g, ∂∂g)`, so all algebraic symmetries of
//! the curvature tensor hold up to rounding. Fields are reported on the
//! interior two nodes away from every bounded face.

pub mod algebra;
mod flatten;
mod linearized;
mod selfdual;

pub use flatten::{flatten_near_point, LogCutoff};
pub use linearized::linearized_scalar_curvature;
pub use selfdual::{selfdual_split, split_point, SelfDualSplit};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{ChartGrid, Region};
use crate::linalg::spd_inverse;
use crate::metric::{packed_index, packed_len, ChartMetric};
use crate::scalar::Scalar;

use algebra::{full_norm_sq, raise_first, ricci_from_lowered, weyl_lowered};

/// Nodes lost on each bounded face.
pub const STENCIL_MARGIN: usize = 2;

/// Curvature of a metric at one point, computed from its 2-jet.
///
/// Doubles as a reusable per-thread workspace: [`PointCurvature::evaluate`]
/// overwrites every field.
#[derive(Debug, Clone)]
pub struct PointCurvature<T> {
    n: usize,
    pub g: Vec<T>,
    pub ginv: Vec<T>,
    /// `∂_k g_ij` at `k·n² + i·n + j`.
    pub dg: Vec<T>,
    /// `∂_k ∂_l g_ij` at `(k·n + l)·n² + i·n + j`.
    pub ddg: Vec<T>,
    pub sqrt_det: T,
    /// `Γ^k_ij` at `k·n² + i·n + j`.
    pub christoffel: Vec<T>,
    /// `R_abcd`, fully lowered.
    pub riemann: Vec<T>,
    pub ricci: Vec<T>,
    pub scalar: T,
    /// `W_abcd`, fully lowered.
    pub weyl: Vec<T>,
    pub weyl_norm_sq: T,
    first_kind: Vec<T>,
    dginv: Vec<T>,
    dfirst: Vec<T>,
    dgamma: Vec<T>,
    mixed: Vec<T>,
    scratch: Vec<T>,
    scratch2: Vec<T>,
    packed: Vec<T>,
}

impl<T: Scalar> PointCurvature<T> {
    pub fn new(n: usize) -> Self {
        let n2 = n * n;
        let n3 = n2 * n;
        let n4 = n3 * n;
        let z = T::zero();
        Self {
            n,
            g: vec![z; n2],
            ginv: vec![z; n2],
            dg: vec![z; n3],
            ddg: vec![z; n4],
            sqrt_det: z,
            christoffel: vec![z; n3],
            riemann: vec![z; n4],
            ricci: vec![z; n2],
            scalar: z,
            weyl: vec![z; n4],
            weyl_norm_sq: z,
            first_kind: vec![z; n3],
            dginv: vec![z; n3],
            dfirst: vec![z; n4],
            dgamma: vec![z; n4],
            mixed: vec![z; n4],
            scratch: vec![z; n4],
            scratch2: vec![z; n4],
            packed: vec![z; (n + n * n + 4) * packed_len(n)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Loads the finite-difference 2-jet of `metric` at `flat` and evaluates
    /// the curvature. Every stencil node must exist (interior or periodic).
    pub fn evaluate(&mut self, metric: &ChartMetric<T>, flat: usize) {
        self.load_fd_jet(metric, flat);
        self.finish();
    }

    /// Evaluates the curvature from an explicit 2-jet (full row-major layouts
    /// as documented on the fields).
    pub fn evaluate_jet(&mut self, g: &[T], dg: &[T], ddg: &[T]) {
        let n = self.n;
        self.g.copy_from_slice(&g[..n * n]);
        self.dg.copy_from_slice(&dg[..n * n * n]);
        self.ddg.copy_from_slice(&ddg[..n * n * n * n]);
        self.finish();
    }

    fn load_fd_jet(&mut self, metric: &ChartMetric<T>, flat: usize) {
        let n = self.n;
        let np = packed_len(n);
        let grid = metric.grid();
        let center = metric.packed_at(flat);
        let eight = T::lit(8.0);
        let sixteen = T::lit(16.0);
        let thirty = T::lit(30.0);
        let twelve = T::lit(12.0);
        // Stencils are written as sums of differences so that constants
        // differentiate to exactly zero.
        let (dgp, rest) = self.packed.split_at_mut(n * np);
        let (ddgp, acc) = rest.split_at_mut(n * n * np);
        let acc = &mut acc[..4 * np];
        for k in 0..n {
            let hk = grid.spacing()[k];
            let node = |o: isize| metric.packed_at(grid.shift(flat, k, o).expect("stencil node"));
            let (m2, m1, p1, p2) = (node(-2), node(-1), node(1), node(2));
            for q in 0..np {
                dgp[k * np + q] = (eight * (p1[q] - m1[q]) - (p2[q] - m2[q])) / (twelve * hk);
                ddgp[(k * n + k) * np + q] =
                    (sixteen * (p1[q] + m1[q]) - (p2[q] + m2[q]) - thirty * center[q]) / (twelve * hk * hk);
            }
            for l in (k + 1)..n {
                let hl = grid.spacing()[l];
                // unscaled k-differences at l-offsets −2, −1, 1, 2
                for (slot, ol) in [-2isize, -1, 1, 2].into_iter().enumerate() {
                    let base = grid.shift(flat, l, ol).expect("stencil node");
                    let at = |o: isize| metric.packed_at(grid.shift(base, k, o).expect("stencil node"));
                    let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
                    for q in 0..np {
                        acc[slot * np + q] = eight * (p1[q] - m1[q]) - (p2[q] - m2[q]);
                    }
                }
                for q in 0..np {
                    let v = (eight * (acc[2 * np + q] - acc[np + q]) - (acc[3 * np + q] - acc[q]))
                        / (T::lit(144.0) * hk * hl);
                    ddgp[(k * n + l) * np + q] = v;
                    ddgp[(l * n + k) * np + q] = v;
                }
            }
        }
        let n2 = n * n;
        for i in 0..n {
            for j in 0..n {
                let q = packed_index(n, i, j);
                self.g[i * n + j] = center[q];
                for k in 0..n {
                    self.dg[k * n2 + i * n + j] = dgp[k * np + q];
                    for l in 0..n {
                        self.ddg[(k * n + l) * n2 + i * n + j] = ddgp[(k * n + l) * np + q];
                    }
                }
            }
        }
    }

    fn finish(&mut self) {
        let n = self.n;
        let n2 = n * n;
        let n3 = n2 * n;
        let half = T::lit(0.5);
        let det = spd_inverse(&self.g, n, &mut self.ginv).expect("metric validated positive definite");
        self.sqrt_det = det.sqrt();
        let (g, ginv, dg, ddg) = (&self.g, &self.ginv, &self.dg, &self.ddg);

        // Γ_{l,ij} and its derivatives
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    self.first_kind[l * n2 + i * n + j] =
                        half * (dg[i * n2 + j * n + l] + dg[j * n2 + i * n + l] - dg[l * n2 + i * n + j]);
                    for m in 0..n {
                        self.dfirst[m * n3 + l * n2 + i * n + j] = half
                            * (ddg[(m * n + i) * n2 + j * n + l] + ddg[(m * n + j) * n2 + i * n + l]
                                - ddg[(m * n + l) * n2 + i * n + j]);
                    }
                }
            }
        }
        // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
        for m in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut s = T::zero();
                    for a in 0..n {
                        for b in 0..n {
                            s += ginv[k * n + a] * dg[m * n2 + a * n + b] * ginv[b * n + l];
                        }
                    }
                    self.dginv[m * n2 + k * n + l] = -s;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = T::zero();
                    for l in 0..n {
                        s += ginv[k * n + l] * self.first_kind[l * n2 + i * n + j];
                    }
                    self.christoffel[k * n2 + i * n + j] = s;
                    for m in 0..n {
                        let mut d = T::zero();
                        for l in 0..n {
                            d += self.dginv[m * n2 + k * n + l] * self.first_kind[l * n2 + i * n + j]
                                + ginv[k * n + l] * self.dfirst[m * n3 + l * n2 + i * n + j];
                        }
                        self.dgamma[m * n3 + k * n2 + i * n + j] = d;
                    }
                }
            }
        }
        // R^i_jkl
        let gam = &self.christoffel;
        let dgam = &self.dgamma;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut r = dgam[k * n3 + i * n2 + l * n + j] - dgam[l * n3 + i * n2 + k * n + j];
                        for m in 0..n {
                            r += gam[i * n2 + k * n + m] * gam[m * n2 + l * n + j]
                                - gam[i * n2 + l * n + m] * gam[m * n2 + k * n + j];
                        }
                        self.mixed[((i * n + j) * n + k) * n + l] = r;
                    }
                }
            }
        }
        for a in 0..n {
            for j in 0..n3 {
                let mut s = T::zero();
                for i in 0..n {
                    s += g[a * n + i] * self.mixed[i * n3 + j];
                }
                self.riemann[a * n3 + j] = s;
            }
        }
        self.scalar = ricci_from_lowered(n, &self.riemann, ginv, &mut self.ricci);
        weyl_lowered(n, &self.riemann, &self.ricci, self.scalar, g, &mut self.weyl);
        self.weyl_norm_sq =
            full_norm_sq(n, &self.weyl, ginv, &mut self.scratch, &mut self.scratch2).max(T::zero());
    }

    /// `R^i_jkl` (first index raised).
    pub fn riemann_mixed(&self, out: &mut [T]) {
        raise_first(self.n, &self.riemann, &self.ginv, out);
    }

    /// `W^i_jkl` (first index raised).
    pub fn weyl_mixed(&self, out: &mut [T]) {
        raise_first(self.n, &self.weyl, &self.ginv, out);
    }
}

/// Curvature fields on the stencil-valid interior of a chart.
///
/// Per-node blocks are stored contiguously in region order; use the `*_at`
/// accessors with a region position.
#[derive(Debug, Clone)]
pub struct CurvatureBundle<T> {
    grid: ChartGrid<T>,
    region: Region,
    n: usize,
    christoffel: Vec<T>,
    riemann: Vec<T>,
    ricci: Vec<T>,
    scalar: Vec<T>,
    weyl: Vec<T>,
    weyl_norm: Vec<T>,
    volume_density: Vec<T>,
}

impl<T: Scalar> CurvatureBundle<T> {
    pub fn grid(&self) -> &ChartGrid<T> {
        &self.grid
    }
    pub fn region(&self) -> &Region {
        &self.region
    }
    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.scalar.len()
    }
    pub fn is_empty(&self) -> bool {
        self.scalar.is_empty()
    }
    /// `Γ^k_ij` block.
    pub fn christoffel_at(&self, k: usize) -> &[T] {
        let b = self.n.pow(3);
        &self.christoffel[k * b..(k + 1) * b]
    }
    /// `R^i_jkl` block.
    pub fn riemann_at(&self, k: usize) -> &[T] {
        let b = self.n.pow(4);
        &self.riemann[k * b..(k + 1) * b]
    }
    pub fn ricci_at(&self, k: usize) -> &[T] {
        let b = self.n.pow(2);
        &self.ricci[k * b..(k + 1) * b]
    }
    /// `W^i_jkl` block.
    pub fn weyl_at(&self, k: usize) -> &[T] {
        let b = self.n.pow(4);
        &self.weyl[k * b..(k + 1) * b]
    }
    pub fn scalar(&self) -> &[T] {
        &self.scalar
    }
    /// Pointwise `|W|_g`.
    pub fn weyl_norm(&self) -> &[T] {
        &self.weyl_norm
    }
    pub fn volume_density(&self) -> &[T] {
        &self.volume_density
    }
    /// Quadrature rule matching the bundle's region.
    pub fn quadrature(&self) -> Quadrature<T> {
        Quadrature::trapezoid(&self.grid, self.region.clone())
    }
}

/// Full curvature bundle on the interior of `metric`'s chart.
///
/// Stores `O(n⁴)` numbers per node; for large grids prefer
/// [`curvature_scalars`] or [`map_curvature`].
pub fn curvature<T: Scalar>(metric: &ChartMetric<T>) -> Result<CurvatureBundle<T>> {
    let region = metric.grid().interior(STENCIL_MARGIN)?;
    let n = metric.dim();
    let n4 = n.pow(4);
    let blocks = map_curvature(metric, &region, |pc, _| {
        let mut r = vec![T::zero(); n4];
        let mut w = vec![T::zero(); n4];
        pc.riemann_mixed(&mut r);
        pc.weyl_mixed(&mut w);
        (pc.christoffel.clone(), r, pc.ricci.clone(), pc.scalar, w, pc.weyl_norm_sq.sqrt(), pc.sqrt_det)
    });
    let len = blocks.len();
    let mut b = CurvatureBundle {
        grid: metric.grid().clone(),
        region,
        n,
        christoffel: Vec::with_capacity(len * n.pow(3)),
        riemann: Vec::with_capacity(len * n4),
        ricci: Vec::with_capacity(len * n * n),
        scalar: Vec::with_capacity(len),
        weyl: Vec::with_capacity(len * n4),
        weyl_norm: Vec::with_capacity(len),
        volume_density: Vec::with_capacity(len),
    };
    for (c, r, ric, s, w, wn, vd) in blocks {
        b.christoffel.extend(c);
        b.riemann.extend(r);
        b.ricci.extend(ric);
        b.scalar.push(s);
        b.weyl.extend(w);
        b.weyl_norm.push(wn);
        b.volume_density.push(vd);
    }
    Ok(b)
}

/// Scalar curvature summaries on a region, without the tensor fields.
#[derive(Debug, Clone)]
pub struct CurvatureScalars<T> {
    pub region: Region,
    pub scalar: Vec<T>,
    /// `|W|²_g`.
    pub weyl_norm_sq: Vec<T>,
    pub volume_density: Vec<T>,
}

/// Streams scalar curvature, `|W|²` and `√det g` over the stencil interior.
pub fn curvature_scalars<T: Scalar>(metric: &ChartMetric<T>) -> Result<CurvatureScalars<T>> {
    let region = metric.grid().interior(STENCIL_MARGIN)?;
    curvature_scalars_on(metric, region)
}

/// As [`curvature_scalars`], restricted to a sub-region of the interior.
pub fn curvature_scalars_on<T: Scalar>(metric: &ChartMetric<T>, region: Region) -> Result<CurvatureScalars<T>> {
    check_inside_interior(metric.grid(), &region)?;
    let vals = map_curvature(metric, &region, |pc, _| (pc.scalar, pc.weyl_norm_sq, pc.sqrt_det));
    let mut out = CurvatureScalars {
        region,
        scalar: Vec::with_capacity(vals.len()),
        weyl_norm_sq: Vec::with_capacity(vals.len()),
        volume_density: Vec::with_capacity(vals.len()),
    };
    for (s, w, v) in vals {
        out.scalar.push(s);
        out.weyl_norm_sq.push(w);
        out.volume_density.push(v);
    }
    Ok(out)
}

fn check_inside_interior<T: Scalar>(grid: &ChartGrid<T>, region: &Region) -> Result<()> {
    let interior = grid.interior(STENCIL_MARGIN)?;
    let ok = region.lo.len() == grid.dim()
        && (0..grid.dim()).all(|d| region.lo[d] >= interior.lo[d] && region.hi[d] <= interior.hi[d] && region.lo[d] <= region.hi[d]);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "region {:?}..={:?} leaves the stencil interior {:?}..={:?}",
            region.lo, region.hi, interior.lo, interior.hi
        )))
    }
}

/// Evaluates `f(point_curvature, flat_index)` at every node of `region` in
/// parallel, returning results in region order.
///
/// Panics if a stencil node falls outside a bounded axis; regions from
/// [`ChartGrid::interior`] with margin ≥ 2 are always safe.
pub fn map_curvature<T, V, F>(metric: &ChartMetric<T>, region: &Region, f: F) -> Vec<V>
where
    T: Scalar,
    V: Send,
    F: Fn(&PointCurvature<T>, usize) -> V + Sync,
{
    let n = metric.dim();
    let grid = metric.grid();
    (0..region.len())
        .into_par_iter()
        .map_init(
            || (PointCurvature::new(n), vec![0usize; n]),
            |(pc, m), k| {
                region.multi_into(k, m);
                let flat = grid.flat(m);
                pc.evaluate(metric, flat);
                f(pc, flat)
            },
        )
        .collect()
}

/// Per-node quadrature weights over a region of a chart grid.
///
/// Weights factor as a dimensionless node factor (1 or ½ on bounded ends)
/// times the cell volume `Π h_d`.
#[derive(Debug, Clone)]
pub struct Quadrature<T> {
    grid: ChartGrid<T>,
    region: Region,
    factors: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> Quadrature<T> {
    /// Trapezoid on bounded axes, uniform on periodic axes.
    pub fn trapezoid(grid: &ChartGrid<T>, region: Region) -> Self {
        let weights = grid.region_weights(&region);
        let cell = grid.spacing().iter().fold(T::one(), |a, h| a * *h);
        let factors = weights.iter().map(|w| *w / cell).collect();
        Self { grid: grid.clone(), region, factors, weights }
    }

    /// Interior region of the curvature stencils.
    pub fn curvature_interior(grid: &ChartGrid<T>) -> Result<Self> {
        Ok(Self::trapezoid(grid, grid.interior(STENCIL_MARGIN)?))
    }

    pub fn grid(&self) -> &ChartGrid<T> {
        &self.grid
    }
    pub fn region(&self) -> &Region {
        &self.region
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.weights.len()
    }
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ values · weight`, accumulated sequentially in `f64` with the cell
    /// volume applied one axis at a time at the end.
    pub fn sum(&self, values: impl IntoIterator<Item = T>) -> T {
        let mut acc = 0.0f64;
        for (v, f) in values.into_iter().zip(&self.factors) {
            acc += v.as_f64() * f.as_f64();
        }
        for h in self.grid.spacing() {
            acc *= h.as_f64();
        }
        T::lit(acc)
    }
}

/// `Σ field · √det g · weight` over the quadrature region.
///
/// `field` is given in region order. The result does not depend on the
/// thread count.
pub fn integrate<T: Scalar>(field: &[T], metric: &ChartMetric<T>, quad: &Quadrature<T>) -> Result<T> {
    if !metric.grid().same_as(quad.grid()) {
        return Err(Error::GridMismatch("metric and quadrature live on different grids".into()));
    }
    if field.len() != quad.len() {
        return Err(Error::GridMismatch(format!(
            "field has {} values, quadrature region has {} nodes",
            field.len(),
            quad.len()
        )));
    }
    let nodes = quad.region().grid_nodes(metric.grid());
    Ok(quad.sum(field.iter().zip(nodes).map(|(f, node)| *f * metric.sqrt_det(node))))
}

/// Region-order sum of `field · density · weight` for precomputed densities.
pub fn integrate_with_density<T: Scalar>(field: &[T], density: &[T], weights: &[T]) -> T {
    let acc: f64 = field
        .iter()
        .zip(density)
        .zip(weights)
        .map(|((f, d), w)| f.as_f64() * d.as_f64() * w.as_f64())
        .sum();
    T::lit(acc)
}
