//! First variation of scalar curvature.
//!
//! `P_h(θ) = −Δ tr θ + ∇^i∇^j θ_ij − R_ij θ^ij` is evaluated in divergence
//! form, `P = |h|^{-1/2} ∂_k(|h|^{1/2} V^k) − R_ij θ^ij` with
//! `V^k = h^{jk}(∇^i θ_ij − ∂_j tr θ)`. The two nested stencils leave a
//! four-node margin on bounded axes.

use super::{map_curvature, STENCIL_MARGIN};
use crate::error::{Error, Result};
use crate::grid::RegionField;
use crate::metric::{packed_index, packed_len, ChartMetric, SymTensorField};
use crate::scalar::Scalar;

/// `P_h(θ)` on the interior four nodes away from bounded faces.
///
/// Rejects `θ` on another grid, or one for which `h + θ` is not positive
/// definite.
pub fn linearized_scalar_curvature<T: Scalar>(
    h: &ChartMetric<T>,
    theta: &SymTensorField<T>,
) -> Result<RegionField<T>> {
    h.perturbed(theta)?;
    let grid = h.grid();
    let n = h.dim();
    let np = packed_len(n);
    let inner = grid.interior(2 * STENCIL_MARGIN)?;
    let outer = grid.interior(STENCIL_MARGIN)?;

    let stage1: Vec<(Vec<T>, T)> = map_curvature(h, &outer, |pc, flat| {
        let mut dth = vec![T::zero(); n * np];
        for k in 0..n {
            let at = |o: isize| theta.packed_at(grid.shift(flat, k, o).expect("stencil node"));
            let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
            let scale = T::lit(12.0) * grid.spacing()[k];
            for q in 0..np {
                dth[k * np + q] = (T::lit(8.0) * (p1[q] - m1[q]) - (p2[q] - m2[q])) / scale;
            }
        }
        let th = theta.packed_at(flat);
        let t = |i: usize, j: usize| th[packed_index(n, i, j)];
        let dt = |a: usize, i: usize, j: usize| dth[a * np + packed_index(n, i, j)];
        let gam = |k: usize, i: usize, j: usize| pc.christoffel[(k * n + i) * n + j];
        let hi = &pc.ginv;
        // ∂_j tr θ = ∂_j(h^{ab}) θ_ab + h^{ab} ∂_j θ_ab, with ∂_j h^{ab} = −h^{ac} ∂_j h_cd h^{db}
        let mut dtr = vec![T::zero(); n];
        for (j, d) in dtr.iter_mut().enumerate() {
            let mut s = T::zero();
            for a in 0..n {
                for b in 0..n {
                    let mut dh = T::zero();
                    for c in 0..n {
                        for e in 0..n {
                            dh -= hi[a * n + c] * pc.dg[(j * n + c) * n + e] * hi[e * n + b];
                        }
                    }
                    s += dh * t(a, b) + hi[a * n + b] * dt(j, a, b);
                }
            }
            *d = s;
        }
        // D_j = h^{ia} ∇_a θ_ij
        let mut div = vec![T::zero(); n];
        for (j, d) in div.iter_mut().enumerate() {
            let mut s = T::zero();
            for i in 0..n {
                for a in 0..n {
                    let mut cov = dt(a, i, j);
                    for k in 0..n {
                        cov -= gam(k, a, i) * t(k, j) + gam(k, a, j) * t(i, k);
                    }
                    s += hi[i * n + a] * cov;
                }
            }
            *d = s;
        }
        let mut flux = vec![T::zero(); n];
        for (k, f) in flux.iter_mut().enumerate() {
            let mut s = T::zero();
            for j in 0..n {
                s += hi[j * n + k] * (div[j] - dtr[j]);
            }
            *f = pc.sqrt_det * s;
        }
        // R_ij θ^ij = R_ij h^{ia} h^{jb} θ_ab
        let mut rt = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut up = T::zero();
                for a in 0..n {
                    for b in 0..n {
                        up += hi[i * n + a] * hi[j * n + b] * t(a, b);
                    }
                }
                rt += pc.ricci[i * n + j] * up;
            }
        }
        (flux, rt)
    });

    let mut m = vec![0usize; n];
    let mut values = Vec::with_capacity(inner.len());
    for k in 0..inner.len() {
        inner.multi_into(k, &mut m);
        let flat = grid.flat(&m);
        let here = outer.position(&m).ok_or_else(|| Error::InvalidGrid("stage-one region".into()))?;
        let mut div = T::zero();
        for axis in 0..n {
            let at = |o: isize| {
                let node = grid.shift(flat, axis, o).expect("stencil node");
                stage1[outer.position(&grid.multi(node)).expect("inside stage-one region")].0[axis]
            };
            div += (T::lit(8.0) * (at(1) - at(-1)) - (at(2) - at(-2))) / (T::lit(12.0) * grid.spacing()[axis]);
        }
        values.push(div / h.sqrt_det(flat) - stage1[here].1);
    }
    Ok(RegionField { region: inner, values })
}
