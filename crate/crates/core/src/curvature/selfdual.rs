//! Self-dual / anti-self-dual splitting of the 4D Weyl tensor.

use super::algebra::i4;
use super::CurvatureBundle;
use crate::error::{Error, Result};
use crate::grid::Region;
use crate::linalg::{cholesky, lower_inverse};
use crate::metric::ChartMetric;
use crate::scalar::Scalar;

/// Basis of 2-forms `e_a ∧ e_b`, `a < b`, in an oriented orthonormal frame.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Hodge star on [`PAIRS`] for the positive orientation: `(target, sign)`.
const STAR: [(usize, i8); 6] = [(5, 1), (4, -1), (3, 1), (2, 1), (1, -1), (0, 1)];

/// Weyl operator blocks on `Λ²` per node, 6×6 row-major in the [`PAIRS`] basis.
#[derive(Debug, Clone)]
pub struct SelfDualSplit<T> {
    pub region: Region,
    pub orientation: i8,
    pub w_plus: Vec<[T; 36]>,
    pub w_minus: Vec<[T; 36]>,
    /// `|W⁺|²_g` (Hilbert–Schmidt norm of the block).
    pub plus_norm_sq: Vec<T>,
    pub minus_norm_sq: Vec<T>,
}

impl<T: Scalar> SelfDualSplit<T> {
    pub fn plus_norm(&self) -> Vec<T> {
        self.plus_norm_sq.iter().map(|v| v.sqrt()).collect()
    }
    pub fn minus_norm(&self) -> Vec<T> {
        self.minus_norm_sq.iter().map(|v| v.sqrt()).collect()
    }
}

/// Pointwise split of a lowered Weyl tensor `W_abcd` at metric `g`.
///
/// Returns `(W⁺, W⁻, |W⁺|², |W⁻|²)`.
pub fn split_point<T: Scalar>(g: &[T], weyl: &[T], orientation: i8) -> ([T; 36], [T; 36], T, T) {
    let n = 4;
    let mut l = [T::zero(); 16];
    let mut li = [T::zero(); 16];
    let ok = cholesky(&g[..16], n, &mut l);
    debug_assert!(ok);
    lower_inverse(&l, n, &mut li);
    // frame vector e_α has components E^i_α = (L⁻¹)_{α i}
    let e = |i: usize, alpha: usize| li[alpha * n + i];
    // W in the frame
    let mut wf = [T::zero(); 256];
    let mut tmp = [T::zero(); 256];
    tmp.copy_from_slice(&weyl[..256]);
    for slot in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let idx = [a, b, c, d];
                        let mut s = T::zero();
                        for x in 0..4 {
                            let mut j = idx;
                            j[slot] = x;
                            s += e(x, idx[slot]) * tmp[i4(n, j[0], j[1], j[2], j[3])];
                        }
                        wf[i4(n, a, b, c, d)] = s;
                    }
                }
            }
        }
        tmp = wf;
    }
    let mut m = [T::zero(); 36];
    for (p, &(a, b)) in PAIRS.iter().enumerate() {
        for (q, &(c, d)) in PAIRS.iter().enumerate() {
            m[p * 6 + q] = wf[i4(n, a, b, c, d)];
        }
    }
    let sgn = if orientation >= 0 { T::one() } else { -T::one() };
    let mut star = [T::zero(); 36];
    for (p, &(t, s)) in STAR.iter().enumerate() {
        star[t * 6 + p] = sgn * T::lit(s as f64);
    }
    let mut proj_p = [T::zero(); 36];
    let mut proj_m = [T::zero(); 36];
    let half = T::lit(0.5);
    for i in 0..6 {
        for j in 0..6 {
            let id = if i == j { T::one() } else { T::zero() };
            proj_p[i * 6 + j] = half * (id + star[i * 6 + j]);
            proj_m[i * 6 + j] = half * (id - star[i * 6 + j]);
        }
    }
    let sandwich = |p: &[T; 36]| {
        let mut pm = [T::zero(); 36];
        let mut out = [T::zero(); 36];
        for i in 0..6 {
            for j in 0..6 {
                pm[i * 6 + j] = (0..6).map(|k| p[i * 6 + k] * m[k * 6 + j]).sum();
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                out[i * 6 + j] = (0..6).map(|k| pm[i * 6 + k] * p[k * 6 + j]).sum();
            }
        }
        let norm: T = out.iter().map(|v| *v * *v).sum();
        (out, norm)
    };
    let (wp, np) = sandwich(&proj_p);
    let (wm, nm) = sandwich(&proj_m);
    (wp, wm, np, nm)
}

/// Splits the Weyl field of `bundle` into self-dual and anti-self-dual
/// blocks for the Hodge star of `(metric, orientation)`. The orientation
/// `+1` is that of the coordinate order `x¹ ∧ x² ∧ x³ ∧ x⁴`.
pub fn selfdual_split<T: Scalar>(
    bundle: &CurvatureBundle<T>,
    metric: &ChartMetric<T>,
    orientation: i8,
) -> Result<SelfDualSplit<T>> {
    if metric.dim() != 4 || bundle.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: metric.dim() });
    }
    if !metric.grid().same_as(bundle.grid()) {
        return Err(Error::GridMismatch("bundle and metric live on different grids".into()));
    }
    if orientation != 1 && orientation != -1 {
        return Err(Error::InvalidArgument(format!("orientation must be ±1, got {orientation}")));
    }
    let nodes = bundle.region().grid_nodes(metric.grid());
    let mut out = SelfDualSplit {
        region: bundle.region().clone(),
        orientation,
        w_plus: Vec::with_capacity(nodes.len()),
        w_minus: Vec::with_capacity(nodes.len()),
        plus_norm_sq: Vec::with_capacity(nodes.len()),
        minus_norm_sq: Vec::with_capacity(nodes.len()),
    };
    let mut g = [T::zero(); 16];
    let mut lowered = [T::zero(); 256];
    for (k, &node) in nodes.iter().enumerate() {
        metric.at_into(node, &mut g);
        let mixed = bundle.weyl_at(k);
        for a in 0..4 {
            for r in 0..64 {
                lowered[a * 64 + r] = (0..4).map(|i| g[a * 4 + i] * mixed[i * 64 + r]).sum();
            }
        }
        let (wp, wm, np, nm) = split_point(&g, &lowered, orientation);
        out.w_plus.push(wp);
        out.w_minus.push(wm);
        out.plus_norm_sq.push(np);
        out.minus_norm_sq.push(nm);
    }
    Ok(out)
}
