//! Conformal flattening of a metric near a point.
//!
//! Around `o` the metric is replaced by `ḡ = e^{2ψ} F`, where `F` is the
//! pull-back of the constant metric `g(o)` under the quadratic map
//! `y ↦ y + ½ C(y, y)` with `C^a_ki = g^{aj}(o) Γ_{j,ki}(o)`. `F` is flat and
//! shares the 1-jet of `g` at `o`; `ψ = β yᵀ g(o) y` fixes `R_ḡ(o) = R_g(o)`.
//! The blend `g_δ = g + w_δ(|y|)(ḡ − g)` uses a quintic smoothstep in
//! `log r`, long enough that `|r ẇ| < δ` and `|r² ẅ| < δ`.

use super::{PointCurvature, STENCIL_MARGIN};
use crate::error::{Error, Result};
use crate::metric::ChartMetric;
use crate::scalar::Scalar;

/// Radial cutoff `w(r)`: 1 for `r ≤ ε`, 0 for `r ≥ δ`, `C²` in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCutoff<T> {
    pub delta: T,
    pub inner: T,
    /// Length of the transition in `log r`.
    pub log_len: T,
}

/// Bound-safety factor: the derivative bounds hold with 5% to spare.
const MARGIN: f64 = 0.95;
/// `max P′` and `max |P″|` of the quintic smoothstep on `[0, 1]`.
const P1_MAX: f64 = 1.875;
const P2_MAX: f64 = 5.773_502_691_896_258;

impl<T: Scalar> LogCutoff<T> {
    pub fn new(delta: T) -> Result<Self> {
        if !(delta > T::zero()) || !delta.is_finite() {
            return Err(Error::InvalidArgument("cutoff radius must be positive".into()));
        }
        let d = delta.as_f64() * MARGIN;
        // smallest S with P2_MAX/S² + P1_MAX/S ≤ 0.95 δ
        let s = (P1_MAX + (P1_MAX * P1_MAX + 4.0 * d * P2_MAX).sqrt()) / (2.0 * d);
        let log_len = T::lit(s);
        Ok(Self { delta, inner: delta * (-log_len).exp(), log_len })
    }

    fn u(&self, r: T) -> T {
        ((self.delta / r).ln() / self.log_len).max(T::zero()).min(T::one())
    }

    pub fn value(&self, r: T) -> T {
        if r <= self.inner {
            return T::one();
        }
        if r >= self.delta {
            return T::zero();
        }
        let u = self.u(r);
        u * u * u * (T::lit(10.0) + u * (T::lit(-15.0) + T::lit(6.0) * u))
    }

    /// `r · dw/dr`.
    pub fn r_dw(&self, r: T) -> T {
        if r <= self.inner || r >= self.delta {
            return T::zero();
        }
        let u = self.u(r);
        let p1 = T::lit(30.0) * u * u * (u - T::one()) * (u - T::one());
        -p1 / self.log_len
    }

    /// `r² · d²w/dr²`.
    pub fn r2_ddw(&self, r: T) -> T {
        if r <= self.inner || r >= self.delta {
            return T::zero();
        }
        let u = self.u(r);
        let p1 = T::lit(30.0) * u * u * (u - T::one()) * (u - T::one());
        let p2 = T::lit(60.0) * u * (u - T::one()) * (T::lit(2.0) * u - T::one());
        p2 / (self.log_len * self.log_len) + p1 / self.log_len
    }
}

/// Replaces `g` near the node `o` by a conformally flat metric with the same
/// 1-jet and the same scalar curvature at `o`, blended back to `g` by
/// `r = δ` (coordinate distance).
pub fn flatten_near_point<T: Scalar>(g: &ChartMetric<T>, o: &[usize], delta: T) -> Result<ChartMetric<T>> {
    let grid = g.grid();
    let n = g.dim();
    if o.len() != n {
        return Err(Error::Dimension { expected: n, got: o.len() });
    }
    let interior = grid.interior(STENCIL_MARGIN)?;
    if !interior.contains(o) {
        return Err(Error::InvalidArgument(format!("node {o:?} is not an interior node")));
    }
    let x0 = grid.coord(o);
    let mut boundary = T::infinity();
    for d in 0..n {
        if grid.periodic()[d] {
            continue;
        }
        let lo = grid.origin()[d];
        let hi = lo + T::from_usize_lossy(grid.extents()[d] - 1) * grid.spacing()[d];
        boundary = boundary.min(x0[d] - lo).min(hi - x0[d]);
    }
    if !(delta < boundary) {
        return Err(Error::InvalidArgument(format!(
            "cutoff radius {delta} reaches the chart boundary at distance {boundary}"
        )));
    }
    let cutoff = LogCutoff::new(delta)?;

    let mut pc = PointCurvature::new(n);
    pc.evaluate(g, grid.flat(o));
    let g0 = pc.g.clone();
    // C^a_ki = g^{aj} Γ_{j,ki} = Γ^a_ki
    let c = pc.christoffel.clone();
    let beta = -pc.scalar / (T::lit(4.0) * T::from_usize_lossy(n * (n - 1)));

    let periodic: Vec<bool> = grid.periodic().to_vec();
    let extent: Vec<T> = (0..n).map(|d| T::from_usize_lossy(grid.extents()[d]) * grid.spacing()[d]).collect();
    g.map(move |x, gx, out| {
        let mut y = vec![T::zero(); n];
        for d in 0..n {
            let mut v = x[d] - x0[d];
            if periodic[d] {
                // nearest image
                let half = extent[d] * T::lit(0.5);
                if v > half {
                    v -= extent[d];
                } else if v < -half {
                    v += extent[d];
                }
            }
            y[d] = v;
        }
        let r = y.iter().map(|v| *v * *v).sum::<T>().sqrt();
        let w = cutoff.value(r);
        if w == T::zero() {
            out.copy_from_slice(gx);
            return;
        }
        // J^a_k = δ^a_k + C^a_km y^m
        let mut jac = vec![T::zero(); n * n];
        for a in 0..n {
            for k in 0..n {
                let mut s = if a == k { T::one() } else { T::zero() };
                for m in 0..n {
                    s += c[(a * n + k) * n + m] * y[m];
                }
                jac[a * n + k] = s;
            }
        }
        let mut q = T::zero();
        for a in 0..n {
            for b in 0..n {
                q += y[a] * g0[a * n + b] * y[b];
            }
        }
        let conf = (T::lit(2.0) * beta * q).exp();
        for k in 0..n {
            for i in k..n {
                let mut f = T::zero();
                for a in 0..n {
                    for b in 0..n {
                        f += jac[a * n + k] * g0[a * n + b] * jac[b * n + i];
                    }
                }
                let bar = conf * f;
                let v = gx[k * n + i] + w * (bar - gx[k * n + i]);
                out[k * n + i] = v;
                out[i * n + k] = v;
            }
        }
    })
}
