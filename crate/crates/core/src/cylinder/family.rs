//! `t`-families of Milnor metrics: sampled families, cutoff interpolation
//! and the symmetric neck.

use serde::{Deserialize, Serialize};

use super::cutoff::{CutoffKind, CutoffProfile};
use super::milnor::{frame_curvature, product_scalar_at, slice_scalar, FrameCurvature, MilnorMetric};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Hard guard on `|a_i − 1|` for neck endpoints.
pub const NECK_GUARD: f64 = 0.5;

/// Coefficients and their first two `t`-derivatives.
pub type Jet3<T> = [[T; 3]; 3];

/// A `t`-family of coefficients that can be evaluated anywhere.
pub trait CoefficientCurve<T: Scalar>: Sync {
    fn jet_at(&self, t: T) -> Jet3<T>;
}

impl<T: Scalar> CoefficientCurve<T> for MilnorMetric<T> {
    fn jet_at(&self, _t: T) -> Jet3<T> {
        [self.coefficients(), [T::zero(); 3], [T::zero(); 3]]
    }
}

/// Uniform samples `start + k·step`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid<T> {
    pub start: T,
    pub step: T,
    pub count: usize,
    /// Samples are `(k − count/2)·step`, exactly symmetric about `0`.
    #[serde(default)]
    pub centered: bool,
}

impl<T: Scalar> TGrid<T> {
    pub fn new(start: T, step: T, count: usize) -> Result<Self> {
        if !(step > T::zero()) || count < 2 {
            return Err(Error::InvalidGrid(format!("t-grid needs positive step and two samples, got {step} x {count}")));
        }
        Ok(Self { start, step, count, centered: false })
    }

    /// `count` samples covering `[a, b]` inclusive.
    pub fn covering(a: T, b: T, count: usize) -> Result<Self> {
        if !(b > a) || count < 2 {
            return Err(Error::InvalidGrid("t-grid interval is empty".into()));
        }
        Self::new(a, (b - a) / T::from_usize_lossy(count - 1), count)
    }

    /// Odd-count grid `(k − mid)·step` reaching at least `±half`; exactly
    /// symmetric about `0`.
    pub fn symmetric(half: T, step: T) -> Result<Self> {
        if !(step > T::zero()) || half < T::zero() {
            return Err(Error::InvalidGrid("symmetric t-grid needs positive step".into()));
        }
        let mid = (half / step).ceil().to_usize().unwrap_or(0).max(1);
        Ok(Self { start: -T::from_usize_lossy(mid) * step, step, count: 2 * mid + 1, centered: true })
    }

    pub fn t(&self, k: usize) -> T {
        if self.centered {
            (T::from_usize_lossy(k) - T::from_usize_lossy(self.count / 2)) * self.step
        } else {
            self.start + T::from_usize_lossy(k) * self.step
        }
    }

    pub fn end(&self) -> T {
        self.t(self.count - 1)
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.count).map(|k| self.t(k)).collect()
    }
}

/// Sampled family `(a, b, c)(t)` with analytic first and second derivatives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameFamily<T> {
    grid: TGrid<T>,
    coefficients: Vec<[T; 3]>,
    d1: Vec<[T; 3]>,
    d2: Vec<[T; 3]>,
}

impl<T: Scalar> FrameFamily<T> {
    /// Samples `curve` on `grid`, rejecting non-positive coefficients.
    pub fn sample<C: CoefficientCurve<T> + ?Sized>(curve: &C, grid: TGrid<T>) -> Result<Self> {
        let mut coefficients = Vec::with_capacity(grid.count);
        let mut d1 = Vec::with_capacity(grid.count);
        let mut d2 = Vec::with_capacity(grid.count);
        for k in 0..grid.count {
            let [c, p, q] = curve.jet_at(grid.t(k));
            if let Some(i) = c.iter().position(|v| !(*v > T::zero())) {
                return Err(Error::InvalidArgument(format!(
                    "coefficient {i} is {} at t = {}",
                    c[i],
                    grid.t(k)
                )));
            }
            coefficients.push(c);
            d1.push(p);
            d2.push(q);
        }
        Ok(Self { grid, coefficients, d1, d2 })
    }

    pub fn constant(m: MilnorMetric<T>, grid: TGrid<T>) -> Result<Self> {
        Self::sample(&m, grid)
    }

    pub fn grid(&self) -> &TGrid<T> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.count
    }

    pub fn is_empty(&self) -> bool {
        self.grid.count == 0
    }

    pub fn t(&self, k: usize) -> T {
        self.grid.t(k)
    }

    pub fn coefficients(&self, k: usize) -> [T; 3] {
        self.coefficients[k]
    }

    pub fn jet(&self, k: usize) -> Jet3<T> {
        [self.coefficients[k], self.d1[k], self.d2[k]]
    }

    pub fn slice_scalar(&self) -> Vec<T> {
        self.coefficients.iter().map(|c| slice_scalar(*c)).collect()
    }

    pub fn frame_curvature(&self, k: usize) -> FrameCurvature<T> {
        frame_curvature(self.coefficients[k], self.d1[k], self.d2[k])
    }

    /// Largest trapezoid defect `|f(t_{k+1}) − f(t_k) − ½ Δt (f′(t_k) + f′(t_{k+1}))|`
    /// over coefficients and first derivatives; `O(Δt²)` for smooth
    /// families and `O(Δt)` across a jump of the second derivative.
    pub fn derivative_consistency(&self) -> T {
        let h = self.grid.step;
        let half = T::lit(0.5);
        let mut worst = T::zero();
        for k in 0..self.len().saturating_sub(1) {
            for i in 0..3 {
                let e0 = self.coefficients[k + 1][i] - self.coefficients[k][i] - half * h * (self.d1[k][i] + self.d1[k + 1][i]);
                let e1 = self.d1[k + 1][i] - self.d1[k][i] - half * h * (self.d2[k][i] + self.d2[k + 1][i]);
                worst = worst.max(e0.abs()).max(e1.abs());
            }
        }
        worst
    }
}

/// Scalar curvature of `g(t) + dt²` at every sample.
pub fn product_scalar_curvature<T: Scalar>(family: &FrameFamily<T>) -> Vec<T> {
    (0..family.len())
        .map(|k| product_scalar_at(family.coefficients[k], family.d1[k], family.d2[k]))
        .collect()
}

/// `φ(t)·h + (1 − φ(t))·ĥ`, coefficient-wise.
#[derive(Debug, Clone)]
pub struct Interpolation<T> {
    pub h: MilnorMetric<T>,
    pub h_hat: MilnorMetric<T>,
    pub phi: CutoffProfile<T>,
}

impl<T: Scalar> Interpolation<T> {
    /// `T = h − ĥ`.
    pub fn difference(&self) -> [T; 3] {
        let (a, b) = (self.h.coefficients(), self.h_hat.coefficients());
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }
}

impl<T: Scalar> CoefficientCurve<T> for Interpolation<T> {
    fn jet_at(&self, t: T) -> Jet3<T> {
        let l = self.phi.length();
        if t <= T::zero() {
            return [self.h_hat.coefficients(), [T::zero(); 3], [T::zero(); 3]];
        }
        if t >= l {
            return [self.h.coefficients(), [T::zero(); 3], [T::zero(); 3]];
        }
        let [p, p1, p2] = self.phi.eval(t);
        let hat = self.h_hat.coefficients();
        let d = self.difference();
        [
            [0, 1, 2].map(|i| hat[i] + p * d[i]),
            [0, 1, 2].map(|i| p1 * d[i]),
            [0, 1, 2].map(|i| p2 * d[i]),
        ]
    }
}

/// Samples the interpolation from `ĥ` (at `t ≤ 0`) to `h` (at `t ≥ L`).
pub fn interpolate_family<T: Scalar>(
    h: MilnorMetric<T>,
    h_hat: MilnorMetric<T>,
    phi: CutoffProfile<T>,
    t_grid: TGrid<T>,
) -> Result<FrameFamily<T>> {
    if t_grid.t(0) > T::zero() || t_grid.end() < phi.length() {
        return Err(Error::InvalidArgument(format!(
            "t-grid [{}, {}] does not cover [0, {}]",
            t_grid.t(0),
            t_grid.end(),
            phi.length()
        )));
    }
    FrameFamily::sample(&Interpolation { h, h_hat, phi }, t_grid)
}

/// Construction options for [`neck_metric_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeckOptions<T> {
    pub cutoff: CutoffKind,
    /// Sample spacing; defaults to `min(L/20, 1/4)`.
    pub step: Option<T>,
}

impl<T> Default for NeckOptions<T> {
    fn default() -> Self {
        Self { cutoff: CutoffKind::Parabolic, step: None }
    }
}

/// Even neck: `h` on `|t| ≤ L̄`, round outside `|t| ≥ L̄ + L`, cutoff
/// interpolation on the two bands.
#[derive(Debug, Clone)]
pub struct NeckProfile<T> {
    h: MilnorMetric<T>,
    length: T,
    plateau: T,
    margin: T,
    phi: CutoffProfile<T>,
    family: FrameFamily<T>,
}

/// Neck with the parabolic cutoff and default sampling.
pub fn neck_metric<T: Scalar>(h: MilnorMetric<T>, l: T, l_bar: T, margin: T) -> Result<NeckProfile<T>> {
    neck_metric_with(h, l, l_bar, margin, NeckOptions::default())
}

pub fn neck_metric_with<T: Scalar>(
    h: MilnorMetric<T>,
    l: T,
    l_bar: T,
    margin: T,
    options: NeckOptions<T>,
) -> Result<NeckProfile<T>> {
    for (index, value) in h.coefficients().into_iter().enumerate() {
        if !((value - T::one()).abs() <= T::lit(NECK_GUARD)) {
            return Err(Error::GuardViolated { index, value: value.as_f64() });
        }
    }
    if !(l_bar > T::zero()) || !l_bar.is_finite() {
        return Err(Error::InvalidArgument(format!("plateau half-length {l_bar} must be positive")));
    }
    if !(margin >= T::zero()) || !margin.is_finite() {
        return Err(Error::InvalidArgument(format!("margin {margin} must be non-negative")));
    }
    let phi = CutoffProfile::new(l, options.cutoff)?;
    let step = options.step.unwrap_or_else(|| (l * T::lit(0.05)).min(T::lit(0.25)));
    let grid = TGrid::symmetric(l_bar + l + margin, step)?;
    let mut neck = NeckProfile {
        h,
        length: l,
        plateau: l_bar,
        margin,
        phi,
        family: FrameFamily { grid, coefficients: vec![], d1: vec![], d2: vec![] },
    };
    neck.family = FrameFamily::sample(&neck, grid)?;
    Ok(neck)
}

impl<T: Scalar> NeckProfile<T> {
    pub fn h(&self) -> MilnorMetric<T> {
        self.h
    }

    pub fn transition_length(&self) -> T {
        self.length
    }

    pub fn plateau_half_length(&self) -> T {
        self.plateau
    }

    pub fn margin(&self) -> T {
        self.margin
    }

    pub fn cutoff(&self) -> &CutoffProfile<T> {
        &self.phi
    }

    pub fn family(&self) -> &FrameFamily<T> {
        &self.family
    }

    /// `|t|` where the round collar begins.
    pub fn outer_edge(&self) -> T {
        self.plateau + self.length
    }

    /// Half-width of the sampled window.
    pub fn half_width(&self) -> T {
        self.outer_edge() + self.margin
    }

    /// `T = h − h₀`.
    pub fn difference(&self) -> [T; 3] {
        self.h.coefficients().map(|v| v - T::one())
    }

    /// Same neck with another plateau half-length.
    pub fn with_plateau(&self, l_bar: T) -> Result<Self> {
        neck_metric_with(
            self.h,
            self.length,
            l_bar,
            self.margin,
            NeckOptions { cutoff: self.phi.kind(), step: Some(self.family.grid.step) },
        )
    }

    /// Points in `t ≥ 0` where the jet is not smooth; quadrature breaks.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut b = vec![T::zero()];
        b.extend(self.phi.breakpoints().into_iter().map(|s| s + self.plateau));
        b.push(self.half_width());
        b.dedup();
        b
    }

    pub fn max_scalar_jump(&self) -> T {
        max_scalar_jump(self)
    }
}

impl<T: Scalar> CoefficientCurve<T> for NeckProfile<T> {
    fn jet_at(&self, t: T) -> Jet3<T> {
        let s = t.abs() - self.plateau;
        let zero = [T::zero(); 3];
        if s <= T::zero() {
            return [self.h.coefficients(), zero, zero];
        }
        if s >= self.length {
            return [[T::one(); 3], zero, zero];
        }
        let [p, p1, p2] = self.phi.eval(s);
        let sign = if t < T::zero() { -T::one() } else { T::one() };
        let h = self.h.coefficients();
        // h₀ − (1 − φ(s))(h₀ − h)
        [
            [0, 1, 2].map(|i| T::one() - (T::one() - p) * (T::one() - h[i])),
            [0, 1, 2].map(|i| sign * p1 * (T::one() - h[i])),
            [0, 1, 2].map(|i| p2 * (T::one() - h[i])),
        ]
    }
}

/// `sup_t |R_ḡ(t) − R_{g(·,t)}|` over one transition band, sampled densely
/// and at the cutoff breakpoints from both sides.
pub fn max_scalar_jump<T: Scalar>(neck: &NeckProfile<T>) -> T {
    let samples = 4000;
    let l = neck.length;
    let mut ts: Vec<T> = (0..=samples)
        .map(|k| neck.plateau + l * T::from_usize_lossy(k) / T::from_usize_lossy(samples))
        .collect();
    let nudge = l * T::lit(1e-9);
    for b in neck.phi.breakpoints() {
        ts.push(neck.plateau + b - nudge);
        ts.push(neck.plateau + b + nudge);
    }
    ts.into_iter()
        .map(|t| {
            let [c, p, q] = neck.jet_at(t);
            (product_scalar_at(c, p, q) - slice_scalar(c)).abs()
        })
        .fold(T::zero(), T::max)
}
