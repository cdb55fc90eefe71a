//! Explicit two-sided bound on the Yamabe constant of a perturbed cylinder
//! profile in terms of the reference value.
//!
//! With `ε` bounding the relative change of the metric, its inverse, the
//! volume density and the (positive) scalar curvature, every term of
//! `E(f) = ∫ (6|df|² + R f²) dσ` moves by at most a factor `(1 ± ε)²`, so
//! `E_i ∈ [1 − 2Kε, 1 + 2Kε]·E` with `K = 1 + ε/2`. The denominator
//! `(∫ f⁴ dσ)^{1/2}` moves by `√(1 ± ε) ∈ [1 − K′ε, 1 + K′ε]` with
//! `K′ = (1 − √(1 − ε))/ε`. Dividing,
//! `Q_i/Q ∈ [1 − K″ε, 1 + K″ε]` with `K″ = (2K + K′)/(1 − K′ε)`, and the
//! bound passes to the infimum. See `docs/bracket.md`.

use serde::{Deserialize, Serialize};

use crate::cylinder::{neck_metric_with, product_scalar_curvature, FrameFamily, MilnorMetric, NeckOptions, NeckProfile};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weyl::{dial_solve_with, DialOptions, DialSolution};

/// Perturbations at or above this size are rejected.
pub const BRACKET_GUARD: f64 = 0.2;

/// `Y(S⁴) = 8π√6`, the Yamabe constant of the round cylinder class.
pub fn sphere_yamabe<T: Scalar>() -> T {
    T::lit(8.0 * std::f64::consts::PI * 6f64.sqrt())
}

/// The four measured suprema entering `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSizes<T> {
    /// `sup_t |g − g₀|_{g₀}`.
    pub metric: T,
    /// `sup_t |g⁻¹ − g₀⁻¹|_{g₀}`.
    pub inverse: T,
    /// `sup_t |dσ/dσ₀ − 1|`.
    pub volume: T,
    /// `sup_t |R/R₀ − 1|`.
    pub scalar: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YamabeBracket<T> {
    pub lower: T,
    pub upper: T,
    pub reference: T,
    pub epsilon: T,
    pub sizes: PerturbationSizes<T>,
    pub k: T,
    pub k_prime: T,
    pub k_double_prime: T,
    /// `L₀` with `L₀⁻¹ ≤ R₀ ≤ L₀` on the reference profile.
    pub l0: T,
}

impl<T: Scalar> YamabeBracket<T> {
    pub fn contains(&self, y: T) -> bool {
        y >= self.lower && y <= self.upper
    }
}

/// `(K, K′, K″)` for a perturbation of size `ε < 1`.
pub fn bracket_constants<T: Scalar>(eps: T) -> (T, T, T) {
    let half = T::lit(0.5);
    let k = T::one() + half * eps;
    let kp = if eps == T::zero() { half } else { (T::one() - (T::one() - eps).sqrt()) / eps };
    let kpp = (T::lit(2.0) * k + kp) / (T::one() - kp * eps);
    (k, kp, kpp)
}

/// Largest `δ` with `K″(δ)·δ ≤ rel`, so that a perturbation of size `δ`
/// keeps the bracket within `rel·|Y_ref|`.
pub fn perturbation_for_target<T: Scalar>(rel: T) -> Result<T> {
    if !(rel > T::zero()) {
        return Err(Error::InvalidArgument(format!("relative target {rel} must be positive")));
    }
    let width = |d: T| bracket_constants(d).2 * d;
    let guard = T::lit(BRACKET_GUARD);
    if width(guard) <= rel {
        return Ok(guard);
    }
    let (mut lo, mut hi) = (T::zero(), guard);
    for _ in 0..80 {
        let mid = T::lit(0.5) * (lo + hi);
        if width(mid) <= rel {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Bracket for the Yamabe constant of `g` given the value `y_reference`
/// for `g0`; both profiles must share their `t`-grid.
pub fn perturbation_bracket<T: Scalar>(
    g0: &FrameFamily<T>,
    g: &FrameFamily<T>,
    y_reference: T,
) -> Result<YamabeBracket<T>> {
    if g0.grid() != g.grid() {
        return Err(Error::GridMismatch("profiles are sampled on different t-grids".into()));
    }
    let r0 = product_scalar_curvature(g0);
    let r = product_scalar_curvature(g);
    let (mut rmin, mut rmax) = (T::infinity(), T::neg_infinity());
    for (k, v) in r0.iter().enumerate() {
        if !(*v > T::zero()) {
            return Err(Error::Hypothesis(format!(
                "reference scalar curvature {v} at t = {} is not positive",
                g0.t(k)
            )));
        }
        rmin = rmin.min(*v);
        rmax = rmax.max(*v);
    }
    let l0 = rmax.max(T::one() / rmin);
    let mut sizes = PerturbationSizes { metric: T::zero(), inverse: T::zero(), volume: T::zero(), scalar: T::zero() };
    for k in 0..g.len() {
        let (c0, c) = (g0.coefficients(k), g.coefficients(k));
        let ratio = [c[0] / c0[0], c[1] / c0[1], c[2] / c0[2]];
        let frob = |f: &dyn Fn(T) -> T| ratio.iter().map(|x| f(*x) * f(*x)).sum::<T>().sqrt();
        sizes.metric = sizes.metric.max(frob(&|x| x - T::one()));
        sizes.inverse = sizes.inverse.max(frob(&|x| T::one() / x - T::one()));
        sizes.volume = sizes.volume.max(((ratio[0] * ratio[1] * ratio[2]).sqrt() - T::one()).abs());
        sizes.scalar = sizes.scalar.max((r[k] / r0[k] - T::one()).abs());
    }
    let eps = sizes.metric.max(sizes.inverse).max(sizes.volume).max(sizes.scalar);
    if eps >= T::lit(BRACKET_GUARD) {
        return Err(Error::Hypothesis(format!("perturbation size {eps} is not below {BRACKET_GUARD}")));
    }
    let (k, kp, kpp) = bracket_constants(eps);
    let a = (T::one() - kpp * eps) * y_reference;
    let b = (T::one() + kpp * eps) * y_reference;
    Ok(YamabeBracket {
        lower: a.min(b),
        upper: a.max(b),
        reference: y_reference,
        epsilon: eps,
        sizes,
        k,
        k_prime: kp,
        k_double_prime: kpp,
        l0,
    })
}

/// Bracket of a neck against the round cylinder on the same grid, with
/// reference value `8π√6`.
pub fn neck_bracket<T: Scalar>(neck: &NeckProfile<T>) -> Result<YamabeBracket<T>> {
    let round = FrameFamily::constant(MilnorMetric::round(), *neck.family().grid())?;
    perturbation_bracket(&round, neck.family(), sphere_yamabe())
}

/// A neck with Weyl mass in `[κ, κ + ε_W]` and Yamabe constant certified
/// at least `Y(S⁴) − ε_Y`.
#[derive(Debug, Clone)]
pub struct NeckCertificate<T> {
    pub dial: DialSolution<T>,
    pub bracket: YamabeBracket<T>,
    /// Halvings of `h − h₀` spent before the dial, to fit the Yamabe slack.
    pub yamabe_halvings: usize,
    pub yamabe_ok: bool,
    pub weyl_ok: bool,
}

/// Shrinks `h` toward round until the bracket of a probe neck meets
/// `Y(S⁴) − ε_Y`, dials `L̄` for the Weyl target, then re-brackets the
/// final neck.
pub fn certify_neck<T: Scalar>(
    h: MilnorMetric<T>,
    l: T,
    kappa: T,
    eps_w: T,
    eps_y: T,
    options: DialOptions<T>,
) -> Result<NeckCertificate<T>> {
    if !(eps_y > T::zero()) {
        return Err(Error::InvalidArgument(format!("Yamabe slack {eps_y} must be positive")));
    }
    let y = sphere_yamabe::<T>();
    let margin = options.margin.unwrap_or(l * T::lit(0.5));
    let neck_options = NeckOptions { cutoff: options.cutoff, step: None };
    let mut current = h;
    let mut halvings = 0;
    loop {
        let probe = neck_metric_with(current, l, T::one(), margin, neck_options)?;
        let ok = match neck_bracket(&probe) {
            Ok(b) => b.lower >= y - eps_y,
            Err(Error::Hypothesis(_)) => false,
            Err(e) => return Err(e),
        };
        if ok {
            break;
        }
        if halvings == crate::weyl::MAX_SHRINK {
            return Err(Error::Infeasible(format!("no perturbation within {} halvings meets the Yamabe slack", halvings)));
        }
        current = current.toward_round(T::lit(0.5))?;
        halvings += 1;
    }
    let dial = dial_solve_with(current, l, kappa, eps_w, options)?;
    let bracket = neck_bracket(&dial.neck)?;
    let yamabe_ok = bracket.lower >= y - eps_y;
    let weyl_ok = dial.verified_total >= kappa && dial.verified_total <= kappa + eps_w;
    Ok(NeckCertificate { dial, bracket, yamabe_halvings: halvings, yamabe_ok, weyl_ok })
}
