//! Pull-back of `¼ Σ a_i σ_i² + dt²` to Euler-angle coordinates
//! `(θ, φ, ψ, t)` on S³ × ℝ, for auditing by the chart curvature path.
//!
//! `σ₁ = −sin ψ dθ + cos ψ sin θ dφ`, `σ₂ = cos ψ dθ + sin ψ sin θ dφ`,
//! `σ₃ = dψ + cos θ dφ`. The chart degenerates where `sin θ = 0`.

use super::family::{CoefficientCurve, NeckProfile};
use crate::error::{Error, Result};
use crate::grid::ChartGrid;
use crate::metric::ChartMetric;
use crate::scalar::Scalar;

/// Writes the 4×4 metric at `(θ, φ, ψ)` for slice coefficients `k`.
pub fn milnor_pullback<T: Scalar>(k: [T; 3], x: &[T], g: &mut [T]) {
    let (st, ct) = x[0].sin_cos();
    let (sp, cp) = x[2].sin_cos();
    let z = T::zero();
    // rows σ_i in (dθ, dφ, dψ)
    let s = [[-sp, cp * st, z], [cp, sp * st, z], [z, ct, T::one()]];
    let quarter = T::lit(0.25);
    for v in g.iter_mut() {
        *v = z;
    }
    for mu in 0..3 {
        for nu in mu..3 {
            let mut acc = z;
            for i in 0..3 {
                acc += k[i] * s[i][mu] * s[i][nu];
            }
            g[mu * 4 + nu] = quarter * acc;
            g[nu * 4 + mu] = quarter * acc;
        }
    }
    g[15] = T::one();
}

/// `n⁴` grid with spacing `h` centred at `(π/2, 0, 0, t_center)`.
pub fn euler_chart_grid<T: Scalar>(n: usize, h: T, t_center: T) -> Result<ChartGrid<T>> {
    ChartGrid::cube(4, n, h, &[T::pi() * T::lit(0.5), T::zero(), T::zero(), t_center])
}

/// Chart metric for an arbitrary coefficient curve; axis 3 is `t`.
pub fn family_to_chart<T: Scalar, C: CoefficientCurve<T> + ?Sized>(
    curve: &C,
    chart: ChartGrid<T>,
) -> Result<ChartMetric<T>> {
    if chart.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: chart.dim() });
    }
    let lo = chart.origin()[0];
    let hi = lo + T::from_usize_lossy(chart.extents()[0] - 1) * chart.spacing()[0];
    if chart.periodic()[0] || !(lo > T::zero()) || !(hi < T::pi()) {
        return Err(Error::CoordinateSingularity(format!(
            "polar axis spans [{lo}, {hi}], which must lie strictly inside (0, π)"
        )));
    }
    ChartMetric::from_fn(chart, |x, g| {
        let [c, _, _] = curve.jet_at(x[3]);
        milnor_pullback(c, x, g);
    })
}

/// Chart metric of a neck on `chart`.
pub fn frame_to_chart<T: Scalar>(neck: &NeckProfile<T>, chart: ChartGrid<T>) -> Result<ChartMetric<T>> {
    family_to_chart(neck, chart)
}
