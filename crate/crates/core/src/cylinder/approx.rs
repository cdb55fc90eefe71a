//! Fitted jump constant `K₀` in `sup |R_ḡ − R_g| ≤ K₀ |T| / L²`, and the
//! approximating sequence of interpolated cylinders built from it.

use serde::{Deserialize, Serialize};

use super::cutoff::cutoff_phi;
use super::family::{neck_metric, CoefficientCurve, Interpolation};
use super::milnor::{product_scalar_at, MilnorMetric};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpFit<T> {
    /// `(L, sup_t |R_ḡ − R_g|)`.
    pub samples: Vec<(T, T)>,
    /// Least-squares log-log slope of the jump against `L`.
    pub slope: T,
    /// `max jump·L² / |T|` over the samples.
    pub k0: T,
}

/// Measures the scalar-curvature jump of the neck through `h` for each
/// transition length.
pub fn fit_jump_constant<T: Scalar>(h: MilnorMetric<T>, lengths: &[T]) -> Result<JumpFit<T>> {
    if lengths.len() < 2 {
        return Err(Error::InvalidArgument("jump fit needs at least two lengths".into()));
    }
    let size = h.distance_to_round();
    if size == T::zero() {
        return Err(Error::DialDegenerate);
    }
    let mut samples = Vec::with_capacity(lengths.len());
    for &l in lengths {
        let neck = neck_metric(h, l, T::one(), T::zero())?;
        samples.push((l, neck.max_scalar_jump()));
    }
    let xs: Vec<f64> = samples.iter().map(|(l, _)| l.as_f64().ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, j)| j.as_f64().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let k0 = samples.iter().map(|(l, j)| *j * *l * *l / size).fold(T::zero(), T::max);
    Ok(JumpFit { samples, slope: T::lit(sxy / sxx), k0 })
}

/// One member of the sequence `ḡ_j → h₀ + dt²`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproximationStep<T> {
    pub j: usize,
    /// Endpoint `h_j = h₀ + η·direction`.
    pub h: MilnorMetric<T>,
    pub eta: T,
    /// Transition length chosen from the fitted `K₀`.
    pub length: T,
    pub k0: T,
    /// Measured `sup_t max_i |a_i − 1|`.
    pub metric_sup: T,
    /// Measured `sup_t |R_ḡ − 6|`.
    pub scalar_sup: T,
}

/// Builds `ḡ_j = h₀` for `t ≤ 0`, `h_j` for `t ≥ L`, with `|h_j − h₀| ≤ 1/(4j)`
/// and `L` large enough that the jump stays below `1/(2j)`, then measures
/// both sups on a dense sampling.
pub fn approximating_neck<T: Scalar>(j: usize, direction: [T; 3]) -> Result<ApproximationStep<T>> {
    if j == 0 {
        return Err(Error::InvalidArgument("sequence index starts at 1".into()));
    }
    let scale = direction.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() {
        return Err(Error::DialDegenerate);
    }
    let dir = direction.map(|v| v / scale);
    let target = T::one() / T::from_usize_lossy(2 * j);
    let mut eta = T::one() / T::from_usize_lossy(4 * j);
    let endpoint = |eta: T| MilnorMetric::from_coefficients(dir.map(|d| T::one() + eta * d));
    let mut h = endpoint(eta)?;
    while (h.scalar_curvature() - T::lit(6.0)).abs() > target {
        eta = eta * T::lit(0.5);
        h = endpoint(eta)?;
    }
    let fit = fit_jump_constant(h, &[T::lit(10.0), T::lit(20.0), T::lit(40.0)])?;
    let size = h.distance_to_round();
    let length = (fit.k0 * size / target).sqrt().max(T::lit(10.0));
    let interp = Interpolation { h, h_hat: MilnorMetric::round(), phi: cutoff_phi(length)? };
    let samples = 8000;
    let mut metric_sup = T::zero();
    let mut scalar_sup = T::zero();
    for k in 0..=samples + 2 {
        // two extra samples straddle t = 0 and t = L
        let t = match k {
            k if k <= samples => length * T::from_usize_lossy(k) / T::from_usize_lossy(samples),
            k if k == samples + 1 => -T::one(),
            _ => length + T::one(),
        };
        let [c, p, q] = interp.jet_at(t);
        for v in c {
            metric_sup = metric_sup.max((v - T::one()).abs());
        }
        scalar_sup = scalar_sup.max((product_scalar_at(c, p, q) - T::lit(6.0)).abs());
    }
    Ok(ApproximationStep { j, h, eta, length, k0: fit.k0, metric_sup, scalar_sup })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jump_fit_slope_near_minus_two() {
        let h = MilnorMetric::<f64>::new(1.1, 1.0, 1.0).unwrap();
        let fit = fit_jump_constant(h, &[10.0, 20.0, 40.0, 80.0]).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.2, "slope {}", fit.slope);
        for (l, jump) in &fit.samples {
            assert!(*jump <= fit.k0 * 0.1 / (l * l) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn approximating_sequence_meets_both_sups() {
        for j in [1usize, 2, 5, 10] {
            let step = approximating_neck(j, [1.0, -0.5, 0.25]).unwrap();
            let bound = 1.0 / j as f64;
            assert!(step.metric_sup <= bound, "j = {j}: metric {}", step.metric_sup);
            assert!(step.scalar_sup <= bound, "j = {j}: scalar {}", step.scalar_sup);
        }
    }

    #[test]
    fn round_direction_is_degenerate() {
        assert_eq!(approximating_neck::<f64>(3, [0.0; 3]).unwrap_err(), Error::DialDegenerate);
    }
}
