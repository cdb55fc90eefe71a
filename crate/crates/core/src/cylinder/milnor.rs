//! Left-invariant diagonal metrics on S³ and closed-form curvature of
//! `g(t) + dt²` in the orthonormal frame `(e₁, e₂, e₃, ∂_t)`.

use serde::{Deserialize, Serialize};

use crate::curvature::algebra::{full_norm_sq, i4, ricci_from_lowered, weyl_lowered};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `¼ (a σ₁² + b σ₂² + c σ₃²)` on S³, with `dσ₁ = σ₂ ∧ σ₃` and cyclic.
/// `(1, 1, 1)` is the unit round metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilnorMetric<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> MilnorMetric<T> {
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        for (i, v) in [a, b, c].into_iter().enumerate() {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient {i} = {v} is not positive")));
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn round() -> Self {
        Self { a: T::one(), b: T::one(), c: T::one() }
    }

    /// Berger-type perturbation `(1 + η, 1, 1)`.
    pub fn berger(eta: T) -> Result<Self> {
        Self::new(T::one() + eta, T::one(), T::one())
    }

    pub fn coefficients(&self) -> [T; 3] {
        [self.a, self.b, self.c]
    }

    pub fn from_coefficients(c: [T; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }

    pub fn is_round(&self) -> bool {
        self.a == self.b && self.b == self.c
    }

    pub fn scalar_curvature(&self) -> T {
        slice_scalar(self.coefficients())
    }

    pub fn volume(&self) -> T {
        slice_volume(self.coefficients())
    }

    /// Coefficient-wise sup distance to the round metric.
    pub fn distance_to_round(&self) -> T {
        self.coefficients().iter().fold(T::zero(), |m, v| m.max((*v - T::one()).abs()))
    }

    /// `h₀ + s (h − h₀)`.
    pub fn toward_round(&self, s: T) -> Result<Self> {
        let c = self.coefficients().map(|v| T::one() + s * (v - T::one()));
        Self::from_coefficients(c)
    }
}

/// Scalar curvature of the left-invariant metric with coefficients `(a, b, c)`.
pub fn slice_scalar<T: Scalar>(k: [T; 3]) -> T {
    let [a, b, c] = k;
    T::lit(2.0) * (T::lit(2.0) * (a * b + b * c + c * a) - a * a - b * b - c * c) / (a * b * c)
}

/// Volume `2π² √(abc)` of the slice.
pub fn slice_volume<T: Scalar>(k: [T; 3]) -> T {
    T::lit(2.0) * T::pi() * T::pi() * (k[0] * k[1] * k[2]).sqrt()
}

/// Curvature of `¼ Σ a_i(t) σ_i² + dt²` at one `t`.
#[derive(Debug, Clone)]
pub struct FrameCurvature<T> {
    /// `R_abcd` in the orthonormal frame, same convention as the chart path.
    pub riemann: Vec<T>,
    pub ricci: Vec<T>,
    pub scalar: T,
    pub weyl: Vec<T>,
    pub weyl_norm_sq: T,
}

/// Closed-form frame curvature from coefficients and their first two
/// `t`-derivatives.
pub fn frame_curvature<T: Scalar>(k: [T; 3], d1: [T; 3], d2: [T; 3]) -> FrameCurvature<T> {
    let n = 4;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let root = (k[0] * k[1] * k[2]).sqrt();
    let log1: [T; 3] = [d1[0] / k[0], d1[1] / k[1], d1[2] / k[2]];
    let sum_log1 = log1[0] + log1[1] + log1[2];
    // [e_i, e_j] = λ_k e_k (cyclic), [e₄, e_i] = −κ_i e_i
    let lam: [T; 3] = [two * k[0] / root, two * k[1] / root, two * k[2] / root];
    let dlam: [T; 3] = [0, 1, 2].map(|i| lam[i] * (log1[i] - half * sum_log1));
    let kap: [T; 3] = [0, 1, 2].map(|i| half * log1[i]);
    let dkap: [T; 3] = [0, 1, 2].map(|i| half * (d2[i] / k[i] - log1[i] * log1[i]));

    let mut c = [T::zero(); 64];
    let mut dc = [T::zero(); 64];
    let idx = |i: usize, j: usize, l: usize| (i * 4 + j) * 4 + l;
    for (i, j, l) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[idx(i, j, l)] = lam[l];
        c[idx(j, i, l)] = -lam[l];
        dc[idx(i, j, l)] = dlam[l];
        dc[idx(j, i, l)] = -dlam[l];
    }
    for i in 0..3 {
        c[idx(3, i, i)] = -kap[i];
        c[idx(i, 3, i)] = kap[i];
        dc[idx(3, i, i)] = -dkap[i];
        dc[idx(i, 3, i)] = dkap[i];
    }
    // Γ_ijk = g(∇_{e_i} e_j, e_k) = ½ (c_ijk − c_jki + c_kij)
    let mut gam = [T::zero(); 64];
    let mut dgam = [T::zero(); 64];
    for i in 0..4 {
        for j in 0..4 {
            for l in 0..4 {
                gam[idx(i, j, l)] = half * (c[idx(i, j, l)] - c[idx(j, l, i)] + c[idx(l, i, j)]);
                dgam[idx(i, j, l)] = half * (dc[idx(i, j, l)] - dc[idx(j, l, i)] + dc[idx(l, i, j)]);
            }
        }
    }
    // g(R(e_i, e_j) e_k, e_l), with e_i(f) = δ_{i3} f′
    let mut rf = vec![T::zero(); 256];
    for i in 0..4 {
        for j in 0..4 {
            for kk in 0..4 {
                for l in 0..4 {
                    let mut r = T::zero();
                    if i == 3 {
                        r += dgam[idx(j, kk, l)];
                    }
                    if j == 3 {
                        r -= dgam[idx(i, kk, l)];
                    }
                    for m in 0..4 {
                        r += gam[idx(j, kk, m)] * gam[idx(i, m, l)] - gam[idx(i, kk, m)] * gam[idx(j, m, l)]
                            - c[idx(i, j, m)] * gam[idx(m, kk, l)];
                    }
                    rf[i4(n, i, j, kk, l)] = r;
                }
            }
        }
    }
    // chart convention R_abcd = g(R(e_c, e_d) e_b, e_a)
    let mut riemann = vec![T::zero(); 256];
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    riemann[i4(n, a, b, cc, d)] = rf[i4(n, cc, d, b, a)];
                }
            }
        }
    }
    let mut eye = vec![T::zero(); 16];
    for i in 0..4 {
        eye[i * 4 + i] = T::one();
    }
    let mut ricci = vec![T::zero(); 16];
    let scalar = ricci_from_lowered(n, &riemann, &eye, &mut ricci);
    let mut weyl = vec![T::zero(); 256];
    weyl_lowered(n, &riemann, &ricci, scalar, &eye, &mut weyl);
    let mut s1 = vec![T::zero(); 256];
    let mut s2 = vec![T::zero(); 256];
    let weyl_norm_sq = full_norm_sq(n, &weyl, &eye, &mut s1, &mut s2).max(T::zero());
    FrameCurvature { riemann, ricci, scalar, weyl, weyl_norm_sq }
}

/// Scalar curvature of `g(t) + dt²` from the slice curvature and frame traces:
/// `R_g − tr(g⁻¹g″) − ¼ (tr g⁻¹g′)² + ¾ tr((g⁻¹g′)²)`.
pub fn product_scalar_at<T: Scalar>(k: [T; 3], d1: [T; 3], d2: [T; 3]) -> T {
    let mut tr1 = T::zero();
    let mut tr2 = T::zero();
    let mut tr11 = T::zero();
    for i in 0..3 {
        let l1 = d1[i] / k[i];
        tr1 += l1;
        tr11 += l1 * l1;
        tr2 += d2[i] / k[i];
    }
    slice_scalar(k) - tr2 - T::lit(0.25) * tr1 * tr1 + T::lit(0.75) * tr11
}

/// Weyl density per unit `t`: `|W|² · Vol(slice)`.
pub fn weyl_density<T: Scalar>(k: [T; 3], d1: [T; 3], d2: [T; 3]) -> T {
    frame_curvature(k, d1, d2).weyl_norm_sq * slice_volume(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_and_berger_scalar_curvature() {
        assert_eq!(MilnorMetric::<f64>::round().scalar_curvature(), 6.0);
        for a in [0.6f64, 1.1, 1.4] {
            let m = MilnorMetric::new(a, 1.0, 1.0).unwrap();
            assert!((m.scalar_curvature() - (8.0 - 2.0 * a)).abs() < 1e-13);
        }
    }

    #[test]
    fn static_frame_curvature_matches_slice_formula() {
        let zero = [0.0f64; 3];
        for k in [[1.0, 1.0, 1.0], [1.2, 1.0, 1.0], [0.8, 1.1, 1.3]] {
            let fc = frame_curvature(k, zero, zero);
            assert!((fc.scalar - slice_scalar(k)).abs() < 1e-12);
        }
        let round = frame_curvature([1.0; 3], zero, zero);
        assert!(round.weyl_norm_sq < 1e-24);
        assert!(frame_curvature([1.2, 1.0, 1.0], zero, zero).weyl_norm_sq > 1e-3);
    }

    #[test]
    fn warped_round_family_matches_warped_product_formula() {
        // a_i = f², ḡ = dt² + f² g_{S³}: R = 6 (1 − f′²)/f² − 6 f″/f
        for t in [-0.7, 0.1, 0.9] {
            let f = 1.0 + 0.3 * f64::sin(t);
            let fp = 0.3 * f64::cos(t);
            let fpp = -0.3 * f64::sin(t);
            let k = [f * f; 3];
            let d1 = [2.0 * f * fp; 3];
            let d2 = [2.0 * fp * fp + 2.0 * f * fpp; 3];
            let want = 6.0 * (1.0 - fp * fp) / (f * f) - 6.0 * fpp / f;
            assert!((frame_curvature(k, d1, d2).scalar - want).abs() < 1e-12);
            assert!((product_scalar_at(k, d1, d2) - want).abs() < 1e-12);
            // warped products over a round sphere are conformally flat
            assert!(frame_curvature(k, d1, d2).weyl_norm_sq < 1e-20);
        }
    }

    #[test]
    fn product_formula_agrees_with_frame_curvature_for_general_families() {
        let k = [1.1f64, 0.9, 1.05];
        let d1 = [0.2, -0.1, 0.05];
        let d2 = [-0.3, 0.4, 0.1];
        let fc = frame_curvature(k, d1, d2);
        assert!((fc.scalar - product_scalar_at(k, d1, d2)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_coefficients() {
        assert!(MilnorMetric::new(1.0, 0.0, 1.0).is_err());
        assert!(MilnorMetric::new(1.0, 1.0, f64::NAN).is_err());
    }
}
