//! Cutoff ramps `φ : [0, L] → [0, 1]` with `|φ′| ≤ 2/L`, `|φ″| ≤ 4/L²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::GaussLegendre;
use crate::scalar::Scalar;

/// Fraction of `L` by which the smooth variant compresses the parabolic
/// ramp at each end; the derivative bounds grow by `1/(1 − 2m)² < 1.05`.
pub const SMOOTH_MARGIN: f64 = 0.012;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// Piecewise parabola, `C^{1,1}`, bounds met with equality.
    #[default]
    Parabolic,
    /// Compressed parabola mollified by a bump; `C^∞`, bounds within 5%.
    Smooth,
}

#[derive(Debug, Clone)]
pub struct CutoffProfile<T> {
    length: T,
    kind: CutoffKind,
    mollifier: Option<Mollifier>,
}

#[derive(Debug, Clone)]
struct Mollifier {
    rule: GaussLegendre,
}

/// Parabolic ramp of length `l`.
pub fn cutoff_phi<T: Scalar>(l: T) -> Result<CutoffProfile<T>> {
    CutoffProfile::new(l, CutoffKind::Parabolic)
}

impl<T: Scalar> CutoffProfile<T> {
    pub fn new(length: T, kind: CutoffKind) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidArgument(format!("cutoff length {length} must be positive")));
        }
        let mollifier = match kind {
            CutoffKind::Parabolic => None,
            CutoffKind::Smooth => {
                Some(Mollifier { rule: GaussLegendre::new(24) })
            }
        };
        Ok(Self { length, kind, mollifier })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    /// Guaranteed bounds `(sup|φ′|, sup|φ″|)`.
    pub fn derivative_bounds(&self) -> (T, T) {
        let l = self.length;
        let s = match self.kind {
            CutoffKind::Parabolic => T::one(),
            CutoffKind::Smooth => T::one() / (T::one() - T::lit(2.0 * SMOOTH_MARGIN)),
        };
        (T::lit(2.0) * s / l, T::lit(4.0) * s * s / (l * l))
    }

    /// Points where `φ″` is discontinuous (parabolic) or where the
    /// mollified profile changes character (smooth); quadrature breaks.
    pub fn breakpoints(&self) -> Vec<T> {
        let l = self.length;
        match self.kind {
            CutoffKind::Parabolic => vec![T::zero(), l * T::lit(0.5), l],
            CutoffKind::Smooth => {
                let m = T::lit(SMOOTH_MARGIN) * l;
                vec![T::zero(), m + m, l * T::lit(0.5) - m, l * T::lit(0.5), l * T::lit(0.5) + m, l - m - m, l]
            }
        }
    }

    pub fn value(&self, t: T) -> T {
        self.eval(t)[0]
    }

    pub fn d1(&self, t: T) -> T {
        self.eval(t)[1]
    }

    pub fn d2(&self, t: T) -> T {
        self.eval(t)[2]
    }

    /// `[φ, φ′, φ″]` at `t`; `0` below the ramp, `1` above, derivatives zero
    /// outside `(0, L)`.
    pub fn eval(&self, t: T) -> [T; 3] {
        if t <= T::zero() {
            return [T::zero(); 3];
        }
        if t >= self.length {
            return [T::one(), T::zero(), T::zero()];
        }
        match &self.mollifier {
            None => parabola(self.length, t),
            Some(m) => {
                let l = self.length.as_f64();
                let margin = SMOOTH_MARGIN * l;
                let inner = l - 2.0 * margin;
                let tf = t.as_f64();
                // ψ(u) = parabola over [margin, L − margin]; φ = ψ * bump_margin
                let psi = |u: f64| parabola(inner, u - margin);
                let mut breaks = vec![-1.0, 1.0];
                for kink in [margin, 0.5 * l, l - margin] {
                    let s = (tf - kink) / margin;
                    if s > -1.0 && s < 1.0 {
                        breaks.push(s);
                    }
                }
                breaks.sort_by(f64::total_cmp);
                // normalizing with the same nodes makes each output a convex
                // combination of ψ-values, so the bounds hold exactly
                let norm = m.rule.integrate_pieces(&breaks, 2, bump);
                let mut out = [0.0; 3];
                for (c, slot) in out.iter_mut().enumerate() {
                    *slot = m.rule.integrate_pieces(&breaks, 2, |s| {
                        let v = psi(tf - margin * s);
                        bump(s) * v[c]
                    }) / norm;
                }
                out.map(T::lit)
            }
        }
    }
}

fn parabola<T: Scalar>(l: T, t: T) -> [T; 3] {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let l2 = l * l;
    if t <= T::zero() {
        [T::zero(); 3]
    } else if t >= l {
        [T::one(), T::zero(), T::zero()]
    } else if t + t <= l {
        [two * t * t / l2, four * t / l2, four / l2]
    } else {
        let r = l - t;
        [T::one() - two * r * r / l2, four * r / l2, -four / l2]
    }
}

fn bump(s: f64) -> f64 {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabolic_endpoints_midpoint_and_bounds() {
        let phi = cutoff_phi(2.0).unwrap();
        assert_eq!(phi.value(0.0), 0.0);
        assert_eq!(phi.value(2.0), 1.0);
        assert_eq!(phi.value(1.0), 0.5);
        for l in [0.5, 3.0, 40.0] {
            let phi = cutoff_phi(l).unwrap();
            let (b1, b2) = phi.derivative_bounds();
            let mut m1: f64 = 0.0;
            let mut m2: f64 = 0.0;
            for k in 0..=1000 {
                let e = phi.eval(l * k as f64 / 1000.0);
                m1 = m1.max(e[1].abs());
                m2 = m2.max(e[2].abs());
            }
            assert!((m1 - 2.0 / l).abs() < 1e-12 && m1 <= b1 * (1.0 + 1e-15));
            assert!((m2 - 4.0 / (l * l)).abs() < 1e-12 && m2 <= b2 * (1.0 + 1e-15));
        }
    }

    #[test]
    fn rejects_non_positive_length() {
        assert!(cutoff_phi(0.0).is_err());
        assert!(cutoff_phi(-1.0).is_err());
    }

    #[test]
    fn smooth_variant_stays_within_relaxed_bounds() {
        let l = 10.0;
        let phi = CutoffProfile::new(l, CutoffKind::Smooth).unwrap();
        let (b1, b2) = phi.derivative_bounds();
        assert!(b1 <= 1.05 * 2.0 / l && b2 <= 1.05 * 4.0 / (l * l));
        let mut prev = 0.0;
        for k in 0..=2000 {
            let e = phi.eval(l * k as f64 / 2000.0);
            assert!(e[0] >= prev - 1e-14 && (0.0..=1.0).contains(&e[0]));
            assert!(e[1].abs() <= b1 * (1.0 + 1e-9) && e[2].abs() <= b2 * (1.0 + 1e-9), "{k} {e:?} {b1} {b2}");
            prev = e[0];
        }
        assert!((phi.value(5.0) - 0.5).abs() < 1e-12);
        // derivatives agree with difference quotients
        for t in [0.3, 1.7, 4.95, 8.8] {
            let d = 1e-5;
            let fd1 = (phi.value(t + d) - phi.value(t - d)) / (2.0 * d);
            let fd2 = (phi.d1(t + d) - phi.d1(t - d)) / (2.0 * d);
            assert!((fd1 - phi.d1(t)).abs() < 1e-8, "t = {t}");
            assert!((fd2 - phi.d2(t)).abs() < 1e-6, "t = {t}");
        }
        // flat to all orders at the ends
        assert!(phi.value(1e-3) < 1e-20 && 1.0 - phi.value(l - 1e-3) < 1e-15);
    }
}
