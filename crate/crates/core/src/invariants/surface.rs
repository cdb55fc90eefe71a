//! Euler characteristic and signature bookkeeping, the curves bounding the
//! YW-quadrant, and the closed-form `ω` and `Y` of blown-up complex surfaces.

use std::cmp::Ordering;

use serde::Serialize;

use super::exact::{add, mul, q, qi, sub, sum_of_roots_cmp, PiRoot, PiSq, Q};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kodaira {
    /// Minimal surface of general type.
    GeneralType,
    /// Minimal Kähler surface of Kodaira dimension 0 or 1.
    Kod01,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourManifold {
    pub name: String,
    pub chi: i64,
    pub tau: i64,
    pub kod: Kodaira,
    /// Genus or signature parameters of catalog families.
    pub extras: Vec<i64>,
}

impl FourManifold {
    /// Checks the hypothesis attached to `kod`: `2χ + 3τ > 0` for general
    /// type, `2χ = −3τ` for Kodaira dimension 0 or 1.
    pub fn new(name: impl Into<String>, chi: i64, tau: i64, kod: Kodaira) -> Result<Self> {
        let m = Self { name: name.into(), chi, tau, kod, extras: Vec::new() };
        m.check()?;
        Ok(m)
    }

    pub fn with_extras(mut self, extras: Vec<i64>) -> Self {
        self.extras = extras;
        self
    }

    /// `2χ + 3τ`.
    pub fn c1_squared(&self) -> Result<i64> {
        self.chi
            .checked_mul(2)
            .and_then(|a| self.tau.checked_mul(3).and_then(|b| a.checked_add(b)))
            .ok_or(Error::Overflow)
    }

    fn check(&self) -> Result<()> {
        match self.kod {
            Kodaira::GeneralType if self.c1_squared()? <= 0 => Err(Error::Hypothesis(format!(
                "{}: general type needs 2χ + 3τ > 0, got {}",
                self.name,
                self.c1_squared()?
            ))),
            Kodaira::Kod01 if self.c1_squared()? != 0 => Err(Error::Hypothesis(format!(
                "{}: Kodaira dimension 0 or 1 needs 2χ = −3τ, got χ = {}, τ = {}",
                self.name, self.chi, self.tau
            ))),
            _ => Ok(()),
        }
    }
}

/// `M # k·CP̄² # l·(S¹×S³)`: `χ′ = χ + k − 2l`, `τ′ = τ − k`.
pub fn connected_sum(base: &FourManifold, k: u32, l: u32) -> Result<FourManifold> {
    let (k, l) = (k as i64, l as i64);
    if k == 0 && l == 0 {
        return Ok(base.clone());
    }
    let chi = base.chi.checked_add(k).and_then(|c| c.checked_sub(2 * l)).ok_or(Error::Overflow)?;
    let tau = base.tau.checked_sub(k).ok_or(Error::Overflow)?;
    let mut name = base.name.clone();
    if k > 0 {
        name.push_str(&format!("#{k}CP2bar"));
    }
    if l > 0 {
        name.push_str(&format!("#{l}(S1xS3)"));
    }
    Ok(FourManifold { name, chi, tau, kod: Kodaira::Other, extras: base.extras.clone() })
}

/// `32π²χ − y²/6`.
pub fn einstein_curve(chi: i64, y: PiRoot) -> Result<PiSq> {
    sub(mul(qi(32), qi(chi))?, mul(y.radicand, q(1, 6))?).map(PiSq)
}

/// `y²/3 − 48π²τ`.
pub fn gap_curve(tau: i64, y: PiRoot) -> Result<PiSq> {
    sub(mul(y.radicand, q(1, 3))?, mul(qi(48), qi(tau))?).map(PiSq)
}

/// `48π²|τ|`.
pub fn hirzebruch_floor(tau: i64) -> Result<PiSq> {
    mul(qi(48), qi(tau.checked_abs().ok_or(Error::Overflow)?)).map(PiSq)
}

pub fn einstein_curve_f64(chi: i64, y: f64) -> f64 {
    32.0 * std::f64::consts::PI.powi(2) * chi as f64 - y * y / 6.0
}

pub fn gap_curve_f64(tau: i64, y: f64) -> f64 {
    y * y / 3.0 - 48.0 * std::f64::consts::PI.powi(2) * tau as f64
}

/// `(16/3)π²(4χ′ − 3τ′ + 2k + 8l)`, with `χ′, τ′` those of the connected sum.
pub fn omega_statement_form(chi_sum: i64, tau_sum: i64, k: u32, l: u32) -> Result<PiSq> {
    let inner = [mul(qi(4), qi(chi_sum))?, mul(qi(-3), qi(tau_sum))?, qi(2 * k as i64), qi(8 * l as i64)];
    let s = inner.into_iter().try_fold(Q::from_integer(0), add)?;
    mul(q(16, 3), s).map(PiSq)
}

/// `(16/3)π²(4χ − 3τ + 9k)`, with `χ, τ` those of the base.
pub fn omega_proof_form(chi: i64, tau: i64, k: u32) -> Result<PiSq> {
    let s = add(sub(mul(qi(4), qi(chi))?, mul(qi(3), qi(tau))?)?, qi(9 * k as i64))?;
    mul(q(16, 3), s).map(PiSq)
}

/// `ω` and `Y` of `M # k·CP̄² # l·(S¹×S³)` for minimal `M` of general type:
/// `ω = (16/3)π²(4χ′ − 3τ′ + 2k + 8l)`, `Y = −4√2·π·√(2χ + 3τ)`.
pub fn omega_general_type(m: &FourManifold, k: u32, l: u32) -> Result<(PiSq, PiRoot)> {
    if m.kod != Kodaira::GeneralType {
        return Err(Error::Hypothesis(format!("{} is not a minimal surface of general type", m.name)));
    }
    m.check()?;
    let sum = connected_sum(m, k, l)?;
    let omega = omega_statement_form(sum.chi, sum.tau, k, l)?;
    if omega != omega_proof_form(m.chi, m.tau, k)? {
        return Err(Error::InvariantBreach(format!("ω forms disagree for {}", sum.name)));
    }
    let y = PiRoot::new(true, mul(qi(32), qi(m.c1_squared()?))?)?;
    Ok((omega, y))
}

/// `ω = 48π²(k − τ)` and `Y = 0` for minimal Kähler `M` of Kodaira
/// dimension 0 or 1, cross-checked against `(16/3)π²(4χ − 3τ + 9k)`.
pub fn omega_kod01(m: &FourManifold, k: u32, l: u32) -> Result<(PiSq, PiRoot)> {
    if m.kod != Kodaira::Kod01 {
        return Err(Error::Hypothesis(format!("{} is not of Kodaira dimension 0 or 1", m.name)));
    }
    m.check()?;
    let sum = connected_sum(m, k, l)?;
    let omega = PiSq(mul(qi(48), sub(qi(k as i64), qi(m.tau))?)?);
    if omega != PiSq(mul(qi(-48), qi(sum.tau))?) || omega != omega_proof_form(m.chi, m.tau, k)? {
        return Err(Error::InvariantBreach(format!("ω forms disagree for {}", sum.name)));
    }
    Ok((omega, PiRoot::ZERO))
}

/// `ω` and `Y` of `M # k·CP̄² # l·(S¹×S³)` by the applicable closed form.
pub fn omega(m: &FourManifold, k: u32, l: u32) -> Result<(PiSq, PiRoot)> {
    match m.kod {
        Kodaira::GeneralType => omega_general_type(m, k, l),
        Kodaira::Kod01 => omega_kod01(m, k, l),
        Kodaira::Other => Err(Error::Hypothesis(format!("no closed form for ω of {}", m.name))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeBrunCheck {
    pub satisfied: bool,
    pub equality: bool,
    /// `|Y| + √6·(∫|W⁺|²)^{1/2} − 6√2·π·√(2χ + 3τ)`.
    pub margin: f64,
}

/// `|Y_C| + √6·(∫|W⁺|²)^{1/2} ≥ 6√2·π·√(2χ + 3τ)` for the base `M`,
/// decided exactly.
pub fn lebrun_restriction(m: &FourManifold, _k: u32, _l: u32, y: PiRoot, wplus: PiSq) -> Result<LeBrunCheck> {
    if m.kod != Kodaira::GeneralType {
        return Err(Error::Hypothesis(format!("{} is not a minimal surface of general type", m.name)));
    }
    if wplus.0 < Q::from_integer(0) {
        return Err(Error::InvalidArgument(format!("∫|W⁺|² = {wplus} is negative")));
    }
    // all three terms are π√(·): |Y| = π√r, √6·√(wπ²) = π√(6w), 6√2π√s = π√(72s)
    let s = qi(m.c1_squared()?);
    let a = y.radicand;
    let b = mul(qi(6), wplus.0)?;
    let c = mul(qi(72), s)?;
    let ord = sum_of_roots_cmp(a, b, c)?;
    let f = |r: Q| (*r.numer() as f64 / *r.denom() as f64).sqrt() * std::f64::consts::PI;
    Ok(LeBrunCheck {
        satisfied: ord != Ordering::Less,
        equality: ord == Ordering::Equal,
        margin: f(a) + f(b) - f(c),
    })
}

/// The limit values along Yamabe sequences: `|Y| = 4√2·π·√s`,
/// `∫|W⁺|² = (4/3)π²·s` with `s = 2χ + 3τ`.
pub fn lebrun_limit_values(m: &FourManifold) -> Result<(PiRoot, PiSq)> {
    let s = qi(m.c1_squared()?);
    Ok((PiRoot::new(true, mul(qi(32), s)?)?, PiSq(mul(q(4, 3), s)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> FourManifold {
        FourManifold::new("K3", 24, -16, Kodaira::Kod01).unwrap()
    }

    #[test]
    fn connected_sum_arithmetic() {
        let m = connected_sum(&k3(), 1, 1).unwrap();
        assert_eq!((m.chi, m.tau), (23, -17));
        assert_eq!(connected_sum(&k3(), 0, 0).unwrap(), k3());
    }

    #[test]
    fn statement_and_proof_forms_agree() {
        for chi in -10..30 {
            for tau in -20..20 {
                for k in 0..5u32 {
                    for l in 0..4u32 {
                        let base = FourManifold { name: "M".into(), chi, tau, kod: Kodaira::Other, extras: vec![] };
                        let s = connected_sum(&base, k, l).unwrap();
                        assert_eq!(
                            omega_statement_form(s.chi, s.tau, k, l).unwrap(),
                            omega_proof_form(chi, tau, k).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn curves_at_named_points() {
        let s4 = PiRoot::from_parts(8, 6).unwrap();
        let cp2 = PiRoot::from_parts(12, 2).unwrap();
        assert_eq!(einstein_curve(2, PiRoot::ZERO).unwrap(), PiSq::int(64));
        assert_eq!(einstein_curve(2, s4).unwrap(), PiSq::ZERO);
        assert_eq!(einstein_curve(3, cp2).unwrap(), PiSq::int(48));
        assert_eq!(gap_curve(0, PiRoot::from_parts(8, 2).unwrap()).unwrap(), PiSq::new(128, 3));
        assert_eq!(gap_curve(1, cp2).unwrap(), PiSq::int(48));
        assert_eq!(gap_curve(0, PiRoot::ZERO).unwrap(), PiSq::ZERO);
        assert_eq!(hirzebruch_floor(-16).unwrap(), PiSq::int(768));
        assert_eq!(hirzebruch_floor(1).unwrap(), PiSq::int(48));
        assert!((einstein_curve_f64(3, cp2.to_f64()) - PiSq::int(48).to_f64()).abs() < 1e-9);
        assert!((gap_curve_f64(1, cp2.to_f64()) - PiSq::int(48).to_f64()).abs() < 1e-9);
    }

    #[test]
    fn general_type_values() {
        let m = FourManifold::new("SigmaxSigma(2,2)", 4, 0, Kodaira::GeneralType).unwrap();
        let (w, y) = omega_general_type(&m, 0, 0).unwrap();
        assert_eq!(w, PiSq::new(256, 3));
        assert_eq!(y, PiRoot::from_parts(-16, 1).unwrap());
        // each blow-up adds 48π²
        let (w1, _) = omega_general_type(&m, 1, 0).unwrap();
        assert_eq!(w1.checked_sub(w).unwrap(), PiSq::int(48));
        // the gap to the Einstein curve at Y is (16/3)π²(3k + 12l)
        for (k, l) in [(1u32, 0u32), (0, 1), (2, 3)] {
            let (w, y) = omega_general_type(&m, k, l).unwrap();
            let sum = connected_sum(&m, k, l).unwrap();
            let gap = w.checked_sub(einstein_curve(sum.chi, y).unwrap()).unwrap();
            assert_eq!(gap, PiSq(q(16, 3) * qi(3 * k as i64 + 12 * l as i64)));
        }
        assert!(matches!(FourManifold::new("bad", 1, -1, Kodaira::GeneralType), Err(Error::Hypothesis(_))));
        assert!(matches!(omega_general_type(&k3(), 0, 0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn kod01_values() {
        assert_eq!(omega_kod01(&k3(), 0, 0).unwrap(), (PiSq::int(768), PiRoot::ZERO));
        assert_eq!(omega_kod01(&k3(), 2, 0).unwrap().0, PiSq::int(864));
        assert_eq!(omega_proof_form(24, -16, 2).unwrap(), PiSq(q(16, 3) * qi(162)));
        let t = FourManifold::new("T2xSigma(2)", 0, 0, Kodaira::Kod01).unwrap();
        assert_eq!(omega_kod01(&t, 0, 0).unwrap(), (PiSq::ZERO, PiRoot::ZERO));
        assert!(matches!(FourManifold::new("bad", 2, 0, Kodaira::Kod01), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn lebrun_equality_at_limits() {
        let m = FourManifold::new("CH2_quotient(1)", 3, 1, Kodaira::GeneralType).unwrap();
        let (y, wp) = lebrun_limit_values(&m).unwrap();
        let c = lebrun_restriction(&m, 0, 0, y, wp).unwrap();
        assert!(c.satisfied && c.equality && c.margin.abs() < 1e-9);
        let c = lebrun_restriction(&m, 0, 0, PiRoot::ZERO, PiSq::ZERO).unwrap();
        assert!(!c.satisfied && c.margin < 0.0);
        let c = lebrun_restriction(&m, 0, 0, y, wp.scale(qi(2)).unwrap()).unwrap();
        assert!(c.satisfied && !c.equality && c.margin > 0.0);
    }
}
