//! Exact values of the form `q·π²` and `±π√r` with rational `q`, `r`.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Ratio::from_integer(n)
}

pub(crate) fn add(a: Q, b: Q) -> Result<Q> {
    a.checked_add(&b).ok_or(Error::Overflow)
}

pub(crate) fn sub(a: Q, b: Q) -> Result<Q> {
    a.checked_sub(&b).ok_or(Error::Overflow)
}

pub(crate) fn mul(a: Q, b: Q) -> Result<Q> {
    a.checked_mul(&b).ok_or(Error::Overflow)
}

fn ratio_f64(r: Q) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `q·π²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PiSq(pub Q);

impl PiSq {
    pub const ZERO: PiSq = PiSq(Ratio::new_raw(0, 1));

    pub fn int(n: i64) -> Self {
        PiSq(qi(n))
    }

    pub fn new(n: i64, d: i64) -> Self {
        PiSq(q(n, d))
    }

    pub fn coefficient(&self) -> Q {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        ratio_f64(self.0) * std::f64::consts::PI * std::f64::consts::PI
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        add(self.0, other.0).map(PiSq)
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        sub(self.0, other.0).map(PiSq)
    }

    pub fn scale(self, c: Q) -> Result<Self> {
        mul(self.0, c).map(PiSq)
    }

    pub fn abs(self) -> Self {
        PiSq(self.0.abs())
    }
}

/// Writes `c·unit` with `c` rational, e.g. `768π²`, `256/3π²`, `-π²`.
fn write_scaled(f: &mut fmt::Formatter<'_>, c: Q, unit: &str) -> fmt::Result {
    if c.is_zero() {
        return write!(f, "0");
    }
    let sign = if c < Q::zero() { "-" } else { "" };
    let (n, d) = (c.numer().abs(), *c.denom());
    match (n, d) {
        (1, 1) => write!(f, "{sign}{unit}"),
        (_, 1) => write!(f, "{sign}{n}{unit}"),
        _ => write!(f, "{sign}{n}/{d}{unit}"),
    }
}

impl fmt::Display for PiSq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_scaled(f, self.0, "π²")
    }
}

impl Serialize for PiSq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `±π√r` with `r ≥ 0` rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PiRoot {
    pub negative: bool,
    pub radicand: Q,
}

impl PiRoot {
    pub const ZERO: PiRoot = PiRoot { negative: false, radicand: Ratio::new_raw(0, 1) };

    pub fn new(negative: bool, radicand: Q) -> Result<Self> {
        if radicand < Q::zero() {
            return Err(Error::InvalidArgument(format!("negative radicand {radicand}")));
        }
        Ok(Self { negative: negative && !radicand.is_zero(), radicand })
    }

    /// `c·π√m`, e.g. `from_parts(8, 6)` is `8π√6`.
    pub fn from_parts(c: i64, m: i64) -> Result<Self> {
        let r = mul(qi(c), qi(c)).and_then(|c2| mul(c2, qi(m)))?;
        Self::new(c < 0, r)
    }

    /// `y²` as a multiple of `π²`.
    pub fn square(&self) -> PiSq {
        PiSq(self.radicand)
    }

    pub fn abs(&self) -> Self {
        Self { negative: false, radicand: self.radicand }
    }

    pub fn is_zero(&self) -> bool {
        self.radicand.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.radicand.is_zero() {
            0
        } else if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn to_f64(&self) -> f64 {
        let v = std::f64::consts::PI * ratio_f64(self.radicand).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    /// `(c, m)` with `|y| = c·π√m`, `c` rational and `m` a squarefree integer.
    pub fn simplified(&self) -> (Q, i64) {
        // √(p/q) = √(pq)/q
        let (p, d) = (*self.radicand.numer(), *self.radicand.denom());
        let mut m = p as i128 * d as i128;
        let mut c: i128 = 1;
        let mut k: i128 = 2;
        while k * k <= m {
            while m % (k * k) == 0 {
                m /= k * k;
                c *= k;
            }
            k += 1;
        }
        (Ratio::new(c as i64, d), m as i64)
    }
}

impl PartialOrd for PiRoot {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PiRoot {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.signum().cmp(&other.signum()) {
            Ordering::Equal if self.signum() < 0 => other.radicand.cmp(&self.radicand),
            Ordering::Equal => self.radicand.cmp(&other.radicand),
            o => o,
        }
    }
}

impl fmt::Display for PiRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let (c, m) = self.simplified();
        let c = if self.negative { -c } else { c };
        if m == 1 {
            write_scaled(f, c, "π")
        } else {
            write_scaled(f, c, &format!("π√{m}"))
        }
    }
}

impl Serialize for PiRoot {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Exact sign of `√a + √b − √c` for rationals `a, b, c ≥ 0`.
pub fn sum_of_roots_cmp(a: Q, b: Q, c: Q) -> Result<Ordering> {
    // √a + √b ≥ √c  ⇔  a + b − c + 2√(ab) ≥ 0
    let d = sub(add(a, b)?, c)?;
    let ab4 = mul(mul(a, b)?, qi(4))?;
    if d >= Q::zero() {
        return Ok(if d.is_zero() && ab4.is_zero() { Ordering::Equal } else { Ordering::Greater });
    }
    // d < 0: compare 4ab with d²
    Ok(ab4.cmp(&mul(d, d)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        assert_eq!(PiSq::int(768).to_string(), "768π²");
        assert_eq!(PiSq::new(256, 3).to_string(), "256/3π²");
        assert_eq!(PiSq::int(-1).to_string(), "-π²");
        assert_eq!(PiRoot::from_parts(8, 6).unwrap().to_string(), "8π√6");
        assert_eq!(PiRoot::from_parts(-16, 1).unwrap().to_string(), "-16π");
        assert_eq!(PiRoot::new(false, q(1, 2)).unwrap().to_string(), "1/2π√2");
        assert_eq!(PiRoot::ZERO.to_string(), "0");
    }

    #[test]
    fn ordering_respects_sign() {
        let a = PiRoot::from_parts(-16, 1).unwrap();
        let b = PiRoot::from_parts(-4, 2).unwrap();
        assert!(a < b && b < PiRoot::ZERO && PiRoot::ZERO < PiRoot::from_parts(1, 1).unwrap());
        assert!((a.to_f64() + 16.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn root_sums() {
        // √32 + √8 = √72
        assert_eq!(sum_of_roots_cmp(qi(32), qi(8), qi(72)).unwrap(), Ordering::Equal);
        assert_eq!(sum_of_roots_cmp(qi(32), qi(9), qi(72)).unwrap(), Ordering::Greater);
        assert_eq!(sum_of_roots_cmp(qi(0), qi(0), qi(72)).unwrap(), Ordering::Less);
        assert_eq!(sum_of_roots_cmp(qi(0), qi(0), qi(0)).unwrap(), Ordering::Equal);
    }
}
