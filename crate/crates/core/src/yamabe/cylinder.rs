//! Yamabe quotient of `t`-dependent trial functions on a cylinder profile:
//! `Q(f) = ∫ (6 f′² + R(t) f²) V(t) dt / (∫ f⁴ V(t) dt)^{1/2}` with
//! `V(t)` the slice volume. Functions vanish at both window ends.

use super::chart::{best_of, Ansatz, MinimizeOptions, YamabeEstimate};
use super::optimize::QuotientProblem;
use crate::cylinder::{product_scalar_curvature, slice_volume, FrameFamily, NeckProfile};
use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::scalar::Scalar;

/// Unknowns are the interior samples `1..count−1`.
#[derive(Debug, Clone)]
pub struct CylinderProblem {
    dt: f64,
    /// `R_ḡ` at interior samples.
    scalar: Vec<f64>,
    /// Slice volume at interior samples.
    volume: Vec<f64>,
    /// Slice volume at the midpoints of the `count − 1` edges.
    edge_volume: Vec<f64>,
    t: Vec<f64>,
}

impl CylinderProblem {
    pub fn new<T: Scalar>(family: &FrameFamily<T>) -> Result<Self> {
        let count = family.len();
        if count < 5 {
            return Err(Error::GridTooSmall(format!("cylinder profile has {count} samples, need 5")));
        }
        let r = product_scalar_curvature(family);
        let v: Vec<f64> = (0..count).map(|k| slice_volume(family.coefficients(k)).as_f64()).collect();
        let edge_volume = (0..count - 1).map(|k| 0.5 * (v[k] + v[k + 1])).collect();
        Ok(Self {
            dt: family.grid().step.as_f64(),
            scalar: r[1..count - 1].iter().map(|x| x.as_f64()).collect(),
            volume: v[1..count - 1].to_vec(),
            edge_volume,
            t: (1..count - 1).map(|k| family.t(k).as_f64()).collect(),
        })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn quotient_of(&self, f: &[f64]) -> Result<f64> {
        let (e, d) = self.evaluate(f, None);
        if !(d > 0.0) {
            return Err(Error::ZeroTrialFunction);
        }
        Ok(e / d.sqrt())
    }

    fn at(f: &[f64], k: isize) -> f64 {
        if k < 0 || k as usize >= f.len() {
            0.0
        } else {
            f[k as usize]
        }
    }
}

impl QuotientProblem for CylinderProblem {
    fn len(&self) -> usize {
        self.scalar.len()
    }

    fn evaluate(&self, f: &[f64], grads: Option<(&mut [f64], &mut [f64])>) -> (f64, f64) {
        let m = f.len();
        let dt = self.dt;
        let mut e = 0.0;
        let mut d = 0.0;
        // edge j joins unknowns j−1 and j (unknown −1 and m are the zero ends)
        for j in 0..=m {
            let diff = Self::at(f, j as isize) - Self::at(f, j as isize - 1);
            e += 6.0 * diff * diff / dt * self.edge_volume[j];
        }
        for k in 0..m {
            e += self.scalar[k] * f[k] * f[k] * self.volume[k] * dt;
            d += f[k].powi(4) * self.volume[k] * dt;
        }
        if let Some((ge, gd)) = grads {
            for k in 0..m {
                let left = f[k] - Self::at(f, k as isize - 1);
                let right = Self::at(f, k as isize + 1) - f[k];
                ge[k] = 12.0 / dt * (left * self.edge_volume[k] - right * self.edge_volume[k + 1])
                    + 2.0 * self.scalar[k] * f[k] * self.volume[k] * dt;
                gd[k] = 4.0 * f[k].powi(3) * self.volume[k] * dt;
            }
        }
        (e, d)
    }

    /// Inverse of the weighted `H¹` operator `−(6V f′)′ + V f`.
    fn precondition(&self, g: &[f64], out: &mut [f64]) {
        let m = g.len();
        let dt = self.dt;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        for k in 0..m {
            let a = 12.0 / dt * self.edge_volume[k];
            let b = 12.0 / dt * self.edge_volume[k + 1];
            diag[k] = a + b + 2.0 * self.volume[k] * dt;
            if k > 0 {
                lower[k] = -a;
            }
            if k + 1 < m {
                upper[k] = -b;
            }
        }
        out.copy_from_slice(g);
        solve_tridiagonal(&lower, &diag, &upper, out);
    }
}

/// Minimizes the `t`-only quotient over the profile's window; an upper
/// bound for the Yamabe constant of the cylinder class.
pub fn minimize_cylinder<T: Scalar>(family: &FrameFamily<T>, options: MinimizeOptions) -> Result<YamabeEstimate> {
    let p = CylinderProblem::new(family)?;
    let t = p.t().to_vec();
    let width = t.last().copied().unwrap_or(1.0) - t.first().copied().unwrap_or(0.0);
    let centre = 0.5 * (t.last().copied().unwrap_or(0.0) + t.first().copied().unwrap_or(0.0));
    let edge = 0.5 * width + p.dt;
    let window = |x: f64| (std::f64::consts::FRAC_PI_2 * (x - centre) / edge).cos();
    let starts = vec![
        ("sech".to_string(), t.iter().map(|x| window(*x) / (x - centre).cosh()).collect()),
        ("gaussian".to_string(), t.iter().map(|x| window(*x) * (-(x - centre).powi(2) / 2.0).exp()).collect()),
        ("window".to_string(), t.iter().map(|x| window(*x)).collect()),
    ];
    best_of(&p, starts, options.descent, Ansatz::Symmetric)
}

/// [`minimize_cylinder`] over the neck's sampled window.
pub fn minimize_neck<T: Scalar>(neck: &NeckProfile<T>, options: MinimizeOptions) -> Result<YamabeEstimate> {
    minimize_cylinder(neck.family(), options)
}
