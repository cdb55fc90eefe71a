//! Yamabe energy and quotient of nodal trial functions on a chart.
//!
//! `E(f) = ∫ (6 |df|² + R f²) dσ` in four dimensions, `α_n = 4(n−1)/(n−2)`
//! in general. `|df|²_g` is the average of the quadratic forms built from
//! forward and from backward differences, so `E` is an exact quadratic form
//! in the nodal values with a cheap adjoint gradient. Integrals run over the
//! curvature interior with trapezoid weights.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::optimize::{descend, DescentOptions, QuotientProblem};
use super::trial::{Support, TrialFunction};
use crate::curvature::{map_curvature, Quadrature, STENCIL_MARGIN};
use crate::error::{Error, Result};
use crate::grid::Region;
use crate::metric::ChartMetric;
use crate::scalar::Scalar;

/// `α_n = 4(n−1)/(n−2)`.
pub fn alpha(n: usize) -> f64 {
    4.0 * (n as f64 - 1.0) / (n as f64 - 2.0)
}

/// Precomputed metric data for repeated quotient evaluations.
#[derive(Debug, Clone)]
pub struct YamabeProblem<T> {
    metric_grid: crate::grid::ChartGrid<T>,
    region: Region,
    nodes: Vec<usize>,
    n: usize,
    alpha: f64,
    /// Quadrature weight times `√det g`.
    mass: Vec<f64>,
    scalar: Vec<f64>,
    ginv: Vec<f64>,
    /// `(upper, lower)` region indices of the forward and backward
    /// difference on every axis: `[node][side][axis]`.
    pairs: Vec<[u32; 2]>,
    inv_h: Vec<f64>,
    fixed: Option<Vec<bool>>,
}

/// Pieces of the quotient for one trial function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyParts {
    /// `∫ |df|² dσ`.
    pub dirichlet: f64,
    /// `∫ R f² dσ`.
    pub potential: f64,
    /// `∫ f² dσ`.
    pub l2: f64,
    /// `∫ |f|^{2n/(n−2)} dσ`.
    pub critical: f64,
    pub volume: f64,
}

impl<T: Scalar> YamabeProblem<T> {
    pub fn new(metric: &ChartMetric<T>) -> Result<Self> {
        let n = metric.dim();
        if n < 3 {
            return Err(Error::Dimension { expected: 3, got: n });
        }
        let grid = metric.grid().clone();
        let region = grid.interior(STENCIL_MARGIN)?;
        let quad = Quadrature::trapezoid(&grid, region.clone());
        let data = map_curvature(metric, &region, |pc, _| {
            (pc.scalar.as_f64(), pc.sqrt_det.as_f64(), pc.ginv.iter().map(|v| v.as_f64()).collect::<Vec<_>>())
        });
        let nodes = region.grid_nodes(&grid);
        let mut mass = Vec::with_capacity(region.len());
        let mut scalar = Vec::with_capacity(region.len());
        let mut ginv = Vec::with_capacity(region.len() * n * n);
        for ((r, sd, gi), w) in data.into_iter().zip(quad.weights()) {
            mass.push(w.as_f64() * sd);
            scalar.push(r);
            ginv.extend(gi);
        }
        let mut pairs = Vec::with_capacity(region.len() * 2 * n);
        let mut m = vec![0usize; n];
        let position = |node: Option<usize>, m: &mut Vec<usize>| -> Option<u32> {
            let node = node?;
            grid.multi_into(node, m);
            region.position(m).map(|k| k as u32)
        };
        for (k, &node) in nodes.iter().enumerate() {
            let here = k as u32;
            for side in 0..2 {
                for axis in 0..n {
                    let fwd = position(grid.shift(node, axis, 1), &mut m);
                    let bwd = position(grid.shift(node, axis, -1), &mut m);
                    let pair = match (side, fwd, bwd) {
                        (0, Some(up), _) => [up, here],
                        (0, None, Some(down)) => [here, down],
                        (1, _, Some(down)) => [here, down],
                        (1, Some(up), None) => [up, here],
                        _ => return Err(Error::GridTooSmall("difference stencil has no neighbour".into())),
                    };
                    pairs.push(pair);
                }
            }
        }
        let inv_h = grid.spacing().iter().map(|h| 1.0 / h.as_f64()).collect();
        Ok(Self { metric_grid: grid, region, nodes, n, alpha: alpha(n), mass, scalar, ginv, pairs, inv_h, fixed: None })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// Region values of a trial function on the same grid.
    pub fn restrict(&self, f: &TrialFunction<T>) -> Result<Vec<f64>> {
        if !f.grid().same_as(&self.metric_grid) {
            return Err(Error::GridMismatch("trial function and metric live on different grids".into()));
        }
        let v: Vec<f64> = self.nodes.iter().map(|&k| f.values()[k].as_f64()).collect();
        if v.iter().all(|x| *x == 0.0) {
            return Err(Error::ZeroTrialFunction);
        }
        Ok(v)
    }

    /// Trial function with the given region values and zeros elsewhere.
    pub fn extend(&self, values: &[f64]) -> Result<TrialFunction<T>> {
        let mut full = vec![T::zero(); self.metric_grid.len()];
        for (&node, v) in self.nodes.iter().zip(values) {
            full[node] = T::lit(*v);
        }
        TrialFunction::from_values(self.metric_grid.clone(), full)
    }

    fn critical_power(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 - 2.0)
    }

    pub fn parts_of(&self, f: &[f64]) -> EnergyParts {
        let n = self.n;
        let p = self.critical_power();
        let mut out = EnergyParts { dirichlet: 0.0, potential: 0.0, l2: 0.0, critical: 0.0, volume: 0.0 };
        let mut d = vec![0.0; n];
        for k in 0..f.len() {
            let m = self.mass[k];
            out.dirichlet += m * self.gradient_sq(k, f, &mut d);
            out.potential += m * self.scalar[k] * f[k] * f[k];
            out.l2 += m * f[k] * f[k];
            out.critical += m * f[k].abs().powf(p);
            out.volume += m;
        }
        out
    }

    fn gradient_sq(&self, k: usize, f: &[f64], d: &mut [f64]) -> f64 {
        let n = self.n;
        let gi = &self.ginv[k * n * n..(k + 1) * n * n];
        let mut total = 0.0;
        for side in 0..2 {
            for axis in 0..n {
                let [up, down] = self.pairs[(k * 2 + side) * n + axis];
                d[axis] = (f[up as usize] - f[down as usize]) * self.inv_h[axis];
            }
            for i in 0..n {
                for j in 0..n {
                    total += gi[i * n + j] * d[i] * d[j];
                }
            }
        }
        0.5 * total
    }

    pub fn energy_of(&self, f: &[f64]) -> f64 {
        let p = self.parts_of(f);
        self.alpha * p.dirichlet + p.potential
    }

    pub fn quotient_of(&self, f: &[f64]) -> Result<f64> {
        let p = self.parts_of(f);
        if !(p.critical > 0.0) {
            return Err(Error::ZeroTrialFunction);
        }
        Ok((self.alpha * p.dirichlet + p.potential) / p.critical.powf((self.n as f64 - 2.0) / self.n as f64))
    }

    /// Mean scalar curvature over the region, weighted by volume.
    pub fn mean_scalar(&self) -> f64 {
        let v: f64 = self.mass.iter().sum();
        self.mass.iter().zip(&self.scalar).map(|(m, r)| m * r).sum::<f64>() / v
    }
}

impl<T: Scalar> QuotientProblem for YamabeProblem<T> {
    fn len(&self) -> usize {
        self.mass.len()
    }

    fn evaluate(&self, f: &[f64], grads: Option<(&mut [f64], &mut [f64])>) -> (f64, f64) {
        assert_eq!(self.n, 4, "the descent uses the four-dimensional quotient");
        let n = self.n;
        let parts = self.parts_of(f);
        let e = self.alpha * parts.dirichlet + parts.potential;
        if let Some((ge, gd)) = grads {
            ge.iter_mut().for_each(|v| *v = 0.0);
            let mut d = vec![0.0; n];
            for k in 0..f.len() {
                let m = self.mass[k];
                let gi = &self.ginv[k * n * n..(k + 1) * n * n];
                for side in 0..2 {
                    for axis in 0..n {
                        let [up, down] = self.pairs[(k * 2 + side) * n + axis];
                        d[axis] = (f[up as usize] - f[down as usize]) * self.inv_h[axis];
                    }
                    for i in 0..n {
                        let c: f64 = (0..n).map(|j| gi[i * n + j] * d[j]).sum();
                        // ∂/∂f of α·m·½·Σ dᵢ gⁱʲ dⱼ
                        let w = self.alpha * m * c * self.inv_h[i];
                        let [up, down] = self.pairs[(k * 2 + side) * n + i];
                        ge[up as usize] += w;
                        ge[down as usize] -= w;
                    }
                }
                ge[k] += 2.0 * m * self.scalar[k] * f[k];
                gd[k] = 4.0 * m * f[k].powi(3);
            }
        }
        (e, parts.critical)
    }

    fn precondition(&self, g: &[f64], out: &mut [f64]) {
        for k in 0..g.len() {
            out[k] = g[k] / self.mass[k];
        }
    }

    fn fixed(&self) -> Option<&[bool]> {
        self.fixed.as_deref()
    }
}

/// `E_g(f)`.
pub fn energy<T: Scalar>(f: &TrialFunction<T>, metric: &ChartMetric<T>) -> Result<T> {
    let p = YamabeProblem::new(metric)?;
    let v = p.restrict(f)?;
    Ok(T::lit(p.energy_of(&v)))
}

/// `Q_g(f) = E_g(f) / (∫ |f|^{2n/(n−2)})^{(n−2)/n}`.
pub fn quotient<T: Scalar>(f: &TrialFunction<T>, metric: &ChartMetric<T>) -> Result<T> {
    let p = YamabeProblem::new(metric)?;
    let v = p.restrict(f)?;
    Ok(T::lit(p.quotient_of(&v)?))
}

/// `(6/Y) ∫|df|² + Vol^{−1/2} ∫f² − (∫f⁴)^{1/2}` for `n = 4`, in general
/// `(1/(c_n Y)) ‖df‖² + Vol^{−2/n} ‖f‖² − ‖f‖²_{2n/(n−2)}` with
/// `c_n = (n−2)/(4(n−1))`. `Vol` is the chart volume of the region.
pub fn sobolev_residual<T: Scalar>(f: &TrialFunction<T>, metric: &ChartMetric<T>, y: T) -> Result<T> {
    if !(y > T::zero()) {
        return Err(Error::Hypothesis(format!("Sobolev form needs a positive Yamabe value, got {y}")));
    }
    let p = YamabeProblem::new(metric)?;
    let v = p.restrict(f)?;
    let parts = p.parts_of(&v);
    let n = metric.dim() as f64;
    let rhs = p.alpha * parts.dirichlet / y.as_f64() + parts.volume.powf(-2.0 / n) * parts.l2;
    let lhs = parts.critical.powf((n - 2.0) / n);
    Ok(T::lit(rhs - lhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Ansatz {
    /// All interior nodes free.
    #[default]
    Free,
    /// `f = f(t)` on a cylinder profile.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub descent: DescentOptions,
    /// Seeds the jitter of the bump starts.
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self { descent: DescentOptions::default(), seed: 7 }
    }
}

/// Best quotient found over several starts; an upper bound for `Y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YamabeEstimate {
    pub y_upper: f64,
    pub iterations: usize,
    pub converged: bool,
    pub ansatz: Ansatz,
    /// Start that produced the best value.
    pub start: String,
    /// Final value of every start.
    pub per_start: Vec<(String, f64)>,
    pub history: Vec<f64>,
    /// Minimizer in problem order (region order for charts, `t`-order for
    /// cylinder profiles).
    #[serde(skip)]
    pub argmin: Vec<f64>,
}

pub(crate) fn best_of<P: QuotientProblem>(
    p: &P,
    starts: Vec<(String, Vec<f64>)>,
    options: DescentOptions,
    ansatz: Ansatz,
) -> Result<YamabeEstimate> {
    let mut best: Option<YamabeEstimate> = None;
    let mut per_start = Vec::new();
    for (name, f0) in starts {
        let Some(r) = descend(p, &f0, options) else {
            continue;
        };
        per_start.push((name.clone(), r.q));
        if best.as_ref().map_or(true, |b| r.q < b.y_upper) {
            best = Some(YamabeEstimate {
                y_upper: r.q,
                iterations: r.iterations,
                converged: r.converged,
                ansatz,
                start: name,
                per_start: vec![],
                history: r.history,
                argmin: r.f,
            });
        }
    }
    let mut best = best.ok_or(Error::ZeroTrialFunction)?;
    best.per_start = per_start;
    Ok(best)
}

/// Minimizes `Q_g` over trial functions on the chart interior from a
/// constant, a Gaussian and a product-of-bumps start.
pub fn minimize_quotient<T: Scalar>(metric: &ChartMetric<T>, options: MinimizeOptions) -> Result<YamabeEstimate> {
    minimize_quotient_supported(metric, Support::Full, options)
}

/// As [`minimize_quotient`], optionally restricted to a compact box whose
/// faces stay at zero.
pub fn minimize_quotient_supported<T: Scalar>(
    metric: &ChartMetric<T>,
    support: Support,
    options: MinimizeOptions,
) -> Result<YamabeEstimate> {
    let mut p = YamabeProblem::new(metric)?;
    if metric.dim() != 4 {
        return Err(Error::Dimension { expected: 4, got: metric.dim() });
    }
    let grid = metric.grid();
    let n = grid.dim();
    let coords: Vec<Vec<f64>> = p
        .nodes
        .iter()
        .map(|&k| grid.coord(&grid.multi(k)).into_iter().map(|v| v.as_f64()).collect())
        .collect();
    let lo: Vec<f64> = (0..n).map(|d| coords.iter().map(|c| c[d]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..n).map(|d| coords.iter().map(|c| c[d]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut taper = vec![1.0; coords.len()];
    if let Support::Compact(bx) = &support {
        let mut m = vec![0usize; n];
        let mut fixed = vec![false; coords.len()];
        for (k, &node) in p.nodes.iter().enumerate() {
            grid.multi_into(node, &mut m);
            if !bx.contains(&m) {
                fixed[k] = true;
                taper[k] = 0.0;
                continue;
            }
            let depth = (0..n).map(|d| (m[d] - bx.lo[d]).min(bx.hi[d] - m[d])).min().unwrap_or(0);
            taper[k] = super::trial::TAPER[depth.min(3)];
            fixed[k] = depth == 0;
        }
        p.fixed = Some(fixed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let centre: Vec<f64> = (0..n).map(|d| 0.5 * (lo[d] + hi[d])).collect();
    let half: Vec<f64> = (0..n).map(|d| 0.5 * (hi[d] - lo[d]).max(1e-12)).collect();
    let jitter: Vec<f64> = (0..n).map(|d| centre[d] + 0.2 * half[d] * rng.gen_range(-1.0..1.0)).collect();
    let constant: Vec<f64> = taper.clone();
    let gaussian: Vec<f64> = coords
        .iter()
        .zip(&taper)
        .map(|(c, t)| {
            let r2: f64 = (0..n).map(|d| ((c[d] - centre[d]) / half[d]).powi(2)).sum();
            t * (-2.0 * r2).exp()
        })
        .collect();
    let bumps: Vec<f64> = coords
        .iter()
        .zip(&taper)
        .map(|(c, t)| {
            t * (0..n)
                .map(|d| {
                    let s = ((c[d] - jitter[d]) / (2.0 * half[d])).clamp(-0.5, 0.5);
                    (std::f64::consts::PI * s).cos().powi(2) + 0.05
                })
                .product::<f64>()
        })
        .collect();
    best_of(
        &p,
        vec![("constant".into(), constant), ("gaussian".into(), gaussian), ("bumps".into(), bumps)],
        options.descent,
        Ansatz::Free,
    )
}
