//! Weyl functional `∫ |W|^{n/2} dσ` on charts and necks, and the dial that
//! picks the plateau length for a target Weyl mass.

use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_scalars, Quadrature};
use crate::cylinder::{
    euler_chart_grid, family_to_chart, neck_metric_with, weyl_density, CoefficientCurve, CutoffKind, MilnorMetric,
    NeckOptions, NeckProfile,
};
use crate::error::{Error, Result};
use crate::metric::ChartMetric;
use crate::quad::GaussLegendre;
use crate::scalar::Scalar;

/// Halvings of `h − h₀` tried before the dial reports infeasibility.
pub const MAX_SHRINK: usize = 20;

/// `∫ |W|^{n/2} dσ` over the curvature interior of a chart.
pub fn weyl_constant<T: Scalar>(metric: &ChartMetric<T>) -> Result<T> {
    let cs = curvature_scalars(metric)?;
    let quad = Quadrature::curvature_interior(metric.grid())?;
    let p = T::from_usize_lossy(metric.dim()) * T::lit(0.25);
    Ok(quad.sum(cs.weyl_norm_sq.iter().zip(&cs.volume_density).map(|(w, v)| w.max(T::zero()).powf(p) * *v)))
}

/// `w_h = |W|²_{h + dt²} · Vol(h)`, the Weyl mass per unit length of the
/// product cylinder.
pub fn slice_weyl_rate<T: Scalar>(h: MilnorMetric<T>) -> T {
    let z = [T::zero(); 3];
    weyl_density(h.coefficients(), z, z)
}

/// `w_h` from the chart path: `|W|²` averaged over an Euler-angle patch of
/// `h + dt²`, times the slice volume.
pub fn slice_weyl_rate_chart<T: Scalar>(h: MilnorMetric<T>, n: usize, spacing: T) -> Result<T> {
    let metric = family_to_chart(&h, euler_chart_grid(n, spacing, T::zero())?)?;
    let cs = curvature_scalars(&metric)?;
    let mean = cs.weyl_norm_sq.iter().copied().sum::<T>() / T::from_usize_lossy(cs.weyl_norm_sq.len());
    Ok(mean * h.volume())
}

/// Gauss–Legendre settings for integrals along `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandQuadrature {
    pub nodes: usize,
    /// Equal sub-panels per smooth piece.
    pub panels: usize,
}

impl Default for BandQuadrature {
    fn default() -> Self {
        Self { nodes: 12, panels: 4 }
    }
}

/// Weyl mass of a neck split into plateau and transition parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylBudget<T> {
    /// `f(L̄) = 2 L̄ w_h`.
    pub plateau_mass: T,
    /// Both transition bands.
    pub transition_mass: T,
    pub total: T,
    pub per_unit_length: T,
    /// `h` is round, so the plateau carries no Weyl mass.
    pub degenerate: bool,
}

fn integrate_weyl<T: Scalar, C: CoefficientCurve<T> + ?Sized>(
    curve: &C,
    breaks: &[T],
    quad: BandQuadrature,
) -> T {
    let rule = GaussLegendre::new(quad.nodes);
    let b: Vec<f64> = breaks.iter().map(|v| v.as_f64()).collect();
    T::lit(rule.integrate_pieces(&b, quad.panels, |t| {
        let [c, p, q] = curve.jet_at(T::lit(t));
        weyl_density(c, p, q).as_f64()
    }))
}

/// Plateau mass in closed form plus band quadrature over both transitions.
pub fn neck_weyl_mass<T: Scalar>(neck: &NeckProfile<T>, quad: BandQuadrature) -> WeylBudget<T> {
    let w = slice_weyl_rate(neck.h());
    let plateau = T::lit(2.0) * neck.plateau_half_length() * w;
    let breaks: Vec<T> =
        neck.cutoff().breakpoints().into_iter().map(|s| s + neck.plateau_half_length()).collect();
    // the neck is even in t
    let transition = T::lit(2.0) * integrate_weyl(neck, &breaks, quad);
    WeylBudget {
        plateau_mass: plateau,
        transition_mass: transition,
        total: plateau + transition,
        per_unit_length: w,
        degenerate: w == T::zero(),
    }
}

/// Independent check: quadrature of the Weyl density over the whole sampled
/// window, split at every kink, plateau included.
pub fn full_weyl_mass<T: Scalar>(neck: &NeckProfile<T>, quad: BandQuadrature) -> T {
    T::lit(2.0) * integrate_weyl(neck, &neck.breakpoints(), quad)
}

/// Options for [`dial_solve_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DialOptions<T> {
    pub cutoff: CutoffKind,
    /// Round collar kept beyond the transition; defaults to `L/2`.
    pub margin: Option<T>,
    pub quadrature: BandQuadrature,
}

impl<T> Default for DialOptions<T> {
    fn default() -> Self {
        Self { cutoff: CutoffKind::Parabolic, margin: None, quadrature: BandQuadrature::default() }
    }
}

/// A neck whose total Weyl mass lands in `[κ, κ + ε]`.
#[derive(Debug, Clone)]
pub struct DialSolution<T> {
    pub neck: NeckProfile<T>,
    /// Plateau metric actually used, after shrinking toward round.
    pub h: MilnorMetric<T>,
    pub halvings: usize,
    pub l_bar: T,
    pub budget: WeylBudget<T>,
    /// [`full_weyl_mass`] of the returned neck.
    pub verified_total: T,
    pub kappa: T,
    pub eps: T,
}

/// Chooses `L̄` so the neck through `h` with transition length `l` has
/// Weyl mass in `[κ, κ + ε]`.
pub fn dial_solve<T: Scalar>(h: MilnorMetric<T>, l: T, kappa: T, eps: T) -> Result<DialSolution<T>> {
    dial_solve_with(h, l, kappa, eps, DialOptions::default())
}

pub fn dial_solve_with<T: Scalar>(
    h: MilnorMetric<T>,
    l: T,
    kappa: T,
    eps: T,
    options: DialOptions<T>,
) -> Result<DialSolution<T>> {
    if !(kappa > T::zero()) || !(eps > T::zero()) {
        return Err(Error::InvalidArgument(format!("kappa = {kappa} and eps = {eps} must be positive")));
    }
    if slice_weyl_rate(h) == T::zero() {
        return Err(Error::DialDegenerate);
    }
    let margin = options.margin.unwrap_or(l * T::lit(0.5));
    let neck_options = NeckOptions { cutoff: options.cutoff, step: None };
    let half_eps = eps * T::lit(0.5);
    let mut current = h;
    let mut halvings = 0;
    // the transition mass does not depend on L̄, so probe with L̄ = 1
    loop {
        let probe = neck_metric_with(current, l, T::one(), margin, neck_options)?;
        let budget = neck_weyl_mass(&probe, options.quadrature);
        if budget.transition_mass <= half_eps {
            break;
        }
        if halvings == MAX_SHRINK {
            return Err(Error::Infeasible(format!(
                "transition mass {} still exceeds eps/2 = {half_eps} after {MAX_SHRINK} halvings",
                budget.transition_mass
            )));
        }
        current = current.toward_round(T::lit(0.5))?;
        halvings += 1;
    }
    let w = slice_weyl_rate(current);
    if w == T::zero() {
        return Err(Error::DialDegenerate);
    }
    let probe = neck_metric_with(current, l, T::one(), margin, neck_options)?;
    let transition = neck_weyl_mass(&probe, options.quadrature).transition_mass;
    let l_bar = (kappa - transition + half_eps) / (T::lit(2.0) * w);
    let neck = neck_metric_with(current, l, l_bar, margin, neck_options)?;
    let budget = neck_weyl_mass(&neck, options.quadrature);
    let verified_total = full_weyl_mass(&neck, options.quadrature);
    if !(verified_total >= kappa && verified_total <= kappa + eps) {
        return Err(Error::Infeasible(format!(
            "quadrature total {verified_total} falls outside [{kappa}, {}]",
            kappa + eps
        )));
    }
    Ok(DialSolution { neck, h: current, halvings, l_bar, budget, verified_total, kappa, eps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::neck_metric;
    use crate::grid::ChartGrid;
    use crate::metric::generators;

    fn berger(a: f64) -> MilnorMetric<f64> {
        MilnorMetric::new(a, 1.0, 1.0).unwrap()
    }

    #[test]
    fn round_slice_has_no_weyl_rate() {
        assert_eq!(slice_weyl_rate(MilnorMetric::<f64>::round()), 0.0);
        let neck = neck_metric(MilnorMetric::<f64>::round(), 5.0, 3.0, 1.0).unwrap();
        let b = neck_weyl_mass(&neck, BandQuadrature::default());
        assert!(b.degenerate && b.plateau_mass == 0.0 && b.transition_mass.abs() < 1e-20);
    }

    #[test]
    fn closed_form_rate_matches_chart() {
        let h = MilnorMetric::<f64>::new(1.2, 0.95, 1.0).unwrap();
        let closed = slice_weyl_rate(h);
        let chart = slice_weyl_rate_chart(h, 9, 0.05).unwrap();
        assert!((closed - chart).abs() < 1e-5 * closed, "{closed} vs {chart}");
    }

    #[test]
    fn plateau_is_linear_and_budget_adds_up() {
        let n1 = neck_metric(berger(1.2), 10.0, 3.0, 5.0).unwrap();
        let n2 = n1.with_plateau(6.0).unwrap();
        let q = BandQuadrature::default();
        let (b1, b2) = (neck_weyl_mass(&n1, q), neck_weyl_mass(&n2, q));
        assert!((b2.plateau_mass - 2.0 * b1.plateau_mass).abs() < 1e-12);
        assert!((b1.total - b1.plateau_mass - b1.transition_mass).abs() < 1e-15);
        for (n, b) in [(&n1, b1), (&n2, b2)] {
            let full = full_weyl_mass(n, q);
            assert!((full - b.total).abs() < 1e-9 * b.total);
        }
        assert!((b1.transition_mass - b2.transition_mass).abs() < 1e-12);
    }

    #[test]
    fn transition_mass_shrinks_with_perturbation() {
        let q = BandQuadrature::default();
        let m: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|eta| neck_weyl_mass(&neck_metric(berger(1.0 + eta), 10.0, 1.0, 0.0).unwrap(), q).transition_mass)
            .collect();
        assert!(m[0] > m[1] && m[1] > m[2] && m[2] > 0.0);
    }

    #[test]
    fn dial_hits_target_and_scales_linearly() {
        let s1 = dial_solve(berger(1.1), 20.0, 1.0, 0.1).unwrap();
        assert!(s1.verified_total >= 1.0 && s1.verified_total <= 1.1);
        let s2 = dial_solve(berger(1.1), 20.0, 2.0, 0.1).unwrap();
        let ratio = s2.l_bar / s1.l_bar;
        assert!((ratio - 2.0).abs() < 0.2, "ratio {ratio}");
        let tiny = dial_solve(berger(1.1), 20.0, 1e-3, 0.1).unwrap();
        assert!(tiny.verified_total >= 1e-3 && tiny.l_bar > 0.0);
    }

    #[test]
    fn dial_rejects_round_and_bad_targets() {
        assert_eq!(dial_solve(MilnorMetric::round(), 10.0, 1.0, 0.1).unwrap_err(), Error::DialDegenerate);
        assert!(dial_solve(berger(1.1), 10.0, -1.0, 0.1).is_err());
        assert!(dial_solve(berger(1.1), 10.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn conformally_flat_chart_has_no_weyl_constant() {
        let grid = ChartGrid::<f64>::cube(4, 11, 0.15, &[0.1, -0.2, 0.0, 0.3]).unwrap();
        let sphere = generators::round_sphere_stereographic(grid).unwrap();
        assert!(weyl_constant(&sphere).unwrap().abs() < 1e-8);
    }

    #[test]
    fn weyl_constant_is_conformally_invariant() {
        let grid = ChartGrid::cube(4, 13, 0.1, &[0.0; 4]).unwrap();
        let g = generators::trig_perturbed(grid, 0.2).unwrap();
        let base: f64 = weyl_constant(&g).unwrap();
        assert!(base > 1e-4);
        let profiles: [fn(&[f64]) -> f64; 3] = [
            |x| 1.0 + 0.2 * x[0],
            |x| (0.3 * (x[1] - x[2])).exp(),
            |x| 1.5 + 0.3 * (x[0] * x[3]).sin(),
        ];
        for u in profiles {
            let v = weyl_constant(&g.conformal_rescale(u).unwrap()).unwrap();
            assert!((v - base).abs() < 1e-3 * base, "{v} vs {base}");
        }
    }
}
