//! Closed-form product curvature against the chart path, jump scaling and
//! plateau linearity of the Weyl budget.

use conflab_core::curvature::curvature_scalars;
use conflab_core::cylinder::{
    euler_chart_grid, fit_jump_constant, frame_to_chart, neck_metric, product_scalar_at, CoefficientCurve, MilnorMetric,
    NeckProfile,
};
use conflab_core::weyl::{neck_weyl_mass, slice_weyl_rate, BandQuadrature};
use proptest::prelude::*;

const ORACLE_C: f64 = 1.0;
const SPACINGS: [f64; 3] = [0.08, 0.04, 0.02];

fn chart_scalar(neck: &NeckProfile<f64>, t: f64, h: f64) -> f64 {
    let metric = frame_to_chart(neck, euler_chart_grid(5, h, t).unwrap()).unwrap();
    curvature_scalars(&metric).unwrap().scalar[0]
}

fn closed_form(neck: &NeckProfile<f64>, t: f64) -> f64 {
    let [c, d1, d2] = neck.jet_at(t);
    product_scalar_at(c, d1, d2)
}

/// Sample points in the transition band at least `gap` from every kink.
fn smooth_points(neck: &NeckProfile<f64>, gap: f64) -> Vec<f64> {
    let kinks = neck.breakpoints();
    let (lb, l) = (neck.plateau_half_length(), neck.transition_length());
    [0.2, 0.35, 0.65, 0.8]
        .into_iter()
        .map(|s| lb + s * l)
        .filter(|t| kinks.iter().all(|k| (t - k).abs() > gap))
        .collect()
}

fn oracle_errors(neck: &NeckProfile<f64>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for t in smooth_points(neck, 0.5) {
        let want = closed_form(neck, t);
        for h in SPACINGS {
            out.push((h, (chart_scalar(neck, t, h) - want).abs()));
        }
    }
    out
}

#[test]
fn product_formula_matches_chart_on_five_necks() {
    let cases = [
        ([1.02, 1.0, 1.0], 10.0),
        ([1.05, 0.97, 1.01], 20.0),
        ([0.9, 1.1, 1.0], 40.0),
        ([1.15, 0.95, 0.9], 60.0),
        ([1.2, 0.85, 1.1], 80.0),
    ];
    for (k, l) in cases {
        let neck = neck_metric(MilnorMetric::new(k[0], k[1], k[2]).unwrap(), l, 2.0, 1.0).unwrap();
        let errs = oracle_errors(&neck);
        assert!(errs.len() >= 2 * SPACINGS.len(), "{k:?}: too few smooth points");
        for (h, e) in errs {
            assert!(e <= ORACLE_C * h * h, "{k:?} L={l} h={h}: error {e:e}");
        }
    }
}

#[test]
fn product_formula_matches_on_plateau_and_collar() {
    let neck = neck_metric(MilnorMetric::new(1.1, 0.95, 1.0).unwrap(), 10.0, 3.0, 4.0).unwrap();
    let plateau = chart_scalar(&neck, 1.0, 0.04);
    assert!((plateau - neck.h().scalar_curvature()).abs() < 1e-5);
    let collar = chart_scalar(&neck, 15.0, 0.04);
    assert!((collar - 6.0).abs() < 1e-5);
}

#[test]
fn jump_bound_scales_inverse_square() {
    for k in [[1.02, 1.0, 1.0], [1.2, 0.9, 1.0], [0.85, 1.1, 1.05]] {
        let fit = fit_jump_constant(MilnorMetric::<f64>::new(k[0], k[1], k[2]).unwrap(), &[10.0, 20.0, 40.0, 80.0]).unwrap();
        assert!((fit.slope + 2.0).abs() <= 0.2, "{k:?}: slope {}", fit.slope);
        assert!(fit.k0 > 0.0 && fit.k0.is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn chart_oracle_on_random_necks(eta in 0.02f64..0.2, l in 10.0f64..80.0, sign in prop::bool::ANY) {
        let a = if sign { 1.0 + eta } else { 1.0 - eta };
        let neck = neck_metric(MilnorMetric::new(a, 1.0 + 0.3 * eta, 1.0).unwrap(), l, 1.5, 1.0).unwrap();
        for t in smooth_points(&neck, 0.5) {
            let h = 0.04;
            let e = (chart_scalar(&neck, t, h) - closed_form(&neck, t)).abs();
            prop_assert!(e <= ORACLE_C * h * h, "eta={} L={} t={}: {:e}", eta, l, t, e);
        }
    }

    #[test]
    fn plateau_mass_is_linear(eta in 0.02f64..0.3, lbar in 0.5f64..20.0, l in 5.0f64..40.0) {
        let h = MilnorMetric::berger(eta).unwrap();
        let q = BandQuadrature::default();
        let n1 = neck_metric(h, l, lbar, 1.0).unwrap();
        let n2 = n1.with_plateau(2.0 * lbar).unwrap();
        let (b1, b2) = (neck_weyl_mass(&n1, q), neck_weyl_mass(&n2, q));
        let w_h = slice_weyl_rate(h);
        // f(L̄) = 2 w_h L̄ + transition
        let slope = (b2.total - b1.total) / lbar;
        prop_assert!((slope - 2.0 * w_h).abs() <= 1e-9 * w_h.max(1e-12), "slope {} vs {}", slope, 2.0 * w_h);
        prop_assert!((b1.plateau_mass - 2.0 * w_h * lbar).abs() <= 1e-12 * b1.plateau_mass.max(1.0));
    }
}
