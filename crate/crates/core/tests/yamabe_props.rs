//! Quotient homogeneity, the Sobolev form of the sphere's Yamabe value, and
//! the sharpness floor of the optimizer on the round sphere. Sphere tests use the
//! `sinh` stereographic chart at the reference resolution (17⁴ nodes, half-width 3).

use conflab_core::metric::generators::{round_sphere_sinh, trig_perturbed};
use conflab_core::yamabe::{minimize_quotient, quotient, sobolev_residual, sphere_yamabe, MinimizeOptions, TrialFunction};
use conflab_core::{ChartGrid, ChartMetric};
use proptest::prelude::*;

fn sphere(n: usize, half: f64) -> ChartMetric<f64> {
    let h = 2.0 * half / (n - 1) as f64;
    round_sphere_sinh(ChartGrid::cube(4, n, h, &[0.0; 4]).unwrap()).unwrap()
}

/// Unit-sphere point of chart coordinates `ξ`, via `x = sinh ξ` stereographic.
fn embedding(xi: &[f64]) -> [f64; 5] {
    let x: Vec<f64> = xi.iter().map(|v| v.sinh()).collect();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let d = 1.0 + r2;
    [2.0 * x[0] / d, 2.0 * x[1] / d, 2.0 * x[2] / d, 2.0 * x[3] / d, (r2 - 1.0) / d]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn quotient_is_scale_invariant(
        coef in prop::array::uniform4(-0.4f64..0.4),
        c in prop::sample::select(vec![-7.5f64, 1e-3, 0.37, 2.0, 1e4]),
    ) {
        let g = trig_perturbed(ChartGrid::cube(4, 9, 0.15, &[0.2; 4]).unwrap(), 0.25).unwrap();
        let f = TrialFunction::from_fn(g.grid().clone(), |x| {
            1.0 + coef[0] * x[0] + coef[1] * x[1] * x[2] + coef[2] * x[3].sin() + coef[3] * x[0] * x[0]
        }).unwrap();
        let q1 = quotient(&f, &g).unwrap();
        let qc = quotient(&f.scaled(c).unwrap(), &g).unwrap();
        prop_assert!((q1 - qc).abs() <= 1e-10 * q1.abs(), "{} vs {}", q1, qc);
    }

    #[test]
    fn sobolev_form_holds_for_random_functions(
        lin in prop::array::uniform5(-0.3f64..0.3),
        quad in prop::array::uniform5(-0.3f64..0.3),
    ) {
        let g = sphere(17, 3.0);
        let f = TrialFunction::from_fn(g.grid().clone(), |x| {
            let e = embedding(x);
            1.0 + (0..5).map(|i| lin[i] * e[i] + quad[i] * e[i] * e[(i + 1) % 5]).sum::<f64>()
        }).unwrap();
        let r = sobolev_residual(&f, &g, sphere_yamabe::<f64>()).unwrap();
        prop_assert!(r >= -1e-3, "residual {}", r);
    }
}

#[test]
fn sobolev_form_holds_for_first_harmonic_bump() {
    let g = sphere(17, 3.0);
    let f = TrialFunction::from_fn(g.grid().clone(), |x| 1.0 + 0.5 * embedding(x)[0]).unwrap();
    let r = sobolev_residual(&f, &g, sphere_yamabe::<f64>()).unwrap();
    assert!(r >= -1e-3, "{r}");
    let one = TrialFunction::constant(g.grid().clone(), 1.0).unwrap();
    assert!(sobolev_residual(&one, &g, sphere_yamabe::<f64>()).unwrap().abs() < 1e-9);
}

#[test]
fn optimizer_respects_sharpness_floor() {
    let g = sphere(17, 3.0);
    let est = minimize_quotient(&g, MinimizeOptions::default()).unwrap();
    let floor = sphere_yamabe::<f64>() * 0.98;
    assert!(est.history.iter().all(|q| *q >= floor), "min iterate {:?}", est.history.iter().cloned().fold(f64::INFINITY, f64::min));
    assert!(est.per_start.iter().all(|(_, q)| *q >= floor));
    assert!(est.y_upper >= floor);
}
