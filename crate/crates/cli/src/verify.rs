//! Oracle cross-checks behind `conflab verify`.

use std::f64::consts::PI;
use std::time::Instant;

use anyhow::Result;
use conflab_core::curvature::algebra::max_trace;
use conflab_core::curvature::{curvature, curvature_scalars_on, map_curvature, selfdual_split, split_point, Quadrature};
use conflab_core::cylinder::{
    euler_chart_grid, family_to_chart, fit_jump_constant, neck_metric, FrameFamily, MilnorMetric, TGrid,
};
use conflab_core::invariants::{
    einstein_curve, gap_at_corner, omega_proof_form, omega_statement_form, yw_picture_named, PiRoot, PiSq,
};
use conflab_core::metric::generators::{fubini_study_affine, round_sphere_sinh, round_sphere_stereographic, trig_perturbed};
use conflab_core::weyl::{neck_weyl_mass, slice_weyl_rate, slice_weyl_rate_chart, weyl_constant, BandQuadrature, DialOptions};
use conflab_core::yamabe::{
    certify_neck, minimize_cylinder, minimize_neck, minimize_quotient, perturbation_bracket, quotient, sphere_yamabe,
    MinimizeOptions, TrialFunction,
};
use conflab_core::{ChartGrid, ChartMetric, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::{emit, oracle_samples, ORACLE_C};
use crate::VerifyArgs;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seconds: f64,
}

/// Collects rows; a check passes when `value ≤ tolerance`.
struct Table {
    rows: Vec<Check>,
    clock: Instant,
}

impl Table {
    fn push(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let seconds = self.clock.elapsed().as_secs_f64();
        self.clock = Instant::now();
        self.rows.push(Check { name: name.into(), value, tolerance, pass: value <= tolerance, seconds });
    }

    fn exact(&mut self, name: &str, ok: bool) {
        self.push(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

fn cube(n: usize, h: f64, center: &[f64]) -> Result<ChartGrid<f64>> {
    Ok(ChartGrid::cube(4, n, h, center)?)
}

fn sphere_checks(t: &mut Table) -> Result<()> {
    let m = round_sphere_stereographic(cube(9, 1.0 / 16.0, &[1.5, -1.5, 0.5, -0.5])?)?;
    let cs = curvature_scalars_on(&m, m.grid().interior(2)?)?;
    let r_err = cs.scalar.iter().map(|r| (r - 12.0).abs()).fold(0.0, f64::max);
    let w = cs.weyl_norm_sq.iter().map(|w| w.max(0.0).sqrt()).fold(0.0, f64::max);
    t.push("sphere: sup |R − 12| / 12", r_err / 12.0, 0.01);
    t.push("sphere: sup |W| / sup |R − 12|", w / r_err.max(f64::MIN_POSITIVE), 10.0);
    let errs: Vec<f64> = [0.25, 0.125, 0.0625]
        .iter()
        .map(|&h| -> Result<f64> {
            let m = round_sphere_stereographic(cube(5, h, &[0.6, -0.3, 0.9, 0.2])?)?;
            Ok((curvature_scalars_on(&m, m.grid().interior(2)?)?.scalar[0] - 12.0).abs())
        })
        .collect::<Result<_>>()?;
    let order = (errs[1] / errs[2]).log2();
    t.push("sphere: 4 − observed order", 4.0 - order, 2.2);
    Ok(())
}

fn fubini_study_checks(t: &mut Table, full: bool) -> Result<()> {
    let m = fubini_study_affine(cube(9, 0.05, &[0.4, -0.3, 0.1, 0.2])?)?;
    let vals = map_curvature(&m, &m.grid().interior(2)?, |pc, _| {
        let (_, _, plus, minus) = split_point(&pc.g, &pc.weyl, 1);
        (pc.weyl_norm_sq, plus, minus)
    });
    let minus = vals.iter().map(|v| (v.2 / v.0).sqrt()).fold(0.0, f64::max);
    let split = vals.iter().map(|v| (v.0 - 4.0 * (v.1 + v.2)).abs() / v.0.max(1.0)).fold(0.0, f64::max);
    t.push("Fubini–Study: sup |W⁻| / |W| (spacing 0.05)", minus, 1e-4);
    t.push("Fubini–Study: |W|² − 4(|W⁺|² + |W⁻|²)", split, 1e-9);
    if full {
        let m = fubini_study_affine(cube(33, 0.4, &[0.0; 4])?)?;
        let region = m.grid().interior(2)?;
        let vals = map_curvature(&m, &region, |pc, _| (pc.weyl_norm_sq, pc.sqrt_det));
        let total = Quadrature::trapezoid(m.grid(), region).sum(vals.iter().map(|v| v.0 * v.1));
        t.push("Fubini–Study: |∫|W|² / 48π² − 1| (33⁴ nodes)", (total / (48.0 * PI * PI) - 1.0).abs(), 0.05);
    }
    Ok(())
}

fn neck_checks(t: &mut Table) -> Result<()> {
    let mut worst = 0.0f64;
    for (k, l) in [([1.05, 0.97, 1.01], 20.0), ([1.2, 0.85, 1.1], 80.0)] {
        let neck = neck_metric(MilnorMetric::new(k[0], k[1], k[2])?, l, 2.0, 1.0)?;
        for h in [0.08, 0.04] {
            for s in oracle_samples(&neck, h)? {
                worst = worst.max(s.residual / (h * h));
            }
        }
    }
    t.push("neck: closed-form vs chart R / spacing²", worst, ORACLE_C);
    let fit = fit_jump_constant(MilnorMetric::<f64>::new(1.02, 1.0, 1.0)?, &[10.0, 20.0, 40.0, 80.0])?;
    t.push("neck: |jump slope + 2|", (fit.slope + 2.0).abs(), 0.2);
    let h = MilnorMetric::<f64>::berger(0.1)?;
    let chart = slice_weyl_rate_chart(h, 9, 0.05)?;
    t.push("neck: w_h chart vs closed form (relative)", (chart / slice_weyl_rate(h) - 1.0).abs(), 1e-3);
    let q = BandQuadrature::default();
    let m1 = neck_weyl_mass(&neck_metric(h, 10.0, 1.0, 2.0)?, q).total;
    let m8 = neck_weyl_mass(&neck_metric(h, 10.0, 8.0, 2.0)?, q).total;
    t.push("neck: plateau mass slope vs 2 w_h (relative)", ((m8 - m1) / 7.0 / (2.0 * slice_weyl_rate(h)) - 1.0).abs(), 1e-9);
    Ok(())
}

fn dial_checks(t: &mut Table) -> Result<()> {
    let y = sphere_yamabe::<f64>();
    let eps = 0.1 * y;
    let c = certify_neck(MilnorMetric::new(1.1, 1.0, 1.0)?, 20.0, 1.0, eps, eps, DialOptions::default())?;
    let w = c.dial.verified_total;
    t.push("dial: distance of W_total outside [κ, κ + ε]", (1.0 - w).max(w - 1.0 - eps).max(0.0), 0.0);
    t.push("dial: Y(S⁴) − ε − Y_lower", y - eps - c.bracket.lower, 0.0);
    Ok(())
}

fn yamabe_checks(t: &mut Table, full: bool) -> Result<()> {
    let y = sphere_yamabe::<f64>();
    let n = 17;
    let sphere = round_sphere_sinh(cube(n, 6.0 / (n - 1) as f64, &[0.0; 4])?)?;
    let one = TrialFunction::constant(sphere.grid().clone(), 1.0)?;
    t.push("sphere: |Q(1) / Y(S⁴) − 1|", (quotient(&one, &sphere)? / y - 1.0).abs(), 0.02);
    if full {
        let est = minimize_quotient(&sphere, MinimizeOptions::default())?;
        t.push("sphere: |Y_upper / Y(S⁴) − 1|", (est.y_upper / y - 1.0).abs(), 0.02);
    }
    let windows = if full { vec![1.0, 2.0, 4.0, 8.0] } else { vec![2.0, 8.0] };
    let mut values = Vec::new();
    for w in windows {
        let fam = FrameFamily::constant(MilnorMetric::round(), TGrid::symmetric(w, 0.05)?)?;
        values.push(minimize_cylinder(&fam, MinimizeOptions::default())?.y_upper);
    }
    let rise = values.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
    t.push("cylinder: increase between growing windows", rise, 0.0);
    t.push("cylinder: |Y_upper(8) / Y(S⁴) − 1|", (values.last().unwrap() / y - 1.0).abs(), 0.03);

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_eps, mut outside) = (0.0f64, 0usize);
    let seeds = if full { 10 } else { 3 };
    for i in 0..seeds {
        let eta: f64 = rng.gen_range(-0.045..0.045);
        let neck = neck_metric(MilnorMetric::berger(eta)?, 10.0, 3.0, 20.0)?;
        let round = FrameFamily::constant(MilnorMetric::round(), *neck.family().grid())?;
        let y_ref = minimize_cylinder(&round, MinimizeOptions::default())?.y_upper;
        let b = perturbation_bracket(&round, neck.family(), y_ref)?;
        worst_eps = worst_eps.max(b.epsilon);
        let est = minimize_neck(&neck, MinimizeOptions { seed: i, ..Default::default() })?;
        if !b.contains(est.y_upper) {
            outside += 1;
        }
    }
    t.push(format!("bracket: max ε over {seeds} Berger necks"), worst_eps, 0.05);
    t.push(format!("bracket: Y_upper outside bracket (of {seeds})"), outside as f64, 0.0);
    Ok(())
}

fn invariant_checks(t: &mut Table) -> Result<()> {
    let root = |c, m| PiRoot::from_parts(c, m);
    let s4 = yw_picture_named("S4")?;
    t.exact("S4: corner (8π√6, 0)", s4.corner.y == root(8, 6)? && s4.corner.w == PiSq::ZERO);
    let cp2 = yw_picture_named("CP2")?;
    t.exact(
        "CP2: corner on Einstein and gap curves",
        cp2.corner.w == PiSq::int(48) && einstein_curve(3, cp2.corner.y)? == cp2.corner.w && gap_at_corner(&cp2)? == cp2.corner.w,
    );
    t.exact("K3: ω = 768π²", yw_picture_named("K3")?.corner.w == PiSq::int(768));
    let sxs = yw_picture_named("SigmaxSigma(2,2)")?;
    t.exact("Σ₂×Σ₂: corner (−16π, 256π²/3)", sxs.corner.y == root(-16, 1)? && sxs.corner.w == PiSq::new(256, 3));
    let ch = yw_picture_named("CH2_quotient(2)")?;
    t.exact("CH²/Γ: ω = 48π²τ = 16π²χ", ch.corner.w == PiSq::int(96) && ch.corner.w == PiSq::int(16 * ch.manifold.chi));
    let mut mismatches = 0;
    for chi in -4i64..=12 {
        for tau in -4i64..=4 {
            for k in 0u32..=3 {
                for l in 0u32..=3 {
                    if omega_statement_form(chi + k as i64 - 2 * l as i64, tau - k as i64, k, l)? != omega_proof_form(chi, tau, k)? {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    t.push("ω: statement vs proof form mismatches", mismatches as f64, 0.0);
    Ok(())
}

fn property_checks(t: &mut Table, full: bool) -> Result<()> {
    let g = trig_perturbed(cube(9, 0.15, &[0.2; 4])?, 0.25)?;
    let f = TrialFunction::from_fn(g.grid().clone(), |x| 1.0 + 0.3 * x[0] - 0.2 * x[1] * x[2] + 0.1 * x[3].sin())?;
    let q1 = quotient(&f, &g)?;
    let mut homog = 0.0f64;
    for c in [-3.0, 1e-3, 7.0, 1e4] {
        homog = homog.max((quotient(&f.scaled(c)?, &g)? - q1).abs() / q1.abs());
    }
    t.push("Q(cf) = Q(f), relative", homog, 1e-10);

    let m = trig_perturbed(cube(7, 0.1, &[0.4, 0.7, -0.2, 1.1])?, 0.3)?;
    let region = m.grid().interior(2)?;
    let trace = map_curvature(&m, &region, |pc, _| max_trace(4, &pc.weyl, &pc.ginv) / pc.weyl_norm_sq.sqrt().max(1.0))
        .into_iter()
        .fold(0.0, f64::max);
    t.push("Weyl: max trace / |W|", trace, 1e-10);
    let b = curvature(&m)?;
    let split = selfdual_split(&b, &m, 1)?;
    let factor4 = (0..b.len())
        .map(|k| {
            let w2 = b.weyl_norm()[k].powi(2);
            (w2 - 4.0 * (split.plus_norm_sq[k] + split.minus_norm_sq[k])).abs() / w2.max(1.0)
        })
        .fold(0.0, f64::max);
    t.push("Weyl: |W|² = 4(|W⁺|² + |W⁻|²)", factor4, 1e-10);

    type Build = fn(usize, f64) -> Result<ChartMetric<f64>>;
    let metrics: Vec<(&str, Build)> = {
        let mut v: Vec<(&str, Build)> = vec![("trig", |n, h| Ok(trig_perturbed(cube(n, h, &[0.0; 4])?, 0.2)?))];
        if full {
            v.push(("Fubini–Study", |n, h| Ok(fubini_study_affine(cube(n, h, &[0.2, -0.1, 0.3, 0.0])?)?)));
            v.push(("Milnor", |n, h| {
                Ok(family_to_chart(&MilnorMetric::new(1.3, 0.8, 1.1)?, euler_chart_grid(n, h, 0.0)?)?)
            }));
        }
        v
    };
    let factors: [fn(&[f64]) -> f64; 3] =
        [|x| 1.0 + 0.15 * x[0], |x| (0.25 * (x[1] - x[2])).exp(), |x| 1.4 + 0.3 * (x[0] * x[3] + x[1]).sin()];
    for (name, build) in metrics {
        let g = build(9, 0.1)?;
        let base = weyl_constant(&g)?;
        let tol = 2.0 * (base - weyl_constant(&build(17, 0.05)?)?).abs();
        let mut worst = 0.0f64;
        for u in factors {
            worst = worst.max((weyl_constant(&g.conformal_rescale(u)?)? - base).abs());
        }
        t.push(format!("conformal invariance of ∫|W|² ({name})"), worst, tol);
    }
    Ok(())
}

pub fn run(a: VerifyArgs) -> Result<()> {
    let full = !a.quick;
    let mut t = Table { rows: Vec::new(), clock: Instant::now() };
    sphere_checks(&mut t)?;
    fubini_study_checks(&mut t, full)?;
    neck_checks(&mut t)?;
    dial_checks(&mut t)?;
    yamabe_checks(&mut t, full)?;
    invariant_checks(&mut t)?;
    property_checks(&mut t, full)?;

    let width = t.rows.iter().map(|r| r.name.chars().count()).max().unwrap_or(0);
    println!("{:<width$}  {:>12}  {:>12}  result", "check", "value", "tolerance");
    for r in &t.rows {
        let pad = width - r.name.chars().count();
        println!(
            "{}{}  {:>12.3e}  {:>12.3e}  {}",
            r.name,
            " ".repeat(pad),
            r.value,
            r.tolerance,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    let failed = t.rows.iter().filter(|r| !r.pass).count();
    println!("{} checks, {failed} failed", t.rows.len());
    if let Some(p) = &a.out {
        emit(Some(p), &(serde_json::to_string_pretty(&t.rows)? + "\n"))?;
    }
    if failed > 0 {
        return Err(Error::InvariantBreach(format!("{failed} verification checks failed")).into());
    }
    Ok(())
}
