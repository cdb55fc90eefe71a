use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use conflab_core::curvature::{curvature_scalars, curvature_scalars_on, Quadrature};
use conflab_core::cylinder::{
    euler_chart_grid, frame_to_chart, product_scalar_at, CoefficientCurve, FrameFamily, MilnorMetric, NeckProfile,
};
use conflab_core::invariants::{picture_csv, picture_svg, yw_picture_named};
use conflab_core::io::{curvature_csv, Generator, parse_spec, profile_csv, ChartSpec, NeckSpec, Spec};
use conflab_core::weyl::{neck_weyl_mass, BandQuadrature, DialOptions, WeylBudget};
use conflab_core::yamabe::{
    certify_neck, minimize_neck, minimize_quotient, perturbation_bracket, sphere_yamabe, MinimizeOptions, YamabeBracket,
    YamabeEstimate, BRACKET_GUARD,
};
use conflab_core::Error;
use serde::Serialize;

use crate::{CurvatureArgs, DialArgs, NeckArgs, YamabeArgs, YwArgs};

/// Oracle residuals must stay below `ORACLE_C · spacing²`.
pub const ORACLE_C: f64 = 1.0;

fn schema(location: &str, message: impl Into<String>) -> Error {
    Error::Schema { location: location.to_string(), message: message.into() }
}

pub fn load_spec(path: &Path) -> Result<Spec> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(&path.display().to_string(), e.to_string()))?;
    Ok(parse_spec(&text)?)
}

fn chart_spec(spec: Spec, command: &str) -> Result<ChartSpec> {
    match spec {
        Spec::Chart(c) => Ok(c),
        Spec::Neck(_) => Err(schema("kind", format!("`{command}` needs a chart spec")).into()),
    }
}

fn neck_spec(spec: Spec, command: &str) -> Result<NeckSpec> {
    match spec {
        Spec::Neck(n) => Ok(n),
        Spec::Chart(_) => Err(schema("kind", format!("`{command}` needs a neck spec")).into()),
    }
}

/// Re-grids the chart box with `n` nodes per axis.
pub fn with_resolution(spec: &mut ChartSpec, n: usize) -> Result<()> {
    if n < 5 {
        return Err(schema("--resolution", format!("{n} nodes per axis is below the stencil minimum 5")).into());
    }
    if spec.generator == Generator::Explicit || spec.components.is_some() {
        return Err(schema("--resolution", "explicit components cannot be re-gridded").into());
    }
    let dim = spec.dim;
    if spec.extents.len() != dim || spec.spacing.len() != dim || spec.periodic.len() != dim {
        return Ok(());
    }
    for d in 0..dim {
        let e = spec.extents[d];
        spec.spacing[d] = if spec.periodic[d] {
            spec.spacing[d] * e as f64 / n as f64
        } else {
            spec.spacing[d] * (e.max(1) - 1) as f64 / (n - 1) as f64
        };
        spec.extents[d] = n;
    }
    Ok(())
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[derive(Serialize)]
struct CurvatureSummary {
    nodes: usize,
    extents: Vec<usize>,
    spacing: Vec<f64>,
    scalar_min: f64,
    scalar_max: f64,
    volume: f64,
    /// `∫|W|^{n/2} dσ` over the stencil interior.
    weyl_integral: f64,
    csv: String,
}

pub fn curvature(a: CurvatureArgs) -> Result<()> {
    let mut spec = chart_spec(load_spec(&a.input)?, "curvature")?;
    if let Some(n) = a.resolution {
        with_resolution(&mut spec, n)?;
    }
    let metric = spec.metric()?;
    let cs = curvature_scalars(&metric)?;
    emit(a.out.as_deref(), &curvature_csv(metric.grid(), &cs))?;
    if let Some(out) = &a.out {
        let quad = Quadrature::curvature_interior(metric.grid())?;
        let p = metric.dim() as f64 / 4.0;
        let summary = CurvatureSummary {
            nodes: cs.scalar.len(),
            extents: metric.grid().extents().to_vec(),
            spacing: metric.grid().spacing().to_vec(),
            scalar_min: cs.scalar.iter().copied().fold(f64::INFINITY, f64::min),
            scalar_max: cs.scalar.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            volume: quad.sum(cs.volume_density.iter().copied()),
            weyl_integral: quad.sum(cs.weyl_norm_sq.iter().zip(&cs.volume_density).map(|(w, v)| w.max(0.0).powf(p) * v)),
            csv: out.display().to_string(),
        };
        print!("{}", json(&summary)?);
    }
    Ok(())
}

#[derive(Serialize)]
pub struct OracleSample {
    pub t: f64,
    pub closed_form: f64,
    pub chart: f64,
    pub residual: f64,
}

/// Closed-form scalar curvature against the chart path on 5⁴ Euler-angle
/// patches, at points of the plateau, both band interiors (away from the
/// cutoff kinks) and the round collar.
pub fn oracle_samples(neck: &NeckProfile<f64>, spacing: f64) -> Result<Vec<OracleSample>> {
    let kinks = neck.breakpoints();
    let (lb, l) = (neck.plateau_half_length(), neck.transition_length());
    let mut ts = vec![0.5 * lb];
    ts.extend([0.2, 0.35, 0.65, 0.8].iter().map(|s| lb + s * l));
    if neck.margin() > 4.0 * spacing {
        ts.push(lb + l + 0.5 * neck.margin());
    }
    let gap = (4.0 * spacing).max(1e-3 * l);
    let mut out = Vec::new();
    for t in ts {
        let inside_piece = t < lb - gap || kinks.iter().all(|k| (t - k).abs() > gap);
        if !inside_piece || t + 2.0 * spacing > neck.half_width() {
            continue;
        }
        let m = frame_to_chart(neck, euler_chart_grid(5, spacing, t)?)?;
        let chart = curvature_scalars_on(&m, m.grid().interior(2)?)?.scalar[0];
        let [c, d1, d2] = neck.jet_at(t);
        let closed_form = product_scalar_at(c, d1, d2);
        out.push(OracleSample { t, closed_form, chart, residual: (chart - closed_form).abs() });
    }
    Ok(out)
}

#[derive(Serialize)]
struct NeckReport {
    h: [f64; 3],
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "L_bar")]
    l_bar: f64,
    margin: f64,
    samples: usize,
    step: f64,
    oracle_spacing: f64,
    oracle: Vec<OracleSample>,
    max_residual: f64,
    tolerance: f64,
    max_scalar_jump: f64,
    weyl: WeylBudget<f64>,
    quadrature: BandQuadrature,
}

pub fn neck(a: NeckArgs) -> Result<()> {
    let spec = neck_spec(load_spec(&a.input)?, "neck")?;
    if a.resolution < 5 {
        return Err(schema("--resolution", "oracle patches need spacing at most 1/5").into());
    }
    let neck = spec.neck()?;
    let spacing = 1.0 / a.resolution as f64;
    let oracle = oracle_samples(&neck, spacing)?;
    if oracle.is_empty() {
        return Err(Error::GridTooSmall(format!("no oracle point clears the cutoff kinks at spacing {spacing}")).into());
    }
    let max_residual = oracle.iter().map(|s| s.residual).fold(0.0, f64::max);
    let tolerance = ORACLE_C * spacing * spacing;
    let quadrature = BandQuadrature::default();
    let report = NeckReport {
        h: neck.h().coefficients(),
        l: neck.transition_length(),
        l_bar: neck.plateau_half_length(),
        margin: neck.margin(),
        samples: neck.family().len(),
        step: neck.family().grid().step,
        oracle_spacing: spacing,
        oracle,
        max_residual,
        tolerance,
        max_scalar_jump: neck.max_scalar_jump(),
        weyl: neck_weyl_mass(&neck, quadrature),
        quadrature,
    };
    if let Some(p) = &a.csv {
        emit(Some(p), &profile_csv(neck.family()))?;
    }
    emit(a.out.as_deref(), &json(&report)?)?;
    if max_residual > tolerance {
        return Err(Error::InvariantBreach(format!(
            "closed-form curvature differs from the chart path by {max_residual:e} > {tolerance:e}"
        ))
        .into());
    }
    Ok(())
}

#[derive(Serialize)]
struct OptimizerReport {
    #[serde(rename = "Y_upper")]
    y_upper: f64,
    iterations: usize,
    converged: bool,
    ansatz: conflab_core::yamabe::Ansatz,
    start: String,
    per_start: Vec<(String, f64)>,
    bracket: Option<YamabeBracket<f64>>,
    seed: u64,
    resolution: serde_json::Value,
    tolerances: serde_json::Value,
}

fn history_csv(est: &YamabeEstimate) -> String {
    let mut s = String::from("iteration,Q\n");
    for (k, q) in est.history.iter().enumerate() {
        let _ = writeln!(s, "{k},{q:.15e}");
    }
    s
}

pub fn yamabe(a: YamabeArgs) -> Result<()> {
    let options = MinimizeOptions { seed: a.seed, ..Default::default() };
    let tolerances = serde_json::to_value(options.descent)?;
    let (est, bracket, resolution) = match load_spec(&a.input)? {
        Spec::Chart(mut spec) => {
            if let Some(n) = a.resolution {
                with_resolution(&mut spec, n)?;
            }
            let metric = spec.metric()?;
            let est = minimize_quotient(&metric, options)?;
            let res = serde_json::json!({ "extents": metric.grid().extents(), "spacing": metric.grid().spacing() });
            (est, None, res)
        }
        Spec::Neck(mut spec) => {
            if let Some(n) = a.resolution {
                if n == 0 {
                    return Err(schema("--resolution", "needs at least one sample per unit length").into());
                }
                spec.step = Some(1.0 / n as f64);
            }
            let neck = spec.neck()?;
            let est = minimize_neck(&neck, options)?;
            let round = FrameFamily::constant(MilnorMetric::<f64>::round(), *neck.family().grid())?;
            let bracket = perturbation_bracket(&round, neck.family(), sphere_yamabe())?;
            let res = serde_json::json!({ "samples": neck.family().len(), "step": neck.family().grid().step });
            (est, Some(bracket), res)
        }
    };
    if let Some(p) = &a.csv {
        emit(Some(p), &history_csv(&est))?;
    }
    let report = OptimizerReport {
        y_upper: est.y_upper,
        iterations: est.iterations,
        converged: est.converged,
        ansatz: est.ansatz,
        start: est.start.clone(),
        per_start: est.per_start.clone(),
        bracket,
        seed: a.seed,
        resolution,
        tolerances: serde_json::json!({ "descent": tolerances, "bracket_guard": BRACKET_GUARD }),
    };
    emit(a.out.as_deref(), &json(&report)?)
}

#[derive(Serialize)]
struct Certificate {
    #[serde(rename = "Y_lower")]
    y_lower: f64,
    #[serde(rename = "Y_reference")]
    y_reference: f64,
    bracket: YamabeBracket<f64>,
    yamabe_ok: bool,
    weyl_ok: bool,
}

#[derive(Serialize)]
struct DialReport {
    w_h: f64,
    #[serde(rename = "L_bar")]
    l_bar: f64,
    plateau: f64,
    transition: f64,
    total: f64,
    target: [f64; 2],
    h: [f64; 3],
    #[serde(rename = "L")]
    l: f64,
    yamabe_halvings: usize,
    weyl_halvings: usize,
    certificate: Certificate,
    tolerances: serde_json::Value,
    resolution: serde_json::Value,
}

pub fn dial(a: DialArgs) -> Result<()> {
    for (flag, v) in [("--kappa", a.kappa), ("--eps", a.eps)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(schema(flag, format!("{v} must be positive")).into());
        }
    }
    let (h, l, options) = match &a.input {
        Some(p) => {
            let spec = neck_spec(load_spec(p)?, "dial")?;
            let options = DialOptions { cutoff: spec.cutoff, margin: spec.margin, quadrature: BandQuadrature::default() };
            (spec.milnor()?, spec.l, options)
        }
        None => (MilnorMetric::new(1.1, 1.0, 1.0)?, 20.0, DialOptions::default()),
    };
    let c = certify_neck(h, l, a.kappa, a.eps, a.eps, options)?;
    let d = &c.dial;
    let report = DialReport {
        w_h: d.budget.per_unit_length,
        l_bar: d.l_bar,
        plateau: d.budget.plateau_mass,
        transition: d.budget.transition_mass,
        total: d.verified_total,
        target: [a.kappa, a.kappa + a.eps],
        h: d.h.coefficients(),
        l,
        yamabe_halvings: c.yamabe_halvings,
        weyl_halvings: d.halvings,
        certificate: Certificate {
            y_lower: c.bracket.lower,
            y_reference: c.bracket.reference,
            bracket: c.bracket,
            yamabe_ok: c.yamabe_ok,
            weyl_ok: c.weyl_ok,
        },
        tolerances: serde_json::json!({
            "eps_weyl": a.eps,
            "eps_yamabe": a.eps,
            "bracket_guard": BRACKET_GUARD,
        }),
        resolution: serde_json::json!({
            "samples": d.neck.family().len(),
            "step": d.neck.family().grid().step,
            "quadrature": options.quadrature,
            "cutoff": options.cutoff,
        }),
    };
    if let Some(p) = &a.csv {
        emit(Some(p), &profile_csv(d.neck.family()))?;
    }
    emit(a.out.as_deref(), &json(&report)?)?;
    if !(c.yamabe_ok && c.weyl_ok) {
        return Err(Error::Infeasible(format!(
            "certificate not established: Y_lower = {} (need {}), W_total = {} (need [{}, {}])",
            c.bracket.lower,
            sphere_yamabe::<f64>() - a.eps,
            d.verified_total,
            a.kappa,
            a.kappa + a.eps
        ))
        .into());
    }
    Ok(())
}

pub fn ywpicture(a: YwArgs) -> Result<()> {
    let p = yw_picture_named(&a.name)?;
    let svg_path = a.out.as_deref().or(a.svg.as_deref());
    if let Some(path) = svg_path {
        emit(Some(path), &picture_svg(&p))?;
    }
    if a.csv.is_some() || svg_path.is_none() {
        emit(a.csv.as_deref(), &picture_csv(&p))?;
    }
    Ok(())
}
