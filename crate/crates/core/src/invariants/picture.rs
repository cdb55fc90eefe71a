//! Named four-manifolds and their YW-pictures, emitted as CSV and SVG.

use std::fmt::Write as _;

use serde::Serialize;

use super::exact::{mul, q, qi, PiRoot, PiSq};
use super::surface::{
    einstein_curve, einstein_curve_f64, gap_curve, gap_curve_f64, hirzebruch_floor, omega, FourManifold, Kodaira,
};
use crate::error::{Error, Result};

/// A named entry or explicit data for `M # k·CP̄² # l·(S¹×S³)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PictureSource {
    Named(String),
    Explicit { manifold: FourManifold, k: u32, l: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Corner {
    pub y: PiRoot,
    pub w: PiSq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub curve: CurveId,
    pub y: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveId {
    Einstein,
    Gap,
    Floor,
    Sobolev,
    Kuiper,
    KuiperCandidate,
    Corner,
    Region,
    Unknown,
}

impl CurveId {
    pub fn as_str(&self) -> &'static str {
        match self {
            CurveId::Einstein => "einstein",
            CurveId::Gap => "gap",
            CurveId::Floor => "floor",
            CurveId::Sobolev => "sobolev",
            CurveId::Kuiper => "kuiper",
            CurveId::KuiperCandidate => "kuiper_candidate",
            CurveId::Corner => "corner",
            CurveId::Region => "region",
            CurveId::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YwPicture {
    pub manifold: FourManifold,
    /// `(Y(M), ω(M))`.
    pub corner: Corner,
    /// `y = Y(M)`.
    pub sobolev_line: PiRoot,
    /// `w = W(M)` when known, otherwise `ω(M)`.
    pub kuiper_line: PiSq,
    pub weyl_known: bool,
    /// Values `W(M)` may take when it is not known: the floor and `ω(M)`.
    pub kuiper_candidates: Vec<PiSq>,
    /// `(32χ·π², 1/6)` in `w = 32π²χ − y²/6`.
    pub einstein_curve: (PiSq, num_rational::Ratio<i64>),
    /// `(1/3, 48τ·π²)` in `w = y²/3 − 48π²τ`.
    pub gap_curve: (num_rational::Ratio<i64>, PiSq),
    pub hirzebruch_floor: PiSq,
    /// The gap curve is drawn only when `Y(M) > 0`.
    pub gap_applies: bool,
    /// Part of the admissible region is left open.
    pub unknown_region: bool,
    pub samples: Vec<Sample>,
}

struct Entry {
    manifold: FourManifold,
    corner: Corner,
    weyl: Option<PiSq>,
}

fn parse_args(s: &str, prefix: &str) -> Option<Vec<i64>> {
    let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|p| p.trim().parse().ok()).collect()
}

fn genus(g: i64, name: &str) -> Result<i64> {
    if g < 2 {
        return Err(Error::InvalidArgument(format!("{name}: genus {g} must be at least 2")));
    }
    Ok(g - 1)
}

fn lookup(name: &str) -> Result<Entry> {
    let name = name.trim();
    match name {
        "S4" => {
            let m = FourManifold::new("S4", 2, 0, Kodaira::Other)?;
            let corner = Corner { y: PiRoot::from_parts(8, 6)?, w: PiSq::ZERO };
            return Ok(Entry { manifold: m, corner, weyl: Some(PiSq::ZERO) });
        }
        "CP2" => {
            let m = FourManifold::new("CP2", 3, 1, Kodaira::Other)?;
            let corner = Corner { y: PiRoot::from_parts(12, 2)?, w: PiSq::int(48) };
            return Ok(Entry { manifold: m, corner, weyl: Some(PiSq::int(48)) });
        }
        "K3" => return known(FourManifold::new("K3", 24, -16, Kodaira::Kod01)?, true),
        _ => {}
    }
    if let Some(a) = parse_args(name, "T2xSigma") {
        if let [g] = a[..] {
            genus(g, name)?;
            return known(FourManifold::new(name, 0, 0, Kodaira::Kod01)?.with_extras(vec![g]), true);
        }
    }
    if let Some(a) = parse_args(name, "SigmaxSigma") {
        if let [g1, g2] = a[..] {
            let p = genus(g1, name)?.checked_mul(genus(g2, name)?).ok_or(Error::Overflow)?;
            let chi = p.checked_mul(4).ok_or(Error::Overflow)?;
            return known(FourManifold::new(name, chi, 0, Kodaira::GeneralType)?.with_extras(vec![g1, g2]), false);
        }
    }
    if let Some(a) = parse_args(name, "CH2_quotient") {
        if let [tau] = a[..] {
            if tau < 1 {
                return Err(Error::InvalidArgument(format!("{name}: signature must be positive")));
            }
            let chi = tau.checked_mul(3).ok_or(Error::Overflow)?;
            // the Bergmann metric is self-dual, so W = 48π²τ = ω
            return known(FourManifold::new(name, chi, tau, Kodaira::GeneralType)?.with_extras(vec![tau]), true);
        }
    }
    Err(Error::UnknownManifold(name.to_string()))
}

fn known(m: FourManifold, weyl_known: bool) -> Result<Entry> {
    let (w, y) = omega(&m, 0, 0)?;
    Ok(Entry { manifold: m, corner: Corner { y, w }, weyl: weyl_known.then_some(w) })
}

/// Names accepted by [`yw_picture`], with `g`, `g1`, `g2`, `tau` integers.
pub const CATALOG: [&str; 6] = ["S4", "CP2", "K3", "T2xSigma(g)", "SigmaxSigma(g1,g2)", "CH2_quotient(tau)"];

/// Builds the picture of a catalog entry or of explicit surface data.
pub fn yw_picture(source: &PictureSource) -> Result<YwPicture> {
    let entry = match source {
        PictureSource::Named(name) => lookup(name)?,
        PictureSource::Explicit { manifold, k, l } => {
            let (w, y) = omega(manifold, *k, *l)?;
            let sum = super::surface::connected_sum(manifold, *k, *l)?;
            // W = ω is known for Kodaira dimension 0 or 1
            let weyl = (manifold.kod == Kodaira::Kod01).then_some(w);
            Entry { manifold: sum, corner: Corner { y, w }, weyl }
        }
    };
    build(entry)
}

pub fn yw_picture_named(name: &str) -> Result<YwPicture> {
    yw_picture(&PictureSource::Named(name.to_string()))
}

fn build(e: Entry) -> Result<YwPicture> {
    let m = e.manifold;
    let floor = hirzebruch_floor(m.tau)?;
    let kuiper = e.weyl.unwrap_or(e.corner.w);
    let candidates = if e.weyl.is_some() { vec![kuiper] } else { vec![floor, e.corner.w] };
    let gap_applies = e.corner.y.signum() > 0;
    let mut pic = YwPicture {
        corner: e.corner,
        sobolev_line: e.corner.y,
        kuiper_line: kuiper,
        weyl_known: e.weyl.is_some(),
        kuiper_candidates: candidates,
        einstein_curve: (PiSq(mul(qi(32), qi(m.chi))?), q(1, 6)),
        gap_curve: (q(1, 3), PiSq(mul(qi(48), qi(m.tau))?)),
        hirzebruch_floor: floor,
        gap_applies,
        unknown_region: false,
        samples: Vec::new(),
        manifold: m,
    };
    pic.samples = sample(&pic);
    pic.unknown_region = pic.samples.iter().any(|s| s.curve == CurveId::Unknown);
    Ok(pic)
}

/// Plot window `(y_lo, y_hi, w_hi)`.
pub fn window(p: &YwPicture) -> (f64, f64, f64) {
    let y = p.corner.y.to_f64();
    let vertex = p.einstein_curve.0.to_f64();
    let span = y.abs().max((6.0 * vertex.max(0.0)).sqrt()).max(20.0);
    let y_lo = (y - span).min(0.0);
    let y_hi = y + 0.15 * span;
    let mut top = vertex.max(p.corner.w.to_f64()).max(p.hirzebruch_floor.to_f64());
    if p.gap_applies {
        top = top.max(gap_curve_f64(p.manifold.tau, y));
    }
    let w_hi = if top > 0.0 { 1.25 * top } else { 100.0 };
    (y_lo, y_hi, w_hi)
}

/// Lower edge of the admissible region at `y`.
pub fn region_floor(p: &YwPicture, y: f64) -> f64 {
    let mut lo = einstein_curve_f64(p.manifold.chi, y).max(p.hirzebruch_floor.to_f64()).max(0.0);
    if p.weyl_known {
        lo = lo.max(p.kuiper_line.to_f64());
    }
    lo
}

const CURVE_SAMPLES: usize = 101;
const REGION_SAMPLES: usize = 41;

fn sample(p: &YwPicture) -> Vec<Sample> {
    let (y_lo, y_hi, w_hi) = window(p);
    let ycorner = p.corner.y.to_f64();
    let wcorner = p.corner.w.to_f64();
    let lin = |a: f64, b: f64, n: usize, k: usize| a + (b - a) * k as f64 / (n - 1) as f64;
    let mut out = Vec::new();
    let mut push = |curve, y, w| out.push(Sample { curve, y, w });
    for k in 0..CURVE_SAMPLES {
        let y = lin(y_lo, y_hi, CURVE_SAMPLES, k);
        let w = einstein_curve_f64(p.manifold.chi, y);
        if w >= 0.0 {
            push(CurveId::Einstein, y, w);
        }
    }
    if p.gap_applies {
        for k in 0..CURVE_SAMPLES {
            let y = lin(0.0, y_hi, CURVE_SAMPLES, k);
            let w = gap_curve_f64(p.manifold.tau, y);
            if w >= 0.0 && w <= w_hi {
                push(CurveId::Gap, y, w);
            }
        }
    }
    for (id, w) in [(CurveId::Floor, p.hirzebruch_floor.to_f64()), (CurveId::Kuiper, p.kuiper_line.to_f64())] {
        push(id, y_lo, w);
        push(id, ycorner, w);
    }
    if !p.weyl_known {
        for c in &p.kuiper_candidates {
            push(CurveId::KuiperCandidate, y_lo, c.to_f64());
            push(CurveId::KuiperCandidate, ycorner, c.to_f64());
        }
    }
    push(CurveId::Sobolev, ycorner, 0.0);
    push(CurveId::Sobolev, ycorner, w_hi);
    push(CurveId::Corner, ycorner, wcorner);
    for i in 0..REGION_SAMPLES {
        let y = lin(y_lo, ycorner, REGION_SAMPLES, i);
        let lo = region_floor(p, y);
        for j in 0..REGION_SAMPLES {
            let w = lin(0.0, w_hi, REGION_SAMPLES, j);
            if w < lo {
                continue;
            }
            let open = !p.weyl_known && y < ycorner && w < wcorner;
            push(if open { CurveId::Unknown } else { CurveId::Region }, y, w);
        }
    }
    out
}

fn coefficient(c: num_rational::Ratio<i64>) -> String {
    if *c.denom() == 1 {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// `- x`, or `+ |x|` when `x` is printed negative.
fn minus(x: &str) -> String {
    match x.strip_prefix('-') {
        Some(rest) => format!("+ {rest}"),
        None => format!("- {x}"),
    }
}

/// Exact description lines shared by the CSV header and the SVG.
pub fn header_lines(p: &YwPicture) -> Vec<String> {
    let m = &p.manifold;
    let kod = match m.kod {
        Kodaira::GeneralType => "general_type",
        Kodaira::Kod01 => "kod01",
        Kodaira::Other => "other",
    };
    let mut lines = vec![
        format!("name={}", m.name),
        format!("chi={} tau={} kod={kod}", m.chi, m.tau),
        format!("corner: ({}, {})", p.corner.y, p.corner.w),
        format!("einstein_curve: w = {} - ({})y^2", p.einstein_curve.0, coefficient(p.einstein_curve.1)),
        format!("gap_curve: w = ({})y^2 {}{}", coefficient(p.gap_curve.0), minus(&p.gap_curve.1.to_string()), if p.gap_applies { "" } else { " (not drawn: Y <= 0)" }),
        format!("hirzebruch_floor: w = {}", p.hirzebruch_floor),
        format!("sobolev_line: y = {}", p.sobolev_line),
    ];
    if p.weyl_known {
        lines.push(format!("kuiper_line: w = {}", p.kuiper_line));
    } else {
        let c: Vec<String> = p.kuiper_candidates.iter().map(|c| c.to_string()).collect();
        lines.push(format!("kuiper_line: unknown, candidates w = {}", c.join(" or ")));
    }
    if p.unknown_region {
        lines.push("unknown_region: rows with curve_id=unknown are neither admissible nor excluded".into());
    }
    lines
}

pub fn picture_csv(p: &YwPicture) -> String {
    let mut s = String::new();
    for line in header_lines(p) {
        let _ = writeln!(s, "# {line}");
    }
    s.push_str("curve_id,y,w\n");
    for r in &p.samples {
        let _ = writeln!(s, "{},{:.9},{:.9}", r.curve.as_str(), r.y, r.w);
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn picture_svg(p: &YwPicture) -> String {
    const W: f64 = 520.0;
    const H: f64 = 400.0;
    const PAD: f64 = 48.0;
    let (y_lo, y_hi, w_hi) = window(p);
    let sx = |y: f64| PAD + (y - y_lo) / (y_hi - y_lo) * (W - 2.0 * PAD);
    let sy = |w: f64| H - PAD - w.clamp(0.0, w_hi) / w_hi * (H - 2.0 * PAD);
    let yc = p.corner.y.to_f64();
    let n = 120;
    let ys: Vec<f64> = (0..=n).map(|k| y_lo + (yc - y_lo) * k as f64 / n as f64).collect();
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(s, "<title>YW-picture of {}</title>", escape(&p.manifold.name));
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);

    let mut region = String::new();
    for y in &ys {
        let _ = write!(region, "{:.2},{:.2} ", sx(*y), sy(region_floor(p, *y)));
    }
    let _ = write!(region, "{:.2},{:.2} {:.2},{:.2}", sx(yc), sy(w_hi), sx(y_lo), sy(w_hi));
    let _ = writeln!(s, r##"<polygon points="{region}" fill="#c8d8f0" stroke="none"/>"##);
    if p.unknown_region {
        let wc = p.corner.w.to_f64();
        let mut open = String::new();
        for y in &ys {
            let _ = write!(open, "{:.2},{:.2} ", sx(*y), sy(region_floor(p, *y).min(wc)));
        }
        let _ = write!(open, "{:.2},{:.2} {:.2},{:.2}", sx(yc), sy(wc), sx(y_lo), sy(wc));
        let _ = writeln!(s, r##"<polygon points="{open}" fill="#eeeeee" stroke="#999999" stroke-dasharray="2,2"/>"##);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12">? ? ? ?</text>"#,
            sx(y_lo + 0.15 * (yc - y_lo)),
            sy(0.5 * (wc + p.hirzebruch_floor.to_f64()))
        );
    }
    // axes
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#, sy(0.0), W - PAD, sy(0.0));
    if y_lo <= 0.0 && y_hi >= 0.0 {
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{PAD}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#, sx(0.0), sx(0.0), H - PAD);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">y</text>"#, W - PAD + 6.0, sy(0.0) + 4.0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">w</text>"#, sx(0.0_f64.max(y_lo)) + 4.0, PAD - 6.0);

    let polyline = |s: &mut String, id: CurveId, color: &str, dash: &str| {
        let pts: Vec<String> = p
            .samples
            .iter()
            .filter(|r| r.curve == id)
            .map(|r| format!("{:.2},{:.2}", sx(r.y), sy(r.w)))
            .collect();
        if pts.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" stroke-dasharray="{dash}"/>"#,
                pts.join(" ")
            );
        }
    };
    polyline(&mut s, CurveId::Einstein, "#1f4e9c", "none");
    polyline(&mut s, CurveId::Gap, "#9c1f4e", "none");
    polyline(&mut s, CurveId::Floor, "#555555", "6,3");
    polyline(&mut s, CurveId::Sobolev, "#2e7d32", "4,4");
    if p.weyl_known {
        polyline(&mut s, CurveId::Kuiper, "#e65100", "4,4");
    }
    let _ = writeln!(
        s,
        r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#,
        sx(yc),
        sy(p.corner.w.to_f64())
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="11">({}, {})</text>"#,
        sx(yc) + 6.0,
        sy(p.corner.w.to_f64()) - 6.0,
        escape(&p.corner.y.to_string()),
        escape(&p.corner.w.to_string())
    );
    for (k, line) in header_lines(p).iter().skip(3).enumerate() {
        let _ = writeln!(s, r#"<text x="{PAD}" y="{:.2}" font-size="10">{}</text>"#, 14.0 + 11.0 * k as f64, escape(line));
    }
    s.push_str("</svg>\n");
    s
}

/// `einstein_curve(χ, Y) = ω` and `ω ≥ 48π²|τ|` at the corner.
pub fn corner_checks(p: &YwPicture) -> Result<(bool, bool)> {
    let on_curve = einstein_curve(p.manifold.chi, p.corner.y)? == p.corner.w;
    let above_floor = p.corner.w >= p.hirzebruch_floor;
    Ok((on_curve, above_floor))
}

/// `gap_curve(τ, Y)` at the corner.
pub fn gap_at_corner(p: &YwPicture) -> Result<PiSq> {
    gap_curve(p.manifold.tau, p.corner.y)
}
