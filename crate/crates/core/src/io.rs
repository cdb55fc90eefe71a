//! JSON input specs and CSV dumps.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureScalars;
use crate::cylinder::{neck_metric_with, product_scalar_curvature, CutoffKind, FrameFamily, MilnorMetric, NeckOptions, NeckProfile};
use crate::error::{Error, Result};
use crate::grid::ChartGrid;
use crate::metric::{generators, ChartMetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Flat,
    RoundSphereStereographic,
    RoundSphereSinh,
    FubiniStudyAffine,
    FubiniStudySinh,
    TrigPerturbed,
    Explicit,
}

/// `{"kind": "chart", ...}`. `origin` defaults to a grid centred on zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub dim: usize,
    pub extents: Vec<usize>,
    pub spacing: Vec<f64>,
    pub periodic: Vec<bool>,
    pub generator: Generator,
    /// One row-major `dim × dim` matrix per node, in flat order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<f64>>,
    /// Perturbation size for `trig_perturbed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

/// `{"kind": "neck", "h": [a, b, c], "L": …, "L_bar": …, "margin": …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeckSpec {
    pub h: [f64; 3],
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "L_bar")]
    pub l_bar: f64,
    /// Defaults to `L/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default)]
    pub cutoff: CutoffKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spec {
    Chart(ChartSpec),
    Neck(NeckSpec),
}

fn schema(location: &str, message: impl Into<String>) -> Error {
    Error::Schema { location: location.to_string(), message: message.into() }
}

/// Parses a spec, reporting JSON errors with line and column.
pub fn parse_spec(text: &str) -> Result<Spec> {
    serde_json::from_str(text).map_err(|e| schema(&format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

impl ChartSpec {
    pub fn grid(&self) -> Result<ChartGrid<f64>> {
        let n = self.dim;
        if n < 3 {
            return Err(schema("dim", format!("dimension {n} is below 3")));
        }
        for (field, len) in [("extents", self.extents.len()), ("spacing", self.spacing.len()), ("periodic", self.periodic.len())] {
            if len != n {
                return Err(schema(field, format!("has {len} entries for dimension {n}")));
            }
        }
        let built = match &self.origin {
            Some(o) if o.len() != n => return Err(schema("origin", format!("has {} entries for dimension {n}", o.len()))),
            Some(o) => ChartGrid::with_origin(self.extents.clone(), self.spacing.clone(), self.periodic.clone(), o.clone()),
            None => ChartGrid::new(self.extents.clone(), self.spacing.clone(), self.periodic.clone()),
        };
        built.map_err(|e| match e {
            Error::GridTooSmall(m) => schema("extents", m),
            Error::InvalidGrid(m) => schema("spacing", m),
            e => e,
        })
    }

    pub fn metric(&self) -> Result<ChartMetric<f64>> {
        let grid = self.grid()?;
        if self.components.is_some() != (self.generator == Generator::Explicit) {
            return Err(schema("components", "required exactly when generator is \"explicit\""));
        }
        if self.amplitude.is_some() && self.generator != Generator::TrigPerturbed {
            return Err(schema("amplitude", "only used by generator \"trig_perturbed\""));
        }
        let four = |what: &str| {
            if self.dim == 4 {
                Ok(())
            } else {
                Err(schema("dim", format!("generator {what} needs dimension 4")))
            }
        };
        match self.generator {
            Generator::Flat => generators::flat(grid),
            Generator::RoundSphereStereographic => generators::round_sphere_stereographic(grid),
            Generator::RoundSphereSinh => generators::round_sphere_sinh(grid),
            Generator::FubiniStudyAffine => {
                four("fubini_study_affine")?;
                generators::fubini_study_affine(grid)
            }
            Generator::FubiniStudySinh => {
                four("fubini_study_sinh")?;
                generators::fubini_study_sinh(grid)
            }
            Generator::TrigPerturbed => {
                let a = self.amplitude.unwrap_or(0.2);
                if !(0.0..1.0).contains(&a) {
                    return Err(schema("amplitude", format!("{a} is outside [0, 1)")));
                }
                generators::trig_perturbed(grid, a)
            }
            Generator::Explicit => {
                let comps = self.components.as_deref().unwrap_or_default();
                if comps.len() != grid.len() {
                    return Err(schema("components", format!("{} matrices for {} nodes", comps.len(), grid.len())));
                }
                if let Some(k) = comps.iter().position(|c| c.len() != self.dim * self.dim) {
                    return Err(schema(&format!("components[{k}]"), format!("needs {} entries", self.dim * self.dim)));
                }
                ChartMetric::from_matrices(grid, comps)
            }
        }
    }
}

impl NeckSpec {
    pub fn milnor(&self) -> Result<MilnorMetric<f64>> {
        MilnorMetric::new(self.h[0], self.h[1], self.h[2]).map_err(|e| schema("h", e.to_string()))
    }

    pub fn margin(&self) -> f64 {
        self.margin.unwrap_or(0.5 * self.l)
    }

    pub fn options(&self) -> NeckOptions<f64> {
        NeckOptions { cutoff: self.cutoff, step: self.step }
    }

    pub fn neck(&self) -> Result<NeckProfile<f64>> {
        for (field, v) in [("L", self.l), ("L_bar", self.l_bar)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(schema(field, format!("{v} must be positive")));
            }
        }
        if !(self.margin() >= 0.0) {
            return Err(schema("margin", "must be non-negative"));
        }
        if let Some(s) = self.step {
            if !(s > 0.0) {
                return Err(schema("step", "must be positive"));
            }
        }
        neck_metric_with(self.milnor()?, self.l, self.l_bar, self.margin(), self.options())
    }
}

/// One row per interior node: indices, `R`, `|W|`, `√det g`.
pub fn curvature_csv(grid: &ChartGrid<f64>, c: &CurvatureScalars<f64>) -> String {
    let n = grid.dim();
    let mut s = String::new();
    for d in 0..n {
        let _ = write!(s, "i{d},");
    }
    s.push_str("R,W_norm,sqrt_det_g\n");
    let mut m = vec![0usize; n];
    for k in 0..c.region.len() {
        c.region.multi_into(k, &mut m);
        for v in &m {
            let _ = write!(s, "{v},");
        }
        let _ = writeln!(s, "{:.12e},{:.12e},{:.12e}", c.scalar[k], c.weyl_norm_sq[k].max(0.0).sqrt(), c.volume_density[k]);
    }
    s
}

/// Columns `t, a, b, c, R_slice, R_product`.
pub fn profile_csv(family: &FrameFamily<f64>) -> String {
    let slice = family.slice_scalar();
    let product = product_scalar_curvature(family);
    let mut s = String::from("t,a,b,c,R_slice,R_product\n");
    for k in 0..family.len() {
        let [a, b, c] = family.coefficients(k);
        let _ = writeln!(s, "{:.9},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}", family.t(k), a, b, c, slice[k], product[k]);
    }
    s
}
