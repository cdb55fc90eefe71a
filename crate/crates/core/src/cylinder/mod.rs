//! Cylinder metrics `g(t) + dt²` on S³ × ℝ built from diagonal
//! left-invariant families, with closed-form curvature.

mod chart;
mod cutoff;
mod family;
mod approx;
mod milnor;

pub use chart::{euler_chart_grid, family_to_chart, frame_to_chart, milnor_pullback};
pub use cutoff::{cutoff_phi, CutoffKind, CutoffProfile, SMOOTH_MARGIN};
pub use family::{
    interpolate_family, max_scalar_jump, neck_metric, neck_metric_with, product_scalar_curvature,
    CoefficientCurve, FrameFamily, Interpolation, Jet3, NeckOptions, NeckProfile, TGrid, NECK_GUARD,
};
pub use approx::{approximating_neck, fit_jump_constant, ApproximationStep, JumpFit};
pub use milnor::{
    frame_curvature, product_scalar_at, slice_scalar, slice_volume, weyl_density, FrameCurvature,
    MilnorMetric,
};
