//! Yamabe quotient, trial-function upper bounds, perturbation brackets and
//! the Sobolev residual.

mod bracket;
mod chart;
mod cylinder;
mod optimize;
mod trial;

pub use bracket::{
    bracket_constants, certify_neck, neck_bracket, perturbation_bracket, perturbation_for_target, sphere_yamabe,
    NeckCertificate, PerturbationSizes, YamabeBracket, BRACKET_GUARD,
};
pub use chart::{
    alpha, energy, minimize_quotient, minimize_quotient_supported, quotient, sobolev_residual, Ansatz, EnergyParts,
    MinimizeOptions, YamabeEstimate, YamabeProblem,
};
pub use cylinder::{minimize_cylinder, minimize_neck, CylinderProblem};
pub use optimize::{descend, DescentOptions, DescentResult, QuotientProblem};
pub use trial::{Support, TrialFunction, TAPER};
