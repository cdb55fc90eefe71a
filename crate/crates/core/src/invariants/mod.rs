//! Exact four-manifold invariant arithmetic and YW-pictures.

mod exact;
mod picture;
mod surface;

pub use exact::{q, qi, sum_of_roots_cmp, PiRoot, PiSq, Q};
pub use picture::{
    corner_checks, gap_at_corner, header_lines, picture_csv, picture_svg, region_floor, window, yw_picture,
    yw_picture_named, Corner, CurveId, PictureSource, Sample, YwPicture, CATALOG,
};
pub use surface::{
    connected_sum, einstein_curve, einstein_curve_f64, gap_curve, gap_curve_f64, hirzebruch_floor,
    lebrun_limit_values, lebrun_restriction, omega, omega_general_type, omega_kod01, omega_proof_form,
    omega_statement_form, FourManifold, Kodaira, LeBrunCheck,
};
