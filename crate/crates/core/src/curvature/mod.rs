//! Sectional curvature by the closed form and by the implicit-surface
//! Gauss equation, curvature residuals, and constancy scans.

mod scan;
mod sectional;

pub use scan::{
    evaluate_pair, plane_rng, scan_constancy, CurvatureReport, CurvatureSample, PlaneKind,
    PointFailure, ScanPolicy, Summary, Verdict,
};
pub use sectional::{
    check_pair, constk_residual, constk_scale, flatness_residual, hessian_pairing,
    random_tangent_plane, sectional_oracle, sectional_special, PlaneSection, MAX_PLANE_RETRIES,
};
