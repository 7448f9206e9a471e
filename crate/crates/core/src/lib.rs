//! Numerical laboratory for separable hypersurfaces
//! `f_1(x_1) + … + f_n(x_n) = 0` in Euclidean `n`-space.
//!
//! Sectional curvature is computed two independent ways: a closed form in
//! the first and second derivatives of the `f_k`, and the general Gauss
//! equation for implicit hypersurfaces applied to an orthonormalized
//! tangent plane. On top of that sit residuals for the flatness and
//! constant-curvature conditions, generators for the classified families,
//! and seeded constancy scans.
//!
//! All numeric routines are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases below fix the usual `f64` instantiation.

// `!(x <= tol)` is the NaN-rejecting form throughout.
#![allow(clippy::should_implement_trait, clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod error;
pub mod families;
pub mod funcalc;
pub mod geometry;
pub mod linalg;
pub mod scalar;

pub use error::{Error, Result};
pub use funcalc::{Domain, Expr, Function1D, Jet2};
pub use geometry::SeparableSurface;
pub use scalar::{Scalar, Tolerances};

pub type Jet = funcalc::Jet2<f64>;
pub type Point = geometry::SurfacePoint<f64>;
pub type Frame = geometry::TangentFrame<f64>;
pub type Plane = curvature::PlaneSection<f64>;
pub type Sample = curvature::CurvatureSample<f64>;
pub type Report = curvature::CurvatureReport<f64>;
pub type Policy = curvature::ScanPolicy<f64>;
