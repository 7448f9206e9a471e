//! Separable hypersurfaces, points on them, and their extrinsic frame.

mod frame;
mod point;
mod sampling;
mod surface;

pub use frame::{tangent_frame, unit_normal, TangentFrame};
pub use point::{solve_height, SurfacePoint, MAX_ITER};
pub use sampling::{sample_points, SampleFailure, Sampled, SamplingBox, ATTEMPTS_PER_POINT};
pub use surface::{LocalJets, SeparableSurface};
