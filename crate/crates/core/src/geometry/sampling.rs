use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::point::{solve_height, SurfacePoint};
use super::surface::SeparableSurface;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances};

/// Where to draw the non-height coordinates, and where to look for the height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingBox {
    /// One `(lo, hi)` per non-height coordinate, in coordinate order.
    pub ranges: Vec<(f64, f64)>,
    pub bracket: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleFailure<T> {
    pub partial: Vec<T>,
    pub error: Error,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sampled<T> {
    pub points: Vec<SurfacePoint<T>>,
    pub failures: Vec<SampleFailure<T>>,
}

/// Attempts per requested point before giving up.
pub const ATTEMPTS_PER_POINT: usize = 20;

/// Draws up to `count` regular points, uniformly in the box and lifted by
/// [`solve_height`]. The sequence depends only on `seed`.
///
/// Points whose lift fails (no root in the bracket, regularity) are kept in
/// `failures`; malformed input is an error.
pub fn sample_points<T: Scalar>(
    s: &SeparableSurface,
    sbox: &SamplingBox,
    count: usize,
    seed: u64,
    tol: &Tolerances<T>,
) -> Result<Sampled<T>> {
    if sbox.ranges.len() + 1 != s.dim() {
        return Err(Error::Dimension {
            expected: s.dim() - 1,
            got: sbox.ranges.len(),
        });
    }
    if let Some(&(lo, hi)) = sbox
        .ranges
        .iter()
        .find(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite())
    {
        return Err(Error::InvalidParameter(format!(
            "sampling range [{lo}, {hi}] is not a finite interval"
        )));
    }
    let bracket = (T::lit(sbox.bracket.0), T::lit(sbox.bracket.1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Sampled {
        points: Vec::with_capacity(count),
        failures: Vec::new(),
    };
    let mut attempts = 0;
    while out.points.len() < count && attempts < count * ATTEMPTS_PER_POINT {
        attempts += 1;
        let partial: Vec<T> = sbox
            .ranges
            .iter()
            .map(|&(lo, hi)| {
                T::lit(if lo < hi {
                    rng.random_range(lo..hi)
                } else {
                    lo
                })
            })
            .collect();
        match solve_height(s, &partial, bracket, tol) {
            Ok(p) => out.points.push(p),
            Err(e) if e.is_point_failure() => {
                out.failures.push(SampleFailure { partial, error: e })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}
