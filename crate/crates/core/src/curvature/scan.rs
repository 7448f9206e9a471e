use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sectional::{
    constk_residual, flatness_residual, random_tangent_plane, sectional_oracle, sectional_special,
    PlaneSection,
};
use crate::error::{Error, Result};
use crate::geometry::{unit_normal, SeparableSurface, SurfacePoint};
use crate::scalar::{compensated_sum, Scalar, Tolerances};

/// Which planes a scan evaluates at every point.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanPolicy<T> {
    /// Every pair of non-height coordinate tangent vectors.
    pub coordinate_pairs: bool,
    /// Random oblique planes per point.
    pub oblique_planes: usize,
    /// Seeds the oblique-plane generator; point `k` uses its own stream.
    pub seed: u64,
    /// When set, coordinate-pair records also carry the constant-curvature
    /// residual for `K = target_k` (that is, `K0 = 4 target_k`).
    pub target_k: Option<T>,
}

impl<T> Default for ScanPolicy<T> {
    fn default() -> Self {
        Self {
            coordinate_pairs: true,
            oblique_planes: 0,
            seed: 0,
            target_k: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PlaneKind<T> {
    /// 0-based coordinate indices.
    Coordinate(usize, usize),
    Oblique(PlaneSection<T>),
}

/// Curvature of one plane at one point, by both engines where applicable.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSample<T> {
    pub point_index: usize,
    pub point: SurfacePoint<T>,
    pub plane: PlaneKind<T>,
    /// Closed form; only defined for coordinate planes.
    pub k_special: Option<T>,
    pub k_oracle: T,
    pub residual_flat: Option<T>,
    pub residual_constk: Option<T>,
    /// Closed form and oracle disagree beyond the equivalence tolerance.
    pub flagged: bool,
}

impl<T: Scalar> CurvatureSample<T> {
    /// The value used for statistics: closed form when present, else oracle.
    pub fn k(&self) -> T {
        self.k_special.unwrap_or(self.k_oracle)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub point_index: usize,
    pub error: Error,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary<T> {
    pub count: usize,
    pub min: T,
    pub max: T,
    pub mean: T,
    pub spread: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict<T> {
    Constant { estimate: T },
    NonConstant { spread: T },
}

impl<T: Scalar> Verdict<T> {
    pub fn is_constant(&self) -> bool {
        matches!(self, Verdict::Constant { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport<T> {
    pub seed: u64,
    pub constancy_tol: T,
    pub records: Vec<CurvatureSample<T>>,
    pub failures: Vec<PointFailure>,
    pub summary: Summary<T>,
    pub verdict: Verdict<T>,
    pub flagged: usize,
}

impl<T: Scalar> CurvatureReport<T> {
    pub fn regular_points(&self) -> usize {
        let mut idx: Vec<usize> = self.records.iter().map(|r| r.point_index).collect();
        idx.dedup();
        idx.len()
    }

    /// Largest `|k_special - k_oracle| / max(1, |k_oracle|)` over the records.
    pub fn max_equivalence_gap(&self) -> T {
        self.records
            .iter()
            .filter_map(|r| {
                r.k_special
                    .map(|ks| (ks - r.k_oracle).abs() / r.k_oracle.abs().max(T::one()))
            })
            .fold(T::zero(), T::max)
    }
}

/// Evaluates the coordinate plane `(i, j)` at `p` with both engines.
pub fn evaluate_pair<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    i: usize,
    j: usize,
    target_k: Option<T>,
    tol: &Tolerances<T>,
) -> Result<CurvatureSample<T>> {
    let ks = sectional_special(s, p, i, j, tol)?;
    let sec = PlaneSection::coordinate(s, p, i, j, tol)?;
    let ko = sectional_oracle(s, p, &sec, tol)?;
    let flat = flatness_residual(s, p, i, j)?;
    let constk = match target_k {
        Some(k) => Some(constk_residual(s, p, i, j, T::lit(4.0) * k)?),
        None => None,
    };
    Ok(CurvatureSample {
        point_index: 0,
        point: p.clone(),
        plane: PlaneKind::Coordinate(i.min(j), i.max(j)),
        k_special: Some(ks),
        k_oracle: ko,
        residual_flat: Some(flat),
        residual_constk: constk,
        flagged: !((ks - ko).abs() <= tol.equivalence * ko.abs().max(T::one())),
    })
}

/// Per-point generator for oblique planes, independent of evaluation order.
pub fn plane_rng(seed: u64, point_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(point_index as u64 + 1);
    rng
}

fn evaluate_point<T: Scalar>(
    s: &SeparableSurface,
    idx: usize,
    p: &SurfacePoint<T>,
    policy: &ScanPolicy<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<CurvatureSample<T>>> {
    let mut out = Vec::new();
    if policy.coordinate_pairs {
        let axes: Vec<usize> = s.tangent_axes().collect();
        for (a, &i) in axes.iter().enumerate() {
            for &j in &axes[a + 1..] {
                let mut rec = evaluate_pair(s, p, i, j, policy.target_k, tol)?;
                rec.point_index = idx;
                out.push(rec);
            }
        }
    }
    if policy.oblique_planes > 0 {
        let normal = unit_normal(s, p, tol)?;
        let mut rng = plane_rng(policy.seed, idx);
        for _ in 0..policy.oblique_planes {
            let sec = random_tangent_plane(&normal, &mut rng, tol)?;
            let ko = sectional_oracle(s, p, &sec, tol)?;
            out.push(CurvatureSample {
                point_index: idx,
                point: p.clone(),
                plane: PlaneKind::Oblique(sec),
                k_special: None,
                k_oracle: ko,
                residual_flat: None,
                residual_constk: None,
                flagged: false,
            });
        }
    }
    Ok(out)
}

/// Evaluates curvature over all samples and decides whether it is constant
/// (`spread ≤ tol.constancy`).
///
/// Points are processed in parallel; records come back in sample order and
/// statistics are reduced sequentially, so the report for a given seed does
/// not depend on the thread count. A point that fails (regularity, domain)
/// is recorded in `failures` and skipped.
pub fn scan_constancy<T: Scalar>(
    s: &SeparableSurface,
    samples: &[SurfacePoint<T>],
    policy: &ScanPolicy<T>,
    tol: &Tolerances<T>,
) -> Result<CurvatureReport<T>> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if !policy.coordinate_pairs && policy.oblique_planes == 0 {
        return Err(Error::InvalidParameter(
            "scan policy selects no planes".into(),
        ));
    }
    let per_point: Vec<Result<Vec<CurvatureSample<T>>>> = samples
        .par_iter()
        .enumerate()
        .map(|(idx, p)| evaluate_point(s, idx, p, policy, tol))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (idx, r) in per_point.into_iter().enumerate() {
        match r {
            Ok(recs) => records.extend(recs),
            Err(e) if e.is_point_failure() => failures.push(PointFailure {
                point_index: idx,
                error: e,
            }),
            Err(e) => return Err(e),
        }
    }
    let regular = samples.len() - failures.len();
    if regular < 2 || records.is_empty() {
        return Err(Error::TooFewSamples(regular));
    }

    let ks: Vec<T> = records.iter().map(CurvatureSample::k).collect();
    let min = ks.iter().copied().fold(T::infinity(), T::min);
    let max = ks.iter().copied().fold(T::neg_infinity(), T::max);
    let mean = compensated_sum(ks.iter().copied()) / T::from_usize(ks.len()).unwrap();
    let spread = max - min;
    let summary = Summary {
        count: ks.len(),
        min,
        max,
        mean,
        spread,
    };
    let verdict = if spread <= tol.constancy {
        Verdict::Constant { estimate: mean }
    } else {
        Verdict::NonConstant { spread }
    };
    let flagged = records.iter().filter(|r| r.flagged).count();
    Ok(CurvatureReport {
        seed: policy.seed,
        constancy_tol: tol.constancy,
        records,
        failures,
        summary,
        verdict,
        flagged,
    })
}
