//! Built-in certification suites.
//!
//! `flat`: hyperplane, parabolic cylinder and square-root Cobb-Douglas must
//! have every coordinate-plane curvature within [`CERTIFY_TOL`] of zero;
//! a perturbed Cobb-Douglas and the exponential surface must scan as
//! non-constant. `constant`: hyperspheres of several radii must scan to
//! `1/r²` including oblique planes; the square-root Cobb-Douglas must fail
//! every nonzero constant-curvature residual and the exponential surface
//! must scan as non-constant.

use clap::ValueEnum;
use serde::Serialize;

use sepcurv::curvature::{constk_residual, constk_scale, scan_constancy, ScanPolicy, Verdict};
use sepcurv::families::{exponential_control, perturbed_cobb_douglas, Family, FamilySpec};
use sepcurv::funcalc::Domain;
use sepcurv::{Report, Tolerances};

/// Bound on `|K|` for flat families and on the spread for hyperspheres.
pub const CERTIFY_TOL: f64 = 1e-9;
/// Minimum spread a negative control must show.
pub const CONTROL_SPREAD: f64 = 1e-3;
pub const RADII: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
pub const OBLIQUE_PLANES: usize = 20;
/// Nonzero `K0` values the Cobb-Douglas control is tested against.
pub const CONTROL_K0: [f64; 4] = [-4.0, -1.0, 1.0, 4.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Flat,
    Constant,
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub points: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            points: 100,
            seed: 42,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub suite: Suite,
    pub n: usize,
    pub case: String,
    pub expectation: String,
    pub observed: String,
    pub passed: bool,
}

fn scan(
    fam: &Family,
    policy: &ScanPolicy<f64>,
    cfg: &SuiteConfig,
    tol: &Tolerances<f64>,
) -> sepcurv::Result<Report> {
    let pts = fam.sample::<f64>(cfg.points, cfg.seed, tol)?.points;
    scan_constancy(&fam.surface, &pts, policy, tol)
}

fn max_abs_k(rep: &Report) -> f64 {
    rep.records.iter().map(|r| r.k().abs()).fold(0.0, f64::max)
}

fn control(
    suite: Suite,
    n: usize,
    fam: &Family,
    cfg: &SuiteConfig,
    tol: &Tolerances<f64>,
) -> sepcurv::Result<CaseResult> {
    let rep = scan(fam, &ScanPolicy::default(), cfg, tol)?;
    let spread = rep.summary.spread;
    Ok(CaseResult {
        suite,
        n,
        case: fam.label.clone(),
        expectation: format!("non-constant, spread > {CONTROL_SPREAD:e}"),
        observed: format!("spread {spread:e}"),
        passed: matches!(rep.verdict, Verdict::NonConstant { .. }) && spread > CONTROL_SPREAD,
    })
}

fn flat_cases(n: usize) -> Vec<FamilySpec> {
    vec![
        FamilySpec::Hyperplane {
            coeffs: vec![1.0; n],
            offset: 0.0,
        },
        FamilySpec::Cylinder {
            n,
            profile: "x^2".into(),
            profile_domain: Domain::REAL_LINE,
            linear: None,
            offset: 0.0,
            profile_coordinate: 1,
        },
        FamilySpec::CobbDouglasSqrt {
            n,
            a: 1.0,
            shifts: None,
        },
    ]
}

fn flat_suite(
    n: usize,
    cfg: &SuiteConfig,
    tol: &Tolerances<f64>,
) -> sepcurv::Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for spec in flat_cases(n) {
        let fam = spec.build()?;
        let rep = scan(&fam, &ScanPolicy::default(), cfg, tol)?;
        let worst = max_abs_k(&rep);
        out.push(CaseResult {
            suite: Suite::Flat,
            n,
            case: fam.label,
            expectation: format!("|K| <= {CERTIFY_TOL:e}"),
            observed: format!("max |K| {worst:e} over {} planes", rep.summary.count),
            passed: rep.failures.is_empty() && worst <= CERTIFY_TOL,
        });
    }
    out.push(control(
        Suite::Flat,
        n,
        &perturbed_cobb_douglas(n, 0.05)?,
        cfg,
        tol,
    )?);
    out.push(control(Suite::Flat, n, &exponential_control(n)?, cfg, tol)?);
    Ok(out)
}

fn constant_suite(
    n: usize,
    cfg: &SuiteConfig,
    tol: &Tolerances<f64>,
) -> sepcurv::Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for r in RADII {
        let fam = FamilySpec::Hypersphere {
            n,
            radius: r,
            center: None,
        }
        .build()?;
        let policy = ScanPolicy {
            oblique_planes: OBLIQUE_PLANES,
            seed: cfg.seed,
            ..ScanPolicy::default()
        };
        let rep = scan(&fam, &policy, cfg, tol)?;
        let want = 1.0 / (r * r);
        let s = rep.summary;
        out.push(CaseResult {
            suite: Suite::Constant,
            n,
            case: fam.label,
            expectation: format!("K = {want}, spread <= {CERTIFY_TOL:e}"),
            observed: format!("mean {}, spread {:e}", s.mean, s.spread),
            passed: rep.failures.is_empty()
                && s.spread <= CERTIFY_TOL
                && (s.mean - want).abs() <= CERTIFY_TOL * want.max(1.0),
        });
    }

    let fam = FamilySpec::CobbDouglasSqrt {
        n,
        a: 1.0,
        shifts: None,
    }
    .build()?;
    let pts = fam.sample::<f64>(cfg.points, cfg.seed, tol)?.points;
    let axes: Vec<usize> = fam.surface.tangent_axes().collect();
    let mut tests = 0usize;
    let mut failed = 0usize;
    let mut smallest = f64::INFINITY;
    for p in &pts {
        for (a, &i) in axes.iter().enumerate() {
            for &j in &axes[a + 1..] {
                for k0 in CONTROL_K0 {
                    let r = constk_residual(&fam.surface, p, i, j, k0)?;
                    let scale = constk_scale(&fam.surface, p, i, j, k0)?;
                    tests += 1;
                    smallest = smallest.min(r.abs() / scale);
                    if r.abs() > tol.equivalence * scale {
                        failed += 1;
                    }
                }
            }
        }
    }
    out.push(CaseResult {
        suite: Suite::Constant,
        n,
        case: format!("{} vs K0 in {CONTROL_K0:?}", fam.label),
        expectation: "every residual nonzero".into(),
        observed: format!("{failed}/{tests} nonzero, min relative {smallest:e}"),
        passed: tests > 0 && failed == tests,
    });
    out.push(control(
        Suite::Constant,
        n,
        &exponential_control(n)?,
        cfg,
        tol,
    )?);
    Ok(out)
}

pub fn run_suite(
    suite: Suite,
    dims: &[usize],
    cfg: &SuiteConfig,
    tol: &Tolerances<f64>,
) -> sepcurv::Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for &n in dims {
        out.extend(match suite {
            Suite::Flat => flat_suite(n, cfg, tol)?,
            Suite::Constant => constant_suite(n, cfg, tol)?,
        });
    }
    Ok(out)
}

pub fn write_table(results: &[CaseResult], w: &mut dyn std::io::Write) -> std::io::Result<()> {
    let width = results
        .iter()
        .map(|r| r.case.len())
        .max()
        .unwrap_or(4)
        .max(4);
    let exp_width = results
        .iter()
        .map(|r| r.expectation.len())
        .max()
        .unwrap_or(11)
        .max(11);
    writeln!(
        w,
        "{:<8} {:>2}  {:<width$}  {:<exp_width$}  {:<6}  observed",
        "suite", "n", "case", "expectation", "result"
    )?;
    for r in results {
        let suite = match r.suite {
            Suite::Flat => "flat",
            Suite::Constant => "constant",
        };
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        writeln!(
            w,
            "{suite:<8} {:>2}  {:<width$}  {:<exp_width$}  {verdict:<6}  {}",
            r.n, r.case, r.expectation, r.observed
        )?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(w, "{} case(s), {failed} failed", results.len())
}
