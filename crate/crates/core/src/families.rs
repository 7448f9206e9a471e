//! Generators for the separable hypersurfaces of constant sectional
//! curvature: hyperplanes, cylinders over a plane curve, the square-root
//! Cobb-Douglas graph (and the logarithmic ODE solutions it comes from),
//! and hyperspheres. Also two non-examples used as negative controls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcalc::{Domain, Expr, Func, Function1D};
use crate::geometry::{sample_points, Sampled, SamplingBox, SeparableSurface};
use crate::scalar::{Scalar, Tolerances};

/// Declarative description of a classified family.
///
/// Surfaces are built with the last coordinate as height. Index-valued
/// fields are 1-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// `Σ λ_k x_k + offset = 0`.
    Hyperplane {
        coeffs: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// `profile(x_c) + Σ_{k≠c} λ_k x_k + offset = 0`: a plane curve times `R^{n-2}`.
    Cylinder {
        n: usize,
        #[serde(default = "default_profile")]
        profile: String,
        #[serde(default = "default_domain")]
        profile_domain: Domain,
        /// `λ_k` for the non-profile coordinates in order, the last one
        /// belonging to the height; defaults to all ones.
        #[serde(default)]
        linear: Option<Vec<f64>>,
        #[serde(default)]
        offset: f64,
        #[serde(default = "one")]
        profile_coordinate: usize,
    },
    /// `x_n + μ_n = A √((x_1 + μ_1) ⋯ (x_{n-1} + μ_{n-1}))`.
    CobbDouglasSqrt {
        n: usize,
        #[serde(alias = "A", default = "unit")]
        a: f64,
        #[serde(default)]
        shifts: Option<Vec<f64>>,
    },
    /// `|x - c| = r`.
    Hypersphere {
        n: usize,
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `f_i = -λ log(x_i + μ_i) + β_i` for `i < n`, `f_n = 2λ log(x_n + μ_n) + β_n`.
    LogOde {
        n: usize,
        lambda: f64,
        #[serde(default)]
        shifts: Option<Vec<f64>>,
        #[serde(default)]
        betas: Option<Vec<f64>>,
    },
}

fn default_profile() -> String {
    "x^2".into()
}

fn default_domain() -> Domain {
    Domain::REAL_LINE
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

/// What a scan of the family should find.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Expected {
    Flat,
    /// Constant sectional curvature `K`.
    Constant(f64),
    NonConstant,
}

impl Expected {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Expected::Flat => Some(0.0),
            Expected::Constant(k) => Some(k),
            Expected::NonConstant => None,
        }
    }
}

/// A built surface together with a sampling box on which every draw lifts
/// to a regular point.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub label: String,
    pub surface: SeparableSurface,
    pub sampling: SamplingBox,
    pub expected: Expected,
}

impl Family {
    pub fn sample<T: Scalar>(
        &self,
        count: usize,
        seed: u64,
        tol: &Tolerances<T>,
    ) -> Result<Sampled<T>> {
        sample_points(&self.surface, &self.sampling, count, seed, tol)
    }
}

impl FamilySpec {
    pub fn n(&self) -> usize {
        match self {
            FamilySpec::Hyperplane { coeffs, .. } => coeffs.len(),
            FamilySpec::Cylinder { n, .. }
            | FamilySpec::CobbDouglasSqrt { n, .. }
            | FamilySpec::Hypersphere { n, .. }
            | FamilySpec::LogOde { n, .. } => *n,
        }
    }

    pub fn build(&self) -> Result<Family> {
        let n = self.n();
        check_dim(n)?;
        match self {
            FamilySpec::Hyperplane { coeffs, offset } => {
                let surface = make_hyperplane(coeffs, *offset)?;
                let ranges = vec![(-1.0, 1.0); n - 1];
                let reach = coeffs[..n - 1].iter().map(|c| c.abs()).sum::<f64>() + offset.abs();
                let b = reach / coeffs[n - 1].abs() + 1.0;
                Ok(Family {
                    label: format!("hyperplane n={n}"),
                    surface,
                    sampling: SamplingBox {
                        ranges,
                        bracket: (-b, b),
                    },
                    expected: Expected::Flat,
                })
            }
            FamilySpec::Cylinder {
                n,
                profile,
                profile_domain,
                linear,
                offset,
                profile_coordinate,
            } => {
                let lin = linear.clone().unwrap_or_else(|| vec![1.0; n - 1]);
                let prof = Function1D::parse(profile, *profile_domain)?;
                let slot = profile_coordinate
                    .checked_sub(1)
                    .ok_or_else(|| Error::Family("profile_coordinate is 1-based".into()))?;
                let surface = make_cylinder(prof.clone(), *n, &lin, *offset, slot)?;
                let prof_range = default_range(*profile_domain);
                let mut ranges = vec![(-1.0, 1.0); n - 1];
                ranges[slot] = prof_range;
                let prof_max = grid(prof_range, 64)
                    .filter_map(|x| prof.eval_jet2(x).ok())
                    .fold(0.0f64, |m, j| m.max(j.v.abs()));
                let reach =
                    prof_max + lin[..n - 2].iter().map(|c| c.abs()).sum::<f64>() + offset.abs();
                let b = reach / lin[n - 2].abs() + 1.0;
                Ok(Family {
                    label: format!("cylinder[{profile}] n={n}"),
                    surface,
                    sampling: SamplingBox {
                        ranges,
                        bracket: (-b, b),
                    },
                    expected: Expected::Flat,
                })
            }
            FamilySpec::CobbDouglasSqrt { n, a, shifts } => {
                let mu = shifts.clone().unwrap_or_else(|| vec![0.0; *n]);
                let surface = make_cobb_douglas_sqrt(*a, *n, &mu)?;
                Ok(Family {
                    label: format!("cobb-douglas-sqrt A={a} n={n}"),
                    surface,
                    sampling: log_ode_box(*a, &mu),
                    expected: Expected::Flat,
                })
            }
            FamilySpec::Hypersphere { n, radius, center } => {
                let c = center.clone().unwrap_or_else(|| vec![0.0; *n]);
                if c.len() != *n {
                    return Err(Error::Family(format!(
                        "center has {} entries, n = {n}",
                        c.len()
                    )));
                }
                let surface = make_hypersphere(&c, *radius)?;
                let r = *radius;
                // Σ_{k<n} (x_k - c_k)² ≤ 0.64 r², so the height stays ≥ 0.6 r above the equator
                let half = 0.8 * r / ((n - 1) as f64).sqrt();
                let ranges = c[..n - 1]
                    .iter()
                    .map(|&ck| (ck - half, ck + half))
                    .collect();
                let cn = c[n - 1];
                Ok(Family {
                    label: format!("hypersphere r={r} n={n}"),
                    surface,
                    sampling: SamplingBox {
                        ranges,
                        bracket: (cn + 0.1 * r, cn + 1.01 * r),
                    },
                    expected: Expected::Constant(1.0 / (r * r)),
                })
            }
            FamilySpec::LogOde {
                n,
                lambda,
                shifts,
                betas,
            } => {
                let mu = shifts.clone().unwrap_or_else(|| vec![0.0; *n]);
                let beta = betas.clone().unwrap_or_else(|| vec![0.0; *n]);
                let surface = make_log_ode(*lambda, &mu, &beta)?;
                let a = (-beta.iter().sum::<f64>() / (2.0 * lambda)).exp();
                Ok(Family {
                    label: format!("log-ode lambda={lambda} n={n}"),
                    surface,
                    sampling: log_ode_box(a, &mu),
                    expected: Expected::Flat,
                })
            }
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < SeparableSurface::MIN_DIM {
        return Err(Error::Family(format!(
            "n = {n} is below {}",
            SeparableSurface::MIN_DIM
        )));
    }
    Ok(())
}

fn grid((lo, hi): (f64, f64), steps: usize) -> impl Iterator<Item = f64> {
    (0..=steps).map(move |k| lo + (hi - lo) * k as f64 / steps as f64)
}

/// A comfortable sampling interval inside `d`.
fn default_range(d: Domain) -> (f64, f64) {
    let (lo, hi) = (d.lo(), d.hi());
    match (lo.is_finite(), hi.is_finite()) {
        _ if lo < -1.0 && hi > 1.0 => (-1.0, 1.0),
        (true, false) => (lo + 0.5, lo + 2.0),
        (false, true) => (hi - 2.0, hi - 0.5),
        _ => {
            let w = hi - lo;
            (lo + 0.25 * w, hi - 0.25 * w)
        }
    }
}

/// Shifted coordinates in `(0.5, 2)`; the height lies in
/// `A [0.5^{(n-1)/2}, 2^{(n-1)/2}]` after shifting.
fn log_ode_box(a: f64, mu: &[f64]) -> SamplingBox {
    let n = mu.len();
    let ranges = mu[..n - 1].iter().map(|&m| (0.5 - m, 2.0 - m)).collect();
    let half = (n - 1) as f64 / 2.0;
    let lo = a * 0.5f64.powf(half);
    let hi = a * 2.0f64.powf(half);
    let mn = mu[n - 1];
    SamplingBox {
        ranges,
        bracket: (0.5 * lo - mn, 2.0 * hi - mn),
    }
}

fn linear(c: f64) -> Function1D {
    Function1D::new(Expr::scaled(c, Expr::Var), Domain::REAL_LINE)
}

/// `c log(x + μ) + β` on `(-μ, ∞)`.
fn scaled_log(c: f64, mu: f64, beta: f64) -> Function1D {
    let arg = Expr::offset(Expr::Var, mu);
    let e = Expr::offset(Expr::scaled(c, Expr::call(Func::Log, arg)), beta);
    Function1D::new(e, Domain::above(-mu))
}

pub fn make_hyperplane(coeffs: &[f64], offset: f64) -> Result<SeparableSurface> {
    check_dim(coeffs.len())?;
    if coeffs.iter().all(|&c| c == 0.0) {
        return Err(Error::Family("hyperplane coefficients are all zero".into()));
    }
    let n = coeffs.len();
    if coeffs[n - 1] == 0.0 {
        return Err(Error::Family(
            "hyperplane coefficient at the height coordinate is zero".into(),
        ));
    }
    if !offset.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Family("hyperplane parameters must be finite".into()));
    }
    let mut funcs: Vec<Function1D> = coeffs.iter().map(|&c| linear(c)).collect();
    funcs[n - 1] = Function1D::new(
        Expr::offset(Expr::scaled(coeffs[n - 1], Expr::Var), offset),
        Domain::REAL_LINE,
    );
    SeparableSurface::with_last_height(funcs)
}

/// `profile` sits at coordinate `slot` (0-based, not the height); `lin`
/// holds the coefficients of the remaining `n - 1` coordinates in order.
pub fn make_cylinder(
    profile: Function1D,
    n: usize,
    lin: &[f64],
    offset: f64,
    slot: usize,
) -> Result<SeparableSurface> {
    check_dim(n)?;
    if lin.len() != n - 1 {
        return Err(Error::Family(format!(
            "cylinder needs {} linear coefficients, got {}",
            n - 1,
            lin.len()
        )));
    }
    if slot >= n - 1 {
        return Err(Error::Family(format!(
            "profile coordinate {} must precede the height",
            slot + 1
        )));
    }
    if lin[n - 2] == 0.0 {
        return Err(Error::Family(
            "cylinder coefficient at the height coordinate is zero".into(),
        ));
    }
    let curved = grid(default_range(profile.domain()), 16)
        .filter_map(|x| profile.eval_jet2(x).ok())
        .any(|j| j.d2.abs() > 1e-12);
    if !curved {
        return Err(Error::Family(format!(
            "profile {profile} has no curvature on its domain"
        )));
    }
    let mut lin_iter = lin.iter();
    let mut funcs = Vec::with_capacity(n);
    for k in 0..n {
        if k == slot {
            funcs.push(profile.clone());
        } else {
            let c = *lin_iter.next().unwrap();
            if k == n - 1 {
                funcs.push(Function1D::new(
                    Expr::offset(Expr::scaled(c, Expr::Var), offset),
                    Domain::REAL_LINE,
                ));
            } else {
                funcs.push(linear(c));
            }
        }
    }
    SeparableSurface::with_last_height(funcs)
}

/// The logarithmic solutions with `λ = 1` and `β_n = -2 log A`, so that
/// `A = exp(-(β_1 + … + β_n) / 2λ)`.
pub fn make_cobb_douglas_sqrt(a: f64, n: usize, shifts: &[f64]) -> Result<SeparableSurface> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Family(format!("A must be positive, got {a}")));
    }
    check_dim(n)?;
    let mut betas = vec![0.0; n];
    betas[n - 1] = -2.0 * a.ln();
    make_log_ode(1.0, shifts, &betas)
}

pub fn make_log_ode(lambda: f64, shifts: &[f64], betas: &[f64]) -> Result<SeparableSurface> {
    let n = shifts.len();
    check_dim(n)?;
    if betas.len() != n {
        return Err(Error::Family(format!(
            "{} shifts but {} betas",
            n,
            betas.len()
        )));
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Family(format!(
            "lambda must be nonzero, got {lambda}"
        )));
    }
    let lams = log_ode_lambdas(lambda, n);
    let funcs = (0..n)
        .map(|k| {
            // f'' = f'^2 / λ_k is solved by -λ_k log(x + μ) + β
            scaled_log(-lams[k], shifts[k], betas[k])
        })
        .collect();
    SeparableSurface::with_last_height(funcs)
}

/// `λ_i = λ` for `i < n` and `λ_n = -2λ`.
pub fn log_ode_lambdas(lambda: f64, n: usize) -> Vec<f64> {
    let mut v = vec![lambda; n];
    v[n - 1] = -2.0 * lambda;
    v
}

/// True when `λ_i + λ_j + λ_n = 0` exactly for every `i < j < n`.
pub fn lambda_system_holds(lams: &[f64]) -> bool {
    let n = lams.len();
    (0..n - 1).all(|i| (i + 1..n - 1).all(|j| lams[i] + lams[j] + lams[n - 1] == 0.0))
}

pub fn make_hypersphere(center: &[f64], r: f64) -> Result<SeparableSurface> {
    check_dim(center.len())?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Family(format!("radius must be positive, got {r}")));
    }
    let n = center.len();
    let funcs = center
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let sq = Expr::pow(Expr::offset(Expr::Var, -c), 2.0);
            let e = if k == n - 1 {
                Expr::offset(sq, -r * r)
            } else {
                sq
            };
            Function1D::new(e, Domain::REAL_LINE)
        })
        .collect();
    SeparableSurface::with_last_height(funcs)
}

/// `f''(x) - f'(x)² / λ`.
pub fn log_ode_residual<T: Scalar>(f: &Function1D, lambda_k: T, x: T) -> Result<T> {
    if lambda_k == T::zero() {
        return Err(Error::InvalidParameter("lambda must be nonzero".into()));
    }
    let j = f.eval_jet2(x)?;
    Ok(j.d2 - j.d1 * j.d1 / lambda_k)
}

/// Graph `x_n = A Π x_i^{α_i}` over the positive orthant.
pub fn make_cobb_douglas(a: f64, exponents: &[f64]) -> Result<Family> {
    let n = exponents.len() + 1;
    check_dim(n)?;
    if !(a > 0.0) || exponents.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Family(
            "Cobb-Douglas needs A > 0 and positive exponents".into(),
        ));
    }
    let mut funcs: Vec<Function1D> = exponents
        .iter()
        .map(|&al| scaled_log(-al, 0.0, 0.0))
        .collect();
    funcs.push(scaled_log(1.0, 0.0, -a.ln()));
    let surface = SeparableSurface::with_last_height(funcs)?;
    let (mut lo, mut hi) = (a, a);
    for &al in exponents {
        lo *= 0.5f64.powf(al);
        hi *= 2.0f64.powf(al);
    }
    let flat = (0..exponents.len())
        .all(|i| (i + 1..exponents.len()).all(|j| exponents[i] + exponents[j] == 1.0));
    Ok(Family {
        label: format!("cobb-douglas A={a} alpha={exponents:?}"),
        surface,
        sampling: SamplingBox {
            ranges: vec![(0.5, 2.0); n - 1],
            bracket: (0.5 * lo, 2.0 * hi),
        },
        expected: if flat {
            Expected::Flat
        } else {
            Expected::NonConstant
        },
    })
}

/// Square-root Cobb-Douglas with the first exponent moved to `½ + eps`.
pub fn perturbed_cobb_douglas(n: usize, eps: f64) -> Result<Family> {
    check_dim(n)?;
    let mut alpha = vec![0.5; n - 1];
    alpha[0] += eps;
    make_cobb_douglas(1.0, &alpha)
}

/// `exp(x_1) + … + exp(x_n) = n`.
pub fn exponential_control(n: usize) -> Result<Family> {
    check_dim(n)?;
    let exp = || Expr::call(Func::Exp, Expr::Var);
    let mut funcs: Vec<Function1D> = (0..n - 1)
        .map(|_| Function1D::new(exp(), Domain::REAL_LINE))
        .collect();
    funcs.push(Function1D::new(
        Expr::offset(exp(), -(n as f64)),
        Domain::REAL_LINE,
    ));
    let surface = SeparableSurface::with_last_height(funcs)?;
    // with x_k ≤ 0.2 the others sum to at most 1.23 (n - 1) < n
    Ok(Family {
        label: format!("exponential n={n}"),
        surface,
        sampling: SamplingBox {
            ranges: vec![(-1.0, 0.2); n - 1],
            bracket: (-10.0, (n as f64).ln() + 0.5),
        },
        expected: Expected::NonConstant,
    })
}
