//! Shared helpers for integration tests: an expression corpus covering every
//! grammar production, a high-precision finite-difference reference, and a
//! seeded generator of (surface, point, pair) draws.

#![allow(dead_code)]

use astro_float::{BigFloat, Consts, RoundingMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepcurv::families::{exponential_control, perturbed_cobb_douglas, Family, FamilySpec};
use sepcurv::funcalc::{Domain, Expr, Func, Function1D};
use sepcurv::geometry::SurfacePoint;
use sepcurv::{Point, SeparableSurface, Tolerances};

/// Expressions with a sampling interval strictly inside their domain.
pub const CORPUS: &[(&str, (f64, f64))] = &[
    ("x", (-3.0, 3.0)),
    ("-x", (-3.0, 3.0)),
    ("2*x + 1", (-3.0, 3.0)),
    ("x^2", (-3.0, 3.0)),
    ("x^3", (-2.0, 2.0)),
    ("x^3 - 2*x", (-2.0, 2.0)),
    ("-0.5*log(x)", (0.1, 5.0)),
    ("log(x)", (0.1, 5.0)),
    ("exp(x)", (-3.0, 3.0)),
    ("sin(x)", (-4.0, 4.0)),
    ("cos(x)", (-4.0, 4.0)),
    ("x^0.5", (0.1, 4.0)),
    ("x^-1", (0.2, 4.0)),
    ("1/x", (0.2, 4.0)),
    ("x^-2.5", (0.3, 4.0)),
    ("x^(1/3)", (0.1, 8.0)),
    ("(x + 1)^2", (-3.0, 3.0)),
    ("(x - 1)^2 - 4", (-3.0, 3.0)),
    ("exp(-x^2)", (-2.0, 2.0)),
    ("exp(sin(x))", (-3.0, 3.0)),
    ("log(1 + x^2)", (-3.0, 3.0)),
    ("sin(x)*cos(x)", (-3.0, 3.0)),
    ("x*exp(x)", (-2.0, 2.0)),
    ("log(x)/x", (0.2, 5.0)),
    ("(2*x - 3)^4", (-1.0, 3.0)),
    ("3*x^2 - x + 7", (-3.0, 3.0)),
    ("-x^2", (-3.0, 3.0)),
    ("-(x + 2)^3", (-3.0, 1.0)),
    ("cos(2*x)^2", (-2.0, 2.0)),
    ("exp(x)/(1 + exp(x))", (-4.0, 4.0)),
    ("log(log(x))", (1.5, 6.0)),
    ("sin(x^2) + cos(x^3)/2", (-1.5, 1.5)),
    ("(x^2 + 1)^-0.5", (-3.0, 3.0)),
    ("x^4 - 3*x^3 + x", (-2.0, 3.0)),
    ("1/(1 + x^2)", (-3.0, 3.0)),
    ("log(x)^2", (0.2, 5.0)),
    ("x*log(x)", (0.1, 4.0)),
    ("exp(x) - 4", (-2.0, 2.0)),
    ("-0.5*log(x + 1) + 0.25", (-0.8, 3.0)),
    ("2*log(x)", (0.1, 5.0)),
    ("x/2/3 - x*4", (-3.0, 3.0)),
    ("(-x)^2 + -3", (-3.0, 3.0)),
    ("1.5e-1*x^2 - 2E+0", (-3.0, 3.0)),
];

const PREC: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

fn big(v: f64) -> BigFloat {
    BigFloat::from_f64(v, PREC)
}

fn to_f64(b: &BigFloat) -> f64 {
    b.to_string().parse().expect("BigFloat prints a decimal")
}

fn eval_big(e: &Expr, x: &BigFloat, cc: &mut Consts) -> Option<BigFloat> {
    let out = match e {
        Expr::Const(c) => big(*c),
        Expr::Var => x.clone(),
        Expr::Neg(a) => eval_big(a, x, cc)?.neg(),
        Expr::Add(a, b) => eval_big(a, x, cc)?.add(&eval_big(b, x, cc)?, PREC, RM),
        Expr::Sub(a, b) => eval_big(a, x, cc)?.sub(&eval_big(b, x, cc)?, PREC, RM),
        Expr::Mul(a, b) => eval_big(a, x, cc)?.mul(&eval_big(b, x, cc)?, PREC, RM),
        Expr::Div(a, b) => eval_big(a, x, cc)?.div(&eval_big(b, x, cc)?, PREC, RM),
        Expr::Pow(a, p) => {
            let base = eval_big(a, x, cc)?;
            if p.fract() == 0.0 && p.abs() < 64.0 {
                let r = base.powi(p.abs() as usize, PREC, RM);
                if *p < 0.0 {
                    r.reciprocal(PREC, RM)
                } else {
                    r
                }
            } else if base.is_positive() && !base.is_zero() {
                base.pow(&big(*p), PREC, RM, cc)
            } else {
                return None;
            }
        }
        Expr::Call(f, a) => {
            let u = eval_big(a, x, cc)?;
            match f {
                Func::Exp => u.exp(PREC, RM, cc),
                Func::Log if u.is_positive() && !u.is_zero() => u.ln(PREC, RM, cc),
                Func::Log => return None,
                Func::Sin => u.sin(PREC, RM, cc),
                Func::Cos => u.cos(PREC, RM, cc),
            }
        }
    };
    (!out.is_nan() && !out.is_inf()).then_some(out)
}

/// `(f, f', f'')` by central differences with step `1e-5 · max(1, |x|)`,
/// evaluated in 192-bit arithmetic so that only truncation error remains.
pub fn central_differences(e: &Expr, x: f64) -> Option<(f64, f64, f64)> {
    let mut cc = Consts::new().ok()?;
    let h = big(1e-5 * x.abs().max(1.0));
    let xb = big(x);
    let f0 = eval_big(e, &xb, &mut cc)?;
    let fp = eval_big(e, &xb.add(&h, PREC, RM), &mut cc)?;
    let fm = eval_big(e, &xb.sub(&h, PREC, RM), &mut cc)?;
    let d1 = fp
        .sub(&fm, PREC, RM)
        .div(&h.mul(&big(2.0), PREC, RM), PREC, RM);
    let d2 = fp
        .sub(&f0.mul(&big(2.0), PREC, RM), PREC, RM)
        .add(&fm, PREC, RM)
        .div(&h.mul(&h, PREC, RM), PREC, RM);
    Some((to_f64(&f0), to_f64(&d1), to_f64(&d2)))
}

/// `|a - b| / max(1, |b|)`.
pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// One `(surface, point, coordinate pair)` draw; indices are 0-based.
pub struct Triple {
    pub label: String,
    pub surface: SeparableSurface,
    pub point: Point,
    pub i: usize,
    pub j: usize,
}

fn coefficient(rng: &mut ChaCha8Rng) -> f64 {
    let c: f64 = rng.random_range(0.25..2.0);
    if rng.random_bool(0.5) {
        -c
    } else {
        c
    }
}

fn random_function(rng: &mut ChaCha8Rng) -> Function1D {
    let (a, b, c) = (coefficient(rng), coefficient(rng), coefficient(rng));
    let (src, domain) = match rng.random_range(0..6) {
        0 => (format!("{a}*x^3 + {b}*x^2 + {c}*x"), Domain::REAL_LINE),
        1 => (format!("{a}*log(x) + {b}*x"), Domain::above(0.0)),
        2 => (format!("{a}*exp({c}*x) + {b}*x^2"), Domain::REAL_LINE),
        3 => (format!("{a}*x^2 + {b}*x"), Domain::REAL_LINE),
        4 => (format!("{a}*sin(x) + {b}*x"), Domain::REAL_LINE),
        _ => (format!("{a}*x^0.5 + {b}*x"), Domain::above(0.0)),
    };
    Function1D::parse(&src, domain).unwrap()
}

/// Random polynomial/log/exp/trig surface through a random point: the
/// constant making the point lie on the surface is folded into `f_n`.
fn random_surface_triple(rng: &mut ChaCha8Rng, tol: &Tolerances<f64>) -> Option<Triple> {
    let n = rng.random_range(3..=6);
    let funcs: Vec<Function1D> = (0..n).map(|_| random_function(rng)).collect();
    let coords: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    let total: f64 = funcs
        .iter()
        .zip(&coords)
        .map(|(f, &x)| f.eval_jet2(x).unwrap().v)
        .sum();
    let mut funcs = funcs;
    let last = funcs.pop().unwrap();
    funcs.push(Function1D::new(
        Expr::offset(last.expr().clone(), -total),
        last.domain(),
    ));
    let surface = SeparableSurface::with_last_height(funcs).ok()?;
    let point = SurfacePoint::locate(&surface, coords, tol).ok()?;
    surface
        .jets(point.coords())
        .ok()?
        .ensure_regular(tol)
        .ok()?;
    let label = surface
        .funcs()
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(" | ");
    let (i, j) = random_pair(rng, n);
    Some(Triple {
        label,
        surface,
        point,
        i,
        j,
    })
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let i = rng.random_range(0..n - 1);
    let mut j = rng.random_range(0..n - 2);
    if j >= i {
        j += 1;
    }
    (i.min(j), i.max(j))
}

fn random_family(rng: &mut ChaCha8Rng) -> Family {
    let n = rng.random_range(3..=6);
    let spec = match rng.random_range(0..7) {
        0 => FamilySpec::Hyperplane {
            coeffs: (0..n).map(|_| coefficient(rng)).collect(),
            offset: coefficient(rng),
        },
        1 => {
            let profile = ["x^2", "sin(x)", "exp(x)", "x^3 - x", "cos(x)"][rng.random_range(0..5)];
            FamilySpec::Cylinder {
                n,
                profile: profile.into(),
                profile_domain: Domain::REAL_LINE,
                linear: Some((0..n - 1).map(|_| coefficient(rng)).collect()),
                offset: 0.0,
                profile_coordinate: rng.random_range(1..n),
            }
        }
        2 => FamilySpec::CobbDouglasSqrt {
            n,
            a: rng.random_range(0.5..3.0),
            shifts: None,
        },
        3 => FamilySpec::Hypersphere {
            n,
            radius: rng.random_range(0.5..3.0),
            center: None,
        },
        4 => FamilySpec::LogOde {
            n,
            lambda: coefficient(rng),
            shifts: Some((0..n).map(|_| rng.random_range(-0.3..0.3)).collect()),
            betas: Some((0..n).map(|_| rng.random_range(-0.5..0.5)).collect()),
        },
        5 => return exponential_control(n).unwrap(),
        _ => return perturbed_cobb_douglas(n, 0.05).unwrap(),
    };
    spec.build().unwrap()
}

/// `count` seeded triples, half from the family generators and half from
/// random surfaces.
pub fn random_triples(seed: u64, count: usize) -> Vec<Triple> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if out.len() % 2 == 0 {
            let fam = random_family(&mut rng);
            let sampled = fam.sample::<f64>(1, rng.random(), &tol).unwrap();
            let Some(point) = sampled.points.into_iter().next() else {
                continue;
            };
            let (i, j) = random_pair(&mut rng, fam.surface.dim());
            out.push(Triple {
                label: fam.label,
                surface: fam.surface,
                point,
                i,
                j,
            });
        } else if let Some(t) = random_surface_triple(&mut rng, &tol) {
            out.push(t);
        }
    }
    out
}
