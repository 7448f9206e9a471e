use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::{Expr, Func};
use super::jet::Jet2;
use super::parser::{parse_expr, ParseError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("x = {x} is outside the domain ({lo}, {hi})")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },
    #[error("log of non-positive value {0}")]
    LogNonPositive(f64),
    #[error("non-integer power {exponent} of non-positive base {base}")]
    NonPositiveBase { base: f64, exponent: f64 },
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),
}

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Domain {
    lo: f64,
    hi: f64,
}

impl Domain {
    pub const REAL_LINE: Domain = Domain {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self, String> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(format!("domain ({lo}, {hi}) must satisfy lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    /// `(lo, +inf)`.
    pub fn above(lo: f64) -> Self {
        Self {
            lo,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains<T: Scalar>(&self, x: T) -> bool {
        x > T::lit(self.lo) && x < T::lit(self.hi)
    }

    /// Closed interval `[a, b]` lies strictly inside the domain.
    pub fn contains_interval(&self, a: f64, b: f64) -> bool {
        a > self.lo && b < self.hi && a <= b
    }
}

impl TryFrom<[f64; 2]> for Domain {
    type Error = String;
    fn try_from([lo, hi]: [f64; 2]) -> Result<Self, String> {
        Domain::new(lo, hi)
    }
}

impl From<Domain> for [f64; 2] {
    fn from(d: Domain) -> Self {
        [d.lo, d.hi]
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A parsed single-variable function with its declared domain.
///
/// Immutable once built; evaluation is pure and may run concurrently.
#[derive(Clone, Debug, PartialEq)]
pub struct Function1D {
    expr: Expr,
    domain: Domain,
}

impl Function1D {
    pub fn new(expr: Expr, domain: Domain) -> Self {
        Self { expr, domain }
    }

    pub fn parse(src: &str, domain: Domain) -> Result<Self, ParseError> {
        Ok(Self {
            expr: parse_expr(src)?,
            domain,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// `(f(x), f'(x), f''(x))` by forward-mode differentiation.
    pub fn eval_jet2<T: Scalar>(&self, x: T) -> Result<Jet2<T>, EvalError> {
        if !self.domain.contains(x) {
            return Err(EvalError::OutsideDomain {
                x: x.to_f64().unwrap_or(f64::NAN),
                lo: self.domain.lo,
                hi: self.domain.hi,
            });
        }
        eval_expr(&self.expr, x)
    }
}

impl fmt::Display for Function1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

fn finite<T: Scalar>(j: Jet2<T>, op: &'static str) -> Result<Jet2<T>, EvalError> {
    if j.is_finite() {
        Ok(j)
    } else {
        Err(EvalError::NonFinite(op))
    }
}

/// Evaluates `e` on the jet seeded at `x`, ignoring any domain.
pub fn eval_expr<T: Scalar>(e: &Expr, x: T) -> Result<Jet2<T>, EvalError> {
    let j = match e {
        Expr::Const(c) => return Ok(Jet2::constant(T::lit(*c))),
        Expr::Var => return finite(Jet2::variable(x), "x"),
        Expr::Neg(a) => -eval_expr(a, x)?,
        Expr::Add(a, b) => finite(eval_expr(a, x)? + eval_expr(b, x)?, "+")?,
        Expr::Sub(a, b) => finite(eval_expr(a, x)? - eval_expr(b, x)?, "-")?,
        Expr::Mul(a, b) => finite(eval_expr(a, x)? * eval_expr(b, x)?, "*")?,
        Expr::Div(a, b) => finite(eval_expr(a, x)? / eval_expr(b, x)?, "/")?,
        Expr::Pow(a, p) => {
            let u = eval_expr(a, x)?;
            let integral = p.fract() == 0.0 && p.abs() <= i32::MAX as f64;
            if !integral && u.v <= T::zero() {
                return Err(EvalError::NonPositiveBase {
                    base: u.v.to_f64().unwrap_or(f64::NAN),
                    exponent: *p,
                });
            }
            finite(u.powf(T::lit(*p)), "^")?
        }
        Expr::Call(func, a) => {
            let u = eval_expr(a, x)?;
            match func {
                Func::Exp => finite(u.exp(), "exp")?,
                Func::Log => {
                    if u.v <= T::zero() {
                        return Err(EvalError::LogNonPositive(u.v.to_f64().unwrap_or(f64::NAN)));
                    }
                    finite(u.ln(), "log")?
                }
                Func::Sin => u.sin(),
                Func::Cos => u.cos(),
            }
        }
    };
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn f(src: &str) -> Function1D {
        Function1D::parse(src, Domain::REAL_LINE).unwrap()
    }

    #[test]
    fn identity_jet() {
        assert_eq!(f("x").eval_jet2(5.0), Ok(Jet2::new(5.0, 1.0, 0.0)));
    }

    #[test]
    fn log_jet() {
        let g = Function1D::parse("log(x)", Domain::above(0.0)).unwrap();
        let j = g.eval_jet2(2.0).unwrap();
        assert_relative_eq!(j.v, 0.693_147_180_559_945_3);
        assert_eq!((j.d1, j.d2), (0.5, -0.25));
    }

    #[test]
    fn cube_matches_closed_form() {
        let j = f("x^3").eval_jet2(1.7).unwrap();
        assert_relative_eq!(j.v, 1.7f64.powi(3), max_relative = 1e-15);
        assert_relative_eq!(j.d1, 3.0 * 1.7 * 1.7, max_relative = 1e-15);
        assert_relative_eq!(j.d2, 6.0 * 1.7, max_relative = 1e-15);
    }

    #[test]
    fn domain_is_open() {
        let g = Function1D::parse("log(x)", Domain::above(0.0)).unwrap();
        assert!(matches!(
            g.eval_jet2(0.0),
            Err(EvalError::OutsideDomain { .. })
        ));
        assert!(matches!(
            g.eval_jet2(-1.0),
            Err(EvalError::OutsideDomain { .. })
        ));
        let h = Function1D::parse("x", Domain::new(-1.0, 1.0).unwrap()).unwrap();
        assert!(h.eval_jet2(1.0).is_err());
        assert!(h.eval_jet2(0.999).is_ok());
    }

    #[test]
    fn evaluation_errors() {
        assert_eq!(
            f("log(x - 3)").eval_jet2(1.0),
            Err(EvalError::LogNonPositive(-2.0))
        );
        assert!(matches!(
            f("x^0.5").eval_jet2(-1.0),
            Err(EvalError::NonPositiveBase { .. })
        ));
        assert!(matches!(
            f("x^0.5").eval_jet2(0.0),
            Err(EvalError::NonPositiveBase { .. })
        ));
        assert_eq!(f("1/x").eval_jet2(0.0), Err(EvalError::NonFinite("/")));
        assert_eq!(
            f("exp(x)").eval_jet2(1000.0),
            Err(EvalError::NonFinite("exp"))
        );
    }

    #[test]
    fn integer_powers_accept_negative_bases() {
        let j = f("x^3").eval_jet2(-2.0).unwrap();
        assert_eq!(j, Jet2::new(-8.0, 12.0, -12.0));
        let j = f("x^-2").eval_jet2(-2.0).unwrap();
        assert_relative_eq!(j.v, 0.25);
        assert_relative_eq!(j.d1, 0.25);
    }

    #[test]
    fn domain_validation() {
        assert!(Domain::new(1.0, 1.0).is_err());
        assert!(Domain::new(2.0, 1.0).is_err());
        assert!(Domain::new(f64::NAN, 1.0).is_err());
        assert!(Domain::REAL_LINE.contains(1e300));
        assert!(Domain::above(0.0).contains_interval(0.5, 2.0));
        assert!(!Domain::above(0.0).contains_interval(0.0, 2.0));
    }

    #[test]
    fn evaluates_in_f32() {
        let j = f("x^2 + 3*x").eval_jet2(2.0f32).unwrap();
        assert_eq!(j, Jet2::new(10.0f32, 7.0, 2.0));
    }
}
