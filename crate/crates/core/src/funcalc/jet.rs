use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Value, first and second derivative of a single-variable function at a point.
///
/// Arithmetic propagates all three components exactly by the Leibniz and
/// chain rules, so evaluating an expression on [`Jet2::variable`] yields its
/// derivatives up to floating-point rounding.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Scalar> Jet2<T> {
    pub fn new(v: T, d1: T, d2: T) -> Self {
        Self { v, d1, d2 }
    }

    pub fn constant(c: T) -> Self {
        Self::new(c, T::zero(), T::zero())
    }

    /// Seed for the independent variable: `(x, 1, 0)`.
    pub fn variable(x: T) -> Self {
        Self::new(x, T::one(), T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    /// Applies an outer function `g` given `g(u), g'(u), g''(u)` at `u = self.v`.
    #[inline]
    pub fn compose(self, g0: T, g1: T, g2: T) -> Self {
        Self::new(g0, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    /// Natural logarithm. Non-positive arguments give non-finite components.
    pub fn ln(self) -> Self {
        let r = self.v.recip();
        self.compose(self.v.ln(), r, -r * r)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn recip(self) -> Self {
        let r = self.v.recip();
        self.compose(r, -r * r, (T::one() + T::one()) * r * r * r)
    }

    /// Integer power; valid for any base, non-finite only where `u^n` itself is.
    pub fn powi(self, n: i32) -> Self {
        let nf = T::from_i32(n).unwrap();
        let g0 = self.v.powi(n);
        let g1 = if n == 0 {
            T::zero()
        } else {
            nf * self.v.powi(n - 1)
        };
        let g2 = if n == 0 || n == 1 {
            T::zero()
        } else {
            nf * (nf - T::one()) * self.v.powi(n - 2)
        };
        self.compose(g0, g1, g2)
    }

    /// Real power with a constant exponent. Callers must ensure `self.v > 0`
    /// for non-integer exponents.
    pub fn powf(self, p: T) -> Self {
        if p.fract() == T::zero() {
            if let Some(n) = p.to_i32() {
                return self.powi(n);
            }
        }
        let g0 = self.v.powf(p);
        let g1 = p * self.v.powf(p - T::one());
        let g2 = p * (p - T::one()) * self.v.powf(p - T::one() - T::one());
        self.compose(g0, g1, g2)
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.v + rhs.v, self.d1 + rhs.d1, self.d2 + rhs.d2)
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.v - rhs.v, self.d1 - rhs.d1, self.d2 - rhs.d2)
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let two = T::one() + T::one();
        Self::new(
            self.v * rhs.v,
            self.d1 * rhs.v + self.v * rhs.d1,
            (self.d2 * rhs.v + self.v * rhs.d2) + two * (self.d1 * rhs.d1),
        )
    }
}

impl<T: Scalar> Div for Jet2<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}

impl<T: Scalar> Mul<T> for Jet2<T> {
    type Output = Self;
    fn mul(self, c: T) -> Self {
        Self::new(self.v * c, self.d1 * c, self.d2 * c)
    }
}

impl<T: Scalar> Add<T> for Jet2<T> {
    type Output = Self;
    fn add(self, c: T) -> Self {
        Self::new(self.v + c, self.d1, self.d2)
    }
}
