//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the geometry can be evaluated in: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal, saturating to infinity when out of range.
    fn lit(v: f64) -> Self;

    /// Threshold set matched to the precision of the type.
    fn default_tolerances() -> Tolerances<Self>;
}

impl Scalar for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }

    fn default_tolerances() -> Tolerances<Self> {
        Tolerances {
            on_surface: 1e-12,
            regularity: 1e-8,
            orthogonality: 1e-10,
            independence: 1e-10,
            equivalence: 1e-9,
            constancy: 1e-7,
        }
    }
}

impl Scalar for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }

    fn default_tolerances() -> Tolerances<Self> {
        Tolerances {
            on_surface: 1e-5,
            regularity: 1e-4,
            orthogonality: 1e-4,
            independence: 1e-5,
            equivalence: 1e-3,
            constancy: 1e-3,
        }
    }
}

/// Numerical thresholds used across the crate.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances<T> {
    /// Relative acceptance of `|Σ f_k(x_k)|`, scaled by `max(1, Σ |f_k(x_k)|)`.
    pub on_surface: T,
    /// Lower bound on both `‖grad F‖` and `|f'_h|` at the height coordinate.
    pub regularity: T,
    /// Allowed `|⟨v, N⟩|` (relative to `max(1, ‖v‖)`) for a vector to count as tangent.
    pub orthogonality: T,
    /// Lower bound on `‖u ∧ w‖` for a plane section.
    pub independence: T,
    /// Relative agreement required between the closed form and the oracle.
    pub equivalence: T,
    /// Absolute spread below which a scan is declared constant.
    pub constancy: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        T::default_tolerances()
    }
}

/// Compensated (Neumaier) summation. Result depends only on input order.
pub fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry = carry + ((sum - t) + v);
        } else {
            carry = carry + ((v - t) + sum);
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn f32_tolerances_are_looser() {
        let t32 = f32::default_tolerances();
        let t64 = f64::default_tolerances();
        assert!(t32.on_surface as f64 > t64.on_surface);
        assert!(t32.regularity as f64 > t64.regularity);
    }
}
