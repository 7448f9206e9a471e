//! Dense vector helpers and a small square matrix, sized for tangent
//! spaces of a handful of dimensions.

use std::ops::{Index, IndexMut};

use crate::scalar::{compensated_sum, Scalar};

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    compensated_sum(a.iter().zip(b).map(|(&x, &y)| x * y))
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

pub fn scaled<T: Scalar>(a: &[T], c: T) -> Vec<T> {
    a.iter().map(|&x| x * c).collect()
}

/// `a - c * b`
pub fn sub_scaled<T: Scalar>(a: &[T], c: T, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - c * y).collect()
}

/// Removes the component along the unit vector `n`.
pub fn project_out<T: Scalar>(v: &[T], n: &[T]) -> Vec<T> {
    sub_scaled(v, dot(v, n), n)
}

/// Gram–Schmidt on a pair, with one re-orthogonalization pass.
///
/// Returns the orthonormal pair together with `‖u ∧ w‖`, or `None` when
/// `u` vanishes.
pub fn orthonormal_pair<T: Scalar>(u: &[T], w: &[T]) -> Option<(Vec<T>, Vec<T>, T)> {
    let nu = norm(u);
    if nu == T::zero() || !nu.is_finite() {
        return None;
    }
    let e1 = scaled(u, nu.recip());
    let mut r = project_out(w, &e1);
    r = project_out(&r, &e1);
    let nr = norm(&r);
    let wedge = nu * nr;
    if nr == T::zero() {
        return Some((e1, r, wedge));
    }
    let e2 = scaled(&r, nr.recip());
    Some((e1, e2, wedge))
}

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![T::zero(); dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &a| acc.max(a.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Cholesky succeeds with strictly positive pivots.
    pub fn is_positive_definite(&self) -> bool {
        let n = self.dim;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(d > T::zero()) {
                return false;
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.dim + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pair_is_orthonormal() {
        let (e1, e2, wedge) = orthonormal_pair(&[3.0f64, 0.0, 4.0], &[1.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(norm(&e1), 1.0, epsilon = 1e-15);
        assert_relative_eq!(norm(&e2), 1.0, epsilon = 1e-15);
        assert!(dot(&e1, &e2).abs() < 1e-15);
        // |u|^2 |w|^2 - (u.w)^2 = 25*2 - 9
        assert_relative_eq!(wedge, 41f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn parallel_pair_has_zero_wedge() {
        let (_, _, wedge) = orthonormal_pair(&[1.0, 2.0], &[2.0, 4.0]).unwrap();
        assert!(wedge < 1e-15);
        assert!(orthonormal_pair(&[0.0, 0.0], &[1.0, 0.0]).is_none());
    }

    #[test]
    fn cholesky_detects_definiteness() {
        let m = Matrix::from_fn(3, |i, j| if i == j { 2.0 } else { 1.0 });
        assert!(m.is_positive_definite());
        assert!(m.is_symmetric());
        let m = Matrix::from_fn(2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(!m.is_positive_definite());
    }
}
