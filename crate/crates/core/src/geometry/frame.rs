use super::point::SurfacePoint;
use super::surface::SeparableSurface;
use crate::error::Result;
use crate::linalg::{dot, Matrix};
use crate::scalar::{Scalar, Tolerances};

/// Unit normal `grad F / ‖grad F‖`, oriented along the gradient.
pub fn unit_normal<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    tol: &Tolerances<T>,
) -> Result<Vec<T>> {
    let jets = s.jets(p.coords())?;
    jets.ensure_regular(tol)?;
    let g = jets.grad_norm_sq().sqrt();
    Ok(jets.d1.iter().map(|&d| d / g).collect())
}

/// Coordinate tangent basis with its metric and second fundamental form.
///
/// `basis[a]` is `X_k = e_k - (f'_k / f'_h) e_h` for the `a`-th entry `k`
/// of `axes` (every coordinate except the height `h`). `second_form` uses
/// `II(X, Y) = ⟨-dN(X), Y⟩` with `N` along the gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame<T> {
    pub axes: Vec<usize>,
    pub basis: Vec<Vec<T>>,
    pub normal: Vec<T>,
    pub gram: Matrix<T>,
    pub second_form: Matrix<T>,
}

impl<T: Scalar> TangentFrame<T> {
    /// Gram matrix recomputed from the explicit basis vectors.
    pub fn gram_of_basis(&self) -> Matrix<T> {
        Matrix::from_fn(self.basis.len(), |a, b| dot(&self.basis[a], &self.basis[b]))
    }

    /// Position of coordinate `k` in `axes`.
    pub fn slot(&self, k: usize) -> Option<usize> {
        self.axes.iter().position(|&a| a == k)
    }

    /// Gauss equation for the plane spanned by basis vectors `a`, `b`
    /// (slots, not coordinates), normalized by the area of the parallelogram.
    pub fn sectional(&self, a: usize, b: usize) -> T {
        let ii = &self.second_form;
        let g = &self.gram;
        let num = ii[(a, a)] * ii[(b, b)] - ii[(a, b)] * ii[(a, b)];
        let den = g[(a, a)] * g[(b, b)] - g[(a, b)] * g[(a, b)];
        num / den
    }
}

pub fn tangent_frame<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    tol: &Tolerances<T>,
) -> Result<TangentFrame<T>> {
    let jets = s.jets(p.coords())?;
    jets.ensure_regular(tol)?;
    let n = s.dim();
    let h = s.height();
    let axes: Vec<usize> = s.tangent_axes().collect();
    let grad = jets.grad_norm_sq().sqrt();
    let normal: Vec<T> = jets.d1.iter().map(|&d| d / grad).collect();

    let dh = jets.d1[h];
    let ratio: Vec<T> = axes.iter().map(|&k| jets.d1[k] / dh).collect();
    let basis: Vec<Vec<T>> = axes
        .iter()
        .zip(&ratio)
        .map(|(&k, &r)| {
            let mut v = vec![T::zero(); n];
            v[k] = T::one();
            v[h] = -r;
            v
        })
        .collect();

    let m = axes.len();
    let d2h_over = jets.d2[h] / (dh * dh);
    let gram = Matrix::from_fn(m, |a, b| {
        let (i, j) = (axes[a], axes[b]);
        let off = jets.d1[i] * jets.d1[j] / (dh * dh);
        if a == b {
            T::one() + off
        } else {
            off
        }
    });
    let second_form = Matrix::from_fn(m, |a, b| {
        let (i, j) = (axes[a], axes[b]);
        let cross = jets.d1[i] * jets.d1[j] * d2h_over;
        let paired = if a == b { jets.d2[i] + cross } else { cross };
        -paired / grad
    });

    Ok(TangentFrame {
        axes,
        basis,
        normal,
        gram,
        second_form,
    })
}
