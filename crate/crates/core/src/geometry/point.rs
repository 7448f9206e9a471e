use super::surface::SeparableSurface;
use crate::error::{Error, Result};
use crate::scalar::{compensated_sum, Scalar, Tolerances};

/// Iteration cap for the height solve.
pub const MAX_ITER: usize = 200;

/// A point of `R^n` verified to lie on a surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint<T> {
    coords: Vec<T>,
    residual: T,
}

impl<T: Scalar> SurfacePoint<T> {
    /// Checks that `coords` lies inside every domain and satisfies the
    /// implicit equation within `on_surface · max(1, Σ |f_k|)`.
    pub fn locate(s: &SeparableSurface, coords: Vec<T>, tol: &Tolerances<T>) -> Result<Self> {
        let jets = s.jets(&coords)?;
        let (residual, scale) = jets.residual();
        let bound = tol.on_surface * scale;
        if !(residual <= bound) {
            return Err(Error::OffSurface {
                residual: residual.to_f64().unwrap_or(f64::NAN),
                tol: bound.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { coords, residual })
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn residual(&self) -> T {
        self.residual
    }

    /// Coordinates with the height entry removed.
    pub fn partial(&self, height: usize) -> Vec<T> {
        self.coords
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != height)
            .map(|(_, &x)| x)
            .collect()
    }
}

/// Lifts `partial` onto the surface by solving for the height coordinate
/// inside `bracket`.
///
/// Safeguarded Newton: each iterate keeps a sign-changing sub-bracket and
/// falls back to bisection whenever the Newton step leaves it or fails to
/// halve the previous step.
pub fn solve_height<T: Scalar>(
    s: &SeparableSurface,
    partial: &[T],
    bracket: (T, T),
    tol: &Tolerances<T>,
) -> Result<SurfacePoint<T>> {
    let h = s.height();
    if partial.len() + 1 != s.dim() {
        return Err(Error::Dimension {
            expected: s.dim() - 1,
            got: partial.len(),
        });
    }
    let (a, b) = bracket;
    let fh = s.func(h);
    let dom = fh.domain();
    if !(a < b) || !dom.contains(a) || !dom.contains(b) {
        return Err(Error::BracketOutsideDomain {
            lo: a.to_f64().unwrap_or(f64::NAN),
            hi: b.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut others = Vec::with_capacity(partial.len());
    for (k, &x) in s.tangent_axes().zip(partial) {
        others.push(s.func(k).eval_jet2(x)?.v);
    }
    let t = compensated_sum(others.iter().copied());
    let abs_others = compensated_sum(others.iter().map(|v| v.abs()));

    // g(y) = f_h(y) + t, with the acceptance bound at y
    let g = |y: T| -> Result<(T, T, T)> {
        let j = fh.eval_jet2(y)?;
        let bound = tol.on_surface * (abs_others + j.v.abs()).max(T::one());
        Ok((j.v + t, j.d1, bound))
    };
    let finish = |y: T| -> Result<SurfacePoint<T>> {
        let coords = s.assemble(partial, y)?;
        let p = SurfacePoint::locate(s, coords, tol)?;
        s.jets(p.coords())?.ensure_regular(tol)?;
        Ok(p)
    };

    let (ga, _, ba) = g(a)?;
    if ga.abs() <= ba {
        return finish(a);
    }
    let (gb, _, bb) = g(b)?;
    if gb.abs() <= bb {
        return finish(b);
    }
    if (ga < T::zero()) == (gb < T::zero()) {
        return Err(Error::NoSignChange {
            lo: a.to_f64().unwrap_or(f64::NAN),
            hi: b.to_f64().unwrap_or(f64::NAN),
            g_lo: ga.to_f64().unwrap_or(f64::NAN),
            g_hi: gb.to_f64().unwrap_or(f64::NAN),
        });
    }
    // g(neg) < 0 < g(pos); neg may be above pos
    let (mut neg, mut pos) = if ga < T::zero() { (a, b) } else { (b, a) };
    let two = T::one() + T::one();
    let mut y = (a + b) / two;
    let mut step_old = (b - a).abs();
    let mut step = step_old;

    for _ in 0..MAX_ITER {
        let (gy, dy, bound) = g(y)?;
        if gy.abs() <= bound {
            return finish(y);
        }
        if gy < T::zero() {
            neg = y;
        } else {
            pos = y;
        }
        let lo = neg.min(pos);
        let hi = neg.max(pos);
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            // bracket exhausted at floating-point resolution
            break;
        }
        let newton = y - gy / dy;
        let newton_ok = dy != T::zero()
            && newton.is_finite()
            && newton > lo
            && newton < hi
            && (two * gy).abs() <= (step_old * dy).abs();
        step_old = step;
        if newton_ok && newton != y {
            step = (newton - y).abs();
            y = newton;
        } else {
            step = (mid - y).abs();
            y = mid;
        }
    }
    Err(Error::NonConvergence(MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::{Domain, Function1D};
    use approx::assert_relative_eq;

    fn f(src: &str) -> Function1D {
        Function1D::parse(src, Domain::REAL_LINE).unwrap()
    }

    fn fd(src: &str, d: Domain) -> Function1D {
        Function1D::parse(src, d).unwrap()
    }

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    #[test]
    fn hypersphere_lift() {
        let s =
            SeparableSurface::with_last_height(vec![f("x^2"), f("x^2"), f("x^2"), f("x^2 - 4")])
                .unwrap();
        let p = solve_height(&s, &[1.0, 1.0, 1.0], (0.0, 2.0), &tol()).unwrap();
        assert_relative_eq!(p.coords()[3], 1.0, epsilon = 1e-12);
        assert!(p.residual() <= 1e-12 * 4.0);
    }

    #[test]
    fn cobb_douglas_lift() {
        let pos = Domain::above(0.0);
        let s = SeparableSurface::with_last_height(vec![
            fd("-log(x)", pos),
            fd("-log(x)", pos),
            fd("-log(x)", pos),
            fd("2*log(x)", pos),
        ])
        .unwrap();
        let p = solve_height(&s, &[1.0, 1.0, 1.0], (0.5, 2.0), &tol()).unwrap();
        assert_relative_eq!(p.coords()[3], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hyperplane_lift() {
        let s = SeparableSurface::with_last_height(vec![f("x"), f("x"), f("x"), f("x")]).unwrap();
        let p = solve_height(&s, &[1.0, 2.0, 3.0], (-10.0, 0.0), &tol()).unwrap();
        assert_relative_eq!(p.coords()[3], -6.0, epsilon = 1e-12);
        let p = solve_height(&s, &[1.0, 2.0, 3.0], (-7.0, -6.0), &tol()).unwrap();
        assert_eq!(p.coords()[3], -6.0);
    }

    #[test]
    fn height_in_the_middle() {
        let s = SeparableSurface::new(vec![f("x"), f("3*x"), f("x")], 1).unwrap();
        let p = solve_height(&s, &[1.0, 2.0], (-5.0, 5.0), &tol()).unwrap();
        assert_eq!(p.coords().len(), 3);
        assert_relative_eq!(p.coords()[1], -1.0, epsilon = 1e-12);
        assert_eq!(p.partial(1), vec![1.0, 2.0]);
    }

    #[test]
    fn failures() {
        let s = SeparableSurface::with_last_height(vec![f("x^2"), f("x^2"), f("x^2 - 4")]).unwrap();
        assert!(matches!(
            solve_height(&s, &[1.0, 1.0], (1.5, 2.0), &tol()),
            Err(Error::NoSignChange { .. })
        ));
        // root at the equator: f'_3 = 0
        assert!(matches!(
            solve_height(&s, &[2.0, 0.0], (0.0, 1.0), &tol()),
            Err(Error::Regularity(_))
        ));
        assert!(matches!(
            solve_height(&s, &[1.0], (0.0, 2.0), &tol()),
            Err(Error::Dimension { .. })
        ));
        let pos = Domain::above(0.0);
        let s =
            SeparableSurface::with_last_height(vec![f("x"), f("x"), fd("log(x)", pos)]).unwrap();
        assert!(matches!(
            solve_height(&s, &[0.0, 0.0], (0.0, 2.0), &tol()),
            Err(Error::BracketOutsideDomain { .. })
        ));
    }

    #[test]
    fn resolving_is_idempotent() {
        let s = SeparableSurface::with_last_height(vec![
            f("exp(x)"),
            f("x^3"),
            f("sin(x)"),
            f("x^3 + x"),
        ])
        .unwrap();
        let p = solve_height(&s, &[0.3, -0.2, 0.9], (-3.0, 3.0), &tol()).unwrap();
        let q = solve_height(&s, &p.partial(3), (-3.0, 3.0), &tol()).unwrap();
        assert!((p.coords()[3] - q.coords()[3]).abs() <= 1e-12);
        let q = solve_height(&s, &p.partial(3), (p.coords()[3] - 0.5, 3.0), &tol()).unwrap();
        assert!((p.coords()[3] - q.coords()[3]).abs() <= 1e-12);
    }

    #[test]
    fn solves_in_f32() {
        let s = SeparableSurface::with_last_height(vec![f("x^2"), f("x^2"), f("x^2 - 4")]).unwrap();
        let tol = Tolerances::<f32>::default();
        let p = solve_height(&s, &[1.0f32, 1.0], (0.0, 2.0), &tol).unwrap();
        assert!((p.coords()[2] - 2f32.sqrt()).abs() < 1e-5);
    }

    #[test]
    fn locate_rejects_off_surface() {
        let s = SeparableSurface::with_last_height(vec![f("x"), f("x"), f("x")]).unwrap();
        assert!(SurfacePoint::locate(&s, vec![1.0, 1.0, -2.0], &tol()).is_ok());
        assert!(matches!(
            SurfacePoint::locate(&s, vec![1.0, 1.0, -1.9], &tol()),
            Err(Error::OffSurface { .. })
        ));
    }
}
