use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{LocalJets, SeparableSurface, SurfacePoint};
use crate::linalg::{dot, norm, orthonormal_pair, project_out};
use crate::scalar::{compensated_sum, Scalar, Tolerances};

/// Resampling cap for random planes that come out degenerate.
pub const MAX_PLANE_RETRIES: usize = 100;

/// A 2-plane in the tangent space, given by any two spanning vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneSection<T> {
    pub u: Vec<T>,
    pub w: Vec<T>,
}

impl<T: Scalar> PlaneSection<T> {
    pub fn new(u: Vec<T>, w: Vec<T>) -> Self {
        Self { u, w }
    }

    /// The plane spanned by the coordinate tangent vectors `X_i`, `X_j`.
    pub fn coordinate(
        s: &SeparableSurface,
        p: &SurfacePoint<T>,
        i: usize,
        j: usize,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        check_pair(s, i, j)?;
        let jets = s.jets(p.coords())?;
        jets.ensure_regular(tol)?;
        Ok(Self {
            u: coordinate_vector(&jets, i),
            w: coordinate_vector(&jets, j),
        })
    }

    /// Checks tangency and independence, returning an orthonormal basis.
    pub fn orthonormalize(&self, normal: &[T], tol: &Tolerances<T>) -> Result<(Vec<T>, Vec<T>)> {
        if self.u.len() != normal.len() || self.w.len() != normal.len() {
            return Err(Error::Dimension {
                expected: normal.len(),
                got: if self.u.len() != normal.len() {
                    self.u.len()
                } else {
                    self.w.len()
                },
            });
        }
        for v in [&self.u, &self.w] {
            let off = dot(v, normal).abs();
            if !(off <= tol.orthogonality * norm(v).max(T::one())) {
                return Err(Error::NotTangent(off.to_f64().unwrap_or(f64::NAN)));
            }
        }
        match orthonormal_pair(&self.u, &self.w) {
            Some((e1, e2, wedge)) if wedge > tol.independence => Ok((e1, e2)),
            Some((_, _, wedge)) => Err(Error::DegeneratePlane(wedge.to_f64().unwrap_or(f64::NAN))),
            None => Err(Error::DegeneratePlane(0.0)),
        }
    }
}

fn coordinate_vector<T: Scalar>(jets: &LocalJets<T>, k: usize) -> Vec<T> {
    let h = jets.height;
    let mut v = vec![T::zero(); jets.d1.len()];
    v[k] = T::one();
    v[h] = -(jets.d1[k] / jets.d1[h]);
    v
}

/// Validates a pair of distinct non-height coordinates; returns it sorted.
pub fn check_pair(s: &SeparableSurface, i: usize, j: usize) -> Result<(usize, usize)> {
    let n = s.dim();
    let h = s.height();
    let reason = if i >= n || j >= n {
        "index out of range"
    } else if i == j {
        "indices must differ"
    } else if i == h || j == h {
        "the height coordinate has no tangent vector"
    } else {
        return Ok((i.min(j), i.max(j)));
    };
    Err(Error::Index { i, j, reason })
}

/// `f_i'² f_j'' f_h'' + f_j'² f_i'' f_h'' + f_h'² f_i'' f_j''`
fn flat_numerator<T: Scalar>(jets: &LocalJets<T>, i: usize, j: usize) -> T {
    let h = jets.height;
    let (d1, d2) = (&jets.d1, &jets.d2);
    let t1 = d1[i] * d1[i] * (d2[j] * d2[h]);
    let t2 = d1[j] * d1[j] * (d2[i] * d2[h]);
    let t3 = d1[h] * d1[h] * (d2[i] * d2[j]);
    (t1 + t2) + t3
}

/// `(Σ_k f_k'²)(f_i'² + f_j'² + f_h'²)`
fn special_denominator<T: Scalar>(jets: &LocalJets<T>, i: usize, j: usize) -> T {
    let h = jets.height;
    let d1 = &jets.d1;
    jets.grad_norm_sq() * ((d1[i] * d1[i] + d1[j] * d1[j]) + d1[h] * d1[h])
}

/// Closed-form sectional curvature of the plane `span(X_i, X_j)`.
///
/// Indices are 0-based coordinates different from the height; the result
/// does not depend on their order.
pub fn sectional_special<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    i: usize,
    j: usize,
    tol: &Tolerances<T>,
) -> Result<T> {
    let (i, j) = check_pair(s, i, j)?;
    let jets = s.jets(p.coords())?;
    jets.ensure_regular(tol)?;
    Ok(flat_numerator(&jets, i, j) / special_denominator(&jets, i, j))
}

/// `Σ_k f_k'' a_k b_k`: the Hessian of `F` paired with two vectors.
pub fn hessian_pairing<T: Scalar>(d2: &[T], a: &[T], b: &[T]) -> T {
    compensated_sum(d2.iter().zip(a).zip(b).map(|((&h, &x), &y)| h * x * y))
}

/// Sectional curvature from the Gauss equation for an implicit hypersurface:
/// orthonormalize the plane, then `(H(X,X) H(Y,Y) - H(X,Y)²) / ‖grad F‖²`.
pub fn sectional_oracle<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    sec: &PlaneSection<T>,
    tol: &Tolerances<T>,
) -> Result<T> {
    let jets = s.jets(p.coords())?;
    jets.ensure_regular(tol)?;
    let g2 = jets.grad_norm_sq();
    let g = g2.sqrt();
    let normal: Vec<T> = jets.d1.iter().map(|&d| d / g).collect();
    let (x, y) = sec.orthonormalize(&normal, tol)?;
    let hxx = hessian_pairing(&jets.d2, &x, &x);
    let hyy = hessian_pairing(&jets.d2, &y, &y);
    let hxy = hessian_pairing(&jets.d2, &x, &y);
    Ok((hxx * hyy - hxy * hxy) / g2)
}

/// Numerator of the closed form; vanishes exactly where `K(X_i, X_j)` does.
pub fn flatness_residual<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    i: usize,
    j: usize,
) -> Result<T> {
    let (i, j) = check_pair(s, i, j)?;
    let jets = s.jets(p.coords())?;
    Ok(flat_numerator(&jets, i, j))
}

/// Constant-curvature residual with `K = k0 / 4`:
/// `k0 (X_i + X_j + X_h) Σ X_k - (X_i X_j' X_h' + X_j X_i' X_h' + X_h X_i' X_j')`
/// where `X_k = f_k'²` and `X_k' = 2 f_k''`.
///
/// Equals `4 D (k0/4 - K)` with `D` the closed-form denominator.
pub fn constk_residual<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    i: usize,
    j: usize,
    k0: T,
) -> Result<T> {
    let (i, j) = check_pair(s, i, j)?;
    if !k0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "K0 must be finite, got {k0}"
        )));
    }
    let jets = s.jets(p.coords())?;
    let h = jets.height;
    let x = |k: usize| jets.d1[k] * jets.d1[k];
    let xp = |k: usize| (T::one() + T::one()) * jets.d2[k];
    let lhs = k0 * ((x(i) + x(j)) + x(h)) * jets.grad_norm_sq();
    let rhs = (x(i) * (xp(j) * xp(h)) + x(j) * (xp(i) * xp(h))) + x(h) * (xp(i) * xp(j));
    Ok(lhs - rhs)
}

/// Magnitude the constant-curvature residual is judged against:
/// `|k0| D + 4 |numerator|` summed termwise.
pub fn constk_scale<T: Scalar>(
    s: &SeparableSurface,
    p: &SurfacePoint<T>,
    i: usize,
    j: usize,
    k0: T,
) -> Result<T> {
    let (i, j) = check_pair(s, i, j)?;
    let jets = s.jets(p.coords())?;
    let h = jets.height;
    let (d1, d2) = (&jets.d1, &jets.d2);
    let four = T::lit(4.0);
    let terms = d1[i] * d1[i] * (d2[j] * d2[h]).abs()
        + d1[j] * d1[j] * (d2[i] * d2[h]).abs()
        + d1[h] * d1[h] * (d2[i] * d2[j]).abs();
    Ok(k0.abs() * special_denominator(&jets, i, j) + four * terms)
}

/// A random tangent plane: two Gaussian vectors projected onto the tangent
/// space and orthonormalized, redrawn while degenerate.
pub fn random_tangent_plane<T: Scalar, R: Rng + ?Sized>(
    normal: &[T],
    rng: &mut R,
    tol: &Tolerances<T>,
) -> Result<PlaneSection<T>> {
    let n = normal.len();
    let mut last_wedge = T::zero();
    for _ in 0..MAX_PLANE_RETRIES {
        let mut draw = || -> Vec<T> {
            let v: Vec<T> = (0..n)
                .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)))
                .collect();
            project_out(&v, normal)
        };
        let u = draw();
        let w = draw();
        if let Some((e1, e2, wedge)) = orthonormal_pair(&u, &w) {
            if wedge > tol.independence {
                // re-project to remove rounding drift off the tangent space
                let e1 = project_out(&e1, normal);
                let e2 = project_out(&e2, normal);
                return Ok(PlaneSection::new(e1, e2));
            }
            last_wedge = wedge;
        }
    }
    Err(Error::DegeneratePlane(last_wedge.to_f64().unwrap_or(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalc::{Domain, Function1D};
    use crate::geometry::{solve_height, tangent_frame};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(src: &str) -> Function1D {
        Function1D::parse(src, Domain::REAL_LINE).unwrap()
    }

    fn tol() -> Tolerances<f64> {
        Tolerances::default()
    }

    fn hyperplane() -> SeparableSurface {
        SeparableSurface::with_last_height(vec![f("x"), f("2*x"), f("-x"), f("3*x + 1")]).unwrap()
    }

    fn sphere() -> SeparableSurface {
        SeparableSurface::with_last_height(vec![f("x^2"), f("x^2"), f("x^2"), f("x^2 - 4")])
            .unwrap()
    }

    fn cobb_douglas() -> SeparableSurface {
        let g = |s: &str| Function1D::parse(s, Domain::above(0.0)).unwrap();
        SeparableSurface::with_last_height(vec![
            g("-log(x)"),
            g("-log(x)"),
            g("-log(x)"),
            g("2*log(x)"),
        ])
        .unwrap()
    }

    fn ones(s: &SeparableSurface) -> SurfacePoint<f64> {
        SurfacePoint::locate(s, vec![1.0; 4], &tol()).unwrap()
    }

    #[test]
    fn special_examples() {
        let s = hyperplane();
        let p = solve_height(&s, &[0.3, 0.1, -0.4], (-10.0, 10.0), &tol()).unwrap();
        assert_eq!(sectional_special(&s, &p, 0, 2, &tol()).unwrap(), 0.0);
        let s = cobb_douglas();
        assert_eq!(sectional_special(&s, &ones(&s), 0, 1, &tol()).unwrap(), 0.0);
        let s = sphere();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(
                sectional_special(&s, &ones(&s), i, j, &tol()).unwrap(),
                0.25
            );
        }
    }

    #[test]
    fn special_index_errors() {
        let s = sphere();
        let p = ones(&s);
        for (i, j) in [(0, 0), (0, 3), (3, 1), (0, 4)] {
            assert!(matches!(
                sectional_special(&s, &p, i, j, &tol()),
                Err(Error::Index { .. })
            ));
            assert!(matches!(
                flatness_residual(&s, &p, i, j),
                Err(Error::Index { .. })
            ));
            assert!(matches!(
                constk_residual(&s, &p, i, j, 1.0),
                Err(Error::Index { .. })
            ));
        }
    }

    #[test]
    fn special_is_symmetric_in_the_pair() {
        let s = SeparableSurface::with_last_height(vec![
            f("exp(x)"),
            f("x^3"),
            f("sin(x)"),
            f("x^3 + x"),
        ])
        .unwrap();
        let p = solve_height(&s, &[0.3, -0.2, 0.9], (-3.0, 3.0), &tol()).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(
                sectional_special(&s, &p, i, j, &tol()).unwrap(),
                sectional_special(&s, &p, j, i, &tol()).unwrap()
            );
        }
    }

    #[test]
    fn oracle_examples() {
        let s = hyperplane();
        let p = solve_height(&s, &[0.3, 0.1, -0.4], (-10.0, 10.0), &tol()).unwrap();
        let sec = PlaneSection::coordinate(&s, &p, 0, 1, &tol()).unwrap();
        assert_eq!(sectional_oracle(&s, &p, &sec, &tol()).unwrap(), 0.0);

        let s = sphere();
        let p = ones(&s);
        let nrm = vec![0.5; 4];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let sec = random_tangent_plane(&nrm, &mut rng, &tol()).unwrap();
            assert_relative_eq!(
                sectional_oracle(&s, &p, &sec, &tol()).unwrap(),
                0.25,
                epsilon = 1e-14
            );
        }

        let s = cobb_douglas();
        let p = ones(&s);
        let sec = PlaneSection::coordinate(&s, &p, 0, 1, &tol()).unwrap();
        let ko = sectional_oracle(&s, &p, &sec, &tol()).unwrap();
        let ks = sectional_special(&s, &p, 0, 1, &tol()).unwrap();
        assert!((ko - ks).abs() <= 1e-10);
    }

    #[test]
    fn oracle_rejects_bad_planes() {
        let s = sphere();
        let p = ones(&s);
        let radial = vec![1.0, 1.0, 1.0, 1.0];
        let t = vec![1.0, -1.0, 0.0, 0.0];
        let sec = PlaneSection::new(radial, t.clone());
        assert!(matches!(
            sectional_oracle(&s, &p, &sec, &tol()),
            Err(Error::NotTangent(_))
        ));
        let sec = PlaneSection::new(t.clone(), t.iter().map(|x| 3.0 * x).collect());
        assert!(matches!(
            sectional_oracle(&s, &p, &sec, &tol()),
            Err(Error::DegeneratePlane(_))
        ));
        let sec = PlaneSection::new(vec![1.0, -1.0, 0.0], t);
        assert!(matches!(
            sectional_oracle(&s, &p, &sec, &tol()),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn flatness_residual_examples() {
        let s = cobb_douglas();
        let p = solve_height(&s, &[0.7, 1.9, 1.3], (0.1, 5.0), &tol()).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!(flatness_residual(&s, &p, i, j).unwrap().abs() <= 1e-14);
        }
        let s = hyperplane();
        let p = solve_height(&s, &[0.3, 0.1, -0.4], (-10.0, 10.0), &tol()).unwrap();
        assert_eq!(flatness_residual(&s, &p, 0, 1).unwrap(), 0.0);
        // f_k = x^3 (k < 4), f_4 = x: f' = 3, f'' = 6 at 1 and f_4'' = 0
        let s =
            SeparableSurface::with_last_height(vec![f("x^3"), f("x^3"), f("x^3"), f("x")]).unwrap();
        let p = SurfacePoint::locate(&s, vec![1.0, 1.0, 1.0, -3.0], &tol()).unwrap();
        assert_eq!(flatness_residual(&s, &p, 0, 1).unwrap(), 36.0);
    }

    #[test]
    fn flatness_residual_is_numerator() {
        let s = SeparableSurface::with_last_height(vec![
            f("exp(x)"),
            f("x^3"),
            f("sin(x)"),
            f("x^3 + x"),
        ])
        .unwrap();
        let p = solve_height(&s, &[0.3, -0.2, 0.9], (-3.0, 3.0), &tol()).unwrap();
        let jets = s.jets(p.coords()).unwrap();
        let k = sectional_special(&s, &p, 0, 2, &tol()).unwrap();
        let r = flatness_residual(&s, &p, 0, 2).unwrap();
        assert_relative_eq!(
            r,
            k * special_denominator(&jets, 0, 2),
            max_relative = 1e-12
        );
    }

    #[test]
    fn constk_residual_examples() {
        let s = sphere();
        let p = ones(&s);
        assert!(constk_residual(&s, &p, 0, 1, 1.0).unwrap().abs() <= 1e-10);
        let s = hyperplane();
        let p = solve_height(&s, &[0.3, 0.1, -0.4], (-10.0, 10.0), &tol()).unwrap();
        assert_eq!(constk_residual(&s, &p, 0, 1, 0.0).unwrap(), 0.0);
        let s = cobb_douglas();
        let p = ones(&s);
        // f' = (-1, -1, -1, 2): X = (1, 1, 1, 4), ΣX = 7, X_1 + X_2 + X_4 = 6
        assert_eq!(constk_residual(&s, &p, 0, 1, 1.0).unwrap(), 42.0);
        assert!(constk_residual(&s, &p, 0, 1, f64::NAN).is_err());
    }

    #[test]
    fn frame_gauss_equation_agrees_with_closed_form() {
        let s = SeparableSurface::with_last_height(vec![
            f("exp(x)"),
            f("x^3"),
            f("sin(x)"),
            f("x^3 + x"),
        ])
        .unwrap();
        let p = solve_height(&s, &[0.3, -0.2, 0.9], (-3.0, 3.0), &tol()).unwrap();
        let fr = tangent_frame(&s, &p, &tol()).unwrap();
        let k = sectional_special(&s, &p, 1, 2, &tol()).unwrap();
        assert_relative_eq!(fr.sectional(1, 2), k, max_relative = 1e-12);
    }

    #[test]
    fn second_form_is_minus_hessian_over_gradient() {
        let s = SeparableSurface::with_last_height(vec![
            f("exp(x)"),
            f("x^3"),
            f("sin(x)"),
            f("x^3 + x"),
        ])
        .unwrap();
        let p = solve_height(&s, &[0.3, -0.2, 0.9], (-3.0, 3.0), &tol()).unwrap();
        let fr = tangent_frame(&s, &p, &tol()).unwrap();
        let jets = s.jets(p.coords()).unwrap();
        let g = jets.grad_norm_sq().sqrt();
        for a in 0..3 {
            for b in 0..3 {
                let h = hessian_pairing(&jets.d2, &fr.basis[a], &fr.basis[b]) / g;
                assert_relative_eq!(fr.second_form[(a, b)], -h, max_relative = 1e-9);
            }
        }
    }
}
