use crate::error::{Error, Result};
use crate::funcalc::Function1D;
use crate::scalar::{compensated_sum, Scalar, Tolerances};

/// Level set `f_1(x_1) + … + f_n(x_n) = 0`.
///
/// One coordinate, the height, is the one solved for when lifting points
/// onto the surface; its function must have a nonvanishing derivative at
/// every point used.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableSurface {
    funcs: Vec<Function1D>,
    height: usize,
}

impl SeparableSurface {
    pub const MIN_DIM: usize = 3;

    /// `height` is a 0-based coordinate index.
    pub fn new(funcs: Vec<Function1D>, height: usize) -> Result<Self> {
        if funcs.len() < Self::MIN_DIM {
            return Err(Error::InvalidSurface(format!(
                "need at least {} functions, got {}",
                Self::MIN_DIM,
                funcs.len()
            )));
        }
        if height >= funcs.len() {
            return Err(Error::InvalidSurface(format!(
                "height index {height} out of range for n = {}",
                funcs.len()
            )));
        }
        Ok(Self { funcs, height })
    }

    /// Surface with the last coordinate as height.
    pub fn with_last_height(funcs: Vec<Function1D>) -> Result<Self> {
        let h = funcs.len().saturating_sub(1);
        Self::new(funcs, h)
    }

    pub fn dim(&self) -> usize {
        self.funcs.len()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn funcs(&self) -> &[Function1D] {
        &self.funcs
    }

    pub fn func(&self, k: usize) -> &Function1D {
        &self.funcs[k]
    }

    /// Coordinate indices other than the height, in increasing order.
    pub fn tangent_axes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).filter(move |&k| k != self.height)
    }

    /// Inserts `height_value` into a partial coordinate vector.
    pub fn assemble<T: Scalar>(&self, partial: &[T], height_value: T) -> Result<Vec<T>> {
        if partial.len() + 1 != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim() - 1,
                got: partial.len(),
            });
        }
        let mut coords = Vec::with_capacity(self.dim());
        coords.extend_from_slice(&partial[..self.height]);
        coords.push(height_value);
        coords.extend_from_slice(&partial[self.height..]);
        Ok(coords)
    }

    pub(crate) fn check_dim<T>(&self, coords: &[T]) -> Result<()> {
        if coords.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dim(),
                got: coords.len(),
            })
        }
    }

    /// Jets of every `f_k` at `x_k`.
    pub fn jets<T: Scalar>(&self, coords: &[T]) -> Result<LocalJets<T>> {
        self.check_dim(coords)?;
        let n = self.dim();
        let mut values = Vec::with_capacity(n);
        let mut d1 = Vec::with_capacity(n);
        let mut d2 = Vec::with_capacity(n);
        for (f, &x) in self.funcs.iter().zip(coords) {
            let j = f.eval_jet2(x)?;
            values.push(j.v);
            d1.push(j.d1);
            d2.push(j.d2);
        }
        Ok(LocalJets {
            values,
            d1,
            d2,
            height: self.height,
        })
    }
}

/// `f_k, f_k', f_k''` evaluated at one point of `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalJets<T> {
    pub values: Vec<T>,
    pub d1: Vec<T>,
    pub d2: Vec<T>,
    pub height: usize,
}

impl<T: Scalar> LocalJets<T> {
    /// `|Σ f_k|` and the scale `max(1, Σ |f_k|)` it is judged against.
    pub fn residual(&self) -> (T, T) {
        let r = compensated_sum(self.values.iter().copied()).abs();
        let scale = compensated_sum(self.values.iter().map(|v| v.abs())).max(T::one());
        (r, scale)
    }

    /// `Σ f_k'²`
    pub fn grad_norm_sq(&self) -> T {
        compensated_sum(self.d1.iter().map(|&d| d * d))
    }

    pub fn gradient(&self) -> &[T] {
        &self.d1
    }

    pub fn ensure_regular(&self, tol: &Tolerances<T>) -> Result<()> {
        let g = self.grad_norm_sq().sqrt();
        if !(g >= tol.regularity) {
            return Err(Error::Regularity(format!(
                "|grad F| = {:e} is below {:e}",
                g.to_f64().unwrap_or(f64::NAN),
                tol.regularity.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let dh = self.d1[self.height].abs();
        if !(dh >= tol.regularity) {
            return Err(Error::Regularity(format!(
                "|f'_{}| = {:e} is below {:e} at the height coordinate",
                self.height + 1,
                dh.to_f64().unwrap_or(f64::NAN),
                tol.regularity.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(())
    }
}
