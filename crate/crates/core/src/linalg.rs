//! Dense symmetric linear algebra for the Fréchet distance.
//!
//! Eigenvalues come from the cyclic Jacobi method, which is accurate to a
//! few ulps of the matrix norm for symmetric input and needs nothing beyond
//! `alloc`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Panics if `data.len() != dim * dim`.
    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix buffer has wrong length");
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &SquareMatrix) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &SquareMatrix) -> Self {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &SquareMatrix) -> Self {
        self.zip(rhs, |a, b| a - b)
    }

    fn zip(&self, rhs: &SquareMatrix, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let v = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Fails if some `|a_ij - a_ji|` exceeds `tol * max(1, max |a|)`.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        let bound = tol * self.max_abs().max(1.0);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let gap = (self[(i, j)] - self[(j, i)]).abs();
                if gap.is_nan() || gap > bound {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        gap,
                    });
                }
            }
        }
        Ok(())
    }
}

impl core::ops::Index<(usize, usize)> for SquareMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.dim + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for SquareMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.dim + c]
    }
}

/// Eigenvalues and column eigenvectors of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: SquareMatrix,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition. Only the upper triangle's symmetric
/// part is meaningful; callers check symmetry beforehand.
pub fn symmetric_eigen(mat: &SquareMatrix) -> Result<SymmetricEigen> {
    let n = mat.dim();
    let mut a = mat.symmetrized();
    let mut v = SquareMatrix::identity(n);
    let scale = a.frobenius_norm();
    if n <= 1 || scale == 0.0 {
        return Ok(SymmetricEigen {
            values: (0..n).map(|i| a[(i, i)]).collect(),
            vectors: v,
        });
    }

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if libm::sqrt(off) <= f64::EPSILON * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        // Off-diagonal mass below a looser bound is still usable.
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if libm::sqrt(off) > 1e-12 * scale {
            return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
        }
    }
    Ok(SymmetricEigen {
        values: (0..n).map(|i| a[(i, i)]).collect(),
        vectors: v,
    })
}

/// Relative tolerance for treating slightly negative eigenvalues as zero.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Clamps eigenvalues in `[-tol * max(1, max |λ|), 0)` to zero; anything
/// more negative is an error.
pub(crate) fn clamp_psd(values: &mut [f64]) -> Result<()> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -PSD_TOLERANCE * scale {
                return Err(Error::NotPsd { value: *v });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Principal square root of a symmetric positive semi-definite matrix.
pub fn matrix_sqrt_psd(mat: &SquareMatrix) -> Result<SquareMatrix> {
    mat.check_symmetric(PSD_TOLERANCE)?;
    let SymmetricEigen {
        mut values,
        vectors,
    } = symmetric_eigen(mat)?;
    clamp_psd(&mut values)?;
    let n = mat.dim();
    let mut out = SquareMatrix::zeros(n);
    for (k, &lambda) in values.iter().enumerate() {
        let root = libm::sqrt(lambda);
        if root == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vectors[(i, k)] * root;
            for j in 0..n {
                out[(i, j)] += vi * vectors[(j, k)];
            }
        }
    }
    Ok(out.symmetrized())
}
