//! Dense real-symmetric linear algebra shared by every module.
//!
//! The eigensolver is a cyclic Jacobi iteration: at the sizes this crate works
//! with (a few dozen rows at most) it is exact to rounding, deterministic, and
//! generic over the scalar type.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: max |A - A^T| = {deviation:e}")]
    NotSymmetric { deviation: f64 },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// Eigendecomposition `A = Q diag(values) Q^T` with eigenvalues ascending and
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Array1<T>,
    pub vectors: Array2<T>,
}

impl<T: Scalar> SymmetricEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Largest eigenvalue magnitude, zero for an empty or zero matrix.
    pub fn spectral_radius(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Rebuilds `Q diag(f(values)) Q^T`.
    pub fn map_values(&self, f: impl Fn(T) -> T) -> Array2<T> {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.axis_iter_mut(Axis(1)).enumerate() {
            let fj = f(self.values[j]);
            col.mapv_inplace(|x| x * fj);
        }
        let out = scaled.dot(&self.vectors.t());
        debug_assert_eq!(out.dim(), (n, n));
        symmetrize(&out)
    }
}

pub fn max_abs<T: Scalar>(a: ArrayView2<T>) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

pub fn norm2<T: Scalar>(v: ArrayView1<T>) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Largest entry of `|A - A^T|`.
pub fn asymmetry<T: Scalar>(a: ArrayView2<T>) -> T {
    let n = a.nrows();
    let mut dev = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            dev = dev.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    dev
}

/// `(A + A^T) / 2`; exact when `A` is already symmetric.
pub fn symmetrize<T: Scalar>(a: &Array2<T>) -> Array2<T> {
    let half = T::lit(0.5);
    let mut out = a.clone();
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = (a[[i, j]] + a[[j, i]]) * half;
            out[[i, j]] = m;
            out[[j, i]] = m;
        }
    }
    out
}

pub fn check_square<T>(a: ArrayView2<T>) -> Result<usize, LinalgError> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols });
    }
    Ok(rows)
}

/// Checks `max |A - A^T| <= tol * (1 + max |A|)`.
pub fn check_symmetric<T: Scalar>(a: ArrayView2<T>, tol: T) -> Result<(), LinalgError> {
    check_square(a)?;
    if a.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let dev = asymmetry(a);
    if dev > tol * (T::one() + max_abs(a)) {
        return Err(LinalgError::NotSymmetric {
            deviation: dev.to_f64_lossy(),
        });
    }
    Ok(())
}

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Only the upper triangle is trusted; the input is symmetrized first. Output
/// eigenvalues are ascending, ties keep the order the iteration produced.
pub fn symmetric_eigen<T: Scalar>(a: ArrayView2<T>) -> Result<SymmetricEigen<T>, LinalgError> {
    let n = check_square(a)?;
    if a.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let mut m = symmetrize(&a.to_owned());
    let mut q = Array2::<T>::eye(n);
    let frob2: T = m.iter().map(|&x| x * x).sum();
    let eps = T::epsilon();
    let threshold = eps * eps * frob2;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = T::zero();
        for p in 0..n {
            for r in (p + 1)..n {
                off += m[[p, r]] * m[[p, r]];
            }
        }
        if off <= threshold || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = m[[p, r]];
                if apr == T::zero() {
                    continue;
                }
                let app = m[[p, p]];
                let arr = m[[r, r]];
                let theta = (arr - app) / (apr + apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkr = m[[k, r]];
                    m[[k, p]] = c * mkp - s * mkr;
                    m[[k, r]] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mrk = m[[r, k]];
                    m[[p, k]] = c * mpk - s * mrk;
                    m[[r, k]] = s * mpk + c * mrk;
                }
                m[[p, r]] = T::zero();
                m[[r, p]] = T::zero();

                for k in 0..n {
                    let qkp = q[[k, p]];
                    let qkr = q[[k, r]];
                    q[[k, p]] = c * qkp - s * qkr;
                    q[[k, r]] = s * qkp + c * qkr;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[[i, i]]
            .partial_cmp(&m[[j, j]])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = Array2::<T>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&q.column(src));
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Flips `v` so its first component with `|v_i| > threshold` is positive.
pub fn normalize_sign<T: Scalar>(v: &mut Array1<T>, threshold: T) {
    if let Some(first) = v.iter().copied().find(|x| x.abs() > threshold) {
        if first < T::zero() {
            v.mapv_inplace(|x| -x);
        }
    }
}

/// Diagonal matrix from a vector.
pub fn diag<T: Scalar>(d: ArrayView1<T>) -> Array2<T> {
    let n = d.len();
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        out[[i, i]] = d[i];
    }
    out
}

/// Norm of the component of `v` orthogonal to the span of the orthonormal `basis`.
pub fn residual_outside_span<T: Scalar>(v: ArrayView1<T>, basis: &[Array1<T>]) -> T {
    let mut r = v.to_owned();
    for b in basis {
        let c = b.dot(&r);
        r.scaled_add(-c, b);
    }
    norm2(r.view())
}
