//! Hermitian chain product `F = L^{1/2} D^{-1/2}`, `G = F F^T`.
//!
//! The nonzero spectrum of `G` equals the nonzero generalized spectrum of
//! `(L, D)`, which is what lets phase estimation on `exp(2πi s G)` read out the
//! eigenmap spectrum. Eigenvectors map back through `v = D^{-1} L^{1/2} u`:
//! `L D^{-1} L^{1/2} u = L^{1/2} G u = λ L^{1/2} u = λ D v`.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use thiserror::Error;

use crate::eigenmap::{inv_sqrt_degrees, EigenmapError, GeneralizedEigenpair, SIGN_THRESHOLD};
use crate::graph::LaplacianBundle;
use crate::linalg::{
    self, check_symmetric, normalize_sign, symmetric_eigen, LinalgError, SymmetricEigen,
};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("matrix is not positive semidefinite: eigenvalue {min:e} is below -{threshold:e}")]
    NotPsd { min: f64, threshold: f64 },
    #[error("spectral scale must lie in (0, 1/2], got {0}")]
    BadScale(f64),
    #[error("eigenvalue {lambda:e} is at or below the zero threshold {threshold:e}")]
    ZeroMode { lambda: f64, threshold: f64 },
    #[error("vector lies in the kernel of L^(1/2)")]
    KernelVector,
    #[error("vector is not an eigenvector of G for the given eigenvalue: residual {residual:e}")]
    NotAnEigenvector { residual: f64 },
    #[error("vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Eigenmap(#[from] EigenmapError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Spectral scale used when none is configured: `λ ∈ [0, 2]` keeps `s λ ≤ 1/2`.
pub const DEFAULT_SCALE: f64 = 0.25;

/// Tolerance on `|G u - λ u|` for vectors handed to the recovery map.
pub fn eigen_residual_tol<T: Scalar>() -> T {
    T::lit(T::RANK_EPS * 1e2)
}

/// Principal square root of a symmetric positive semidefinite matrix.
///
/// Eigenvalues within `eps_rank * λ_max` of zero are clamped to zero; anything
/// more negative is rejected.
pub fn sqrt_psd<T: Scalar>(a: ArrayView2<T>, eps_rank: T) -> Result<Array2<T>, ChainError> {
    check_symmetric(a, T::lit(T::CHECK_TOL))?;
    let eig = symmetric_eigen(a)?;
    sqrt_from_eigen(&eig, eps_rank)
}

fn sqrt_from_eigen<T: Scalar>(
    eig: &SymmetricEigen<T>,
    eps_rank: T,
) -> Result<Array2<T>, ChainError> {
    let threshold = eps_rank * eig.spectral_radius();
    if let Some(&min) = eig.values.iter().find(|&&x| x < -threshold) {
        return Err(ChainError::NotPsd {
            min: min.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    Ok(eig.map_values(|x| if x <= threshold { T::zero() } else { x.sqrt() }))
}

/// `F`, `G = F F^T` and the phase-encoding scale `s` with `s λ_max(G) < 1`.
#[derive(Debug, Clone)]
pub struct ChainOperator<T> {
    pub f: Array2<T>,
    pub g: Array2<T>,
    pub scale: T,
    pub eps_rank: T,
    sqrt_laplacian: Array2<T>,
    g_eigen: SymmetricEigen<T>,
}

impl<T: Scalar> ChainOperator<T> {
    pub fn m(&self) -> usize {
        self.g.nrows()
    }

    /// Eigendecomposition of `G`, ascending.
    pub fn eigen(&self) -> &SymmetricEigen<T> {
        &self.g_eigen
    }

    pub fn lambda_max(&self) -> T {
        self.g_eigen
            .values
            .iter()
            .fold(T::zero(), |acc, &x| acc.max(x))
    }

    /// Eigenvalues at or below this count as zero modes.
    pub fn zero_threshold(&self) -> T {
        self.eps_rank * self.lambda_max()
    }

    pub fn sqrt_laplacian(&self) -> &Array2<T> {
        &self.sqrt_laplacian
    }

    /// Nonzero eigenvalues of `G`, ascending.
    pub fn nonzero_spectrum(&self) -> Vec<T> {
        let thr = self.zero_threshold();
        self.g_eigen
            .values
            .iter()
            .copied()
            .filter(|&x| x > thr)
            .collect()
    }

    /// `|G u - λ u|_2`.
    pub fn residual(&self, u: ArrayView1<T>, lambda: T) -> T {
        let gu = self.g.dot(&u);
        let r = &gu - &(&u * lambda);
        linalg::norm2(r.view())
    }

    /// Maps a unit eigenvector `u` of `G` with nonzero eigenvalue to the
    /// D-normalized generalized eigenvector `v = D^{-1} L^{1/2} u`.
    pub fn recover(
        &self,
        u: ArrayView1<T>,
        lambda: T,
        bundle: &LaplacianBundle<T>,
    ) -> Result<GeneralizedEigenpair<T>, ChainError> {
        let m = self.m();
        if u.len() != m {
            return Err(ChainError::LengthMismatch {
                expected: m,
                found: u.len(),
            });
        }
        let threshold = self.zero_threshold();
        if lambda <= threshold {
            return Err(ChainError::ZeroMode {
                lambda: lambda.to_f64_lossy(),
                threshold: threshold.to_f64_lossy(),
            });
        }
        let norm = linalg::norm2(u);
        if norm == T::zero() {
            return Err(ChainError::KernelVector);
        }
        let u = &u / norm;
        let residual = self.residual(u.view(), lambda);
        if residual > eigen_residual_tol::<T>() * (T::one() + self.lambda_max()) {
            return Err(ChainError::NotAnEigenvector {
                residual: residual.to_f64_lossy(),
            });
        }
        let lu = self.sqrt_laplacian.dot(&u);
        if linalg::norm2(lu.view()) <= self.eps_rank {
            return Err(ChainError::KernelVector);
        }
        let mut v = &lu / &bundle.degrees;
        let vdv: T = v
            .iter()
            .zip(bundle.degrees.iter())
            .map(|(&x, &d)| x * x * d)
            .sum();
        v /= vdv.sqrt();
        normalize_sign(&mut v, T::lit(SIGN_THRESHOLD));
        Ok(GeneralizedEigenpair { lambda, v })
    }
}

/// Builds `F = L^{1/2} D^{-1/2}` and `G = L^{1/2} D^{-1} L^{1/2}`.
///
/// If `s λ_max(G) >= 1` the scale is halved (with a warning) until the phase
/// encoding has headroom.
pub fn build_chain_operator<T: Scalar>(
    bundle: &LaplacianBundle<T>,
    s: T,
) -> Result<ChainOperator<T>, ChainError> {
    build_chain_operator_with(bundle, s, T::lit(T::RANK_EPS))
}

pub fn build_chain_operator_with<T: Scalar>(
    bundle: &LaplacianBundle<T>,
    s: T,
    eps_rank: T,
) -> Result<ChainOperator<T>, ChainError> {
    if !(s > T::zero() && s <= T::lit(0.5)) {
        return Err(ChainError::BadScale(s.to_f64_lossy()));
    }
    let dinv = inv_sqrt_degrees(bundle)?;
    let sqrt_laplacian = sqrt_psd(bundle.laplacian.view(), eps_rank)?;
    let m = bundle.m();
    let f = Array2::from_shape_fn((m, m), |(i, j)| sqrt_laplacian[[i, j]] * dinv[j]);
    let g = linalg::symmetrize(&f.dot(&f.t()));
    let g_eigen = symmetric_eigen(g.view())?;

    let mut op = ChainOperator {
        f,
        g,
        scale: s,
        eps_rank,
        sqrt_laplacian,
        g_eigen,
    };
    let lmax = op.lambda_max();
    // Rounding can leave λ_max a hair below an exact bound like 2.
    let limit = T::one() - eigen_residual_tol::<T>();
    while op.scale * lmax >= limit {
        let halved = op.scale * T::lit(0.5);
        log::warn!(
            "spectral scale {} leaves no phase headroom for λ_max = {}; using {}",
            op.scale,
            lmax,
            halved
        );
        op.scale = halved;
    }
    Ok(op)
}

/// Free-standing recovery map; builds the chain operator for `bundle` first.
pub fn recover_eigenvector<T: Scalar>(
    u: &Array1<T>,
    lambda: T,
    bundle: &LaplacianBundle<T>,
) -> Result<GeneralizedEigenpair<T>, ChainError> {
    build_chain_operator(bundle, T::lit(DEFAULT_SCALE))?.recover(u.view(), lambda, bundle)
}
