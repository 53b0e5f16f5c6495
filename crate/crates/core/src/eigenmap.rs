//! Exact solution of the generalized problem `L v = λ D v` and the embedding
//! built from its smallest nonzero modes. Every simulated result in the crate
//! is checked against this module.

use std::cmp::Ordering;

use ndarray::{Array1, Array2};
use serde::Serialize;
use thiserror::Error;

use crate::graph::LaplacianBundle;
use crate::linalg::{self, normalize_sign, symmetric_eigen, LinalgError};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenmapError {
    #[error("vertex {0} is isolated (zero degree); the generalized problem is singular")]
    IsolatedVertex(usize),
    #[error(
        "requested {requested} embedding dimensions but only {available} nonzero eigenvalues exist"
    )]
    DimensionTooLarge { requested: usize, available: usize },
    #[error("embedding dimension must be at least 1")]
    ZeroDimension,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Sign threshold: the first component larger than this in magnitude is positive.
pub const SIGN_THRESHOLD: f64 = 1e-8;

/// A solution `(λ, v)` of `L v = λ D v` with `v^T D v = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedEigenpair<T> {
    pub lambda: T,
    pub v: Array1<T>,
}

/// Row `i` of `y` is the low-dimensional image of sample `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<T> {
    pub y: Array2<T>,
    pub lambdas: Vec<T>,
}

impl<T: Scalar> Embedding<T> {
    pub fn m(&self) -> usize {
        self.y.nrows()
    }

    pub fn d(&self) -> usize {
        self.y.ncols()
    }
}

#[derive(Debug, Serialize)]
struct EmbeddingSidecar {
    rows: usize,
    dims: usize,
    lambdas: Vec<f64>,
}

/// JSON listing the selected eigenvalues of an embedding.
pub fn embedding_sidecar_json<T: Scalar>(e: &Embedding<T>) -> String {
    let side = EmbeddingSidecar {
        rows: e.m(),
        dims: e.d(),
        lambdas: e.lambdas.iter().map(|x| x.to_f64_lossy()).collect(),
    };
    serde_json::to_string_pretty(&side).expect("plain data serializes")
}

/// `D^{-1/2}` as a vector, failing on the first zero-degree vertex.
pub(crate) fn inv_sqrt_degrees<T: Scalar>(
    bundle: &LaplacianBundle<T>,
) -> Result<Array1<T>, EigenmapError> {
    if let Some(i) = bundle.first_isolated() {
        return Err(EigenmapError::IsolatedVertex(i));
    }
    Ok(bundle.degrees.mapv(|d| T::one() / d.sqrt()))
}

/// Every generalized eigenpair, ascending in `λ`.
///
/// Solved through the symmetric reduction `N = D^{-1/2} L D^{-1/2}` and mapped
/// back with `v = D^{-1/2} w`. Within a degenerate cluster the vectors are
/// ordered lexicographically after sign normalization.
pub fn generalized_eigenpairs<T: Scalar>(
    bundle: &LaplacianBundle<T>,
) -> Result<Vec<GeneralizedEigenpair<T>>, EigenmapError> {
    let dinv = inv_sqrt_degrees(bundle)?;
    let m = bundle.m();
    let n = Array2::from_shape_fn((m, m), |(i, j)| {
        dinv[i] * bundle.laplacian[[i, j]] * dinv[j]
    });
    let eig = symmetric_eigen(n.view())?;
    let neg_tol = T::lit(T::RANK_EPS) * (T::one() + eig.spectral_radius());
    let sign_thr = T::lit(SIGN_THRESHOLD);

    let mut pairs: Vec<GeneralizedEigenpair<T>> = (0..m)
        .map(|k| {
            let mut v = &eig.vectors.column(k) * &dinv;
            normalize_sign(&mut v, sign_thr);
            let mut lambda = eig.values[k];
            if lambda < T::zero() && lambda >= -neg_tol {
                lambda = T::zero();
            }
            GeneralizedEigenpair { lambda, v }
        })
        .collect();

    order_degenerate(&mut pairs, cluster_tol::<T>());
    Ok(pairs)
}

pub(crate) fn cluster_tol<T: Scalar>() -> T {
    T::lit(T::RANK_EPS * 1e2)
}

fn lex_cmp<T: Scalar>(a: &Array1<T>, b: &Array1<T>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    Ordering::Equal
}

fn order_degenerate<T: Scalar>(pairs: &mut [GeneralizedEigenpair<T>], tol: T) {
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end].lambda - pairs[end - 1].lambda <= tol {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| lex_cmp(&a.v, &b.v));
        }
        start = end;
    }
}

/// Drops the zero modes (one per connected component, plus anything at or
/// below `RANK_EPS * λ_max`) and keeps the next `d` pairs as columns.
pub fn embed<T: Scalar>(
    pairs: &[GeneralizedEigenpair<T>],
    d: usize,
    components: usize,
) -> Result<Embedding<T>, EigenmapError> {
    if d == 0 {
        return Err(EigenmapError::ZeroDimension);
    }
    let lambda_max = pairs.iter().fold(T::zero(), |acc, p| acc.max(p.lambda));
    let zero_thr = T::lit(T::RANK_EPS) * lambda_max;
    let nonzero: Vec<&GeneralizedEigenpair<T>> = pairs
        .iter()
        .skip(components)
        .filter(|p| p.lambda > zero_thr)
        .collect();
    if nonzero.len() < d {
        return Err(EigenmapError::DimensionTooLarge {
            requested: d,
            available: nonzero.len(),
        });
    }
    let m = pairs.first().map_or(0, |p| p.v.len());
    let mut y = Array2::zeros((m, d));
    let mut lambdas = Vec::with_capacity(d);
    for (j, p) in nonzero.into_iter().take(d).enumerate() {
        y.column_mut(j).assign(&p.v);
        lambdas.push(p.lambda);
    }
    Ok(Embedding { y, lambdas })
}

/// `|L v - λ D v|_2`.
pub fn generalized_residual<T: Scalar>(bundle: &LaplacianBundle<T>, lambda: T, v: &Array1<T>) -> T {
    let lv = bundle.laplacian.dot(v);
    let r = &lv - &(&bundle.degrees * v * lambda);
    linalg::norm2(r.view())
}
