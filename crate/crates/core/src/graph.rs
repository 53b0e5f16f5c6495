//! Neighborhood graphs and the matrices derived from them: weights `W`,
//! degrees `D`, the Laplacian `L = D - W` and the incidence factor `B` with
//! `L = B B^T`.

use std::collections::VecDeque;

use ndarray::{Array1, Array2, ArrayView2};
use thiserror::Error;

use crate::dataset::PointCloud;
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("neighbor count k = {k} is outside [1, {max}]")]
    BadNeighborCount { k: usize, max: usize },
    #[error("heat kernel bandwidth must be finite and positive, got {0}")]
    BadBandwidth(f64),
    #[error("weight matrix is not square: {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("weight matrix needs at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("weight ({i}, {j}) is invalid: {reason}")]
    BadWeight {
        i: usize,
        j: usize,
        reason: &'static str,
    },
    #[error("embedding has {found} rows but the graph has {expected} vertices")]
    RowMismatch { expected: usize, found: usize },
}

/// Edge weighting for neighbor pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel<T> {
    /// `exp(-|x_i - x_j|^2 / t)`.
    Heat { t: T },
    /// Every edge weighs 1.
    Binary,
}

impl<T: Scalar> Kernel<T> {
    fn weight(&self, dist2: T) -> T {
        match *self {
            Kernel::Heat { t } => (-dist2 / t).exp(),
            Kernel::Binary => T::one(),
        }
    }
}

/// Symmetric non-negative weight matrix with an empty diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborhoodGraph<T> {
    weights: Array2<T>,
    k: Option<usize>,
    kernel: Option<Kernel<T>>,
}

impl<T: Scalar> NeighborhoodGraph<T> {
    /// Wraps an explicit weight matrix. The matrix must be exactly symmetric,
    /// finite, non-negative and zero on the diagonal.
    pub fn from_weights(weights: Array2<T>) -> Result<Self, GraphError> {
        let (rows, cols) = weights.dim();
        if rows != cols {
            return Err(GraphError::NotSquare { rows, cols });
        }
        if rows < 2 {
            return Err(GraphError::TooSmall(rows));
        }
        for i in 0..rows {
            if weights[[i, i]] != T::zero() {
                return Err(GraphError::BadWeight {
                    i,
                    j: i,
                    reason: "diagonal must be zero",
                });
            }
            for j in 0..rows {
                let w = weights[[i, j]];
                if !w.is_finite() {
                    return Err(GraphError::BadWeight {
                        i,
                        j,
                        reason: "not finite",
                    });
                }
                if w < T::zero() {
                    return Err(GraphError::BadWeight {
                        i,
                        j,
                        reason: "negative",
                    });
                }
                if w != weights[[j, i]] {
                    return Err(GraphError::BadWeight {
                        i,
                        j,
                        reason: "not symmetric",
                    });
                }
            }
        }
        Ok(Self {
            weights,
            k: None,
            kernel: None,
        })
    }

    /// Builds a graph from an undirected edge list `(i, j, w)`.
    pub fn from_edges(m: usize, edges: &[(usize, usize, T)]) -> Result<Self, GraphError> {
        let mut w = Array2::zeros((m, m));
        for &(i, j, wt) in edges {
            if i >= m || j >= m {
                return Err(GraphError::BadWeight {
                    i,
                    j,
                    reason: "vertex out of range",
                });
            }
            if i == j {
                return Err(GraphError::BadWeight {
                    i,
                    j,
                    reason: "self loop",
                });
            }
            w[[i, j]] = wt;
            w[[j, i]] = wt;
        }
        Self::from_weights(w)
    }

    pub fn weights(&self) -> &Array2<T> {
        &self.weights
    }

    pub fn m(&self) -> usize {
        self.weights.nrows()
    }

    /// Neighbor count, when built from a point cloud.
    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn kernel(&self) -> Option<Kernel<T>> {
        self.kernel
    }

    /// Vertices with no positive weight.
    pub fn isolated_vertices(&self) -> Vec<usize> {
        (0..self.m())
            .filter(|&i| self.weights.row(i).iter().all(|&w| w == T::zero()))
            .collect()
    }

    /// Unordered pairs `i < j` with positive weight, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let m = self.m();
        let mut out = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                let w = self.weights[[i, j]];
                if w > T::zero() {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn connected_components(&self) -> usize {
        component_labels(self.weights.view()).1
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components() == 1
    }
}

/// Component label per vertex plus the component count (BFS over positive weights).
fn component_labels<T: Scalar>(w: ArrayView2<T>) -> (Vec<usize>, usize) {
    let m = w.nrows();
    let mut label = vec![usize::MAX; m];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..m {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for v in 0..m {
                if label[v] == usize::MAX && w[[u, v]] > T::zero() {
                    label[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

fn squared_distances<T: Scalar>(pc: &PointCloud<T>) -> Array2<T> {
    let x = pc.points();
    let m = pc.m();
    let mut d2 = Array2::zeros((m, m));
    for i in 0..m {
        for j in (i + 1)..m {
            let d: T = x
                .row(i)
                .iter()
                .zip(x.row(j).iter())
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            d2[[i, j]] = d;
            d2[[j, i]] = d;
        }
    }
    d2
}

/// Indices of the `k` nearest neighbors of every vertex; ties go to the lower index.
fn knn_lists<T: Scalar>(d2: &Array2<T>, k: usize) -> Vec<Vec<usize>> {
    let m = d2.nrows();
    (0..m)
        .map(|i| {
            let mut others: Vec<usize> = (0..m).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| {
                d2[[i, a]]
                    .partial_cmp(&d2[[i, b]])
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.cmp(&b))
            });
            others.truncate(k);
            others
        })
        .collect()
}

/// Mean squared distance from each point to its `k` nearest neighbors. A
/// reasonable default bandwidth for the heat kernel.
pub fn mean_knn_sq_distance<T: Scalar>(pc: &PointCloud<T>, k: usize) -> Result<T, GraphError> {
    let m = pc.m();
    if k < 1 || k > m - 1 {
        return Err(GraphError::BadNeighborCount { k, max: m - 1 });
    }
    let d2 = squared_distances(pc);
    let lists = knn_lists(&d2, k);
    let total: T = lists
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.iter().map(move |&j| (i, j)))
        .map(|(i, j)| d2[[i, j]])
        .sum();
    Ok(total / T::lit((m * k) as f64))
}

/// Union-symmetrized k-nearest-neighbor graph: `(i, j)` is an edge when either
/// endpoint lists the other among its `k` nearest (Euclidean) neighbors.
pub fn build_knn_graph<T: Scalar>(
    pc: &PointCloud<T>,
    k: usize,
    kernel: Kernel<T>,
) -> Result<NeighborhoodGraph<T>, GraphError> {
    let m = pc.m();
    if k < 1 || k > m - 1 {
        return Err(GraphError::BadNeighborCount { k, max: m - 1 });
    }
    if let Kernel::Heat { t } = kernel {
        if !(t.is_finite() && t > T::zero()) {
            return Err(GraphError::BadBandwidth(t.to_f64_lossy()));
        }
    }
    let d2 = squared_distances(pc);
    let mut w = Array2::zeros((m, m));
    for (i, nbrs) in knn_lists(&d2, k).into_iter().enumerate() {
        for j in nbrs {
            let wt = kernel.weight(d2[[i, j]]);
            w[[i, j]] = wt;
            w[[j, i]] = wt;
        }
    }
    Ok(NeighborhoodGraph {
        weights: w,
        k: Some(k),
        kernel: Some(kernel),
    })
}

/// `W`, `D`, `L = D - W`, incidence factor `B` and the component count.
#[derive(Debug, Clone)]
pub struct LaplacianBundle<T> {
    pub weights: Array2<T>,
    /// Diagonal of `D`.
    pub degrees: Array1<T>,
    pub laplacian: Array2<T>,
    pub incidence: Array2<T>,
    pub components: usize,
}

impl<T: Scalar> LaplacianBundle<T> {
    pub fn m(&self) -> usize {
        self.weights.nrows()
    }

    pub fn degree_matrix(&self) -> Array2<T> {
        crate::linalg::diag(self.degrees.view())
    }

    /// First vertex with zero degree, if any.
    pub fn first_isolated(&self) -> Option<usize> {
        self.degrees.iter().position(|&d| d <= T::zero())
    }
}

pub fn degree_and_laplacian<T: Scalar>(g: &NeighborhoodGraph<T>) -> LaplacianBundle<T> {
    let w = g.weights().clone();
    let m = g.m();
    let degrees = Array1::from_iter(w.rows().into_iter().map(|r| r.sum()));
    let mut laplacian = w.mapv(|x| -x);
    for i in 0..m {
        laplacian[[i, i]] = degrees[i];
    }
    LaplacianBundle {
        incidence: incidence_factor(g),
        components: g.connected_components(),
        weights: w,
        degrees,
        laplacian,
    }
}

/// One column per edge `i < j` (lexicographic): `+sqrt(w)` at row `i`,
/// `-sqrt(w)` at row `j`.
pub fn incidence_factor<T: Scalar>(g: &NeighborhoodGraph<T>) -> Array2<T> {
    let edges = g.edges();
    let mut b = Array2::zeros((g.m(), edges.len()));
    for (col, (i, j, w)) in edges.into_iter().enumerate() {
        let r = w.sqrt();
        b[[i, col]] = r;
        b[[j, col]] = -r;
    }
    b
}

/// `sum over ordered pairs (i, j) of w_ij |y_i - y_j|^2`.
pub fn objective_value<T: Scalar>(
    bundle: &LaplacianBundle<T>,
    y: ArrayView2<T>,
) -> Result<T, GraphError> {
    let m = bundle.m();
    if y.nrows() != m {
        return Err(GraphError::RowMismatch {
            expected: m,
            found: y.nrows(),
        });
    }
    let mut total = T::zero();
    for i in 0..m {
        for j in 0..m {
            let w = bundle.weights[[i, j]];
            if w == T::zero() {
                continue;
            }
            let d2: T = y
                .row(i)
                .iter()
                .zip(y.row(j).iter())
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum();
            total += w * d2;
        }
    }
    Ok(total)
}

/// `2 trace(Y^T L Y)`, the matrix form of [`objective_value`].
pub fn laplacian_quadratic_form<T: Scalar>(
    bundle: &LaplacianBundle<T>,
    y: ArrayView2<T>,
) -> Result<T, GraphError> {
    let m = bundle.m();
    if y.nrows() != m {
        return Err(GraphError::RowMismatch {
            expected: m,
            found: y.nrows(),
        });
    }
    let ly = bundle.laplacian.dot(&y);
    let tr: T = y.iter().zip(ly.iter()).map(|(&a, &b)| a * b).sum();
    Ok(tr + tr)
}
