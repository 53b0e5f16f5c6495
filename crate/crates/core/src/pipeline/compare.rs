use serde::Serialize;

use super::Error;
use crate::eigenmap::Embedding;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnComparison {
    pub column: usize,
    /// Whether the second column was negated to align it with the first.
    pub flipped: bool,
    /// `max_i |a_i - b_i|` after sign alignment.
    pub max_abs_deviation: f64,
    /// Squared cosine between the columns, in `[0, 1]`.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub tol: f64,
    pub columns: Vec<ColumnComparison>,
    /// `|λ_a - λ_b|` for each column; empty when either side has no eigenvalues.
    pub eigenvalue_deviations: Vec<f64>,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Column-by-column comparison up to sign. Passes when every column deviation
/// and every eigenvalue deviation is at most `tol`.
pub fn compare_embeddings<T: Scalar>(
    a: &Embedding<T>,
    b: &Embedding<T>,
    tol: f64,
) -> Result<ComparisonReport, Error> {
    if a.y.dim() != b.y.dim() {
        return Err(Error::ShapeMismatch {
            a: a.y.dim(),
            b: b.y.dim(),
        });
    }
    let mut columns = Vec::with_capacity(a.d());
    for (j, (ca, cb)) in a.y.columns().into_iter().zip(b.y.columns()).enumerate() {
        let dot = ca.dot(&cb).to_f64_lossy();
        let flipped = dot < 0.0;
        let sign = if flipped { -T::one() } else { T::one() };
        let dev = ca
            .iter()
            .zip(cb.iter())
            .fold(T::zero(), |acc, (&x, &y)| acc.max((x - sign * y).abs()))
            .to_f64_lossy();
        let na = ca.dot(&ca).to_f64_lossy();
        let nb = cb.dot(&cb).to_f64_lossy();
        let fidelity = if na > 0.0 && nb > 0.0 {
            (dot * dot / (na * nb)).min(1.0)
        } else {
            0.0
        };
        columns.push(ColumnComparison {
            column: j,
            flipped,
            max_abs_deviation: dev,
            fidelity,
        });
    }
    let eigenvalue_deviations: Vec<f64> = if a.lambdas.is_empty() || b.lambdas.is_empty() {
        Vec::new()
    } else {
        if a.lambdas.len() != b.lambdas.len() {
            return Err(Error::ShapeMismatch {
                a: (a.lambdas.len(), 1),
                b: (b.lambdas.len(), 1),
            });
        }
        let mut la: Vec<f64> = a.lambdas.iter().map(|x| x.to_f64_lossy()).collect();
        let mut lb: Vec<f64> = b.lambdas.iter().map(|x| x.to_f64_lossy()).collect();
        la.sort_by(f64::total_cmp);
        lb.sort_by(f64::total_cmp);
        la.iter().zip(&lb).map(|(x, y)| (x - y).abs()).collect()
    };
    let max_deviation = columns
        .iter()
        .map(|c| c.max_abs_deviation)
        .chain(eigenvalue_deviations.iter().copied())
        .fold(0.0, f64::max);
    Ok(ComparisonReport {
        tol,
        columns,
        eigenvalue_deviations,
        max_deviation,
        pass: max_deviation <= tol,
    })
}
