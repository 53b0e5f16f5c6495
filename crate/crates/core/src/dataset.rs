//! Point clouds: CSV interchange and synthetic manifold generators.
//!
//! The CSV format has no header, one sample per line, comma-separated reals
//! with `.` as the decimal point and LF line endings.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, field {field}: cannot parse {text:?} as a real number")]
    NonNumeric {
        line: usize,
        field: usize,
        text: String,
    },
    #[error("line {line}, field {field}: value is not finite")]
    NonFinite { line: usize, field: usize },
    #[error("a point cloud needs at least 2 samples, got {0}")]
    TooFewPoints(usize),
    #[error("a point cloud needs at least 1 feature column")]
    NoFeatures,
    #[error("noise must be a finite non-negative number, got {0}")]
    BadNoise(f64),
    #[error("unknown generator {0:?} (expected ring, swiss-roll or two-moons)")]
    UnknownKind(String),
}

/// `m` samples in `n`-dimensional ambient space, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T> {
    points: Array2<T>,
}

impl<T: Scalar> PointCloud<T> {
    pub fn new(points: Array2<T>) -> Result<Self, DatasetError> {
        let (m, n) = points.dim();
        if m < 2 {
            return Err(DatasetError::TooFewPoints(m));
        }
        if n < 1 {
            return Err(DatasetError::NoFeatures);
        }
        if let Some(((i, j), _)) = points.indexed_iter().find(|(_, x)| !x.is_finite()) {
            return Err(DatasetError::NonFinite {
                line: i + 1,
                field: j + 1,
            });
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &Array2<T> {
        &self.points
    }

    /// Number of samples.
    pub fn m(&self) -> usize {
        self.points.nrows()
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.points.ncols()
    }

    pub fn into_inner(self) -> Array2<T> {
        self.points
    }
}

/// Parses the CSV body of a point cloud.
pub fn parse_points<T: Scalar + FromStr>(text: &str) -> Result<PointCloud<T>, DatasetError> {
    let mut rows: Vec<Vec<T>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if raw.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (fidx, field) in raw.split(',').enumerate() {
            let text = field.trim();
            let value: T = text.parse().map_err(|_| DatasetError::NonNumeric {
                line,
                field: fidx + 1,
                text: text.to_string(),
            })?;
            if !value.is_finite() {
                return Err(DatasetError::NonFinite {
                    line,
                    field: fidx + 1,
                });
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(DatasetError::RaggedRow {
                    line,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    let m = rows.len();
    if m < 2 {
        return Err(DatasetError::TooFewPoints(m));
    }
    let n = rows[0].len();
    let flat: Vec<T> = rows.into_iter().flatten().collect();
    let points = Array2::from_shape_vec((m, n), flat).expect("rectangular rows");
    PointCloud::new(points)
}

pub fn load_points<T: Scalar + FromStr>(
    path: impl AsRef<Path>,
) -> Result<PointCloud<T>, DatasetError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_points(&text)
}

/// Renders a matrix in the interchange format. Values use the shortest
/// decimal form that parses back to the same bits.
pub fn format_matrix<T: Scalar>(a: &Array2<T>) -> String {
    let mut out = String::new();
    for row in a.rows() {
        let mut first = true;
        for x in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&x.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn save_matrix<T: Scalar>(a: &Array2<T>, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    fs::write(path, format_matrix(a)).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_points<T: Scalar>(
    pc: &PointCloud<T>,
    path: impl AsRef<Path>,
) -> Result<(), DatasetError> {
    save_matrix(pc.points(), path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldKind {
    /// Unit circle in the plane.
    Ring,
    /// Rolled-up rectangle in 3-D.
    SwissRoll,
    /// Two interleaved half circles in the plane.
    TwoMoons,
}

impl ManifoldKind {
    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::Ring => "ring",
            ManifoldKind::SwissRoll => "swiss-roll",
            ManifoldKind::TwoMoons => "two-moons",
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ManifoldKind {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ring" => Ok(ManifoldKind::Ring),
            "swiss-roll" | "swissroll" | "swiss_roll" => Ok(ManifoldKind::SwissRoll),
            "two-moons" | "moons" | "two_moons" => Ok(ManifoldKind::TwoMoons),
            other => Err(DatasetError::UnknownKind(other.to_string())),
        }
    }
}

/// Deterministic synthetic manifold sample.
///
/// With `noise = 0` the ring and two-moons layouts are evenly spaced and do not
/// touch the generator; the swiss roll always draws its parameters from the
/// seeded stream. Gaussian noise with standard deviation `noise` is added to
/// every coordinate.
pub fn generate_synthetic<T: Scalar>(
    kind: ManifoldKind,
    m: usize,
    noise: f64,
    seed: u64,
) -> Result<PointCloud<T>, DatasetError> {
    if m < 2 {
        return Err(DatasetError::TooFewPoints(m));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(DatasetError::BadNoise(noise));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Array2<f64> = match kind {
        ManifoldKind::Ring => {
            let mut a = Array2::zeros((m, 2));
            for k in 0..m {
                let (s, c) = ring_angle(k, m);
                a[[k, 0]] = c;
                a[[k, 1]] = s;
            }
            a
        }
        ManifoldKind::SwissRoll => {
            let mut a = Array2::zeros((m, 3));
            let pi = std::f64::consts::PI;
            for k in 0..m {
                let t = 1.5 * pi * (1.0 + 2.0 * rng.random::<f64>());
                let h = 21.0 * rng.random::<f64>();
                a[[k, 0]] = t * t.cos();
                a[[k, 1]] = h;
                a[[k, 2]] = t * t.sin();
            }
            a
        }
        ManifoldKind::TwoMoons => {
            let outer = m.div_ceil(2);
            let inner = m - outer;
            let pi = std::f64::consts::PI;
            let mut a = Array2::zeros((m, 2));
            for k in 0..outer {
                let th = if outer > 1 {
                    pi * k as f64 / (outer - 1) as f64
                } else {
                    0.0
                };
                a[[k, 0]] = th.cos();
                a[[k, 1]] = th.sin();
            }
            for k in 0..inner {
                let th = if inner > 1 {
                    pi * k as f64 / (inner - 1) as f64
                } else {
                    0.0
                };
                a[[outer + k, 0]] = 1.0 - th.cos();
                a[[outer + k, 1]] = 0.5 - th.sin();
            }
            a
        }
    };
    if noise > 0.0 {
        let normal = Normal::new(0.0, noise).map_err(|_| DatasetError::BadNoise(noise))?;
        pts.mapv_inplace(|x| x + normal.sample(&mut rng));
    }
    PointCloud::new(pts.mapv(T::lit))
}

/// `(sin, cos)` of `2πk/m`, snapped to exact values on the quarter turns.
fn ring_angle(k: usize, m: usize) -> (f64, f64) {
    if (4 * k).is_multiple_of(m) {
        match (4 * k / m) % 4 {
            0 => return (0.0, 1.0),
            1 => return (1.0, 0.0),
            2 => return (0.0, -1.0),
            _ => return (-1.0, 0.0),
        }
    }
    (2.0 * std::f64::consts::PI * k as f64 / m as f64).sin_cos()
}
