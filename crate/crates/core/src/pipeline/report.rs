use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use ndarray::Array2;
use serde::Serialize;
use serde_json::{json, Value};

use super::classical::ClassicalRun;
use super::config::{OutputFormat, RunConfig};
use super::quantum::QuantumRun;
use super::Error;
use crate::dataset::{format_matrix, parse_points};
use crate::eigenmap::Embedding;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize)]
struct StageTime {
    stage: String,
    seconds: f64,
}

/// Wall-clock stage times; serializes to `null` unless enabled so that
/// reports stay byte-identical across runs by default.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct Timings(Option<Vec<StageTime>>);

impl Timings {
    pub fn new(enabled: bool) -> Self {
        Self(enabled.then(Vec::new))
    }

    pub fn record(&mut self, stage: &str, since: Instant) {
        if let Some(v) = &mut self.0 {
            v.push(StageTime {
                stage: stage.to_string(),
                seconds: since.elapsed().as_secs_f64(),
            });
        }
    }

    pub fn extend(&mut self, other: &Timings) {
        if let (Some(v), Some(o)) = (&mut self.0, &other.0) {
            v.extend(o.iter().cloned());
        }
    }
}

fn to_f64s<T: Scalar>(xs: &[T]) -> Vec<f64> {
    xs.iter().map(|x| x.to_f64_lossy()).collect()
}

fn config_echo<T: Scalar>(cfg: &RunConfig, heat_t: Option<T>) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    v["heat_t_resolved"] = json!(heat_t.map(|t| t.to_f64_lossy()));
    v
}

fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

/// `<out>.json`: where the diagnostics of a CSV embedding go.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn classical_diagnostics_json<T: Scalar>(cfg: &RunConfig, run: &ClassicalRun<T>) -> String {
    let e = &run.embedding;
    let table: Vec<Value> = e
        .lambdas
        .iter()
        .enumerate()
        .map(|(i, l)| json!({ "index": i, "lambda": l.to_f64_lossy() }))
        .collect();
    to_string(&json!({
        "mode": "classical",
        "config": config_echo(cfg, run.heat_t),
        "rows": e.m(),
        "dims": e.d(),
        "components": run.bundle.components,
        "lambdas": to_f64s(&e.lambdas),
        "spectrum": run.pairs.iter().map(|p| p.lambda.to_f64_lossy()).collect::<Vec<_>>(),
        "eigenvalues": table,
        "outcomes": Value::Null,
        "fidelities": Value::Null,
        "timings": run.timings,
    }))
}

pub fn quantum_diagnostics_json<T: Scalar>(cfg: &RunConfig, run: &QuantumRun<T>) -> String {
    let d = &run.diagnostics;
    let fidelities: Vec<Value> = d
        .eigenvalues
        .iter()
        .map(|r| {
            json!({
                "index": r.index,
                "state_fidelity": r.state_fidelity,
                "vector_fidelity": r.vector_fidelity,
                "subspace_residual": r.subspace_residual,
            })
        })
        .collect();
    to_string(&json!({
        "mode": "quantum",
        "config": config_echo(cfg, run.heat_t),
        "rows": run.embedding.m(),
        "dims": run.embedding.d(),
        "components": d.components,
        "lambdas": to_f64s(&run.embedding.lambdas),
        "scale": d.scale,
        "layout": d.layout,
        "way1_total_probability": d.way1_total_probability,
        "eigenvalues": d.eigenvalues,
        "outcomes": d.outcomes,
        "fidelities": fidelities,
        "timings": run.timings,
    }))
}

/// `{"embedding": rows, "lambdas": [...]}` plus optional diagnostics.
pub fn embedding_json<T: Scalar>(e: &Embedding<T>, diagnostics: Option<&str>) -> String {
    let rows: Vec<Vec<f64>> =
        e.y.rows()
            .into_iter()
            .map(|r| r.iter().map(|x| x.to_f64_lossy()).collect())
            .collect();
    let diag = diagnostics.map_or(Value::Null, |d| {
        serde_json::from_str(d).expect("diagnostics are json")
    });
    to_string(&json!({
        "embedding": rows,
        "lambdas": to_f64s(&e.lambdas),
        "diagnostics": diag,
    }))
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes an embedding in `format`. CSV puts the diagnostics next to it at
/// [`sidecar_path`]; JSON keeps everything in one document.
pub fn write_embedding<T: Scalar>(
    path: &Path,
    e: &Embedding<T>,
    format: OutputFormat,
    diagnostics: &str,
) -> Result<(), Error> {
    match format {
        OutputFormat::Csv => {
            write(path, &format_matrix(&e.y))?;
            write(&sidecar_path(path), diagnostics)
        }
        OutputFormat::Json => write(path, &embedding_json(e, Some(diagnostics))),
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn lambdas_from(v: &Value, path: &Path) -> Result<Vec<f64>, Error> {
    match v.get("lambdas") {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(xs)) => xs
            .iter()
            .map(|x| {
                x.as_f64()
                    .ok_or_else(|| Error::Parse(format!("{}: non-numeric lambda", path.display())))
            })
            .collect(),
        Some(_) => Err(Error::Parse(format!(
            "{}: \"lambdas\" is not an array",
            path.display()
        ))),
    }
}

/// Reads an embedding written by [`write_embedding`]. Eigenvalues come from
/// the sidecar (CSV) or the document itself (JSON) and are empty when absent.
pub fn load_embedding<T: Scalar + FromStr>(path: &Path) -> Result<Embedding<T>, Error> {
    let text = read(path)?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let (y, lambdas) = if is_json {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let rows = v
            .get("embedding")
            .and_then(Value::as_array)
            .ok_or_else(|| {
                Error::Parse(format!("{}: missing \"embedding\" array", path.display()))
            })?;
        let d = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
        let mut y = Array2::zeros((rows.len(), d));
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_array().filter(|r| r.len() == d).ok_or_else(|| {
                Error::Parse(format!(
                    "{}: row {i} is not a list of {d} numbers",
                    path.display()
                ))
            })?;
            for (j, x) in r.iter().enumerate() {
                let x = x.as_f64().ok_or_else(|| {
                    Error::Parse(format!("{}: row {i} is not numeric", path.display()))
                })?;
                y[[i, j]] = T::lit(x);
            }
        }
        (y, lambdas_from(&v, path)?)
    } else {
        let y = parse_points::<T>(&text)?.into_inner();
        let side = sidecar_path(path);
        let lambdas = if side.exists() {
            let v: Value = serde_json::from_str(&read(&side)?)
                .map_err(|e| Error::Parse(format!("{}: {e}", side.display())))?;
            lambdas_from(&v, &side)?
        } else {
            Vec::new()
        };
        (y, lambdas)
    };
    Ok(Embedding {
        y,
        lambdas: lambdas.into_iter().map(T::lit).collect(),
    })
}
