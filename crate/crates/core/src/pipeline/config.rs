use std::path::PathBuf;

use serde::Serialize;

use super::Error;
use crate::chain::DEFAULT_SCALE;
use crate::dataset::ManifoldKind;

pub const DEFAULT_K: usize = 2;
pub const DEFAULT_DIMS: usize = 2;
pub const DEFAULT_PHASE_BITS: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-2;
pub const MAX_PHASE_BITS: usize = 16;
/// Largest graph the quantum path will simulate.
pub const MAX_QUANTUM_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DataSource {
    File {
        path: PathBuf,
    },
    Generate {
        manifold: ManifoldKind,
        m: usize,
        noise: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    Heat,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// System-register input for the amplified (Way 2) phase estimation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Way2Input {
    /// `sum_i |f_i>|i> / |F|`: the columns of `F` entangled with an ancilla.
    Purified,
    /// Uniform over the `m` node states. Lies in the kernel of `G`.
    UniformNodes,
    /// Uniform over the whole padded register.
    UniformRegister,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub source: DataSource,
    pub k: usize,
    pub kernel: KernelChoice,
    /// Heat-kernel bandwidth; `None` means the mean squared neighbor distance.
    pub heat_t: Option<f64>,
    pub dims: usize,
    pub phase_bits: usize,
    pub scale: f64,
    /// Shots to sample from the Way-1 distribution; 0 keeps it exact.
    pub shots: usize,
    pub seed: u64,
    pub way2_input: Way2Input,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub tol: f64,
    /// Record wall-clock stage times (makes reports non-reproducible).
    #[serde(skip)]
    pub timings: bool,
}

impl RunConfig {
    pub fn new(source: DataSource) -> Self {
        Self {
            source,
            k: DEFAULT_K,
            kernel: KernelChoice::Heat,
            heat_t: None,
            dims: DEFAULT_DIMS,
            phase_bits: DEFAULT_PHASE_BITS,
            scale: DEFAULT_SCALE,
            shots: 0,
            seed: 0,
            way2_input: Way2Input::Purified,
            out: None,
            format: OutputFormat::Csv,
            tol: DEFAULT_TOL,
            timings: false,
        }
    }

    /// Checks every range that does not depend on the data.
    pub fn validate(&self) -> Result<(), Error> {
        if let DataSource::Generate { m, noise, .. } = self.source {
            if m < 2 {
                return Err(Error::Config(format!("--m must be at least 2, got {m}")));
            }
            if !(noise.is_finite() && noise >= 0.0) {
                return Err(Error::Config(format!(
                    "--noise must be finite and >= 0, got {noise}"
                )));
            }
        }
        if self.k < 1 {
            return Err(Error::Config("--k must be at least 1".into()));
        }
        if self.dims < 1 {
            return Err(Error::Config("--dims must be at least 1".into()));
        }
        if !(1..=MAX_PHASE_BITS).contains(&self.phase_bits) {
            return Err(Error::Config(format!(
                "--phase-bits must lie in [1, {MAX_PHASE_BITS}], got {}",
                self.phase_bits
            )));
        }
        if !(self.scale > 0.0 && self.scale <= 0.5) {
            return Err(Error::Config(format!(
                "--scale must lie in (0, 1/2], got {}",
                self.scale
            )));
        }
        if let Some(t) = self.heat_t {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!(
                    "--heat-t must be finite and > 0, got {t}"
                )));
            }
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::Config(format!(
                "--tol must be finite and >= 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }

    /// Checks the ranges that depend on the number of samples.
    pub fn validate_for(&self, m: usize) -> Result<(), Error> {
        if self.k < 1 || self.k > m - 1 {
            return Err(Error::Config(format!(
                "--k must lie in [1, {}] for {m} samples, got {}",
                m - 1,
                self.k
            )));
        }
        Ok(())
    }
}
