//! Exact dense simulation of the phase-estimation pipeline.
//!
//! Register order, most significant first: phase register (`t` bits), system
//! register (`q` qubits, holding the `m` graph nodes), ancilla register (`a`
//! qubits, optional; used to purify mixed inputs). A basis index is therefore
//! `(phase << (q + a)) | (node << a) | ancilla`.

mod amplify;
mod gates;
mod measure;
mod qpe;
mod state;
mod way1;

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::chain::ChainError;
use crate::linalg::LinalgError;

pub use amplify::{amplitude_amplification, choose_iterations, grover_success_probability};
pub use gates::{apply_hadamard_layer, inverse_qft, qft};
pub use measure::{measure_phase_register, MeasurementRecord, PhaseReadout};
pub use qpe::{phase_estimation, unitary_from_generator, Unitary};
pub use state::{prepare_density_from_columns, HermitianEigen, MixedState, PureState, SystemState};
pub use way1::{
    density_phase_estimation, lambda_hat, DensityPhaseEstimate, SpectralComponent, Way1Outcome,
};

pub(crate) use way1::record_components;

/// Upper bound on `t + q + a`.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("register layout t={phase_bits}, q={system_qubits}, a={ancilla_qubits} is invalid: {reason}")]
    BadLayout {
        phase_bits: usize,
        system_qubits: usize,
        ancilla_qubits: usize,
        reason: &'static str,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },
    #[error("matrix is not unitary: max |U U^† - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("matrix is not Hermitian: max |A - A^†| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("density matrix trace is {trace}, expected 1")]
    BadTrace { trace: f64 },
    #[error("density matrix has negative eigenvalue {min:e}")]
    NotPositive { min: f64 },
    #[error("columns are all zero")]
    ZeroColumns,
    #[error("generator has zero trace; nothing to estimate")]
    ZeroTrace,
    #[error("phase s*λ_max = {phase} leaves no headroom below 1")]
    NoPhaseHeadroom { phase: f64 },
    #[error("outcome {outcome} has zero probability")]
    ZeroProbability { outcome: Bitstring },
    #[error("marked outcome {0} has zero probability; nothing to amplify")]
    NothingToAmplify(Bitstring),
    #[error("initial success probability must lie in (0, 1], got {0}")]
    BadProbability(f64),
    #[error("bitstring {0:?} does not fit a {1}-bit register")]
    BadBitstring(String, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// Phase/system/ancilla register widths plus the number of valid nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    pub phase_bits: usize,
    pub system_qubits: usize,
    pub ancilla_qubits: usize,
    pub nodes: usize,
}

impl RegisterLayout {
    pub fn new(
        phase_bits: usize,
        system_qubits: usize,
        ancilla_qubits: usize,
        nodes: usize,
    ) -> Result<Self, QsimError> {
        let bad = |reason| QsimError::BadLayout {
            phase_bits,
            system_qubits,
            ancilla_qubits,
            reason,
        };
        if phase_bits < 1 {
            return Err(bad("phase register needs at least one bit"));
        }
        if system_qubits < 1 {
            return Err(bad("system register needs at least one qubit"));
        }
        if phase_bits + system_qubits + ancilla_qubits > MAX_QUBITS {
            return Err(bad("total width exceeds the 24-qubit cap"));
        }
        if nodes == 0 || nodes > (1usize << system_qubits) {
            return Err(bad("node count does not fit the system register"));
        }
        Ok(Self {
            phase_bits,
            system_qubits,
            ancilla_qubits,
            nodes,
        })
    }

    /// Padded system dimension `2^q`.
    pub fn m_pad(&self) -> usize {
        1 << self.system_qubits
    }

    /// Dimension of system plus ancilla.
    pub fn block_len(&self) -> usize {
        1 << (self.system_qubits + self.ancilla_qubits)
    }

    pub fn phase_states(&self) -> usize {
        1 << self.phase_bits
    }

    pub fn dim(&self) -> usize {
        self.phase_states() * self.block_len()
    }
}

/// Smallest `q >= 1` with `2^q >= n`.
pub fn qubits_for(n: usize) -> usize {
    let mut q = 1;
    while (1usize << q) < n {
        q += 1;
    }
    q
}

/// A computational basis state of the phase register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    pub value: usize,
    pub width: usize,
}

impl Bitstring {
    pub fn new(value: usize, width: usize) -> Result<Self, QsimError> {
        if width == 0 || width > MAX_QUBITS || value >> width != 0 {
            return Err(QsimError::BadBitstring(value.to_string(), width));
        }
        Ok(Self { value, width })
    }

    /// Phase `value / 2^width` in `[0, 1)`.
    pub fn phase(&self) -> f64 {
        self.value as f64 / (1u64 << self.width) as f64
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width)
    }
}

impl FromStr for Bitstring {
    type Err = QsimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let width = s.len();
        let value = usize::from_str_radix(s, 2)
            .map_err(|_| QsimError::BadBitstring(s.to_string(), width))?;
        Bitstring::new(value, width)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
