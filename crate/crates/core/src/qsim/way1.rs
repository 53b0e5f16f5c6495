//! Phase estimation on the mixed input `ρ = G / trace(G)`.
//!
//! The mixed state is simulated exactly through its purification
//! `sum_i |g_i>|i>` with `g_i` the columns of `G^{1/2}`: phase estimation acts
//! on the system register only, so the phase-register statistics and the
//! system marginal of every outcome are those of the mixed-state circuit.

use ndarray::{Array1, ArrayView2};

use super::measure::{measure_phase_register, MeasurementRecord};
use super::qpe::{phase_estimation, unitary_from_generator};
use super::state::realify;
use super::{qubits_for, Bitstring, PureState, QsimError, SystemState};
use crate::chain::sqrt_psd;
use crate::linalg::check_symmetric;
use crate::Scalar;

/// An eigen-direction of a conditional system state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralComponent<T> {
    /// Weight in the conditional state (eigenvalue of the marginal).
    pub weight: T,
    /// Real unit vector over the nodes.
    pub vector: Array1<T>,
}

/// One phase-register outcome of the mixed-state estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Way1Outcome<T> {
    pub outcome: Bitstring,
    pub probability: T,
    /// `(outcome / 2^t) / s`.
    pub lambda_hat: T,
    /// Eigen-directions of the conditional system marginal, heaviest first.
    pub components: Vec<SpectralComponent<T>>,
}

/// Exact outcome distribution plus the state it was read from.
#[derive(Debug, Clone)]
pub struct DensityPhaseEstimate<T> {
    pub scale: T,
    pub state: PureState<T>,
    pub outcomes: Vec<Way1Outcome<T>>,
}

impl<T: Scalar> DensityPhaseEstimate<T> {
    pub fn phase_bits(&self) -> usize {
        self.state.layout().phase_bits
    }

    /// Probability of every outcome, indexed by bitstring value.
    pub fn probabilities(&self) -> Vec<T> {
        measure_phase_register(&self.state).probabilities().to_vec()
    }

    pub fn total_probability(&self) -> T {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    /// Seeded shot counts, indexed by bitstring value.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        measure_phase_register(&self.state).sample(shots, seed)
    }

    pub fn outcome(&self, value: usize) -> Option<&Way1Outcome<T>> {
        self.outcomes.iter().find(|o| o.outcome.value == value)
    }
}

/// Unscaled eigenvalue estimate of a phase-register outcome.
pub fn lambda_hat<T: Scalar>(outcome: Bitstring, scale: T) -> T {
    T::lit(outcome.phase()) / scale
}

/// Components of a record's conditional marginal with weight at least
/// `min_weight`, heaviest first.
pub(crate) fn record_components<T: Scalar>(
    record: &MeasurementRecord<T>,
    min_weight: T,
) -> Result<Vec<SpectralComponent<T>>, QsimError> {
    let rho = record.post_state.reduced_density();
    let eig = rho.eigen()?;
    let nodes = record.post_state.nodes();
    let mut out = Vec::new();
    for (w, z) in eig.values.iter().zip(eig.vectors.iter()).rev() {
        if *w < min_weight {
            break;
        }
        let (vector, _) = realify(z, nodes);
        out.push(SpectralComponent { weight: *w, vector });
    }
    Ok(out)
}

/// Simulates phase estimation of `U = exp(2πi s G)` on `ρ = G / trace(G)`
/// with a `t`-bit phase register.
///
/// Outcome probabilities are `λ_i / trace(G)` when every `s λ_i` is a multiple
/// of `2^{-t}`; otherwise each eigenvalue spreads over neighboring bins.
/// Outcomes are listed for every bitstring with nonzero probability.
pub fn density_phase_estimation<T: Scalar>(
    g: ArrayView2<T>,
    s: T,
    t: usize,
) -> Result<DensityPhaseEstimate<T>, QsimError> {
    check_symmetric(g, T::lit(T::CHECK_TOL))?;
    let m = g.nrows();
    let trace: T = (0..m).map(|i| g[[i, i]]).sum();
    if trace <= T::zero() {
        return Err(QsimError::ZeroTrace);
    }
    let q = qubits_for(m);
    let root = sqrt_psd(g, T::lit(T::RANK_EPS))?;
    let input = SystemState::purified_columns(root.view(), q)?;
    estimate_from_input(g, s, t, &input)
}

/// Same as [`density_phase_estimation`] with an explicit purified input.
pub(crate) fn estimate_from_input<T: Scalar>(
    g: ArrayView2<T>,
    s: T,
    t: usize,
    input: &SystemState<T>,
) -> Result<DensityPhaseEstimate<T>, QsimError> {
    let unitary = unitary_from_generator(g, s, input.system_qubits())?;
    let state = phase_estimation(&unitary, input, t)?;
    let min_weight = T::lit(T::RANK_EPS);
    let outcomes = {
        let readout = measure_phase_register(&state);
        let mut outcomes = Vec::new();
        for record in readout.records() {
            outcomes.push(Way1Outcome {
                outcome: record.outcome,
                probability: record.probability,
                lambda_hat: lambda_hat(record.outcome, s),
                components: record_components(&record, min_weight)?,
            });
        }
        outcomes
    };
    Ok(DensityPhaseEstimate {
        scale: s,
        state,
        outcomes,
    })
}
