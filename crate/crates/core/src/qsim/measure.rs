use ndarray::Array1;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::state::norm_sqr;
use super::{Bitstring, PureState, QsimError, SystemState};
use crate::Scalar;

/// Probabilities at or below this are treated as exact zeros.
pub(crate) fn zero_probability<T: Scalar>() -> T {
    let e = T::epsilon();
    e * e.sqrt()
}

/// One collapsed outcome of a phase-register measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord<T> {
    pub outcome: Bitstring,
    pub probability: T,
    /// Normalized system (and ancilla) state conditioned on `outcome`.
    pub post_state: SystemState<T>,
}

/// Exhaustive phase-register statistics of a state.
#[derive(Debug, Clone)]
pub struct PhaseReadout<'a, T> {
    state: &'a PureState<T>,
    probs: Vec<T>,
}

/// Born-rule distribution of the phase register. No sampling noise; use
/// [`PhaseReadout::sample`] for shot experiments.
pub fn measure_phase_register<T: Scalar>(state: &PureState<T>) -> PhaseReadout<'_, T> {
    let n = state.layout().phase_states();
    let probs = (0..n)
        .map(|p| norm_sqr(state.block(p).as_slice().expect("contiguous")))
        .collect();
    PhaseReadout { state, probs }
}

impl<'a, T: Scalar> PhaseReadout<'a, T> {
    pub fn phase_bits(&self) -> usize {
        self.state.layout().phase_bits
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probs
    }

    pub fn probability(&self, outcome: Bitstring) -> T {
        self.probs.get(outcome.value).copied().unwrap_or(T::zero())
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    pub fn bitstring(&self, value: usize) -> Bitstring {
        Bitstring {
            value,
            width: self.phase_bits(),
        }
    }

    /// Outcome with the largest probability (lowest index on ties).
    pub fn most_likely(&self) -> Bitstring {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        self.bitstring(best)
    }

    /// Collapses onto `outcome`.
    pub fn record(&self, outcome: Bitstring) -> Result<MeasurementRecord<T>, QsimError> {
        let layout = self.state.layout();
        if outcome.width != layout.phase_bits || outcome.value >= layout.phase_states() {
            return Err(QsimError::BadBitstring(
                outcome.to_string(),
                layout.phase_bits,
            ));
        }
        let probability = self.probs[outcome.value];
        if probability <= zero_probability::<T>() {
            return Err(QsimError::ZeroProbability { outcome });
        }
        let scale = probability.sqrt();
        let amps: Array1<_> = self.state.block(outcome.value).mapv(|z| z / scale);
        let post_state = SystemState::new(
            amps,
            layout.nodes,
            layout.system_qubits,
            layout.ancilla_qubits,
        )?;
        Ok(MeasurementRecord {
            outcome,
            probability,
            post_state,
        })
    }

    /// Records for every outcome with nonzero probability, in outcome order.
    pub fn records(&self) -> impl Iterator<Item = MeasurementRecord<T>> + '_ {
        (0..self.probs.len()).filter_map(move |v| self.record(self.bitstring(v)).ok())
    }

    /// Seeded shot sampling; returns counts per outcome.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<usize> {
        let mut counts = vec![0; self.probs.len()];
        if shots == 0 {
            return counts;
        }
        let weights: Vec<f64> = self
            .probs
            .iter()
            .map(|p| p.to_f64_lossy().max(0.0))
            .collect();
        let dist =
            WeightedIndex::new(&weights).expect("a normalized state has positive total weight");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..shots {
            counts[dist.sample(&mut rng)] += 1;
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{RegisterLayout, SystemState};
    use num_complex::Complex;

    fn two_outcome_state() -> PureState<f64> {
        let layout = RegisterLayout::new(1, 1, 0, 2).unwrap();
        let a = 0.6;
        let b = 0.8;
        let amps = Array1::from(vec![
            Complex::new(a, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.0, b * 0.6),
            Complex::new(b * 0.8, 0.0),
        ]);
        PureState::new(amps, layout).unwrap()
    }

    #[test]
    fn probabilities_and_records() {
        let st = two_outcome_state();
        let r = measure_phase_register(&st);
        assert!((r.probabilities()[0] - 0.36).abs() < 1e-15);
        assert!((r.probabilities()[1] - 0.64).abs() < 1e-15);
        assert!((r.total() - 1.0).abs() < 1e-12);
        assert_eq!(r.most_likely().value, 1);
        for rec in r.records() {
            assert!((rec.post_state.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(r.records().count(), 2);
    }

    #[test]
    fn zero_probability_record_is_an_error() {
        let input = SystemState::<f64>::basis(0, 2, 1).unwrap();
        let st = PureState::with_zero_phase(&input, 2).unwrap();
        let r = measure_phase_register(&st);
        let b = Bitstring::new(3, 2).unwrap();
        assert!(matches!(
            r.record(b),
            Err(QsimError::ZeroProbability { .. })
        ));
        assert!(r.record(Bitstring::new(0, 3).unwrap()).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let st = two_outcome_state();
        let r = measure_phase_register(&st);
        let a = r.sample(1000, 5);
        assert_eq!(a, r.sample(1000, 5));
        assert_eq!(a.iter().sum::<usize>(), 1000);
        assert!(r.sample(0, 5).iter().all(|&c| c == 0));
    }
}
