use ndarray::s;

use super::measure::zero_probability;
use super::state::norm_sqr;
use super::{Bitstring, PureState, QsimError};
use crate::Scalar;

/// Applies `(U_flip U_mark)^iterations` to `state`.
///
/// `U_mark = I - 2 P` reflects about the complement of the marked subspace
/// `P = |target><target| ⊗ I`; `U_flip = 2|s><s| - I` reflects about the
/// input state `|s>` itself. The marked probability after `k` rounds is
/// `sin^2((2k + 1) θ)` with `sin^2 θ = p0`.
pub fn amplitude_amplification<T: Scalar>(
    state: &PureState<T>,
    target: Bitstring,
    iterations: usize,
) -> Result<PureState<T>, QsimError> {
    let layout = state.layout();
    if target.width != layout.phase_bits || target.value >= layout.phase_states() {
        return Err(QsimError::BadBitstring(
            target.to_string(),
            layout.phase_bits,
        ));
    }
    let norm = state.norm();
    if (norm - T::one()).abs() > T::lit(T::RANK_EPS) {
        return Err(QsimError::NotNormalized {
            norm: norm.to_f64_lossy(),
        });
    }
    let p0 = norm_sqr(state.block(target.value).as_slice().expect("contiguous"));
    if p0 <= zero_probability::<T>() {
        return Err(QsimError::NothingToAmplify(target));
    }

    let b = layout.block_len();
    let marked = s![target.value * b..(target.value + 1) * b];
    let two = T::lit(2.0);
    let mut psi = state.clone();
    for _ in 0..iterations {
        psi.amps.slice_mut(marked).mapv_inplace(|z| -z);
        let overlap = state.inner(&psi);
        psi.amps
            .zip_mut_with(&state.amps, |x, s0| *x = *s0 * overlap * two - *x);
    }
    Ok(psi)
}

/// Closed form `sin^2((2k + 1) asin(sqrt(p0)))`.
pub fn grover_success_probability<T: Scalar>(p0: T, iterations: usize) -> T {
    let theta = p0.sqrt().asin();
    let angle = T::lit((2 * iterations + 1) as f64) * theta;
    let s = angle.sin();
    s * s
}

/// Standard iteration count `max(0, round(π / (4 asin(sqrt(p0))) - 1/2))`.
pub fn choose_iterations<T: Scalar>(p0: T) -> Result<usize, QsimError> {
    if !(p0 > T::zero() && p0 <= T::one()) {
        return Err(QsimError::BadProbability(p0.to_f64_lossy()));
    }
    let theta = p0.sqrt().asin();
    let k = (T::PI() / (T::lit(4.0) * theta) - T::lit(0.5)).round();
    Ok(k.max(T::zero()).to_usize().unwrap_or(0))
}
