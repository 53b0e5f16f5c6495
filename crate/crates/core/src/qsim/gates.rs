//! Gates acting on the phase register of a [`PureState`]. Phase qubit `j` is
//! bit `j` of the phase index (bit 0 least significant); every gate moves
//! whole system/ancilla blocks.

use ndarray::{s, Array2, ArrayViewMut2};
use num_complex::Complex;

use super::PureState;
use crate::Scalar;

fn blocks_mut<T: Scalar>(
    state: &mut PureState<T>,
    x: usize,
    y: usize,
) -> (&mut [Complex<T>], &mut [Complex<T>]) {
    debug_assert!(x < y);
    let b = state.layout.block_len();
    let flat = state.amps.as_slice_mut().expect("contiguous");
    let (lo, hi) = flat.split_at_mut(y * b);
    (&mut lo[x * b..(x + 1) * b], &mut hi[..b])
}

pub(crate) fn hadamard<T: Scalar>(state: &mut PureState<T>, qubit: usize) {
    let h = T::FRAC_1_SQRT_2();
    let mask = 1usize << qubit;
    for x in 0..state.layout.phase_states() {
        if x & mask != 0 {
            continue;
        }
        let (a, b) = blocks_mut(state, x, x | mask);
        for (u, v) in a.iter_mut().zip(b.iter_mut()) {
            let (p, q) = (*u, *v);
            *u = (p + q) * h;
            *v = (p - q) * h;
        }
    }
}

/// Multiplies every block whose phase bits `c` and `t` are both set by `e^{iθ}`.
pub(crate) fn controlled_phase<T: Scalar>(
    state: &mut PureState<T>,
    control: usize,
    target: usize,
    theta: T,
) {
    let mask = (1usize << control) | (1usize << target);
    let w = Complex::from_polar(T::one(), theta);
    let b = state.layout.block_len();
    for x in 0..state.layout.phase_states() {
        if x & mask == mask {
            state
                .amps
                .slice_mut(s![x * b..(x + 1) * b])
                .mapv_inplace(|z| z * w);
        }
    }
}

pub(crate) fn swap<T: Scalar>(state: &mut PureState<T>, i: usize, j: usize) {
    if i == j {
        return;
    }
    let (mi, mj) = (1usize << i, 1usize << j);
    for x in 0..state.layout.phase_states() {
        if x & mi != 0 && x & mj == 0 {
            let y = (x & !mi) | mj;
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            let (a, b) = blocks_mut(state, lo, hi);
            a.swap_with_slice(b);
        }
    }
}

/// `H` on every phase qubit.
pub fn apply_hadamard_layer<T: Scalar>(state: &mut PureState<T>) {
    for q in 0..state.layout.phase_bits {
        hadamard(state, q);
    }
}

/// Quantum Fourier transform on the phase register:
/// `|x> -> 2^{-t/2} sum_y e^{2πi x y / 2^t} |y>`.
pub fn qft<T: Scalar>(state: &mut PureState<T>) {
    let t = state.layout.phase_bits;
    for target in (0..t).rev() {
        hadamard(state, target);
        for control in (0..target).rev() {
            let theta = T::TAU() / T::lit((1u64 << (target - control + 1)) as f64);
            controlled_phase(state, control, target, theta);
        }
    }
    for r in 0..t / 2 {
        swap(state, r, t - 1 - r);
    }
}

/// Exact inverse of [`qft`].
pub fn inverse_qft<T: Scalar>(state: &mut PureState<T>) {
    let t = state.layout.phase_bits;
    for r in 0..t / 2 {
        swap(state, r, t - 1 - r);
    }
    for target in 0..t {
        for control in 0..target {
            let theta = T::TAU() / T::lit((1u64 << (target - control + 1)) as f64);
            controlled_phase(state, control, target, -theta);
        }
        hadamard(state, target);
    }
}

/// Applies `unitary` to the system register of every block whose phase bit
/// `control` is set.
pub(crate) fn controlled_system_unitary<T: Scalar>(
    state: &mut PureState<T>,
    control: usize,
    unitary: &Array2<Complex<T>>,
) {
    let l = state.layout;
    let (pad, anc) = (l.m_pad(), 1usize << l.ancilla_qubits);
    let b = l.block_len();
    let mask = 1usize << control;
    for x in 0..l.phase_states() {
        if x & mask == 0 {
            continue;
        }
        let mut block = state.amps.slice_mut(s![x * b..(x + 1) * b]);
        let mat: ArrayViewMut2<Complex<T>> = block
            .view_mut()
            .into_shape_with_order((pad, anc))
            .expect("block shape");
        let out = unitary.dot(&mat);
        block.assign(&out.into_shape_with_order(b).expect("block shape"));
    }
}
