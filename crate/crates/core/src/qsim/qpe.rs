use ndarray::{Array2, ArrayView2};
use num_complex::Complex;

use super::gates::{apply_hadamard_layer, controlled_system_unitary, inverse_qft};
use super::{PureState, QsimError, SystemState};
use crate::linalg::{check_symmetric, symmetric_eigen};
use crate::Scalar;

/// Dense unitary on the padded system register.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary<T> {
    matrix: Array2<Complex<T>>,
}

impl<T: Scalar> Unitary<T> {
    /// Wraps `matrix` after checking `max |U U^† - I| <= tol`.
    pub fn new(matrix: Array2<Complex<T>>, tol: T) -> Result<Self, QsimError> {
        let u = Self { matrix };
        let (r, c) = u.matrix.dim();
        if r != c {
            return Err(QsimError::DimensionMismatch {
                expected: r,
                found: c,
            });
        }
        let dev = u.unitarity_error();
        if dev > tol {
            return Err(QsimError::NotUnitary {
                deviation: dev.to_f64_lossy(),
            });
        }
        Ok(u)
    }

    pub fn matrix(&self) -> &Array2<Complex<T>> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |U U^† - I|`.
    pub fn unitarity_error(&self) -> T {
        let n = self.dim();
        let adj = self.matrix.t().mapv(|z| z.conj());
        let prod = self.matrix.dot(&adj);
        let mut dev = T::zero();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { T::one() } else { T::zero() };
                dev = dev.max((prod[[i, j]] - Complex::new(want, T::zero())).norm());
            }
        }
        dev
    }

    fn squared(&self) -> Self {
        Self {
            matrix: self.matrix.dot(&self.matrix),
        }
    }
}

/// `U = exp(2πi s G)` on `2^q` dimensions, built from the eigendecomposition
/// of `G`; basis states beyond `G`'s size are left untouched.
pub fn unitary_from_generator<T: Scalar>(
    g: ArrayView2<T>,
    s: T,
    system_qubits: usize,
) -> Result<Unitary<T>, QsimError> {
    check_symmetric(g, T::lit(T::CHECK_TOL))?;
    let m = g.nrows();
    let pad = 1usize << system_qubits;
    if m > pad {
        return Err(QsimError::DimensionMismatch {
            expected: pad,
            found: m,
        });
    }
    let eig = symmetric_eigen(g)?;
    let lmax = eig.values.iter().fold(T::zero(), |acc, &x| acc.max(x));
    if s * lmax >= T::one() {
        return Err(QsimError::NoPhaseHeadroom {
            phase: (s * lmax).to_f64_lossy(),
        });
    }
    let mut matrix = Array2::from_elem((pad, pad), Complex::new(T::zero(), T::zero()));
    for i in m..pad {
        matrix[[i, i]] = Complex::new(T::one(), T::zero());
    }
    for k in 0..m {
        let w = Complex::from_polar(T::one(), T::TAU() * s * eig.values[k]);
        let q = eig.vectors.column(k);
        for i in 0..m {
            for j in 0..m {
                matrix[[i, j]] += w * (q[i] * q[j]);
            }
        }
    }
    Ok(Unitary { matrix })
}

/// Textbook phase estimation with a `phase_bits`-wide phase register:
/// Hadamard layer (equal to the QFT of `|0...0>`), the controlled `U^{2^j}`
/// ladder with phase bit `j` as control, then the inverse QFT.
///
/// An eigenvector with eigenphase `e^{2πiφ}` ends up with the phase register
/// peaked at `round(φ 2^t)`, exactly there when `φ 2^t` is an integer.
pub fn phase_estimation<T: Scalar>(
    unitary: &Unitary<T>,
    input: &SystemState<T>,
    phase_bits: usize,
) -> Result<PureState<T>, QsimError> {
    let pad = 1usize << input.system_qubits();
    if unitary.dim() != pad {
        return Err(QsimError::DimensionMismatch {
            expected: pad,
            found: unitary.dim(),
        });
    }
    let norm = input.norm();
    if (norm - T::one()).abs() > T::lit(T::RANK_EPS) {
        return Err(QsimError::NotNormalized {
            norm: norm.to_f64_lossy(),
        });
    }
    let mut state = PureState::with_zero_phase(input, phase_bits)?;
    apply_hadamard_layer(&mut state);
    let mut power = unitary.clone();
    for j in 0..phase_bits {
        if j > 0 {
            power = power.squared();
        }
        controlled_system_unitary(&mut state, j, power.matrix());
    }
    inverse_qft(&mut state);
    Ok(state)
}
