use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use num_complex::Complex;

use super::{qubits_for, QsimError, RegisterLayout};
use crate::linalg::symmetric_eigen;
use crate::Scalar;

pub(crate) fn norm_sqr<T: Scalar>(amps: &[Complex<T>]) -> T {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

/// Amplitudes on the system register (plus an optional ancilla register).
///
/// Index `(node << a) | ancilla`. Only the first `nodes` system basis states
/// are meaningful; the rest are padding.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState<T> {
    amps: Array1<Complex<T>>,
    nodes: usize,
    system_qubits: usize,
    ancilla_qubits: usize,
}

impl<T: Scalar> SystemState<T> {
    pub fn new(
        amps: Array1<Complex<T>>,
        nodes: usize,
        system_qubits: usize,
        ancilla_qubits: usize,
    ) -> Result<Self, QsimError> {
        let expected = 1usize << (system_qubits + ancilla_qubits);
        if amps.len() != expected {
            return Err(QsimError::DimensionMismatch {
                expected,
                found: amps.len(),
            });
        }
        if nodes == 0 || nodes > (1 << system_qubits) {
            return Err(QsimError::DimensionMismatch {
                expected: 1 << system_qubits,
                found: nodes,
            });
        }
        Ok(Self {
            amps,
            nodes,
            system_qubits,
            ancilla_qubits,
        })
    }

    /// Real vector over the nodes, padded to `2^q` and normalized.
    pub fn from_real(v: ArrayView1<T>, system_qubits: usize) -> Result<Self, QsimError> {
        let pad = 1usize << system_qubits;
        if v.len() > pad {
            return Err(QsimError::DimensionMismatch {
                expected: pad,
                found: v.len(),
            });
        }
        let norm = crate::linalg::norm2(v);
        if norm == T::zero() {
            return Err(QsimError::NotNormalized { norm: 0.0 });
        }
        let mut amps = Array1::from_elem(pad, Complex::new(T::zero(), T::zero()));
        for (i, &x) in v.iter().enumerate() {
            amps[i] = Complex::new(x / norm, T::zero());
        }
        Self::new(amps, v.len(), system_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(index: usize, nodes: usize, system_qubits: usize) -> Result<Self, QsimError> {
        let mut v = Array1::zeros(nodes);
        if index >= nodes {
            return Err(QsimError::DimensionMismatch {
                expected: nodes,
                found: index + 1,
            });
        }
        v[index] = T::one();
        Self::from_real(v.view(), system_qubits)
    }

    /// Uniform superposition over the `nodes` valid basis states.
    pub fn uniform_nodes(nodes: usize, system_qubits: usize) -> Result<Self, QsimError> {
        Self::from_real(Array1::ones(nodes).view(), system_qubits)
    }

    /// Uniform superposition over the whole padded register, `H^{⊗q}|0>`.
    pub fn uniform_register(nodes: usize, system_qubits: usize) -> Result<Self, QsimError> {
        let pad = 1usize << system_qubits;
        let a = T::one() / T::lit(pad as f64).sqrt();
        Self::new(
            Array1::from_elem(pad, Complex::new(a, T::zero())),
            nodes,
            system_qubits,
            0,
        )
    }

    /// `sum_i |a_i>|i> / |A|_F` for the columns `a_i` of `A`: a purification
    /// whose system marginal is `A A^T / trace(A A^T)`.
    pub fn purified_columns(a: ArrayView2<T>, system_qubits: usize) -> Result<Self, QsimError> {
        let (m, c) = a.dim();
        let pad = 1usize << system_qubits;
        if m > pad {
            return Err(QsimError::DimensionMismatch {
                expected: pad,
                found: m,
            });
        }
        let frob: T = a.iter().map(|&x| x * x).sum::<T>().sqrt();
        if frob == T::zero() {
            return Err(QsimError::ZeroColumns);
        }
        let ancilla_qubits = if c <= 1 { 0 } else { qubits_for(c) };
        let anc = 1usize << ancilla_qubits;
        let mut amps = Array1::from_elem(pad * anc, Complex::new(T::zero(), T::zero()));
        for i in 0..m {
            for j in 0..c {
                amps[(i << ancilla_qubits) | j] = Complex::new(a[[i, j]] / frob, T::zero());
            }
        }
        Self::new(amps, m, system_qubits, ancilla_qubits)
    }

    pub fn amplitudes(&self) -> &Array1<Complex<T>> {
        &self.amps
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn system_qubits(&self) -> usize {
        self.system_qubits
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.ancilla_qubits
    }

    pub fn norm(&self) -> T {
        norm_sqr(self.amps.as_slice().expect("contiguous")).sqrt()
    }

    /// Probability mass on padded system states (index >= nodes).
    pub fn padding_weight(&self) -> T {
        let anc = 1usize << self.ancilla_qubits;
        self.amps
            .iter()
            .skip(self.nodes * anc)
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Traces out the ancilla register.
    pub fn reduced_density(&self) -> MixedState<T> {
        let pad = 1usize << self.system_qubits;
        let anc = 1usize << self.ancilla_qubits;
        let mut rho = Array2::from_elem((pad, pad), Complex::new(T::zero(), T::zero()));
        for i in 0..pad {
            for j in 0..=i {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..anc {
                    acc += self.amps[i * anc + k] * self.amps[j * anc + k].conj();
                }
                rho[[i, j]] = acc;
                rho[[j, i]] = acc.conj();
            }
        }
        let tr: T = (0..pad).map(|i| rho[[i, i]].re).sum();
        if tr > T::zero() {
            rho.mapv_inplace(|z| z / tr);
        }
        MixedState {
            rho,
            nodes: self.nodes,
        }
    }
}

/// Statevector over phase, system and ancilla registers.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    pub(crate) amps: Array1<Complex<T>>,
    pub(crate) layout: RegisterLayout,
}

impl<T: Scalar> PureState<T> {
    pub fn new(amps: Array1<Complex<T>>, layout: RegisterLayout) -> Result<Self, QsimError> {
        if amps.len() != layout.dim() {
            return Err(QsimError::DimensionMismatch {
                expected: layout.dim(),
                found: amps.len(),
            });
        }
        Ok(Self { amps, layout })
    }

    /// `|0...0>_phase ⊗ input`.
    pub fn with_zero_phase(input: &SystemState<T>, phase_bits: usize) -> Result<Self, QsimError> {
        let layout = RegisterLayout::new(
            phase_bits,
            input.system_qubits(),
            input.ancilla_qubits(),
            input.nodes(),
        )?;
        let mut amps = Array1::from_elem(layout.dim(), Complex::new(T::zero(), T::zero()));
        amps.slice_mut(ndarray::s![..layout.block_len()])
            .assign(input.amplitudes());
        Ok(Self { amps, layout })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &Array1<Complex<T>> {
        &self.amps
    }

    pub fn norm(&self) -> T {
        norm_sqr(self.amps.as_slice().expect("contiguous")).sqrt()
    }

    /// Amplitudes with phase register equal to `phase`.
    pub fn block(&self, phase: usize) -> ArrayView1<'_, Complex<T>> {
        let b = self.layout.block_len();
        self.amps.slice(ndarray::s![phase * b..(phase + 1) * b])
    }

    /// Probability mass on padded system states, summed over the phase and
    /// ancilla registers.
    pub fn padding_weight(&self) -> T {
        let l = self.layout;
        let anc = 1usize << l.ancilla_qubits;
        let b = l.block_len();
        let mut w = T::zero();
        for p in 0..l.phase_states() {
            for idx in (l.nodes * anc)..b {
                w += self.amps[p * b + idx].norm_sqr();
            }
        }
        w
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            })
    }
}

/// Density matrix on the padded system register.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState<T> {
    rho: Array2<Complex<T>>,
    nodes: usize,
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Array1<Complex<T>>>,
}

impl<T: Scalar> MixedState<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: Array2<Complex<T>>, nodes: usize) -> Result<Self, QsimError> {
        let (r, c) = rho.dim();
        if r != c {
            return Err(QsimError::DimensionMismatch {
                expected: r,
                found: c,
            });
        }
        let tol = T::lit(T::CHECK_TOL);
        let mut dev = T::zero();
        for i in 0..r {
            for j in 0..r {
                dev = dev.max((rho[[i, j]] - rho[[j, i]].conj()).norm());
            }
        }
        if dev > tol {
            return Err(QsimError::NotHermitian {
                deviation: dev.to_f64_lossy(),
            });
        }
        let tr: T = (0..r).map(|i| rho[[i, i]].re).sum();
        if (tr - T::one()).abs() > tol {
            return Err(QsimError::BadTrace {
                trace: tr.to_f64_lossy(),
            });
        }
        let state = Self { rho, nodes };
        let min = state.eigen()?.values.first().copied().unwrap_or(T::zero());
        if min < -T::lit(T::RANK_EPS) {
            return Err(QsimError::NotPositive {
                min: min.to_f64_lossy(),
            });
        }
        Ok(state)
    }

    pub fn matrix(&self) -> &Array2<Complex<T>> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).map(|i| self.rho[[i, i]].re).sum()
    }

    /// Real part of the matrix, valid when the state is real symmetric.
    pub fn real_part(&self) -> Array2<T> {
        self.rho.mapv(|z| z.re)
    }

    /// `<u| rho |u>` for a real vector over the nodes.
    pub fn expectation(&self, u: ArrayView1<T>) -> T {
        let n = u.len().min(self.dim());
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc += self.rho[[i, j]] * (u[i] * u[j]);
            }
        }
        acc.re
    }

    /// Eigendecomposition through the real embedding `[[Re, -Im], [Im, Re]]`,
    /// whose spectrum is that of `rho` with every eigenvalue doubled.
    pub fn eigen(&self) -> Result<HermitianEigen<T>, QsimError> {
        let n = self.dim();
        let mut big = Array2::zeros((2 * n, 2 * n));
        for i in 0..n {
            for j in 0..n {
                let z = self.rho[[i, j]];
                big[[i, j]] = z.re;
                big[[i + n, j + n]] = z.re;
                big[[i, j + n]] = -z.im;
                big[[i + n, j]] = z.im;
            }
        }
        let eig = symmetric_eigen(big.view())?;
        let half = T::lit(0.5);
        let mut values = Vec::with_capacity(n);
        let mut vectors: Vec<Array1<Complex<T>>> = Vec::with_capacity(n);
        // Greedy selection: every eigenvalue appears twice, as (x, y) and (-y, x);
        // keep a vector only if it is new in the complex sense.
        for k in (0..2 * n).rev() {
            if vectors.len() == n {
                break;
            }
            let col = eig.vectors.column(k);
            let mut z = Array1::from_shape_fn(n, |i| Complex::new(col[i], col[i + n]));
            for w in &vectors {
                let c = w
                    .iter()
                    .zip(z.iter())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                        acc + a.conj() * b
                    });
                z.zip_mut_with(w, |zi, wi| *zi -= c * wi);
            }
            let nz = norm_sqr(z.as_slice().expect("contiguous"));
            if nz > half {
                let s = nz.sqrt();
                z.mapv_inplace(|x| x / s);
                values.push(eig.values[k]);
                vectors.push(z);
            }
        }
        values.reverse();
        vectors.reverse();
        Ok(HermitianEigen { values, vectors })
    }
}

/// `A A^T / trace(A A^T)` on the padded register: the system marginal of
/// `sum_i |a_i>|i>`.
pub fn prepare_density_from_columns<T: Scalar>(
    a: ArrayView2<T>,
) -> Result<MixedState<T>, QsimError> {
    let m = a.nrows();
    let pad = 1usize << qubits_for(m);
    let aat = a.dot(&a.t());
    let tr: T = (0..m).map(|i| aat[[i, i]]).sum();
    if tr <= T::zero() {
        return Err(QsimError::ZeroColumns);
    }
    let mut rho = Array2::from_elem((pad, pad), Complex::new(T::zero(), T::zero()));
    for i in 0..m {
        for j in 0..m {
            rho[[i, j]] = Complex::new(aat[[i, j]] / tr, T::zero());
        }
    }
    MixedState::new(rho, m)
}

/// Rotates a complex vector by a global phase so its largest entry is real
/// and positive, then returns the real part over the first `n` entries,
/// renormalized, together with the discarded imaginary weight.
pub(crate) fn realify<T: Scalar>(z: &Array1<Complex<T>>, n: usize) -> (Array1<T>, T) {
    let (mut best, mut best_abs) = (Complex::new(T::one(), T::zero()), T::zero());
    for &x in z.iter() {
        if x.norm() > best_abs {
            best_abs = x.norm();
            best = x;
        }
    }
    let phase = if best_abs > T::zero() {
        best.conj() / best_abs
    } else {
        Complex::new(T::one(), T::zero())
    };
    let rotated: Vec<Complex<T>> = z.iter().map(|&x| x * phase).collect();
    let imag: T = rotated.iter().map(|x| x.im * x.im).sum();
    let mut v = Array1::from_iter(rotated.iter().take(n).map(|x| x.re));
    let nv = crate::linalg::norm2(v.view());
    if nv > T::zero() {
        v /= nv;
    }
    (v, imag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn density_from_p2_incidence() {
        let b = array![[1.0f64], [-1.0]];
        let rho = prepare_density_from_columns(b.view()).unwrap();
        assert_eq!(rho.real_part(), array![[0.5, -0.5], [-0.5, 0.5]]);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_from_identity_is_maximally_mixed() {
        let rho = prepare_density_from_columns(Array2::<f64>::eye(2).view()).unwrap();
        assert_eq!(rho.real_part(), array![[0.5, 0.0], [0.0, 0.5]]);
    }

    #[test]
    fn density_pads_to_power_of_two() {
        let a = array![[1.0f64, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let rho = prepare_density_from_columns(a.view()).unwrap();
        assert_eq!(rho.dim(), 4);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.matrix().row(3).iter().all(|z| z.norm() == 0.0));
        assert!(prepare_density_from_columns(Array2::<f64>::zeros((2, 2)).view()).is_err());
    }

    #[test]
    fn purification_marginal_matches_density() {
        let a = array![[1.0f64, 0.5, 0.0], [-1.0, 0.2, 0.3], [0.0, -0.7, -0.3]];
        let psi = SystemState::purified_columns(a.view(), 2).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert_eq!(psi.ancilla_qubits(), 2);
        let direct = prepare_density_from_columns(a.view()).unwrap();
        let reduced = psi.reduced_density();
        for (x, y) in direct.matrix().iter().zip(reduced.matrix().iter()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn mixed_state_validation() {
        let bad_trace = array![[c(0.5), c(0.0)], [c(0.0), c(0.4)]];
        assert!(matches!(
            MixedState::new(bad_trace, 2),
            Err(QsimError::BadTrace { .. })
        ));
        let not_herm = array![[c(0.5), c(0.1)], [c(0.0), c(0.5)]];
        assert!(matches!(
            MixedState::new(not_herm, 2),
            Err(QsimError::NotHermitian { .. })
        ));
        let negative = array![[c(1.5), c(0.0)], [c(0.0), c(-0.5)]];
        assert!(matches!(
            MixedState::new(negative, 2),
            Err(QsimError::NotPositive { .. })
        ));
    }

    #[test]
    fn complex_hermitian_eigen() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let i = Complex::new(0.0, 1.0);
        let rho = array![[c(0.5), i * 0.25], [-i * 0.25, c(0.5)]];
        let st = MixedState::new(rho.clone(), 2).unwrap();
        let e = st.eigen().unwrap();
        assert_eq!(e.values.len(), 2);
        assert!((e.values[0] - 0.25).abs() < 1e-14);
        assert!((e.values[1] - 0.75).abs() < 1e-14);
        for (lam, v) in e.values.iter().zip(&e.vectors) {
            let rv = rho.dot(v);
            let err: f64 = rv
                .iter()
                .zip(v.iter())
                .map(|(a, b)| (a - b * *lam).norm())
                .sum();
            assert!(err < 1e-13);
        }
    }

    #[test]
    fn realify_strips_global_phase() {
        let ph = Complex::from_polar(1.0f64, 0.7);
        let z = array![ph * 0.6, ph * -0.8];
        let (v, imag) = realify(&z, 2);
        assert!((v[0] + 0.6).abs() < 1e-14 || (v[0] - 0.6).abs() < 1e-14);
        assert!((v[1].abs() - 0.8).abs() < 1e-14);
        assert!(imag < 1e-28);
    }

    #[test]
    fn system_state_constructors() {
        let u = SystemState::<f64>::uniform_nodes(3, 2).unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert_eq!(u.padding_weight(), 0.0);
        let r = SystemState::<f64>::uniform_register(3, 2).unwrap();
        assert!((r.padding_weight() - 0.25).abs() < 1e-15);
        assert!(SystemState::<f64>::basis(3, 3, 2).is_err());
        assert!(SystemState::<f64>::from_real(Array1::zeros(2).view(), 1).is_err());
    }
}
