use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::str::FromStr;
use std::time::Instant;

use ndarray::{Array1, Array2};
use serde::Serialize;

use super::classical::{build_bundle, load_dataset};
use super::config::{RunConfig, Way2Input, MAX_QUANTUM_NODES};
use super::report::Timings;
use super::Error;
use crate::chain::{build_chain_operator, eigen_residual_tol, ChainOperator};
use crate::dataset::PointCloud;
use crate::eigenmap::{
    generalized_eigenpairs, generalized_residual, EigenmapError, Embedding, GeneralizedEigenpair,
};
use crate::graph::LaplacianBundle;
use crate::linalg::{norm2, residual_outside_span};
use crate::qsim::{
    amplitude_amplification, choose_iterations, lambda_hat, measure_phase_register,
    phase_estimation, qubits_for, record_components, unitary_from_generator, Bitstring, PureState,
    RegisterLayout, SpectralComponent, SystemState,
};
use crate::Scalar;

/// One bin of the Way-1 outcome distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub bitstring: Bitstring,
    pub probability: f64,
    pub lambda_hat: f64,
    /// Seeded shot counts when shots were requested.
    pub counts: Option<usize>,
}

/// One embedding column as produced by the quantum path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenRow {
    pub index: usize,
    /// Phase-register bin marked for this eigenvalue.
    pub bitstring: Bitstring,
    /// `(bin / 2^t) / s`: the reported eigenvalue.
    pub lambda_hat: f64,
    /// Rayleigh quotient of the isolated vector; feeds the recovery map.
    pub lambda_refined: f64,
    pub lambda_oracle: f64,
    /// Joint Way-1 probability of this eigenvector and its bin.
    pub way1_probability: f64,
    /// Marked-bin probability before amplification.
    pub p0: f64,
    pub iterations: usize,
    /// `1 / λ`: the iteration scale quoted for the method, for reference.
    pub inverse_lambda_hint: f64,
    /// Marked-bin probability after amplification.
    pub success_probability: f64,
    /// `|G u - λ u|`.
    pub eigen_residual: f64,
    /// `|L v - λ D v|`.
    pub generalized_residual: f64,
    /// Size of the oracle eigenvalue cluster this column belongs to.
    pub multiplicity: usize,
    /// `<u*| ρ |u*>` of the isolated system state against the oracle direction
    /// (summed over the cluster when degenerate).
    pub state_fidelity: f64,
    /// `(v^T D v*)^2` against the oracle vector; non-degenerate only.
    pub vector_fidelity: Option<f64>,
    /// Distance of `D^{1/2} v` from the oracle eigenspace; degenerate only.
    pub subspace_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantumDiagnostics {
    pub scale: f64,
    pub layout: RegisterLayout,
    pub components: usize,
    pub way1_total_probability: f64,
    /// Bins inspected before every nonzero mode was found.
    pub bins_scanned: usize,
    pub eigenvalues: Vec<EigenRow>,
    pub outcomes: Vec<OutcomeRow>,
}

#[derive(Debug, Clone)]
pub struct QuantumRun<T> {
    pub points: PointCloud<T>,
    pub heat_t: Option<T>,
    pub bundle: LaplacianBundle<T>,
    pub operator: ChainOperator<T>,
    /// Recovered generalized eigenpairs, one per embedding column.
    pub pairs: Vec<GeneralizedEigenpair<T>>,
    pub embedding: Embedding<T>,
    pub diagnostics: QuantumDiagnostics,
    pub timings: Timings,
}

struct Candidate<T> {
    u: Array1<T>,
    lambda: T,
}

/// `sum_k |sum_i u_i ψ[b, i, k]|^2`: probability of bin `b` jointly with the
/// system direction `u`.
fn joint_probability<T: Scalar>(state: &PureState<T>, b: usize, u: &Array1<T>) -> T {
    let anc = 1usize << state.layout().ancilla_qubits;
    let block = state.block(b);
    (0..anc)
        .map(|k| {
            let z = u.iter().enumerate().fold(
                num_complex::Complex::new(T::zero(), T::zero()),
                |acc, (i, &ui)| acc + block[i * anc + k] * ui,
            );
            z.norm_sqr()
        })
        .sum()
}

/// Way 1: scan bins in decreasing probability and collect every eigenvector
/// of `G` (nonzero eigenvalue) that shows up in a conditional system state.
fn scan_spectrum<T: Scalar>(
    op: &ChainOperator<T>,
    state: &PureState<T>,
    probs: &[T],
    wanted: usize,
) -> Result<(Vec<Candidate<T>>, usize), Error> {
    let readout = measure_phase_register(state);
    let floor = T::lit(T::RANK_EPS * 1e-2);
    let mut order: Vec<usize> = (0..probs.len()).filter(|&b| probs[b] >= floor).collect();
    order.sort_by(|&a, &b| {
        probs[b]
            .partial_cmp(&probs[a])
            .expect("finite")
            .then(a.cmp(&b))
    });

    let tol = eigen_residual_tol::<T>() * (T::one() + op.lambda_max());
    let new_direction = T::lit(T::RANK_EPS.sqrt() * 1e-1);
    let mut found: Vec<Candidate<T>> = Vec::new();
    let mut scanned = 0;
    for b in order {
        if found.len() >= wanted {
            break;
        }
        scanned += 1;
        let Ok(record) = readout.record(readout.bitstring(b)) else {
            continue;
        };
        for c in record_components(&record, T::lit(T::RANK_EPS))? {
            let mut u = c.vector;
            for f in &found {
                let overlap = f.u.dot(&u);
                u.scaled_add(-overlap, &f.u);
            }
            let n = norm2(u.view());
            if n < new_direction {
                continue;
            }
            u /= n;
            let lambda = u.dot(&op.g.dot(&u));
            if lambda <= op.zero_threshold() || op.residual(u.view(), lambda) > tol {
                continue;
            }
            found.push(Candidate { u, lambda });
        }
    }
    Ok((found, scanned))
}

struct MarkedBin<T> {
    p0: T,
    iterations: usize,
    success: T,
    rho: crate::qsim::MixedState<T>,
    components: Vec<SpectralComponent<T>>,
    used: Vec<bool>,
}

/// Way 2 on one bin: amplify it, collapse onto it and read the system state.
fn mark_bin<T: Scalar>(state: &PureState<T>, target: Bitstring) -> Result<MarkedBin<T>, Error> {
    let p0 = measure_phase_register(state).probability(target);
    let iterations =
        choose_iterations(p0).map_err(|_| crate::qsim::QsimError::NothingToAmplify(target))?;
    let amplified = amplitude_amplification(state, target, iterations)?;
    let readout = measure_phase_register(&amplified);
    let success = readout.probability(target);
    let record = readout.record(target)?;
    let components = record_components(&record, T::lit(T::RANK_EPS))?;
    Ok(MarkedBin {
        p0,
        iterations,
        success,
        rho: record.post_state.reduced_density(),
        used: vec![false; components.len()],
        components,
    })
}

/// Steps 1-4 on a simulator: purified `F` input, Way-1 spectrum scan, Way-2
/// amplification of each selected bin, recovery `v = D^{-1} L^{1/2} u`.
///
/// Embedding eigenvalues are the phase-register estimates `λ̂`; the recovery
/// map itself is fed the Rayleigh quotient of the isolated vector, since it
/// needs an eigenvalue accurate to the eigenvector.
pub fn run_quantum_embed<T: Scalar + FromStr>(cfg: &RunConfig) -> Result<QuantumRun<T>, Error> {
    cfg.validate()?;
    let mut timings = Timings::new(cfg.timings);
    let start = Instant::now();
    let points = load_dataset::<T>(cfg)?;
    let m = points.m();
    if m > MAX_QUANTUM_NODES {
        return Err(Error::Config(format!(
            "the quantum path simulates at most {MAX_QUANTUM_NODES} samples, got {m}"
        )));
    }
    timings.record("dataset", start);

    let start = Instant::now();
    let (bundle, heat_t) = build_bundle(&points, cfg)?;
    timings.record("graph", start);
    let result = quantum_embed_bundle(&bundle, cfg)?;
    timings.extend(&result.timings);
    Ok(QuantumRun {
        points,
        heat_t,
        bundle,
        operator: result.operator,
        pairs: result.pairs,
        embedding: result.embedding,
        diagnostics: result.diagnostics,
        timings,
    })
}

/// Output of [`quantum_embed_bundle`].
#[derive(Debug, Clone)]
pub struct QuantumEmbedding<T> {
    pub operator: ChainOperator<T>,
    pub pairs: Vec<GeneralizedEigenpair<T>>,
    pub embedding: Embedding<T>,
    pub diagnostics: QuantumDiagnostics,
    pub timings: Timings,
}

/// The quantum path from a ready Laplacian bundle. Uses the spectral,
/// register and sampling fields of `cfg`.
pub fn quantum_embed_bundle<T: Scalar>(
    bundle: &LaplacianBundle<T>,
    cfg: &RunConfig,
) -> Result<QuantumEmbedding<T>, Error> {
    cfg.validate()?;
    let m = bundle.m();
    if m > MAX_QUANTUM_NODES {
        return Err(Error::Config(format!(
            "the quantum path simulates at most {MAX_QUANTUM_NODES} samples, got {m}"
        )));
    }
    let mut timings = Timings::new(cfg.timings);
    let start = Instant::now();
    let op = build_chain_operator(bundle, T::lit(cfg.scale))?;
    let oracle = generalized_eigenpairs(bundle)?;
    timings.record("chain", start);

    let start = Instant::now();
    let t = cfg.phase_bits;
    let q = qubits_for(m);
    let step1 = SystemState::purified_columns(op.f.view(), q)?;
    let unitary = unitary_from_generator(op.g.view(), op.scale, q)?;
    let way1 = phase_estimation(&unitary, &step1, t)?;
    let layout = way1.layout();
    let probs = measure_phase_register(&way1).probabilities().to_vec();
    let wanted = m - bundle.components;
    let (mut found, bins_scanned) = scan_spectrum(&op, &way1, &probs, wanted)?;
    if found.is_empty() {
        return Err(Error::Pipeline(
            "phase estimation found no nonzero eigenvalue".into(),
        ));
    }
    found.sort_by(|a, b| a.lambda.partial_cmp(&b.lambda).expect("finite"));
    if found.len() < cfg.dims {
        return Err(EigenmapError::DimensionTooLarge {
            requested: cfg.dims,
            available: found.len(),
        }
        .into());
    }
    found.truncate(cfg.dims);
    timings.record("way1", start);

    let start = Instant::now();
    // With the purified input Way 2 runs the very same circuit as Way 1.
    let way2 = match cfg.way2_input {
        Way2Input::Purified => way1.clone(),
        Way2Input::UniformNodes => {
            phase_estimation(&unitary, &SystemState::uniform_nodes(m, q)?, t)?
        }
        Way2Input::UniformRegister => {
            phase_estimation(&unitary, &SystemState::uniform_register(m, q)?, t)?
        }
    };
    let mut marked: BTreeMap<usize, MarkedBin<T>> = BTreeMap::new();
    let sqrt_deg = bundle.degrees.mapv(|d| d.sqrt());
    let cluster = T::lit(T::RANK_EPS.sqrt() * 1e-1) * (T::one() + op.lambda_max());
    let mut pairs = Vec::with_capacity(found.len());
    let mut rows = Vec::with_capacity(found.len());
    let mut y = Array2::zeros((m, found.len()));
    let mut lambdas = Vec::with_capacity(found.len());
    for (j, cand) in found.iter().enumerate() {
        let joint: Vec<T> = (0..probs.len())
            .map(|b| joint_probability(&way1, b, &cand.u))
            .collect();
        let bin = (0..joint.len()).fold(0, |best, b| if joint[b] > joint[best] { b } else { best });
        let target = Bitstring::new(bin, t)?;
        let mb = match marked.entry(bin) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(mark_bin(&way2, target)?),
        };

        // The isolated state's eigen-direction closest to the scanned one.
        let pick = (0..mb.components.len())
            .filter(|&i| !mb.used[i])
            .max_by(|&a, &b| {
                let oa = mb.components[a].vector.dot(&cand.u).abs();
                let ob = mb.components[b].vector.dot(&cand.u).abs();
                oa.partial_cmp(&ob).expect("finite")
            })
            .ok_or_else(|| Error::Pipeline(format!("bin {target} holds no further eigenvector")))?;
        mb.used[pick] = true;
        let u = mb.components[pick].vector.clone();
        let lambda = u.dot(&op.g.dot(&u));
        let pair = op.recover(u.view(), lambda, bundle)?;
        let lhat = lambda_hat(target, op.scale);

        let members: Vec<&GeneralizedEigenpair<T>> = oracle
            .iter()
            .filter(|p| (p.lambda - lambda).abs() <= cluster)
            .collect();
        let nearest = oracle
            .iter()
            .min_by(|a, b| {
                (a.lambda - lambda)
                    .abs()
                    .partial_cmp(&(b.lambda - lambda).abs())
                    .expect("finite")
            })
            .expect("oracle is nonempty");
        let to_state = |v: &Array1<T>| {
            let w = op.sqrt_laplacian().dot(v);
            let n = norm2(w.view());
            w / n
        };
        let state_fidelity: T = members
            .iter()
            .map(|p| mb.rho.expectation(to_state(&p.v).view()))
            .sum();
        let (vector_fidelity, subspace_residual) = if members.len() <= 1 {
            let f: T = pair
                .v
                .iter()
                .zip(&nearest.v)
                .zip(&bundle.degrees)
                .map(|((&a, &b), &d)| a * b * d)
                .sum();
            (Some((f * f).to_f64_lossy()), None)
        } else {
            let basis: Vec<Array1<T>> = members.iter().map(|p| &p.v * &sqrt_deg).collect();
            let r = residual_outside_span((&pair.v * &sqrt_deg).view(), &basis);
            (None, Some(r.to_f64_lossy()))
        };
        rows.push(EigenRow {
            index: j,
            bitstring: target,
            lambda_hat: lhat.to_f64_lossy(),
            lambda_refined: lambda.to_f64_lossy(),
            lambda_oracle: nearest.lambda.to_f64_lossy(),
            way1_probability: joint[bin].to_f64_lossy(),
            p0: mb.p0.to_f64_lossy(),
            iterations: mb.iterations,
            inverse_lambda_hint: (T::one() / lambda).to_f64_lossy(),
            success_probability: mb.success.to_f64_lossy(),
            eigen_residual: op.residual(u.view(), lambda).to_f64_lossy(),
            generalized_residual: generalized_residual(bundle, lambda, &pair.v).to_f64_lossy(),
            multiplicity: members.len().max(1),
            state_fidelity: state_fidelity.to_f64_lossy(),
            vector_fidelity,
            subspace_residual,
        });
        y.column_mut(j).assign(&pair.v);
        lambdas.push(lhat);
        pairs.push(pair);
    }
    timings.record("way2", start);

    let floor = T::lit(T::RANK_EPS * 1e-2);
    let counts = (cfg.shots > 0).then(|| measure_phase_register(&way1).sample(cfg.shots, cfg.seed));
    let outcomes = (0..probs.len())
        .filter(|&b| probs[b] >= floor || counts.as_ref().is_some_and(|c| c[b] > 0))
        .map(|b| {
            let bits = Bitstring::new(b, t).expect("bin fits the register");
            OutcomeRow {
                bitstring: bits,
                probability: probs[b].to_f64_lossy(),
                lambda_hat: lambda_hat(bits, op.scale).to_f64_lossy(),
                counts: counts.as_ref().map(|c| c[b]),
            }
        })
        .collect();
    log::info!(
        "quantum embedding: m = {m}, d = {}, t = {t}, s = {}, {} of {wanted} nonzero modes found in {bins_scanned} bins",
        cfg.dims,
        op.scale,
        found.len()
    );
    let diagnostics = QuantumDiagnostics {
        scale: op.scale.to_f64_lossy(),
        layout,
        components: bundle.components,
        way1_total_probability: probs.iter().copied().sum::<T>().to_f64_lossy(),
        bins_scanned,
        eigenvalues: rows,
        outcomes,
    };
    Ok(QuantumEmbedding {
        operator: op,
        pairs,
        embedding: Embedding { y, lambdas },
        diagnostics,
        timings,
    })
}
