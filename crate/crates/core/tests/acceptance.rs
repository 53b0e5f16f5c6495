//! Acceptance suite: one line per criterion, nonzero exit status on failure.
//!
//! Reference spectra and eigenvectors come from nalgebra, independently of the
//! crate's own eigensolver.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::{Array1, Array2};
use qleig::chain::build_chain_operator;
use qleig::eigenmap::{embed, generalized_eigenpairs};
use qleig::graph::{
    degree_and_laplacian, laplacian_quadratic_form, objective_value, LaplacianBundle,
    NeighborhoodGraph,
};
use qleig::pipeline::{compare_embeddings, quantum_embed_bundle, DataSource, RunConfig};
use qleig::qsim::{
    amplitude_amplification, density_phase_estimation, grover_success_probability,
    measure_phase_register, phase_estimation, unitary_from_generator, Bitstring, PureState,
    RegisterLayout, SystemState,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- helpers

fn random_connected(rng: &mut ChaCha8Rng, m: usize) -> NeighborhoodGraph<f64> {
    let mut edges = Vec::new();
    for i in 1..m {
        edges.push((rng.random_range(0..i), i, rng.random_range(0.1..2.0)));
    }
    for i in 0..m {
        for j in i + 1..m {
            if !edges
                .iter()
                .any(|&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i))
                && rng.random::<f64>() < 0.3
            {
                edges.push((i, j, rng.random_range(0.1..2.0)));
            }
        }
    }
    NeighborhoodGraph::from_edges(m, &edges).unwrap()
}

fn random_graph(rng: &mut ChaCha8Rng, m: usize) -> NeighborhoodGraph<f64> {
    let mut edges = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if rng.random::<f64>() < 0.35 {
                edges.push((i, j, rng.random_range(0.05..3.0)));
            }
        }
    }
    NeighborhoodGraph::from_edges(m, &edges).unwrap()
}

fn unweighted(m: usize, edges: &[(usize, usize)]) -> LaplacianBundle<f64> {
    let e: Vec<_> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
    degree_and_laplacian(&NeighborhoodGraph::from_edges(m, &e).unwrap())
}

fn to_na(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Generalized pairs of `(L, D)` from nalgebra: ascending eigenvalues and
/// D-orthonormal eigenvectors.
fn oracle_pairs(b: &LaplacianBundle<f64>) -> (Vec<f64>, Vec<Array1<f64>>) {
    let m = b.m();
    let dinv: Vec<f64> = b.degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let n = DMatrix::from_fn(m, m, |i, j| dinv[i] * b.laplacian[[i, j]] * dinv[j]);
    let e = SymmetricEigen::new(n);
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &c| e.eigenvalues[a].total_cmp(&e.eigenvalues[c]));
    let vals = idx.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = idx
        .iter()
        .map(|&k| Array1::from_shape_fn(m, |i| e.eigenvectors[(i, k)] * dinv[i]))
        .collect();
    (vals, vecs)
}

fn sym_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(to_na(a))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

/// `Q diag(λ) Q^T` with a random orthogonal `Q`; returns the matrix and `Q`.
fn with_spectrum(rng: &mut ChaCha8Rng, lambdas: &[f64]) -> (Array2<f64>, DMatrix<f64>) {
    let n = lambdas.len();
    let q = random_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(lambdas));
    let g = &q * d * q.transpose();
    let g = Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (g[(i, j)] + g[(j, i)]));
    (g, q)
}

fn column(q: &DMatrix<f64>, k: usize) -> Array1<f64> {
    Array1::from_iter(q.column(k).iter().copied())
}

fn d_dot(b: &LaplacianBundle<f64>, x: &Array1<f64>, y: &Array1<f64>) -> f64 {
    x.iter()
        .zip(y)
        .zip(&b.degrees)
        .map(|((a, c), d)| a * c * d)
        .sum()
}

fn norm(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}

// ---------------------------------------------------------------- criteria

fn objective_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(2..=12);
        let d = rng.random_range(1..=3);
        let b = degree_and_laplacian(&random_graph(&mut rng, m));
        let y = Array2::from_shape_fn((m, d), |_| rng.random_range(-2.0..2.0));
        let lhs = objective_value(&b, y.view()).unwrap();
        // Independent right-hand side: 2 tr(Y^T L Y) with nalgebra.
        let yl = to_na(&y);
        let rhs = 2.0 * (yl.transpose() * to_na(&b.laplacian) * &yl).trace();
        let via_crate = laplacian_quadratic_form(&b, y.view()).unwrap();
        let scale = lhs.abs().max(rhs.abs()).max(1e-300);
        worst = worst
            .max((lhs - rhs).abs() / scale)
            .max((via_crate - rhs).abs() / scale);
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        format!(
            "100 pairs, max relative error {worst:.2e} (<= 1e-10), {:.3} s (< 1 s)",
            elapsed.as_secs_f64()
        ),
    )
}

fn incidence_factorization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for _ in 0..200 {
        let m = rng.random_range(2..=16);
        let b = degree_and_laplacian(&random_graph(&mut rng, m));
        let bb = b.incidence.dot(&b.incidence.t());
        worst = worst.max(
            (&bb - &b.laplacian)
                .iter()
                .fold(0.0f64, |a, x| a.max(x.abs())),
        );
        count += 1;
    }
    for kind in ["ring", "swiss-roll", "two-moons"] {
        for k in [1, 2, 5] {
            let pc = qleig::dataset::generate_synthetic::<f64>(kind.parse().unwrap(), 30, 0.05, 7)
                .unwrap();
            let t = qleig::graph::mean_knn_sq_distance(&pc, k).unwrap();
            let g =
                qleig::graph::build_knn_graph(&pc, k, qleig::graph::Kernel::Heat { t }).unwrap();
            let b = degree_and_laplacian(&g);
            let bb = b.incidence.dot(&b.incidence.t());
            worst = worst.max(
                (&bb - &b.laplacian)
                    .iter()
                    .fold(0.0f64, |a, x| a.max(x.abs())),
            );
            count += 1;
        }
    }
    check(
        worst <= 1e-12,
        format!("{count} graphs, max |BB^T - L| = {worst:.2e} (<= 1e-12)"),
    )
}

fn oracle_spectra() -> Outcome {
    let cases: Vec<(&str, LaplacianBundle<f64>, Vec<f64>)> = vec![
        ("P2", unweighted(2, &[(0, 1)]), vec![0.0, 2.0]),
        ("P3", unweighted(3, &[(0, 1), (1, 2)]), vec![0.0, 1.0, 2.0]),
        (
            "K4",
            unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
            vec![0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0],
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (name, b, want) in &cases {
        let got: Vec<f64> = generalized_eigenpairs(b)
            .unwrap()
            .iter()
            .map(|p| p.lambda)
            .collect();
        let (oracle, _) = oracle_pairs(b);
        let err = got
            .iter()
            .zip(want)
            .chain(oracle.iter().zip(want))
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        worst = worst.max(err);
        notes.push(format!("{name} {err:.1e}"));
    }
    check(worst <= 1e-10, format!("{} (<= 1e-10)", notes.join(", ")))
}

fn chain_spectrum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut count_mismatch = 0;
    for _ in 0..100 {
        let m = rng.random_range(2..=12);
        let b = degree_and_laplacian(&random_connected(&mut rng, m));
        let op = build_chain_operator(&b, 0.25).unwrap();
        let g_eigs = sym_eigenvalues(&op.g);
        let (gen, _) = oracle_pairs(&b);
        let top = g_eigs.last().copied().unwrap_or(0.0).max(1.0);
        let nz = |v: &[f64]| {
            v.iter()
                .copied()
                .filter(|x| *x > 1e-9 * top)
                .collect::<Vec<_>>()
        };
        let (a, c) = (nz(&g_eigs), nz(&gen));
        if a.len() != c.len() {
            count_mismatch += 1;
            continue;
        }
        worst = worst.max(
            a.iter()
                .zip(&c)
                .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs())),
        );
    }
    check(
        worst <= 1e-8 && count_mismatch == 0,
        format!("100 connected graphs, max deviation {worst:.2e} (<= 1e-8), {count_mismatch} count mismatches"),
    )
}

fn recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bundles: Vec<LaplacianBundle<f64>> = vec![
        unweighted(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        unweighted(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]),
        unweighted(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]),
    ];
    for _ in 0..50 {
        let m = rng.random_range(2..=12);
        bundles.push(degree_and_laplacian(&random_connected(&mut rng, m)));
    }
    let (mut res, mut fid, mut sub) = (0.0f64, 1.0f64, 0.0f64);
    let (mut n_single, mut n_degenerate) = (0, 0);
    for b in &bundles {
        let op = build_chain_operator(b, 0.25).unwrap();
        // Eigenvectors of G from nalgebra, not from the crate.
        let e = SymmetricEigen::new(to_na(&op.g));
        let (gen, gvecs) = oracle_pairs(b);
        let top = e.eigenvalues.max().max(1.0);
        for k in 0..b.m() {
            let lambda = e.eigenvalues[k];
            if lambda <= 1e-9 * top {
                continue;
            }
            let u = Array1::from_iter(e.eigenvectors.column(k).iter().copied());
            let pair = op.recover(u.view(), lambda, b).unwrap();
            let r = &b.laplacian.dot(&pair.v) - &(&b.degrees * &pair.v * lambda);
            res = res.max(norm(&r));
            let cluster: Vec<usize> = (0..gen.len())
                .filter(|&i| (gen[i] - lambda).abs() < 1e-6)
                .collect();
            if cluster.len() == 1 {
                let f = d_dot(b, &pair.v, &gvecs[cluster[0]]);
                fid = fid.min(f * f);
                n_single += 1;
            } else {
                // D-orthonormal oracle basis -> Euclidean via D^{1/2}.
                let s = b.degrees.mapv(f64::sqrt);
                let mut r = &pair.v * &s;
                for &i in &cluster {
                    let w = &gvecs[i] * &s;
                    let c = w.dot(&r);
                    r.scaled_add(-c, &w);
                }
                sub = sub.max(norm(&r));
                n_degenerate += 1;
            }
        }
    }
    check(
        res <= 1e-8 && fid >= 1.0 - 1e-10 && sub <= 1e-7,
        format!(
            "{n_single} simple + {n_degenerate} degenerate pairs: residual {res:.2e} (<= 1e-8), \
             fidelity {fid:.12} (>= 1 - 1e-10), subspace residual {sub:.2e} (<= 1e-7)"
        ),
    )
}

fn qpe_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s = 0.25;
    let start = Instant::now();
    // Dyadic: eigenvalues k / (2^t s); every eigenvector reads its k.
    let mut worst_dyadic: f64 = 1.0;
    for trial in 0..20 {
        let t = 3 + trial % 6;
        let n = 2 + trial % 7;
        let q = qleig::qsim::qubits_for(n);
        let ks: Vec<usize> = (0..n).map(|_| rng.random_range(0..1usize << t)).collect();
        let lambdas: Vec<f64> = ks
            .iter()
            .map(|&k| k as f64 / ((1u64 << t) as f64 * s))
            .collect();
        let (g, qm) = with_spectrum(&mut rng, &lambdas);
        let u = unitary_from_generator(g.view(), s, q).unwrap();
        for (i, &k) in ks.iter().enumerate() {
            let input = SystemState::from_real(column(&qm, i).view(), q).unwrap();
            let out = phase_estimation(&u, &input, t).unwrap();
            worst_dyadic = worst_dyadic.min(measure_phase_register(&out).probabilities()[k]);
        }
    }
    // Non-dyadic: 50 random generators, nearest bin at least 4 / π².
    let mut worst_nearest: f64 = 1.0;
    for trial in 0..50 {
        let t = 2 + trial % 7;
        let n = 2 + trial % 5;
        let q = qleig::qsim::qubits_for(n);
        let lambdas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.9)).collect();
        let (g, qm) = with_spectrum(&mut rng, &lambdas);
        let u = unitary_from_generator(g.view(), s, q).unwrap();
        let i = trial % n;
        let input = SystemState::from_real(column(&qm, i).view(), q).unwrap();
        let out = phase_estimation(&u, &input, t).unwrap();
        let bins = 1usize << t;
        let nearest = ((s * lambdas[i] * bins as f64).round() as usize) % bins;
        worst_nearest = worst_nearest.min(measure_phase_register(&out).probabilities()[nearest]);
    }
    let bound = 4.0 / std::f64::consts::PI.powi(2);
    // Largest register of the criterion: t + q = 14.
    let big = Instant::now();
    let lambdas: Vec<f64> = (0..16).map(|i| i as f64 * 0.2).collect();
    let (g, qm) = with_spectrum(&mut rng, &lambdas);
    let u = unitary_from_generator(g.view(), s, 4).unwrap();
    let out = phase_estimation(
        &u,
        &SystemState::from_real(column(&qm, 3).view(), 4).unwrap(),
        10,
    )
    .unwrap();
    let total: f64 = measure_phase_register(&out).total();
    let big_time = big.elapsed();
    let elapsed = start.elapsed();
    check(
        worst_dyadic >= 1.0 - 1e-10
            && worst_nearest >= bound
            && (total - 1.0).abs() < 1e-10
            && big_time < Duration::from_secs(10),
        format!(
            "dyadic min probability {worst_dyadic:.12}, nearest-bin min {worst_nearest:.4} (>= {bound:.4}), \
             t + q = 14 run {:.2} s (< 10 s), total {:.2} s",
            big_time.as_secs_f64(),
            elapsed.as_secs_f64()
        ),
    )
}

fn amplification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t = rng.random_range(1..=4);
        let layout = RegisterLayout::new(t, 1, 0, 2).unwrap();
        let mut amps = Array1::from_shape_fn(layout.dim(), |_| {
            num_complex::Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let n = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.mapv_inplace(|z| z / n);
        let st = PureState::new(amps, layout).unwrap();
        let target = Bitstring::new(rng.random_range(0..1usize << t), t).unwrap();
        let p0 = measure_phase_register(&st).probability(target);
        let k = rng.random_range(0..=10);
        let out = amplitude_amplification(&st, target, k).unwrap();
        let p = measure_phase_register(&out).probability(target);
        worst = worst.max((p - grover_success_probability(p0, k)).abs());
    }
    // Uniform two-bit register: p0 = 1/4, one round.
    let input = SystemState::<f64>::basis(0, 2, 1).unwrap();
    let mut st = PureState::with_zero_phase(&input, 2).unwrap();
    qleig::qsim::apply_hadamard_layer(&mut st);
    let target = Bitstring::new(2, 2).unwrap();
    let quarter = measure_phase_register(&amplitude_amplification(&st, target, 1).unwrap())
        .probability(target);
    check(
        worst <= 1e-10 && (quarter - 1.0).abs() <= 1e-12,
        format!("200 random states, k <= 10: max deviation {worst:.2e} (<= 1e-10); p0 = 0.25, k = 1 -> {quarter:.15}"),
    )
}

fn way1_distribution() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let s = 0.25;
    let t = 4;
    let bins = 1usize << t;
    let mut worst: f64 = 0.0;
    let mut worst_sigma: f64 = 0.0;
    let mut cases = 0;
    let shots = 10_000;
    let mut generators: Vec<Array2<f64>> = Vec::new();
    // Graph operators with dyadic spectra: P2, P3, C4.
    for b in [
        unweighted(2, &[(0, 1)]),
        unweighted(3, &[(0, 1), (1, 2)]),
        unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
    ] {
        generators.push(build_chain_operator(&b, s).unwrap().g);
    }
    for _ in 0..10 {
        let n = rng.random_range(2..=8);
        let lambdas: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..bins) as f64 / (bins as f64 * s))
            .collect();
        if lambdas.iter().all(|&l| l == 0.0) {
            continue;
        }
        generators.push(with_spectrum(&mut rng, &lambdas).0);
    }
    for (seed, g) in generators.iter().enumerate() {
        let eigs = sym_eigenvalues(g);
        let trace: f64 = eigs.iter().sum();
        let mut want = vec![0.0; bins];
        for &l in &eigs {
            let k = (l * s * bins as f64).round() as usize % bins;
            want[k] += l.max(0.0) / trace;
        }
        let est = density_phase_estimation(g.view(), s, t).unwrap();
        let got = est.probabilities();
        worst = worst.max(
            got.iter()
                .zip(&want)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs())),
        );
        let counts = est.sample(shots, seed as u64);
        for (b, &c) in counts.iter().enumerate() {
            let p = want[b];
            let freq = c as f64 / shots as f64;
            let sigma = (p * (1.0 - p) / shots as f64).sqrt();
            let z = if sigma > 0.0 {
                (freq - p).abs() / sigma
            } else if freq == p {
                0.0
            } else {
                f64::INFINITY
            };
            worst_sigma = worst_sigma.max(z);
        }
        cases += 1;
    }
    check(
        worst <= 1e-10 && worst_sigma <= 3.0,
        format!("{cases} generators: max probability error {worst:.2e} (<= 1e-10), {shots} shots worst {worst_sigma:.2} sigma (<= 3)"),
    )
}

fn end_to_end() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = 0.25;
    let t = 10;
    let bound = 1.0 / ((1u64 << t) as f64 * s);
    let mut cfg = RunConfig::new(DataSource::Generate {
        manifold: qleig::dataset::ManifoldKind::Ring,
        m: 8,
        noise: 0.0,
    });
    cfg.phase_bits = t;
    cfg.scale = s;
    cfg.dims = 2;
    let (mut graphs, mut worst_lambda, mut worst_dev, mut slowest) =
        (0, 0.0f64, 0.0f64, Duration::ZERO);
    let mut failures = Vec::new();
    while graphs < 20 {
        let m = rng.random_range(3..=8);
        let b = degree_and_laplacian(&random_connected(&mut rng, m));
        let (gen, _) = oracle_pairs(&b);
        if gen.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            continue;
        }
        graphs += 1;
        let start = Instant::now();
        let q = match quantum_embed_bundle(&b, &cfg) {
            Ok(q) => q,
            Err(e) => {
                failures.push(format!("m = {m}: {e}"));
                continue;
            }
        };
        slowest = slowest.max(start.elapsed());
        for (j, l) in q.embedding.lambdas.iter().enumerate() {
            worst_lambda = worst_lambda.max((l - gen[j + 1]).abs());
        }
        let classical = embed(&generalized_eigenpairs(&b).unwrap(), 2, b.components).unwrap();
        let report = compare_embeddings(&classical, &q.embedding, 1e-2).unwrap();
        worst_dev = worst_dev.max(report.max_deviation);
        if !report.pass {
            failures.push(format!(
                "m = {m}: compare deviation {:.2e}",
                report.max_deviation
            ));
        }
    }
    check(
        failures.is_empty() && worst_lambda <= bound && slowest < Duration::from_secs(30),
        format!(
            "{graphs} graphs, m <= 8, t = {t}: max |λ̂ - λ| {worst_lambda:.2e} (<= {bound:.2e}), \
             max compare deviation {worst_dev:.2e} (<= 1e-2), slowest {:.2} s (< 30 s){}",
            slowest.as_secs_f64(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", failures.join("; "))
            }
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("objective identity", objective_identity),
        ("incidence factorization", incidence_factorization),
        ("oracle spectra", oracle_spectra),
        ("chain-product spectrum", chain_spectrum),
        ("eigenvector recovery", recovery),
        ("phase estimation", qpe_exactness),
        ("amplitude amplification", amplification),
        ("mixed-state phase estimation", way1_distribution),
        ("end-to-end equivalence", end_to_end),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{tag}] {name}: {} ({:.2} s)",
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
