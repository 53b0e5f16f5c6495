use std::fs;
use std::path::Path;

use qleig::dataset::ManifoldKind;
use qleig::eigenmap::EigenmapError;
use qleig::pipeline::{
    classical_diagnostics_json, compare_embeddings, load_embedding, quantum_diagnostics_json,
    run_classical_embed, run_quantum_embed, sidecar_path, write_embedding, DataSource, Error,
    ErrorKind, KernelChoice, OutputFormat, RunConfig,
};

fn csv_config(dir: &Path, text: &str) -> RunConfig {
    let path = dir.join("points.csv");
    fs::write(&path, text).unwrap();
    RunConfig::new(DataSource::File { path })
}

fn line(m: usize) -> String {
    (0..m).map(|i| format!("{i}\n")).collect()
}

fn p3_config(dir: &Path) -> RunConfig {
    let mut cfg = csv_config(dir, &line(3));
    cfg.k = 1;
    cfg.kernel = KernelChoice::Binary;
    cfg.dims = 1;
    cfg
}

#[test]
fn classical_p3_column_is_antisymmetric() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_classical_embed::<f64>(&p3_config(dir.path())).unwrap();
    let y = &run.embedding.y;
    assert_eq!(y.dim(), (3, 1));
    assert!(y[[1, 0]].abs() < 1e-12);
    assert!((y[[0, 0]] + y[[2, 0]]).abs() < 1e-12);
    assert!(y[[0, 0]] > 0.0);
    assert!((run.embedding.lambdas[0] - 1.0).abs() < 1e-10);
}

#[test]
fn too_many_dimensions_names_the_available_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = p3_config(dir.path());
    cfg.dims = 3;
    let err = run_classical_embed::<f64>(&cfg).unwrap_err();
    assert!(matches!(
        err,
        Error::Eigenmap(EigenmapError::DimensionTooLarge {
            requested: 3,
            available: 2
        })
    ));
    assert_eq!(err.kind(), ErrorKind::Config);
    assert!(err.to_string().contains("only 2"));
}

#[test]
fn classical_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(DataSource::Generate {
        manifold: ManifoldKind::SwissRoll,
        m: 40,
        noise: 0.05,
    });
    cfg.seed = 11;
    let mut outputs = Vec::new();
    for run_id in 0..2 {
        let run = run_classical_embed::<f64>(&cfg).unwrap();
        let out = dir.path().join(format!("emb{run_id}.csv"));
        write_embedding(
            &out,
            &run.embedding,
            OutputFormat::Csv,
            &classical_diagnostics_json(&cfg, &run),
        )
        .unwrap();
        outputs.push((
            fs::read(&out).unwrap(),
            fs::read(sidecar_path(&out)).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn embedding_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::new(DataSource::Generate {
        manifold: ManifoldKind::Ring,
        m: 12,
        noise: 0.0,
    });
    let run = run_classical_embed::<f64>(&cfg).unwrap();
    let diag = classical_diagnostics_json(&cfg, &run);
    for (name, format) in [("e.csv", OutputFormat::Csv), ("e.json", OutputFormat::Json)] {
        let out = dir.path().join(name);
        write_embedding(&out, &run.embedding, format, &diag).unwrap();
        let back = load_embedding::<f64>(&out).unwrap();
        assert_eq!(back, run.embedding, "{name}");
    }
}

#[test]
fn quantum_p2_reads_two_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = csv_config(dir.path(), &line(2));
    cfg.k = 1;
    cfg.kernel = KernelChoice::Binary;
    cfg.dims = 1;
    cfg.phase_bits = 4;
    let run = run_quantum_embed::<f64>(&cfg).unwrap();
    assert_eq!(run.embedding.lambdas, vec![2.0]);
    let y = &run.embedding.y;
    assert!((y[[0, 0]] + y[[1, 0]]).abs() < 1e-12);
    assert!((y[[0, 0]] - 0.5f64.sqrt()).abs() < 1e-12);
    let row = &run.diagnostics.eigenvalues[0];
    assert_eq!(row.bitstring.to_string(), "1000");
    assert!((row.success_probability - 1.0).abs() < 1e-12);
}

#[test]
fn quantum_p3_matches_the_classical_column() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = p3_config(dir.path());
    cfg.phase_bits = 8;
    let q = run_quantum_embed::<f64>(&cfg).unwrap();
    assert!((q.embedding.lambdas[0] - 1.0).abs() <= 1.0 / 64.0);
    assert!(q.diagnostics.eigenvalues[0].vector_fidelity.unwrap() >= 0.99);
    assert!(q.diagnostics.eigenvalues[0].state_fidelity >= 0.99);

    cfg.phase_bits = 10;
    let q = run_quantum_embed::<f64>(&cfg).unwrap();
    let c = run_classical_embed::<f64>(&cfg).unwrap();
    let report = compare_embeddings(&c.embedding, &q.embedding, 1e-2).unwrap();
    assert!(report.pass, "{report:?}");
}

#[test]
fn quantum_outputs_are_byte_identical() {
    let mut cfg = RunConfig::new(DataSource::Generate {
        manifold: ManifoldKind::TwoMoons,
        m: 8,
        noise: 0.1,
    });
    cfg.seed = 3;
    cfg.shots = 500;
    let a = run_quantum_embed::<f64>(&cfg).unwrap();
    let b = run_quantum_embed::<f64>(&cfg).unwrap();
    assert_eq!(
        quantum_diagnostics_json(&cfg, &a),
        quantum_diagnostics_json(&cfg, &b)
    );
    assert_eq!(a.embedding, b.embedding);
    let shots: usize = a.diagnostics.outcomes.iter().filter_map(|o| o.counts).sum();
    assert_eq!(shots, 500);
}

#[test]
fn seventeen_nodes_exceed_the_quantum_cap() {
    let cfg = RunConfig::new(DataSource::Generate {
        manifold: ManifoldKind::Ring,
        m: 17,
        noise: 0.0,
    });
    let err = run_quantum_embed::<f64>(&cfg).unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Config);
    assert!(err.to_string().contains("at most 16"));
}

#[test]
fn bad_neighbor_count_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = p3_config(dir.path());
    cfg.k = 3;
    assert_eq!(
        run_classical_embed::<f64>(&cfg).unwrap_err().kind(),
        ErrorKind::Config
    );
}

#[test]
fn missing_input_is_an_input_error() {
    let cfg = RunConfig::new(DataSource::File {
        path: "/nonexistent/points.csv".into(),
    });
    let err = run_classical_embed::<f64>(&cfg).unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Input);
    assert!(err.to_string().starts_with("dataset:"));
}
