//! `qleig`: generate point clouds, embed them classically or through the
//! simulated quantum pipeline, and compare embeddings.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qleig::dataset::{format_matrix, generate_synthetic, ManifoldKind};
use qleig::pipeline::{
    classical_diagnostics_json, compare_embeddings, embedding_json, load_embedding,
    quantum_diagnostics_json, run_classical_embed, run_quantum_embed, write_embedding,
    ComparisonReport, DataSource, Error, ErrorKind, KernelChoice, OutputFormat, RunConfig,
    Way2Input, DEFAULT_DIMS, DEFAULT_K, DEFAULT_PHASE_BITS, DEFAULT_TOL,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_COMPUTE: u8 = 4;
const EXIT_MISMATCH: u8 = 5;

#[derive(Parser)]
#[command(
    name = "qleig",
    version,
    about = "Laplacian eigenmaps, classical and quantum-simulated"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic point cloud as CSV.
    Gen(GenArgs),
    /// Classical Laplacian eigenmap.
    Embed(RunArgs),
    /// Eigenmap through the simulated quantum pipeline (m <= 16).
    Qembed(RunArgs),
    /// Compare two embedding files, or run both pipelines and compare them.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ring,
    SwissRoll,
    TwoMoons,
}

impl From<Kind> for ManifoldKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Ring => ManifoldKind::Ring,
            Kind::SwissRoll => ManifoldKind::SwissRoll,
            Kind::TwoMoons => ManifoldKind::TwoMoons,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Heat,
    Binary,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Way2Arg {
    Purified,
    UniformNodes,
    UniformRegister,
}

#[derive(Args)]
struct SourceArgs {
    /// Point cloud CSV (one sample per line, no header).
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Generate a synthetic point cloud instead of reading one.
    #[arg(long, value_enum)]
    generate: Option<Kind>,
    /// Number of generated samples [default: 100, or 8 for qembed/compare].
    #[arg(long)]
    m: Option<usize>,
    /// Standard deviation of Gaussian noise added to generated samples.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Seed for generation and shot sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "ring")]
    generate: Kind,
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Neighbors per sample.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, value_enum, default_value = "heat")]
    kernel: KernelArg,
    /// Heat-kernel bandwidth [default: mean squared neighbor distance].
    #[arg(long)]
    heat_t: Option<f64>,
    /// Embedding dimension.
    #[arg(long, default_value_t = DEFAULT_DIMS)]
    dims: usize,
    /// Phase-register width t; eigenvalue resolution is 2^-t / s.
    #[arg(long, default_value_t = DEFAULT_PHASE_BITS)]
    phase_bits: usize,
    /// Spectral scale s in (0, 1/2].
    #[arg(long, default_value_t = qleig::chain::DEFAULT_SCALE)]
    scale: f64,
    /// Shots sampled from the phase-register distribution (0 = exact only).
    #[arg(long, default_value_t = 0)]
    shots: usize,
    /// System input of the amplified phase estimation.
    #[arg(long, value_enum, default_value = "purified")]
    way2_input: Way2Arg,
    /// Output file; stdout when absent. CSV output gets a `<out>.json` sidecar.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Comparison tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Record stage wall-clock times in the diagnostics.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Two embedding files (CSV with optional sidecar, or JSON). Without them
    /// both pipelines run on the configured data.
    #[arg(num_args = 0..=2)]
    files: Vec<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

fn config(args: &RunArgs, default_m: usize) -> Result<RunConfig, Error> {
    let s = &args.source;
    let source = match (&s.input, s.generate) {
        (Some(path), None) => DataSource::File { path: path.clone() },
        (None, Some(kind)) => DataSource::Generate {
            manifold: kind.into(),
            m: s.m.unwrap_or(default_m),
            noise: s.noise,
        },
        _ => {
            return Err(Error::Config(
                "give exactly one of --input PATH or --generate KIND".into(),
            ))
        }
    };
    let mut cfg = RunConfig::new(source);
    cfg.k = args.k;
    cfg.kernel = match args.kernel {
        KernelArg::Heat => KernelChoice::Heat,
        KernelArg::Binary => KernelChoice::Binary,
    };
    cfg.heat_t = args.heat_t;
    cfg.dims = args.dims;
    cfg.phase_bits = args.phase_bits;
    cfg.scale = args.scale;
    cfg.shots = args.shots;
    cfg.seed = s.seed;
    cfg.way2_input = match args.way2_input {
        Way2Arg::Purified => Way2Input::Purified,
        Way2Arg::UniformNodes => Way2Input::UniformNodes,
        Way2Arg::UniformRegister => Way2Input::UniformRegister,
    };
    cfg.out = args.out.clone();
    cfg.format = format(args.format);
    cfg.tol = args.tol;
    cfg.timings = args.timings;
    cfg.validate()?;
    Ok(cfg)
}

fn format(f: FormatArg) -> OutputFormat {
    match f {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn output_embedding(
    cfg: &RunConfig,
    e: &qleig::Embedding64,
    diagnostics: &str,
) -> Result<(), Error> {
    match (&cfg.out, cfg.format) {
        (Some(path), f) => write_embedding(path, e, f, diagnostics),
        (None, OutputFormat::Csv) => emit(None, &format_matrix(&e.y)),
        (None, OutputFormat::Json) => emit(None, &embedding_json(e, Some(diagnostics))),
    }
}

fn report_json(report: &ComparisonReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Returns whether the run succeeded in full (comparisons may fail).
fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Gen(a) => {
            let pc = generate_synthetic::<f64>(a.generate.into(), a.m, a.noise, a.seed).map_err(
                |e| match e {
                    qleig::dataset::DatasetError::TooFewPoints(_)
                    | qleig::dataset::DatasetError::BadNoise(_) => Error::Config(e.to_string()),
                    e => e.into(),
                },
            )?;
            let text = match format(a.format) {
                OutputFormat::Csv => format_matrix(pc.points()),
                OutputFormat::Json => {
                    let rows: Vec<Vec<f64>> =
                        pc.points().rows().into_iter().map(|r| r.to_vec()).collect();
                    let mut s =
                        serde_json::to_string_pretty(&serde_json::json!({ "points": rows }))
                            .expect("points serialize");
                    s.push('\n');
                    s
                }
            };
            emit(a.out.as_deref(), &text)?;
            Ok(true)
        }
        Command::Embed(a) => {
            let cfg = config(&a, 100)?;
            let r = run_classical_embed::<f64>(&cfg)?;
            output_embedding(&cfg, &r.embedding, &classical_diagnostics_json(&cfg, &r))?;
            Ok(true)
        }
        Command::Qembed(a) => {
            let cfg = config(&a, 8)?;
            let r = run_quantum_embed::<f64>(&cfg)?;
            output_embedding(&cfg, &r.embedding, &quantum_diagnostics_json(&cfg, &r))?;
            Ok(true)
        }
        Command::Compare(a) => {
            let report = match a.files.as_slice() {
                [x, y] => {
                    if !(a.run.tol.is_finite() && a.run.tol >= 0.0) {
                        return Err(Error::Config(format!(
                            "--tol must be finite and >= 0, got {}",
                            a.run.tol
                        )));
                    }
                    let ea = load_embedding::<f64>(x)?;
                    let eb = load_embedding::<f64>(y)?;
                    compare_embeddings(&ea, &eb, a.run.tol)?
                }
                [] => {
                    let cfg = config(&a.run, 8)?;
                    let c = run_classical_embed::<f64>(&cfg)?;
                    let q = run_quantum_embed::<f64>(&cfg)?;
                    compare_embeddings(&c.embedding, &q.embedding, cfg.tol)?
                }
                _ => {
                    return Err(Error::Config(
                        "compare takes zero or two embedding files".into(),
                    ))
                }
            };
            emit(a.run.out.as_deref(), &report_json(&report))?;
            if !report.pass {
                log::warn!(
                    "max deviation {:e} exceeds tolerance {:e}",
                    report.max_deviation,
                    report.tol
                );
            }
            Ok(report.pass)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_MISMATCH),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Config => EXIT_CONFIG,
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Computation => EXIT_COMPUTE,
            })
        }
    }
}
