use std::str::FromStr;
use std::time::Instant;

use super::config::{DataSource, KernelChoice, RunConfig};
use super::report::Timings;
use super::Error;
use crate::dataset::{generate_synthetic, load_points, PointCloud};
use crate::eigenmap::{embed, generalized_eigenpairs, Embedding, GeneralizedEigenpair};
use crate::graph::{
    build_knn_graph, degree_and_laplacian, mean_knn_sq_distance, Kernel, LaplacianBundle,
};
use crate::Scalar;

/// Everything a classical run produced.
#[derive(Debug, Clone)]
pub struct ClassicalRun<T> {
    pub points: PointCloud<T>,
    /// Bandwidth actually used (`None` for binary weights).
    pub heat_t: Option<T>,
    pub bundle: LaplacianBundle<T>,
    pub pairs: Vec<GeneralizedEigenpair<T>>,
    pub embedding: Embedding<T>,
    pub timings: Timings,
}

/// Reads or generates the configured point cloud.
pub fn load_dataset<T: Scalar + FromStr>(cfg: &RunConfig) -> Result<PointCloud<T>, Error> {
    Ok(match &cfg.source {
        DataSource::File { path } => load_points(path)?,
        DataSource::Generate { manifold, m, noise } => {
            generate_synthetic(*manifold, *m, *noise, cfg.seed)?
        }
    })
}

/// kNN graph and its Laplacian bundle for `pc` under `cfg`.
pub(crate) fn build_bundle<T: Scalar>(
    pc: &PointCloud<T>,
    cfg: &RunConfig,
) -> Result<(LaplacianBundle<T>, Option<T>), Error> {
    cfg.validate_for(pc.m())?;
    let (kernel, heat_t) = match cfg.kernel {
        KernelChoice::Binary => (Kernel::Binary, None),
        KernelChoice::Heat => {
            let t = match cfg.heat_t {
                Some(t) => T::lit(t),
                None => mean_knn_sq_distance(pc, cfg.k)?,
            };
            (Kernel::Heat { t }, Some(t))
        }
    };
    let graph = build_knn_graph(pc, cfg.k, kernel)?;
    Ok((degree_and_laplacian(&graph), heat_t))
}

/// Dataset -> graph -> generalized eigenpairs -> `d`-dimensional embedding.
pub fn run_classical_embed<T: Scalar + FromStr>(cfg: &RunConfig) -> Result<ClassicalRun<T>, Error> {
    cfg.validate()?;
    let mut timings = Timings::new(cfg.timings);
    let start = Instant::now();
    let points = load_dataset::<T>(cfg)?;
    timings.record("dataset", start);

    let start = Instant::now();
    let (bundle, heat_t) = build_bundle(&points, cfg)?;
    timings.record("graph", start);

    let start = Instant::now();
    let pairs = generalized_eigenpairs(&bundle)?;
    let embedding = embed(&pairs, cfg.dims, bundle.components)?;
    timings.record("eigensolve", start);
    log::info!(
        "classical embedding: m = {}, d = {}, components = {}",
        points.m(),
        cfg.dims,
        bundle.components
    );
    Ok(ClassicalRun {
        points,
        heat_t,
        bundle,
        pairs,
        embedding,
        timings,
    })
}
