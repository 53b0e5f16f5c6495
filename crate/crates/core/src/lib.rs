//! Laplacian eigenmaps, classically and through a simulated quantum pipeline.
//!
//! Data flows `dataset` -> `graph` -> `eigenmap` on the classical side; the
//! quantum side goes `graph` -> `chain` (the Hermitian operator `G = F F^T`)
//! -> `qsim` (phase estimation, amplitude amplification) and back through the
//! recovery map in `chain`. `pipeline` wires both into end-to-end runs.
//!
//! Everything numeric is generic over [`Scalar`] (`f64` or `f32`); the aliases
//! below fix the precision for callers that do not care.

pub mod chain;
pub mod dataset;
pub mod eigenmap;
pub mod graph;
pub mod linalg;
pub mod pipeline;
pub mod qsim;
mod scalar;

pub use scalar::Scalar;

pub type PointCloud64 = dataset::PointCloud<f64>;
pub type PointCloud32 = dataset::PointCloud<f32>;
pub type Graph64 = graph::NeighborhoodGraph<f64>;
pub type Graph32 = graph::NeighborhoodGraph<f32>;
pub type LaplacianBundle64 = graph::LaplacianBundle<f64>;
pub type LaplacianBundle32 = graph::LaplacianBundle<f32>;
pub type Embedding64 = eigenmap::Embedding<f64>;
pub type Embedding32 = eigenmap::Embedding<f32>;
pub type ChainOperator64 = chain::ChainOperator<f64>;
pub type ChainOperator32 = chain::ChainOperator<f32>;
pub type PureState64 = qsim::PureState<f64>;
pub type PureState32 = qsim::PureState<f32>;
pub type ClassicalRun64 = pipeline::ClassicalRun<f64>;
pub type QuantumRun64 = pipeline::QuantumRun<f64>;
