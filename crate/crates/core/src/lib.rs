//! Discrete and continuous graph Laplacians, and the dictionary between
//! them.
//!
//! A weighted discrete graph `(V, m; b)` carries the difference Laplacian
//! `(Lf)(v) = m(v)^{-1} Σ_u b(v,u)(f(v) - f(u))`; a weighted metric graph
//! carries the Kirchhoff Laplacian of the form `Q[f] = Σ_e ν(e) ∫ |f'|²`.
//! This crate implements both sides and the maps connecting them:
//!
//! - [`graph`]: the immutable data model with validation.
//! - [`correspondence`]: discretization of a metric model to its vertex
//!   data `(m, b)`, cable-system realization of a discrete graph, and the
//!   affine extension/restriction maps behind the harmonic bijection.
//! - [`metrics`]: intrinsic edge lengths, path metrics on both sides, the
//!   intrinsic-metric inequality, balls, and the quasi-isometry check.
//! - [`operators`]: discrete spectra, P1 finite elements for the Kirchhoff
//!   Laplacian, heat semigroups, and the equilateral spectral reduction.
//! - [`stochastic`]: Cayley graphs, growth functions, random-walk return
//!   probabilities, and recurrence/transience diagnostics at finite scale.
//! - [`io`]: the JSON interchange format used by the CLI.
//!
//! Everything operates on finite graphs or finite truncations of infinite
//! ones; infinite families enter only through lazy generators in
//! [`stochastic`].

use thiserror::Error as ThisError;

pub mod correspondence;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod operators;
pub mod stochastic;

pub use graph::{
    support_graph, validate_discrete, validate_model, DiscreteGraph, EdgeId, EdgewiseFunction,
    MetricEdge, MetricGraphModel, SimpleGraph, ValidationReport, VertexId, Violation,
};

/// Errors for malformed inputs and violated operation preconditions.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("unknown vertex: {0}")]
    UnknownVertex(String),

    #[error("duplicate vertex id: {0}")]
    DuplicateVertex(String),

    #[error("duplicate edge: {0}")]
    DuplicateEdge(String),

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("non-finite or negative quantity: {0}")]
    NonFinite(String),

    #[error("graph is not simple: {0}")]
    NotSimple(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("missing value for vertex {0}")]
    MissingValue(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight is not intrinsic at vertex {vertex}: deficit {deficit}")]
    NotIntrinsic { vertex: String, deficit: f64 },

    #[error("function is discontinuous at a vertex")]
    Discontinuous,

    #[error("problem size {size} exceeds the eigensolver cap of {cap} dofs")]
    SizeCap { size: usize, cap: usize },

    #[error("mass matrix is not positive definite")]
    MassNotPositiveDefinite,

    #[error("spectral result has no eigenvectors")]
    MissingEigenvectors,

    #[error("unsupported group family: {0}")]
    UnsupportedGroup(String),

    #[error("truncation too small: probability mass reached the boundary at step {step}")]
    TruncationContaminated { step: usize },

    #[error("ball of radius {radius} touches the truncation boundary")]
    BallContaminated { radius: f64 },

    #[error("sequence too short: {0}")]
    SequenceTooShort(String),

    #[error("json: {0}")]
    Json(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
