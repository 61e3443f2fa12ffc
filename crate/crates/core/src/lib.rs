//! Exact combinatorial core: scalars, marked graphs, curve data, embedded
//! resolution, semistable reduction and weight-graded invariants.

#![forbid(unsafe_code)]

pub mod curve;
pub mod graph;
pub mod hodge;
pub mod linalg;
pub mod matrix;
pub mod pipeline;
pub mod poly;
pub mod resolution;
pub mod scalar;
pub mod semistable;

pub use graph::{validate_graph, Edge, MarkedGraph, Vertex, VertexKind, Violation};
pub use scalar::{scalar_normalize, Alphabet, Monomial, Scalar, ScalarError, TAU};
pub use curve::{BranchSpec, CurveSpec, MonstranceData};
pub use matrix::Matrix;
pub use pipeline::{run_pipeline, Pipeline, PipelineError};
