//! Curve data to central fiber, Hodge data and operators in one pass.

use serde::Serialize;
use thiserror::Error;

use crate::curve::{milnor_from_branch_data, monstrance_order, CurveSpec, MonstranceData};
use crate::hodge::{nilpotent_matrices, weight_graded_dims, HodgeError, MhsSummary, NilpotentOps};
use crate::poly::{milnor_number_poly, PolyError};
use crate::resolution::{build_resolution_graph, mu_from_resolution, ResolutionError, ResolutionGraph};
use crate::semistable::{semistable_reduce, verify_h1_dimension, CentralFiberGraph, H1Report, SemistableError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Semistable(#[from] SemistableError),
    #[error(transparent)]
    Hodge(#[from] HodgeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Serialize)]
pub struct Pipeline {
    pub resolution: ResolutionGraph,
    pub central_fiber: CentralFiberGraph,
    pub monstrance: Vec<MonstranceData>,
    pub mu_branch: u64,
    pub mu_resolution: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_polynomial: Option<u64>,
    pub h1: H1Report,
    pub mhs: MhsSummary,
    pub ops: NilpotentOps,
}

pub fn run_pipeline(c: &CurveSpec) -> Result<Pipeline, PipelineError> {
    let resolution = build_resolution_graph(c)?;
    let central_fiber = semistable_reduce(&resolution)?;
    let mu_branch = milnor_from_branch_data(c)?;
    let mu_resolution = mu_from_resolution(&resolution, c.r());
    let mu_polynomial = c.polynomial.as_ref().map(milnor_number_poly).transpose()?;
    let h1 = verify_h1_dimension(&central_fiber, mu_branch, c.r());
    let monstrance: Vec<MonstranceData> = c.branches.iter().map(monstrance_order).collect();
    let mhs = weight_graded_dims(&central_fiber);
    let ops = nilpotent_matrices(&central_fiber, &monstrance)?;
    Ok(Pipeline {
        resolution,
        central_fiber,
        monstrance,
        mu_branch,
        mu_resolution,
        mu_polynomial,
        h1,
        mhs,
        ops,
    })
}
