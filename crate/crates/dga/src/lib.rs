//! The model DGA `A^•` of the central fiber and the reduced bar construction
//! over it.
//!
//! Sign table (fixed everywhere in this crate). On an edge write
//! `a = dx/x`, `b = dy/y`, `c = dξ`, `u = log t`, `du = a + b`.
//! Degree 1 slots are `(K, L, H)` for `K a + L b + H c`; degree 2 slots are
//! `(R, S, T)` for `R c∧a + S c∧b + T a∧b`; degree 3 is `U c∧a∧b`.
//! - `d P = (P_u, P_u, P_ξ)`
//! - `d (K, L, H) = (K_ξ − H_u, L_ξ − H_u, L_u − K_u)`
//! - `d (R, S, T) = R_u − S_u + T_ξ`
//! - `(K, L, H) ∧ (K', L', H') = (HK' − KH', HL' − LH', KL' − LK')`
//! - `(K, L, H) ∧ (R, S, T) = −KS + LR + HT`
//! - `N = −∂/∂u` on every edge and zero on surfaces.
//!
//! The Chen differential carries no Koszul signs: `d_I` inserts `dφ_i` and
//! `d_C` inserts `φ_i ∧ φ_{i+1}`.

#![forbid(unsafe_code)]

pub mod bar;
pub mod basis;
pub mod complement;
pub mod element;
pub mod fpsc;
pub mod model;
pub mod omega;
pub mod poly;

use thiserror::Error;

pub use bar::BarTensor;
pub use element::{make_theta, CompatViolation, Coord, DgaElement};
pub use model::{Comb, Generator, Model, SurfaceModel};
pub use poly::EdgePoly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DgaError {
    #[error("polynomial degree overflow (ξ-degree {xi}, u-degree {u})")]
    DegreeOverflow { xi: u32, u: u32 },
    #[error("missing wedge declaration {left}∧{right} on component {component}")]
    MissingWedge { component: usize, left: String, right: String },
    #[error("residue theorem violated by closed form {generator} on component {component}: residue sum {sum}")]
    ResidueTheorem { component: usize, generator: String, sum: String },
    #[error("unknown generator {name} on component {component}")]
    UnknownGenerator { component: usize, name: String },
    #[error("unknown component {0}")]
    UnknownComponent(usize),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("branch {0} has no disk edge")]
    NoDiskEdge(usize),
    #[error("no disk 0 for the augmentation")]
    NoDisk0,
    #[error("no residue slot for edge {edge} on component {component}")]
    NoResidueSlot { component: usize, edge: usize },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: u8, found: u8 },
    #[error("position {position} out of range for length {length}")]
    PositionOutOfRange { position: usize, length: usize },
    #[error("primitive unavailable for {wedge}")]
    PrimitiveUnavailable { wedge: String },
    #[error("incompatible factor: {0}")]
    Incompatible(String),
    #[error("invalid declaration: {0}")]
    BadDeclaration(String),
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("{0}")]
    Inconsistent(String),
}
