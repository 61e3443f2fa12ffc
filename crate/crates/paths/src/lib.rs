//! Paths in the central fiber over a tangent vector and exact iterated
//! integrals of Chen-closed bar elements along them.

pub mod integrate;
pub mod moves;
pub mod numeric;
pub mod period;
pub mod transport;
pub mod word;

use nearby_core::ScalarError;
use nearby_dga::DgaError;

pub use integrate::{
    groupring_pairing, integrate_closed, integrate_closed_open, integrate_over_scaled_vector, iterated_integral,
    vary_tangent, GroupRingCombo, Integrator,
};
pub use moves::{applicable_moves, homotopy_move, Move};
pub use period::{PathKey, PeriodValue};
pub use transport::{transport, TransportSeries};
pub use word::{base_position, check_based, trace, Event, PathWord, Position};

#[derive(Debug, thiserror::Error)]
pub enum PathError {
    #[error("cannot parse path word: {0}")]
    Parse(String),
    #[error("the model has no disk for branch 0 to base paths at")]
    NoBase,
    #[error("invalid path at event {index}: {reason}")]
    Invalid { index: usize, reason: String },
    #[error("form is not a closed compatible 1-form")]
    NotClosed,
    #[error("tensor is not Chen-closed")]
    NotChenClosed,
    #[error("family has nonzero curvature")]
    Curvature,
    #[error("move does not apply: {0}")]
    InapplicableMove(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Dga(#[from] DgaError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}
