use thiserror::Error;

use crate::causet::ElemId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("poset has no elements")]
    EmptyPoset,
    #[error("poset would have {count} elements, cap is {cap}")]
    PosetTooLarge { count: usize, cap: usize },
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("invalid symmetry action: {0}")]
    InvalidAction(String),
    #[error("both arguments must be loops")]
    NotLoops,
    #[error("loops are not causally disjoint")]
    NotCausallyDisjoint,
    #[error("coboundary of a degree-{0} cochain is not represented")]
    DegreeOverflow(u8),
    #[error("poset carries no geometry")]
    MissingGeometry,
    #[error("group element {0} has no geometric realization")]
    MissingRealization(usize),
    #[error("no stabilizer-fixed atom for orbit of {0:?}")]
    ObstructedOrbit(ElemId),
    #[error("{to:?} is not reachable from {from:?}")]
    NotConnected { from: ElemId, to: ElemId },
    #[error("no path from {from:?} to {to:?} is fixed by a joint stabilizer of order {stabilizer}")]
    Obstructed { from: ElemId, to: ElemId, stabilizer: usize },
    #[error("quadrature did not converge: {what} (relative change {rel_change:e})")]
    NonConvergence { what: String, rel_change: f64 },
    #[error("no non-flatness witness found")]
    NoWitnessFound,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("missing value for {0}")]
    MissingValue(String),
    #[error("parse error: {0}")]
    Parse(String),
}
