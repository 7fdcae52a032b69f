//! Similarity of planar polygonal chains.
//!
//! The crate centers on the *free-space diagram* of two chains: the set of
//! parameter pairs whose points lie within a distance threshold of each
//! other. On top of it we build:
//!
//! * classical similarity measures: Hausdorff distance and the (continuous
//!   and discrete) Frechet distance, with verifiable certificates,
//! * the *k-station distance*: the smallest threshold for which both chains
//!   can be cut into at most `k + 1` pieces guarded by `k` shared stations,
//!   approximated through axis-aligned segment covers of the diagram,
//! * a standalone solver for *compatible segment covers* of axis-aligned
//!   segment arrangements, and
//! * a generator of satisfiability reduction instances that makes the
//!   hardness of the exact station problem tangible (and testable).

pub mod cover;
pub mod dist;
pub mod free_space;
pub mod gadget;
pub mod geom;
pub mod io;
pub mod station;
pub mod svg;

mod book;

pub use geom::{ParamInterval, Point2, PolyChain, TOL};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate chain: {0}")]
    DegenerateChain(String),
    #[error("invalid interval [{lo}, {hi}]")]
    BadInterval { lo: f64, hi: f64 },
    #[error("no cover exists at this threshold: free space misses {axis} in [{gap_lo}, {gap_hi}]")]
    Infeasible {
        axis: &'static str,
        gap_lo: f64,
        gap_hi: f64,
    },
    #[error("no horizontal progress from {0}: free space disconnected along the axis")]
    NoProgress(f64),
    #[error("invalid input: {0}")]
    BadInput(String),
    #[error("search budget exhausted after {0} candidates")]
    BudgetExhausted(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
