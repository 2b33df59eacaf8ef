//! Exact-arithmetic toolkit for slit translation surfaces.
//!
//! A surface is a finite union of convex rational polygons with some edges
//! glued pairwise by translation. Unpaired edges are *slits*: they stand in
//! for the domains of poles of a meromorphic 1-form, and straight-line
//! trajectories are not allowed to cross them. On top of that model the crate
//! provides:
//!
//! - saddle connection tracing and complete enumeration up to a length bound
//!   ([`tracer`]),
//! - decomposition of a directional foliation into invariant components with
//!   exact angle-defect ledgers ([`foliation`]),
//! - pole domains and the core (geodesic convex hull of the singularities)
//!   by boundary straightening ([`core_region`]),
//! - direction sets, derived-set towers and rank estimation with cylinder
//!   certificates, plus the topological rank bound ([`rank`]),
//! - deterministic generators for test surfaces ([`forge`]),
//! - JSON (de)serialization and SVG rendering ([`io`], [`render`]).
//!
//! All geometric predicates are exact: coordinates are arbitrary-precision
//! rationals and angles are half-turn counts with vector residues. Floating
//! point only appears when printing SVG coordinates and in the experimental
//! growth-curve fit.

pub mod angle;
pub mod core_region;
pub mod foliation;
pub mod forge;
pub mod geom;
pub mod io;
pub mod rank;
pub mod region;
pub mod render;
pub mod surface;
pub mod tracer;

/// Exact coordinate scalar used throughout the crate.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer backing [`Rat`] and [`geom::Direction`].
pub type Int = num_bigint::BigInt;

pub use geom::{Direction, PolygonChart, Segment, Vec2};
pub use surface::Surface;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("surface: {0}")]
    Surface(String),
    #[error("schema: {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("trace: {0}")]
    Trace(String),
    #[error("decompose: {0}")]
    Decompose(String),
    #[error("rank: {0}")]
    Rank(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }
    pub(crate) fn surface(msg: impl Into<String>) -> Self {
        Error::Surface(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
