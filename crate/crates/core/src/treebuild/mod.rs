//! The metrized dynamical tree of a polynomial with disconnected Julia set.
//!
//! Points of the plane are collapsed along connected components of level
//! sets of the escape rate `G`. Vertices sit at the grand-orbit heights of
//! the escaping critical points; edges carry local degrees and exact masses.
//! The tree is truncated a fixed number of levels below the base vertex
//! `v0` (height `M(f)`), with a trunk running upward toward infinity.

mod build;
mod export;
mod grid;
mod points;
mod region;
mod tree;

use num_rational::BigRational;
use thiserror::Error;

use crate::polycore::PolyError;

pub use build::{
    build_tree, build_tree_with, circle_max, repelling_fixed_point, BuildOptions, Locator, LEVEL_TOL,
};
pub use export::{tree_from_json, tree_to_json, ExportEdge, ExportVertex, TreeExport};
pub use grid::{adaptive_flood, flood_fill, sublevel_components, Flood, GridSpec, SublevelComponent};
pub use points::{
    basepoint, generation, tree_map, weight_masses, weights_at, ComponentHandle, PointedTree, TreePoint,
    Weight,
};
pub use region::{component_region, Region};
pub use tree::{format_rational, mass_bound, parse_rational, Edge, Tree, TreeMeasure, Vertex};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("Julia set is connected (M(f) = {max_rate:e})")]
    ConnectedJuliaSet { max_rate: f64 },
    #[error("resolution exhausted: {0}")]
    ResolutionExhausted(String),
    #[error("inconsistent tree data: {0}")]
    Inconsistent(String),
    #[error("truncation exceeded: {0}")]
    TruncationExceeded(String),
    #[error("ball contains vertex {vertex}")]
    VertexInBall { vertex: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `deg(e, F^N) / d^N` with `N = N(e)`.
pub fn edge_mass(measure: &TreeMeasure, e: usize) -> BigRational {
    measure.mass(e).clone()
}

/// Heights rescaled so the base sits at height 1; masses are unchanged.
pub fn normalize(tree: &Tree, measure: &TreeMeasure) -> (Tree, TreeMeasure) {
    (tree.normalize(), measure.clone())
}
