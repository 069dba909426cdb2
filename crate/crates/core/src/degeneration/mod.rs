//! Divergent one-parameter families: regime classification, truncation
//! isomorphisms, limits of maximal measures, zero counts and projective
//! limits of iterates.

mod expr;
mod family;
mod iso;
mod limit;
mod limits;
mod regime;
mod sweep;
mod zeros;

use thiserror::Error;

use crate::polycore::{ParseError, PolyError};
use crate::treebuild::TreeError;

pub use expr::{Expr, Func};
pub use family::{sample_family, FamilySpec, Schedule};
pub use iso::{truncation_isomorphic, truncation_isomorphic_pointed, TreeIsomorphism};
pub use limit::{
    analyze_family, analyze_members, cluster_atoms, limit_measure, limit_measure_of, measure_from_json,
    measure_to_json, Atom, FamilyAnalysis, LimitMeasure, MemberTree, ATOM_CLUSTER, INFINITY_SNAP,
};
pub use limits::{
    extrapolate_coefficients, kbound_check, limit_iterate, limit_iterate_of, unbounded_mass, verify_kbound,
    verify_kbound_of, KBoundReport, LimitIterate, EXTRAPOLATION_TOL,
};
pub use regime::{classify_regime, MemberSample, RegimeCase, RegimeClassification};
pub use sweep::{sweep_family, SweepRow};
pub use zeros::{count_zeros_in_component, zero_counts_at, ComponentZeros, ZeroCount};

/// Default truncation depth for family analysis.
pub const DEFAULT_DEPTH: usize = 4;

#[derive(Debug, Error)]
pub enum DegenError {
    #[error("malformed {what}: {error}")]
    Parse { what: &'static str, error: ParseError },
    #[error("invalid family: {0}")]
    InvalidSpec(String),
    #[error("degree drops at t = {t:e}")]
    DegreeDrop { t: f64 },
    #[error("family does not diverge: {0}")]
    NotDivergent(String),
    #[error("trees did not stabilize: {0}")]
    NonStabilizedTree(String),
    #[error("product form and coefficient limit differ by {deviation:e}")]
    ExtrapolationMismatch { deviation: f64 },
    #[error("limit not resolved: {0}")]
    LimitUnresolved(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}
