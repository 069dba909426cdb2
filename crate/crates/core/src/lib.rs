//! Dynamical trees, tree measures and degenerations of complex polynomials
//! with disconnected Julia sets.

// Negated float comparisons are used on purpose so that NaN fails checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod degeneration;
pub mod gitstab;
pub mod polycore;
pub mod treebuild;
