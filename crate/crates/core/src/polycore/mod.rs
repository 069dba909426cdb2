//! Polynomials, escape rates, roots of iterates, boundary points and
//! spherical geometry.

mod boundary;
mod escape;
mod iterate;
mod normal;
mod parse;
mod polynomial;
mod roots;
mod sphere;

pub use boundary::{eval_boundary, projective_deviation, BoundaryPoint, Factor};
pub use escape::{
    critical_points, escape_radius, escape_rate, max_escape_rate, CriticalPoint, EscapeData, Escaper,
    DEFAULT_CAP,
};
pub use iterate::{
    iterate_coefficients, iterate_coefficients_capped, preimages, projective_normalize, roots_of_iterate,
    roots_of_iterate_capped, IterateRoots, DEFAULT_SIZE_CAP,
};
pub use normal::{monic_center, rescale_representative};
pub use parse::{parse_coefficient_list, parse_complex, ParseError};
pub use polynomial::{format_complex, horner, poly_mul, taylor_shift, Polynomial};
pub use roots::{backward_error, cluster_roots, polynomial_roots, roots_with_multiplicity};
pub use sphere::{chordal_distance, SpherePoint};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial degree {0} is below 2")]
    DegreeTooLow(usize),
    #[error("leading coefficient is zero")]
    LeadingZero,
    #[error("coefficient is not finite")]
    NonFinite,
    #[error("scale factor must be a nonzero finite complex number")]
    ZeroScale,
    #[error("parse error {0}")]
    Parse(ParseError),
    #[error("root finder did not converge (worst backward error {max_residual:e})")]
    RootsNotConverged { max_residual: f64 },
    #[error("size {size} exceeds cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("invalid boundary point: {0}")]
    Boundary(String),
}
