//! GIT stability of boundary points, the bound `N(d)` and the
//! finite-determination check for limits of iterates.

mod stability;
mod theorem;

use num_bigint::BigInt;
use thiserror::Error;

use crate::degeneration::DegenError;
use crate::polycore::PolyError;

pub use stability::{stability, StabilityTag, StabilityVerdict, Witness, MULTIPLICITY_TOL};
pub use theorem::{
    report_to_json, verify_finite_determination, IterateCheck, Rescale, Step, TheoremTwoReport, ThmOptions,
};

#[derive(Debug, Error)]
pub enum GitError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Degen(#[from] DegenError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `((d-1)/d)^{n-1} < 1/2`, decided in integers.
pub fn nd_inequality(d: usize, n: usize) -> bool {
    if n == 0 || d < 2 {
        return false;
    }
    let e = (n - 1) as u32;
    BigInt::from(2) * BigInt::from(d - 1).pow(e) < BigInt::from(d).pow(e)
}

/// Least `N` with `((d-1)/d)^{N-1} < 1/2`.
pub fn nd_bound(d: usize) -> Result<usize, GitError> {
    if d < 2 {
        return Err(GitError::InvalidArgument(format!("degree {d} is below 2")));
    }
    Ok((1..)
        .find(|&n| nd_inequality(d, n))
        .expect("the ratio tends to 0"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degrees() {
        let got: Vec<usize> = (2..=5).map(|d| nd_bound(d).unwrap()).collect();
        assert_eq!(got, vec![3, 3, 4, 5]);
        assert!(nd_bound(1).is_err());
    }

    #[test]
    fn minimal_up_to_64() {
        for d in 2..=64 {
            let n = nd_bound(d).unwrap();
            assert!(nd_inequality(d, n));
            assert!(!nd_inequality(d, n - 1));
        }
    }
}
