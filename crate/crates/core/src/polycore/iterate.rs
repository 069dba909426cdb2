use num_complex::Complex64;

use super::polynomial::{poly_mul, Polynomial};
use super::roots::polynomial_roots;
use super::PolyError;

/// Default cap on `d^n` for roots and coefficients of iterates.
pub const DEFAULT_SIZE_CAP: usize = 4096;

/// Solutions of `f(z) = y` with multiplicity.
pub fn preimages(poly: &Polynomial, y: Complex64) -> Result<Vec<Complex64>, PolyError> {
    let mut c = poly.coeffs_lowest_first().to_vec();
    c[0] -= y;
    polynomial_roots(&c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateRoots {
    pub roots: Vec<Complex64>,
    /// `|f^n(root)|` for each root.
    pub residuals: Vec<f64>,
}

impl IterateRoots {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Roots of `f^n`, with multiplicity, found by pulling back the roots of
/// `f^{n-1}` one step at a time.
pub fn roots_of_iterate(poly: &Polynomial, n: usize) -> Result<IterateRoots, PolyError> {
    roots_of_iterate_capped(poly, n, DEFAULT_SIZE_CAP)
}

pub fn roots_of_iterate_capped(poly: &Polynomial, n: usize, cap: usize) -> Result<IterateRoots, PolyError> {
    let size = checked_size(poly.degree(), n, cap)?;
    let mut level = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(level.len() * poly.degree());
        for &y in &level {
            next.extend(preimages(poly, y)?);
        }
        level = next;
    }
    debug_assert_eq!(level.len(), size);
    let residuals = level.iter().map(|&z| poly.iterate(z, n).norm()).collect();
    Ok(IterateRoots {
        roots: level,
        residuals,
    })
}

fn checked_size(d: usize, n: usize, cap: usize) -> Result<usize, PolyError> {
    let mut size: usize = 1;
    for _ in 0..n {
        size = size.saturating_mul(d);
        if size > cap {
            return Err(PolyError::CapExceeded { size, cap });
        }
    }
    Ok(size)
}

/// Divides by the entry of largest modulus.
pub fn projective_normalize(v: &mut [Complex64]) {
    // First entry of maximal modulus, so ties resolve toward high degree.
    let big = v.iter().copied().fold(
        Complex64::new(0.0, 0.0),
        |m, x| if x.norm() > m.norm() { x } else { m },
    );
    if big.norm() > 0.0 {
        for x in v.iter_mut() {
            *x /= big;
        }
    }
}

/// Point `(a_D : ... : a_0 : 1)` of the coefficient space for `f^n`,
/// highest degree first, normalized by its largest-modulus entry.
pub fn iterate_coefficients(poly: &Polynomial, n: usize) -> Result<Vec<Complex64>, PolyError> {
    iterate_coefficients_capped(poly, n, DEFAULT_SIZE_CAP)
}

pub fn iterate_coefficients_capped(
    poly: &Polynomial,
    n: usize,
    cap: usize,
) -> Result<Vec<Complex64>, PolyError> {
    checked_size(poly.degree(), n, cap)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    // g = identity, then g <- f(g) n times via Horner on polynomials.
    let mut g = vec![zero, one];
    for _ in 0..n {
        let mut acc = vec![poly.leading()];
        for i in (0..poly.degree()).rev() {
            acc = poly_mul(&acc, &g);
            acc[0] += poly.coeff(i);
        }
        g = acc;
    }
    let mut out: Vec<Complex64> = g.into_iter().rev().collect();
    out.push(one);
    projective_normalize(&mut out);
    Ok(out)
}
