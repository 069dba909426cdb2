use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::polynomial::Polynomial;
use super::roots::roots_with_multiplicity;
use super::PolyError;

pub const DEFAULT_CAP: usize = 10_000;

/// Orbits leaving the disk of this radius escape to infinity.
///
/// Starts from `1 + max(1, S)` with `S = sum_{i<d} |a_i / a_d|`, then doubles
/// until `|f(z)| >= 2|z|` is guaranteed outside the disk, which the bare
/// coefficient bound does not give when `|a_d|` is small.
pub fn escape_radius(poly: &Polynomial) -> f64 {
    let d = poly.degree();
    let lead = poly.leading().norm();
    let s: f64 = (0..d).map(|i| poly.coeff(i).norm() / lead).sum();
    let mut r = 1.0 + s.max(1.0);
    while lead * r.powi(d as i32 - 2) * (r - s) < 2.0 {
        r *= 2.0;
    }
    r
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Complex64,
    pub multiplicity: usize,
}

/// Roots of `f'` with multiplicities summing to `d - 1`.
pub fn critical_points(poly: &Polynomial) -> Result<Vec<CriticalPoint>, PolyError> {
    let dc = poly.derivative_coeffs();
    Ok(roots_with_multiplicity(&dc, 1e-6)?
        .into_iter()
        .map(|(location, multiplicity)| CriticalPoint {
            location,
            multiplicity,
        })
        .collect())
}

/// Escape-rate evaluator with precomputed constants for one polynomial.
#[derive(Clone, Debug)]
pub struct Escaper {
    poly: Polynomial,
    d: f64,
    radius: f64,
    lead_corr: f64,
    disk_bound: f64,
    cap: usize,
}

impl Escaper {
    pub fn new(poly: &Polynomial) -> Self {
        Self::with_cap(poly, DEFAULT_CAP)
    }

    pub fn with_cap(poly: &Polynomial, cap: usize) -> Self {
        let d = poly.degree();
        let radius = escape_radius(poly);
        let lead_corr = poly.leading().norm().ln() / (d as f64 - 1.0);
        let mut e = Self {
            poly: poly.clone(),
            d: d as f64,
            radius,
            lead_corr,
            disk_bound: f64::INFINITY,
            cap,
        };
        let samples = 512;
        let mut best = 0.0_f64;
        for k in 0..samples {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
            best = best.max(e.rate(Complex64::from_polar(radius, theta), 1e-12));
        }
        e.disk_bound = best * 1.02 + 1e-12;
        e
    }

    pub fn poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Upper bound for G on the closed disk of the escape radius.
    pub fn disk_bound(&self) -> f64 {
        self.disk_bound
    }

    /// `G_f(z)`, or exactly 0 when the orbit stays bounded for `cap` steps.
    pub fn rate(&self, z: Complex64, tol: f64) -> f64 {
        raw_rate(&self.poly, self.d, self.radius, self.lead_corr, z, tol, self.cap)
    }

    /// Decides `G(z) < level`.
    ///
    /// While the orbit stays in the escape disk, `G(z) <= d^-n B` where `B`
    /// bounds G on the disk, which settles most points after a few steps.
    pub fn below(&self, z: Complex64, level: f64) -> bool {
        let mut w = z;
        let mut scale = 1.0;
        for _ in 0..self.cap {
            let r = w.norm();
            if r > self.radius || !r.is_finite() {
                return scale * self.rate(w, 1e-13) < level;
            }
            if scale * self.disk_bound < level {
                return true;
            }
            w = self.poly.eval(w);
            scale /= self.d;
        }
        true
    }
}

fn raw_rate(poly: &Polynomial, d: f64, radius: f64, corr: f64, z: Complex64, tol: f64, cap: usize) -> f64 {
    let mut w = z;
    let mut scale = 1.0;
    for _ in 0..cap {
        let r = w.norm();
        if r > radius {
            return refine(poly, d, corr, w, scale, tol).max(0.0);
        }
        w = poly.eval(w);
        scale /= d;
    }
    0.0
}

/// Continues an escaped orbit until successive Böttcher-corrected
/// estimates `d^-n (log|z_n| + log|a_d|/(d-1))` settle.
fn refine(poly: &Polynomial, d: f64, corr: f64, mut w: Complex64, mut scale: f64, tol: f64) -> f64 {
    let mut prev = scale * (w.norm().ln() + corr);
    for _ in 0..200 {
        if w.norm() > 1e60 {
            return prev;
        }
        let next = poly.eval(w);
        let r = next.norm();
        if !r.is_finite() || r == 0.0 {
            return prev;
        }
        w = next;
        scale /= d;
        let est = scale * (r.ln() + corr);
        let small = (est - prev).abs() < tol * 1e-2;
        prev = est;
        if small {
            return est;
        }
    }
    prev
}

/// `G_f(z)` to within `tol`.
pub fn escape_rate(poly: &Polynomial, z: Complex64, tol: f64) -> f64 {
    let d = poly.degree() as f64;
    let corr = poly.leading().norm().ln() / (d - 1.0);
    raw_rate(poly, d, escape_radius(poly), corr, z, tol, DEFAULT_CAP)
}

/// Per-critical-point escape rates and their maximum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeData {
    pub critical: Vec<(CriticalPoint, f64)>,
    pub max_rate: f64,
    pub radius: f64,
    pub cap: usize,
}

impl EscapeData {
    pub fn compute(poly: &Polynomial) -> Result<Self, PolyError> {
        let crit = critical_points(poly)?;
        let critical: Vec<(CriticalPoint, f64)> = crit
            .into_iter()
            .map(|c| (c, escape_rate(poly, c.location, 1e-13)))
            .collect();
        let max_rate = critical.iter().map(|c| c.1).fold(0.0, f64::max);
        Ok(Self {
            critical,
            max_rate,
            radius: escape_radius(poly),
            cap: DEFAULT_CAP,
        })
    }
}

/// `M(f)`: the largest escape rate of a critical point.
pub fn max_escape_rate(poly: &Polynomial) -> Result<f64, PolyError> {
    Ok(EscapeData::compute(poly)?.max_rate)
}
