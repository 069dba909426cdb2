//! Points `(P(z,w) w^k : b w^D)` of the coefficient compactification.
//!
//! Text form: `P=<coefficient list>;k=<int>;b=<complex>;D=<int>`, where the
//! list holds the coefficients of `P(z,1)` highest degree first.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::iterate::projective_normalize;
use super::parse::{parse_coefficient_list, parse_complex, ParseError};
use super::polynomial::{format_complex, horner, poly_mul};
use super::roots::roots_with_multiplicity;
use super::sphere::SpherePoint;
use super::PolyError;

/// A linear factor `(z - root·w)^multiplicity` of `P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub root: Complex64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    p: Vec<Complex64>,
    k: usize,
    b: Complex64,
    degree: usize,
    factors: Option<Vec<Factor>>,
}

impl BoundaryPoint {
    /// `p` lists the coefficients of `P(z,1)` highest degree first.
    pub fn new(p: Vec<Complex64>, k: usize, b: Complex64, degree: usize) -> Result<Self, PolyError> {
        if p.is_empty() {
            return Err(PolyError::Boundary("P has no coefficients".into()));
        }
        if p[0] == Complex64::new(0.0, 0.0) {
            return Err(PolyError::Boundary("P(1,0) must be nonzero".into()));
        }
        if p.len() - 1 + k != degree {
            return Err(PolyError::Boundary(format!(
                "deg P + k = {} but D = {}",
                p.len() - 1 + k,
                degree
            )));
        }
        if p.iter()
            .chain(std::iter::once(&b))
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(PolyError::NonFinite);
        }
        Ok(Self {
            p,
            k,
            b,
            degree,
            factors: None,
        })
    }

    /// `lead · ∏ (z - r w)^m · w^k : b w^D`, keeping the factorization so
    /// zero multiplicities are exact.
    pub fn from_factors(
        lead: Complex64,
        factors: Vec<Factor>,
        k: usize,
        b: Complex64,
        degree: usize,
    ) -> Result<Self, PolyError> {
        let mut lowest = vec![lead];
        for f in &factors {
            for _ in 0..f.multiplicity {
                lowest = poly_mul(&lowest, &[-f.root, Complex64::new(1.0, 0.0)]);
            }
        }
        let p: Vec<Complex64> = lowest.into_iter().rev().collect();
        let mut bp = Self::new(p, k, b, degree)?;
        bp.factors = Some(factors.into_iter().filter(|f| f.multiplicity > 0).collect());
        Ok(bp)
    }

    /// Reads a point from a projective vector `(c_D : ... : c_0 : b)`.
    /// Leading entries below `zero_tol` relative to the largest are taken
    /// as exact zeros and counted into `k`.
    pub fn from_projective(v: &[Complex64], zero_tol: f64) -> Result<Self, PolyError> {
        if v.len() < 2 {
            return Err(PolyError::Boundary("vector too short".into()));
        }
        let degree = v.len() - 2;
        let big = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if big == 0.0 {
            return Err(PolyError::Boundary("zero vector".into()));
        }
        let cleaned: Vec<Complex64> = v
            .iter()
            .map(|&c| {
                if c.norm() <= zero_tol * big {
                    Complex64::new(0.0, 0.0)
                } else {
                    c
                }
            })
            .collect();
        let coeffs = &cleaned[..=degree];
        let k = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        if k > degree {
            return Err(PolyError::Boundary("all polynomial coefficients vanish".into()));
        }
        Self::new(coeffs[k..].to_vec(), k, cleaned[degree + 1], degree)
    }

    pub fn p_coeffs(&self) -> &[Complex64] {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Ambient degree `D`.
    pub fn ambient_degree(&self) -> usize {
        self.degree
    }

    /// `deg P(z,1)`, equal to `D - k`.
    pub fn affine_degree(&self) -> usize {
        self.p.len() - 1
    }

    pub fn factors(&self) -> Option<&[Factor]> {
        self.factors.as_deref()
    }

    /// Zeros of `P(z,1)` with multiplicities. Exact when a factorization is
    /// attached, otherwise clustered at relative tolerance `rel_tol`.
    pub fn zeros(&self, rel_tol: f64) -> Result<Vec<Factor>, PolyError> {
        if let Some(f) = &self.factors {
            return Ok(f.clone());
        }
        let lowest: Vec<Complex64> = self.p.iter().rev().copied().collect();
        Ok(roots_with_multiplicity(&lowest, rel_tol)?
            .into_iter()
            .map(|(root, multiplicity)| Factor { root, multiplicity })
            .collect())
    }

    /// `(c_D : ... : c_0 : b)` normalized by its largest-modulus entry.
    pub fn projective_vector(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.k];
        v.extend_from_slice(&self.p);
        v.push(self.b);
        projective_normalize(&mut v);
        v
    }

    /// Largest entrywise deviation between the normalized vectors, or
    /// infinity when the ambient degrees differ.
    pub fn deviation(&self, other: &BoundaryPoint) -> f64 {
        if self.degree != other.degree {
            return f64::INFINITY;
        }
        projective_deviation(&self.projective_vector(), &other.projective_vector())
    }

    /// Equality as projective points up to `tol`.
    pub fn approx_eq(&self, other: &BoundaryPoint, tol: f64) -> bool {
        self.deviation(other) <= tol
    }

    /// Scales `(P, b)` by `s`, giving the same projective point.
    pub fn scaled(&self, s: Complex64) -> Result<Self, PolyError> {
        let mut out = Self::new(
            self.p.iter().map(|&c| c * s).collect(),
            self.k,
            self.b * s,
            self.degree,
        )?;
        out.factors = self.factors.clone();
        Ok(out)
    }
}

/// Distance between two projective vectors after matching phase and scale
/// at the largest entry of `a`.
pub fn projective_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    projective_normalize(&mut a);
    let i = a
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|x| x.0)
        .unwrap_or(0);
    if b[i].norm() == 0.0 {
        return f64::INFINITY;
    }
    let s = a[i] / b[i];
    for x in b.iter_mut() {
        *x *= s;
    }
    a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// The induced map `Ĉ → Ĉ`: `P(z,1)/b`, or constantly infinity when `b = 0`.
pub fn eval_boundary(bp: &BoundaryPoint, z: SpherePoint) -> SpherePoint {
    if bp.b == Complex64::new(0.0, 0.0) {
        return SpherePoint::Infinity;
    }
    match z {
        SpherePoint::Infinity => SpherePoint::Infinity,
        SpherePoint::Finite(z) => {
            let lowest: Vec<Complex64> = bp.p.iter().rev().copied().collect();
            SpherePoint::from_complex(horner(&lowest, z) / bp.b)
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.p.iter().map(|&c| format_complex(c)).collect();
        write!(
            f,
            "P={};k={};b={};D={}",
            p.join(","),
            self.k,
            format_complex(self.b),
            self.degree
        )
    }
}

impl FromStr for BoundaryPoint {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let keys = ["P=", "k=", "b=", "D="];
        let mut fields: Vec<(usize, &str)> = Vec::new();
        let mut offset = 0;
        for (i, part) in s.split(';').enumerate() {
            let key = keys
                .get(i)
                .ok_or_else(|| PolyError::Parse(ParseError::new(offset - 1, "too many fields")))?;
            let trimmed = part.trim_start();
            let lead_ws = part.len() - trimmed.len();
            if !trimmed.starts_with(key) {
                return Err(PolyError::Parse(ParseError::new(
                    offset + lead_ws,
                    format!("expected '{key}'"),
                )));
            }
            fields.push((offset + lead_ws + 2, &trimmed[2..]));
            offset += part.len() + 1;
        }
        if fields.len() != 4 {
            return Err(PolyError::Parse(ParseError::new(
                s.len(),
                "expected P=..;k=..;b=..;D=..",
            )));
        }
        let p = parse_coefficient_list(fields[0].1).map_err(|e| PolyError::Parse(e.shifted(fields[0].0)))?;
        let k = parse_uint(fields[1])?;
        let b = parse_complex(fields[2].1).map_err(|e| PolyError::Parse(e.shifted(fields[2].0)))?;
        let degree = parse_uint(fields[3])?;
        Self::new(p, k, b, degree)
    }
}

fn parse_uint((pos, text): (usize, &str)) -> Result<usize, PolyError> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| PolyError::Parse(ParseError::new(pos, "expected a nonnegative integer")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grammar_round_trip() {
        let bp: BoundaryPoint = "P=1,0,-1;k=0;b=0;D=2".parse().unwrap();
        assert_eq!(bp.affine_degree(), 2);
        assert_eq!(bp.to_string(), "P=1,0,-1;k=0;b=0;D=2");
        let bp2: BoundaryPoint = "P=1,0,0;k=1;b=1;D=3".parse().unwrap();
        assert_eq!(bp2.to_string(), "P=1,0,0;k=1;b=1;D=3");
    }

    #[test]
    fn grammar_errors() {
        assert!("P=1,0,-1;k=1;b=0;D=2".parse::<BoundaryPoint>().is_err());
        assert!("P=0,1;k=1;b=0;D=2".parse::<BoundaryPoint>().is_err());
        match "P=1,0,-1;x=0;b=0;D=2".parse::<BoundaryPoint>() {
            Err(PolyError::Parse(e)) => assert_eq!(e.position, 9),
            other => panic!("{other:?}"),
        }
        match "P=1,q;k=0;b=0;D=1".parse::<BoundaryPoint>() {
            Err(PolyError::Parse(e)) => assert_eq!(e.position, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn evaluation() {
        let bp: BoundaryPoint = "P=1,0,0;k=1;b=1;D=3".parse().unwrap();
        assert_eq!(
            eval_boundary(&bp, SpherePoint::finite(2.0, 0.0)),
            SpherePoint::finite(4.0, 0.0)
        );
        assert_eq!(eval_boundary(&bp, SpherePoint::Infinity), SpherePoint::Infinity);
        let flat: BoundaryPoint = "P=1,0,-1;k=0;b=0;D=2".parse().unwrap();
        assert_eq!(
            eval_boundary(&flat, SpherePoint::finite(0.3, 0.0)),
            SpherePoint::Infinity
        );
    }

    #[test]
    fn projective_equality_and_factors() {
        let a = BoundaryPoint::from_factors(
            c(1.0, 0.0),
            vec![
                Factor {
                    root: c(1.0, 0.0),
                    multiplicity: 1,
                },
                Factor {
                    root: c(-1.0, 0.0),
                    multiplicity: 1,
                },
            ],
            0,
            c(0.0, 0.0),
            2,
        )
        .unwrap();
        let b: BoundaryPoint = "P=1,0,-1;k=0;b=0;D=2".parse().unwrap();
        assert!(a.approx_eq(&b, 1e-14));
        assert!(a.approx_eq(&b.scaled(c(0.0, 3.0)).unwrap(), 1e-14));
        let v = [c(0.0, 0.0), c(1e-18, 0.0), c(1.0, 0.0), c(0.5, 0.0)];
        let p = BoundaryPoint::from_projective(&v, 1e-12).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.ambient_degree(), 2);
    }
}
