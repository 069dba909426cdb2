use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::parse::{parse_coefficient_list, ParseError};
use super::PolyError;

/// A complex polynomial of degree at least 2.
///
/// Coefficients are stored lowest degree first, so `coeffs[i]` multiplies
/// `z^i`. The text form lists them highest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// Builds a polynomial from coefficients listed highest degree first.
    pub fn from_highest_first(coeffs: &[Complex64]) -> Result<Self, PolyError> {
        let mut lowest: Vec<Complex64> = coeffs.to_vec();
        lowest.reverse();
        Self::from_lowest_first(lowest)
    }

    pub fn from_lowest_first(coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        if coeffs.len() < 3 {
            return Err(PolyError::DegreeTooLow(coeffs.len().saturating_sub(1)));
        }
        let lead = *coeffs.last().expect("nonempty");
        if lead == Complex64::new(0.0, 0.0) {
            return Err(PolyError::LeadingZero);
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(Self { coeffs })
    }

    /// Convenience constructor from real coefficients, highest degree first.
    pub fn from_real(coeffs: &[f64]) -> Result<Self, PolyError> {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_highest_first(&c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `z^i`.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn coeffs_lowest_first(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_highest_first(&self) -> Vec<Complex64> {
        self.coeffs.iter().rev().copied().collect()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.coeffs, z)
    }

    /// Value and first derivative in one pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Coefficients of f', lowest degree first.
    pub fn derivative_coeffs(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect()
    }

    /// The n-th iterate evaluated at `z`.
    pub fn iterate(&self, z: Complex64, n: usize) -> Complex64 {
        (0..n).fold(z, |w, _| self.eval(w))
    }

    /// `λ·f(z/λ)`, an affine conjugate of `f`.
    pub fn rescale(&self, lambda: Complex64) -> Result<Self, PolyError> {
        if lambda == Complex64::new(0.0, 0.0) || !lambda.norm().is_finite() {
            return Err(PolyError::ZeroScale);
        }
        let inv = lambda.inv();
        let mut pow = lambda;
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * pow);
            pow *= inv;
        }
        Self::from_lowest_first(out)
    }

    /// `f(z - s) + s`, the conjugate of `f` by the translation `z ↦ z + s`.
    pub fn translate(&self, s: Complex64) -> Self {
        let mut shifted = taylor_shift(&self.coeffs, -s);
        shifted[0] += s;
        Self { coeffs: shifted }
    }
}

/// Horner evaluation of a lowest-first coefficient slice.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Coefficients of `p(z + s)` for `p` given lowest first.
pub fn taylor_shift(coeffs: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut out = coeffs.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = out[j + 1];
            out[j] += s * next;
        }
    }
    out
}

/// Product of two lowest-first coefficient vectors.
pub fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Formats a complex number in the shared literal grammar (`a`, `bi`, `a+bi`).
pub fn format_complex(c: Complex64) -> String {
    let re = clean_zero(c.re);
    let im = clean_zero(c.im);
    if im == 0.0 {
        format!("{re}")
    } else if re == 0.0 {
        format!("{im}i")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().rev().map(|&c| format_complex(c)).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Polynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let coeffs = parse_coefficient_list(s).map_err(PolyError::Parse)?;
        if coeffs.first().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(PolyError::LeadingZero);
        }
        Self::from_highest_first(&coeffs)
    }
}

impl From<ParseError> for PolyError {
    fn from(e: ParseError) -> Self {
        PolyError::Parse(e)
    }
}
