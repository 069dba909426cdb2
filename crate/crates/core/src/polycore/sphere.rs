use num_complex::Complex64;

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn finite(re: f64, im: f64) -> Self {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SpherePoint::Infinity)
    }

    /// Maps non-finite values to infinity.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            SpherePoint::Finite(z)
        } else {
            SpherePoint::Infinity
        }
    }
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::from_complex(z)
    }
}

/// Chordal distance `2|z-w| / sqrt((1+|z|^2)(1+|w|^2))`, with values in [0, 2].
pub fn chordal_distance(p: SpherePoint, q: SpherePoint) -> f64 {
    match (p, q) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity) | (SpherePoint::Infinity, SpherePoint::Finite(z)) => {
            2.0 / (1.0 + z.norm_sqr()).sqrt()
        }
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            // Scale by the larger modulus so huge inputs do not overflow.
            let s = z.norm().max(w.norm()).max(1.0);
            let (zs, ws) = (z / s, w / s);
            let inv = 1.0 / (s * s);
            let num = 2.0 * (zs - ws).norm();
            let den = ((inv + zs.norm_sqr()) * (inv + ws.norm_sqr())).sqrt();
            (num / den / s).min(2.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_distances() {
        let zero = SpherePoint::finite(0.0, 0.0);
        let one = SpherePoint::finite(1.0, 0.0);
        assert!((chordal_distance(zero, SpherePoint::Infinity) - 2.0).abs() < 1e-15);
        assert!((chordal_distance(zero, one) - 2f64.sqrt()).abs() < 1e-15);
        assert!((chordal_distance(one, SpherePoint::Infinity) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(chordal_distance(one, one), 0.0);
    }

    #[test]
    fn huge_values_approach_infinity() {
        let big = SpherePoint::finite(1e200, 0.0);
        assert!(chordal_distance(big, SpherePoint::Infinity) < 1e-150);
        let d = chordal_distance(big, SpherePoint::finite(-1e200, 0.0));
        assert!(d.is_finite() && d < 1e-150);
    }
}
