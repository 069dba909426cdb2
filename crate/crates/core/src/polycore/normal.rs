use std::f64::consts::PI;

use num_complex::Complex64;

use super::polynomial::Polynomial;
use super::PolyError;

/// `λ·f(z/λ)`.
pub fn rescale_representative(poly: &Polynomial, lambda: Complex64) -> Result<Polynomial, PolyError> {
    poly.rescale(lambda)
}

/// Affinely conjugate monic centered form.
///
/// Of the `d - 1` monic centered conjugates, the one whose non-leading
/// coefficient arguments (taken in `[0, 2π)`, highest degree first) are
/// lexicographically smallest is returned. When the first nonzero one can
/// be rotated into `[0, 2π/(d-1))` this choice does so.
pub fn monic_center(poly: &Polynomial) -> Polynomial {
    let d = poly.degree();
    let s = poly.coeff(d - 1) / (poly.leading() * d as f64);
    let centred = poly.translate(s);
    let lead = centred.leading();
    let root = lead.powf(1.0 / (d as f64 - 1.0));
    let mut best: Option<(Vec<f64>, Polynomial)> = None;
    for k in 0..d - 1 {
        let omega = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / (d as f64 - 1.0));
        let alpha = root * omega;
        let Ok(mut cand) = centred.rescale(alpha) else {
            continue;
        };
        cand = clean(cand);
        let key = arg_key(&cand);
        let better = match &best {
            None => true,
            Some((bk, _)) => lex_less(&key, bk),
        };
        if better {
            best = Some((key, cand));
        }
    }
    best.map(|b| b.1).unwrap_or(centred)
}

/// Forces the leading coefficient to exactly 1 and the next to exactly 0.
fn clean(p: Polynomial) -> Polynomial {
    let d = p.degree();
    let mut c = p.coeffs_lowest_first().to_vec();
    c[d] = Complex64::new(1.0, 0.0);
    c[d - 1] = Complex64::new(0.0, 0.0);
    for x in c.iter_mut() {
        if x.im.abs() < 1e-14 * (1.0 + x.re.abs()) {
            x.im = 0.0;
        }
    }
    Polynomial::from_lowest_first(c).expect("monic")
}

fn arg_key(p: &Polynomial) -> Vec<f64> {
    let d = p.degree();
    (0..d - 1)
        .rev()
        .map(|i| {
            let c = p.coeff(i);
            if c.norm() < 1e-300 {
                return 0.0;
            }
            let mut a = c.arg();
            if a < 0.0 {
                a += 2.0 * PI;
            }
            if 2.0 * PI - a < 1e-9 {
                a = 0.0;
            }
            a
        })
        .collect()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-9 {
            return x < y;
        }
    }
    false
}
