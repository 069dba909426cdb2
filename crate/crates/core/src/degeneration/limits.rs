//! Projective limits of iterates in the coefficient compactification and
//! the lower bound on the `w`-power of such limits.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::polycore::{
    iterate_coefficients, projective_deviation, projective_normalize, BoundaryPoint, Factor, SpherePoint,
};
use crate::treebuild::{format_rational, Tree, TreeMeasure, TreePoint};

use super::family::FamilySpec;
use super::limit::{analyze_family, limit_measure_of, FamilyAnalysis, LimitMeasure, MemberTree};
use super::regime::RegimeCase;
use super::{DegenError, DEFAULT_DEPTH};

/// Largest normalized deviation allowed between the product form and the
/// extrapolated coefficient limit.
pub const EXTRAPOLATION_TOL: f64 = 1e-3;
/// Entries below this fraction of the largest are read as zero in a limit.
const ZERO_TOL: f64 = 1e-6;

/// Componentwise Aitken extrapolation of the normalized coefficient vectors
/// of `f_t^m` at the last three schedule points.
pub fn extrapolate_coefficients(spec: &FamilySpec, m: usize) -> Result<Vec<Complex64>, DegenError> {
    let members = spec.members()?;
    extrapolate_members(&members, m)
}

pub(crate) fn extrapolate_members(
    members: &[(f64, crate::polycore::Polynomial)],
    m: usize,
) -> Result<Vec<Complex64>, DegenError> {
    if members.len() < 3 {
        return Err(DegenError::InvalidSpec(
            "at least three schedule points are needed".into(),
        ));
    }
    let tail = &members[members.len() - 3..];
    let vs = tail
        .iter()
        .map(|(_, f)| iterate_coefficients(f, m))
        .collect::<Result<Vec<_>, _>>()?;
    // Normalize all three by the dominant entry of the last one.
    let idx = vs[2]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .map(|x| x.0)
        .expect("nonempty");
    let scaled: Vec<Vec<Complex64>> = vs
        .iter()
        .map(|v| v.iter().map(|&c| c / v[idx]).collect())
        .collect();
    let mut out: Vec<Complex64> = (0..scaled[2].len())
        .map(|i| {
            let (x1, x2, x3) = (scaled[0][i], scaled[1][i], scaled[2][i]);
            let denom = x3 - 2.0 * x2 + x1;
            let size = x1.norm() + x2.norm() + x3.norm();
            if denom.norm() <= 1e-12 * size || !denom.norm().is_finite() {
                x3
            } else {
                let a = x3 - (x3 - x2) * (x3 - x2) / denom;
                if a.re.is_finite() && a.im.is_finite() {
                    a
                } else {
                    x3
                }
            }
        })
        .collect();
    projective_normalize(&mut out);
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LimitIterate {
    pub m: usize,
    pub point: BoundaryPoint,
    /// How `point` was obtained: `product`, `coefficients` or `escaping`.
    pub source: &'static str,
    pub extrapolated: Vec<Complex64>,
    /// Deviation between `point` and `extrapolated`.
    pub deviation: f64,
}

pub fn limit_iterate(spec: &FamilySpec, m: usize) -> Result<LimitIterate, DegenError> {
    let a = analyze_family(spec, DEFAULT_DEPTH)?;
    let lm = limit_measure_of(&a)?;
    limit_iterate_of(&a, &lm, m)
}

fn power(d: usize, m: usize) -> usize {
    d.pow(m as u32)
}

/// Multiplicity `mass · d^m` if it is an integer.
fn multiplicity(mass: &BigRational, dm: usize) -> Option<usize> {
    let x = mass * BigRational::from_integer(BigInt::from(dm));
    x.is_integer().then(|| x.to_integer().try_into().ok()).flatten()
}

/// `∏_C (b_C z - a_C w)^{m(C) d^m} : 0`, with infinite atoms giving powers of `w`.
fn product_form(lm: &LimitMeasure, m: usize) -> Option<Result<BoundaryPoint, DegenError>> {
    let dm = power(lm.degree, m);
    let mut factors = Vec::new();
    let mut k = 0;
    for a in &lm.atoms {
        let mult = multiplicity(&a.mass, dm)?;
        match a.location {
            SpherePoint::Infinity => k += mult,
            SpherePoint::Finite(z) => factors.push(Factor {
                root: z,
                multiplicity: mult,
            }),
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    Some(BoundaryPoint::from_factors(Complex64::new(1.0, 0.0), factors, k, zero, dm).map_err(Into::into))
}

pub fn limit_iterate_of(a: &FamilyAnalysis, lm: &LimitMeasure, m: usize) -> Result<LimitIterate, DegenError> {
    let extrapolated = extrapolate_members(&a.members, m)?;
    let dm = power(a.degree, m);
    let (point, source) = match lm.case {
        RegimeCase::EscapingBasepoint => {
            let zero = Complex64::new(0.0, 0.0);
            let one = Complex64::new(1.0, 0.0);
            let bp = match lm.atoms[0].location {
                SpherePoint::Infinity => BoundaryPoint::new(vec![one], dm, zero, dm)?,
                SpherePoint::Finite(z) => BoundaryPoint::from_factors(
                    one,
                    vec![Factor {
                        root: z,
                        multiplicity: dm,
                    }],
                    0,
                    zero,
                    dm,
                )?,
            };
            (bp, "escaping")
        }
        RegimeCase::InteriorBasepoint if lm.limit_height.is_some_and(|h| h > 1.0 / dm as f64) => {
            match product_form(lm, m) {
                Some(bp) => (bp?, "product"),
                None => (
                    BoundaryPoint::from_projective(&extrapolated, ZERO_TOL)?,
                    "coefficients",
                ),
            }
        }
        _ => (
            BoundaryPoint::from_projective(&extrapolated, ZERO_TOL)?,
            "coefficients",
        ),
    };
    let deviation = projective_deviation(&point.projective_vector(), &extrapolated);
    if source != "escaping" && !(deviation <= EXTRAPOLATION_TOL) {
        return Err(DegenError::ExtrapolationMismatch { deviation });
    }
    Ok(LimitIterate {
        m,
        point,
        source,
        extrapolated,
        deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBoundReport {
    pub n: usize,
    pub degree: usize,
    /// Power of `w` dividing the polynomial part of the limit of `f^N`.
    pub k: usize,
    /// `m_T(C_N)` as `num/denom`.
    pub mass: String,
    /// `m_T(C_N) · d^N`.
    pub bound: String,
    pub pass: bool,
}

/// `k >= mass · d^N`.
pub fn kbound_check(k: usize, mass: &BigRational, d: usize, n: usize) -> bool {
    let bound = mass * BigRational::from_integer(BigInt::from(d).pow(n as u32));
    BigRational::from_integer(BigInt::from(k)) >= bound
}

/// Mass of the component `C_N` of `T \ B(p, 1/d^N)` containing the top of
/// the tree (heights normalized by `M`).
pub fn unbounded_mass(
    tree: &Tree,
    measure: &TreeMeasure,
    p: &TreePoint,
    n: usize,
) -> Result<BigRational, DegenError> {
    let one = BigRational::one();
    let h = p.raw_height(tree) / tree.max_rate;
    let dn = power(tree.degree, n) as f64;
    let mass_above = |e: usize| -> BigRational { &one - measure.mass(e) };
    if h < 1.0 / dn {
        let band = tree.base_level + n - 1;
        let e = match *p {
            TreePoint::OnEdge { edge, .. }
            | TreePoint::Deep { above: edge, .. }
            | TreePoint::Julia { above: edge } => edge,
            TreePoint::Vertex(v) => tree.vertices[v]
                .parent_edge
                .ok_or_else(|| DegenError::LimitUnresolved("basepoint vertex has no parent edge".into()))?,
            TreePoint::Ray { .. } => unreachable!("ray points are above the base"),
        };
        let anc = tree
            .ancestor(e, band)
            .ok_or_else(|| DegenError::LimitUnresolved(format!("tree too shallow for N = {n}")))?;
        return Ok(mass_above(anc));
    }
    Ok(match *p {
        TreePoint::Vertex(v) => match tree.vertices[v].parent_edge {
            Some(e) => mass_above(e),
            None => BigRational::zero(),
        },
        TreePoint::OnEdge { edge, .. } => mass_above(edge),
        TreePoint::Deep { above, .. } | TreePoint::Julia { above } => mass_above(above),
        TreePoint::Ray { .. } => BigRational::zero(),
    })
}

/// Compares the `w`-power of the coefficient limit of `f_t^N` with
/// `m_T(C_N) d^N` read from the tree of the last schedule member.
pub fn verify_kbound(spec: &FamilySpec, n: usize) -> Result<KBoundReport, DegenError> {
    if n == 0 {
        return Err(DegenError::InvalidSpec("N must be at least 1".into()));
    }
    let members = spec.members()?;
    let limit = extrapolate_members(&members, n)?;
    let bp = BoundaryPoint::from_projective(&limit, ZERO_TOL)
        .map_err(|e| DegenError::LimitUnresolved(e.to_string()))?;
    let (t, f) = members.last().expect("nonempty").clone();
    let mt = MemberTree::build(t, f, n.max(DEFAULT_DEPTH))?;
    verify_kbound_of(&mt, bp.k(), n)
}

pub fn verify_kbound_of(mt: &MemberTree, k: usize, n: usize) -> Result<KBoundReport, DegenError> {
    let tree = mt.tree();
    let mass = unbounded_mass(tree, &mt.measure, &mt.pointed.point, n)?;
    let d = tree.degree;
    let bound = &mass * BigRational::from_integer(BigInt::from(d).pow(n as u32));
    Ok(KBoundReport {
        n,
        degree: d,
        k,
        mass: format_rational(&mass),
        bound: format_rational(&bound),
        pass: kbound_check(k, &mass, d, n),
    })
}
