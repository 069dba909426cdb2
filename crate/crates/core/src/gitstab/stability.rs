use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::polycore::{cluster_roots, polynomial_roots, BoundaryPoint, Factor};

use super::GitError;

/// Relative tolerance for reading zero multiplicities.
pub const MULTIPLICITY_TOL: f64 = 1e-6;
/// Coarser tolerance used to detect clustering ambiguity.
const COARSE_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StabilityTag {
    Unstable,
    StrictlySemistable,
    Stable,
}

impl std::fmt::Display for StabilityTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StabilityTag::Stable => "Stable",
            StabilityTag::StrictlySemistable => "StrictlySemistable",
            StabilityTag::Unstable => "Unstable",
        })
    }
}

/// One inequality instance of the criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// `degree` for `deg P(z,1)`, `multiplicity` for a zero of `P(z,1)`.
    pub quantity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero: Option<[f64; 2]>,
    pub value: usize,
    /// Stable bound, e.g. `> 1` or `< 2`.
    pub stable_bound: String,
    pub stable_holds: bool,
    pub semistable_bound: String,
    pub semistable_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub tag: StabilityTag,
    pub witnesses: Vec<Witness>,
    /// Verdict under coarser root clustering, when it differs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternative: Option<StabilityTag>,
}

impl StabilityVerdict {
    pub fn is_semistable(&self) -> bool {
        self.tag != StabilityTag::Unstable
    }

    /// The weaker of the two readings.
    pub fn conservative(&self) -> StabilityTag {
        self.alternative.map_or(self.tag, |a| a.min(self.tag))
    }
}

/// Zeros of `P(z,1)` with multiplicities: the fine reading merges nearby
/// roots only when derivatives confirm a multiple root, the coarse reading
/// is plain single-linkage clustering.
fn zeros_at(bp: &BoundaryPoint, coarse: bool) -> Result<Vec<Factor>, GitError> {
    if bp.affine_degree() == 0 {
        return Ok(Vec::new());
    }
    if !coarse || bp.factors().is_some() {
        return Ok(bp.zeros(MULTIPLICITY_TOL)?);
    }
    let lowest: Vec<Complex64> = bp.p_coeffs().iter().rev().copied().collect();
    let roots = polynomial_roots(&lowest)?;
    Ok(cluster_roots(&roots, COARSE_TOL)
        .into_iter()
        .map(|(root, multiplicity)| Factor { root, multiplicity })
        .collect())
}

fn multiset(f: &[Factor]) -> Vec<usize> {
    let mut m: Vec<usize> = f.iter().map(|x| x.multiplicity).collect();
    m.sort_unstable();
    m
}

fn verdict(deg: usize, b_zero: bool, zeros: &[Factor], d: usize) -> (StabilityTag, Vec<Witness>) {
    let even = d.is_multiple_of(2);
    // Even D: stable = semistable, deg > D/2 and mult <= D/2.
    // Odd D, h = (D+1)/2: stable deg > h, mult < h; semistable deg >= h, mult <= h.
    let (deg_s, deg_ss, deg_sb, deg_ssb) = if even {
        let h = d / 2;
        (deg > h, deg > h, format!("> {h}"), format!("> {h}"))
    } else {
        let h = d.div_ceil(2);
        (deg > h, deg >= h, format!("> {h}"), format!(">= {h}"))
    };
    let mut witnesses = vec![Witness {
        quantity: "degree".into(),
        zero: None,
        value: deg,
        stable_bound: deg_sb,
        stable_holds: deg_s,
        semistable_bound: deg_ssb,
        semistable_holds: deg_ss,
    }];
    let (mut stable, mut semi) = (deg_s, deg_ss);
    if b_zero {
        for z in zeros {
            let m = z.multiplicity;
            let (s, ss, sb, ssb) = if even {
                let h = d / 2;
                (m <= h, m <= h, format!("<= {h}"), format!("<= {h}"))
            } else {
                let h = d.div_ceil(2);
                (m < h, m <= h, format!("< {h}"), format!("<= {h}"))
            };
            stable &= s;
            semi &= ss;
            witnesses.push(Witness {
                quantity: "multiplicity".into(),
                zero: Some([z.root.re, z.root.im]),
                value: m,
                stable_bound: sb,
                stable_holds: s,
                semistable_bound: ssb,
                semistable_holds: ss,
            });
        }
    }
    let tag = if stable {
        StabilityTag::Stable
    } else if semi {
        StabilityTag::StrictlySemistable
    } else {
        StabilityTag::Unstable
    };
    (tag, witnesses)
}

/// Stability of `(P(z,w) w^k : b w^D)` in ambient degree `D`.
pub fn stability(bp: &BoundaryPoint, d: usize) -> Result<StabilityVerdict, GitError> {
    if bp.ambient_degree() != d {
        return Err(GitError::InvalidArgument(format!(
            "boundary point has ambient degree {} but D = {d}",
            bp.ambient_degree()
        )));
    }
    if d == 0 {
        return Err(GitError::InvalidArgument("D must be positive".into()));
    }
    let b_zero = bp.b() == Complex64::new(0.0, 0.0);
    let fine = zeros_at(bp, false)?;
    let (tag, witnesses) = verdict(bp.affine_degree(), b_zero, &fine, d);
    let alternative = if bp.factors().is_none() && b_zero {
        let coarse = zeros_at(bp, true)?;
        if multiset(&coarse) != multiset(&fine) {
            let (alt, _) = verdict(bp.affine_degree(), b_zero, &coarse, d);
            (alt != tag).then_some(alt)
        } else {
            None
        }
    } else {
        None
    };
    Ok(StabilityVerdict {
        tag,
        witnesses,
        alternative,
    })
}
