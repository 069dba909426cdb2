//! Finite determination of limits of iterates, checked step by step on a
//! sampled family.
//!
//! Steps:
//! 1. fix `N = N(d)`;
//! 2. choose representatives (given `lambda`, automatic, or none);
//! 3. basepoint heights stay bounded and the limit of `f^N` is not a power
//!    configuration `((bz - aw)^{d^N} : 0)`;
//! 4. `H(p) > 1/d^{N-1}`;
//! 5. limits `g_m`, `m = N..N+j`, agree with the product over atoms;
//! 6. and 7. stability inequalities for each `g_m`, with the divisibility
//!    of multiplicities by `d` in odd degree;
//! 8. `g_m` for `m > N` is recovered from the data of `g_N`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use crate::degeneration::{
    analyze_members, limit_iterate_of, limit_measure_of, FamilySpec, LimitIterate, LimitMeasure, RegimeCase,
    DEFAULT_DEPTH, EXTRAPOLATION_TOL,
};
use crate::polycore::{
    polynomial_roots, projective_deviation, rescale_representative, BoundaryPoint, Factor, Polynomial,
};
use crate::treebuild::format_rational;

use super::{nd_bound, nd_inequality, stability, GitError, StabilityTag, StabilityVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rescale {
    /// Scale each member so its two farthest zeros are distance 2 apart.
    Auto,
    /// Use the members as given.
    Off,
}

#[derive(Clone, Debug)]
pub struct ThmOptions {
    pub extra: usize,
    pub rescale: Rescale,
    pub depth: usize,
}

impl Default for ThmOptions {
    fn default() -> Self {
        Self {
            extra: 2,
            rescale: Rescale::Auto,
            depth: DEFAULT_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Step {
    pub step: usize,
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterateCheck {
    pub m: usize,
    /// `g_m` in boundary-point text form.
    pub point: String,
    pub source: String,
    pub deviation: f64,
    pub verdict: StabilityVerdict,
    /// `mass · d^m` per atom, in atom order.
    pub multiplicities: Vec<usize>,
    /// Odd degree only: whether `d` divides every multiplicity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisible: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremTwoReport {
    pub family: String,
    pub schedule: String,
    pub degree: usize,
    pub n: usize,
    pub extra: usize,
    pub rescale: String,
    /// `|lambda|` at the last schedule point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeCase>,
    pub normalized_heights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit_height: Option<f64>,
    pub masses: Vec<String>,
    pub iterates: Vec<IterateCheck>,
    pub steps: Vec<Step>,
    /// The unstable configuration found, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub determination: String,
    pub pass: bool,
}

impl TheoremTwoReport {
    pub fn first_failure(&self) -> Option<&Step> {
        self.steps.iter().find(|s| !s.pass)
    }
}

pub fn report_to_json(r: &TheoremTwoReport) -> String {
    serde_json::to_string_pretty(r).expect("report serializes")
}

/// `2 / max|z_i - z_j|` over the zeros of `f`.
fn auto_lambda(f: &Polynomial) -> Result<Complex64, GitError> {
    let roots = polynomial_roots(f.coeffs_lowest_first())?;
    let mut widest = 0.0_f64;
    for (i, a) in roots.iter().enumerate() {
        for b in &roots[i + 1..] {
            widest = widest.max((a - b).norm());
        }
    }
    if !(widest > 0.0) {
        return Err(GitError::InvalidArgument(
            "member has a single distinct zero".into(),
        ));
    }
    Ok(Complex64::new(2.0 / widest, 0.0))
}

fn is_power_configuration(bp: &BoundaryPoint) -> Result<bool, GitError> {
    if bp.b().norm() > 0.0 {
        return Ok(false);
    }
    if bp.affine_degree() == 0 {
        return Ok(true);
    }
    Ok(bp.k() == 0 && bp.zeros(super::MULTIPLICITY_TOL)?.len() == 1)
}

fn multiplicities(lm: &LimitMeasure, dm: usize) -> Option<Vec<usize>> {
    lm.atoms
        .iter()
        .map(|a| {
            let x = &a.mass * BigRational::from_integer(BigInt::from(dm));
            x.is_integer().then(|| x.to_integer().try_into().ok()).flatten()
        })
        .collect()
}

/// `g_N` rebuilt at level `m` by raising every factor to `d^{m-N}`.
fn raise(g: &BoundaryPoint, factor: usize) -> Result<BoundaryPoint, GitError> {
    let fs = g
        .factors()
        .ok_or_else(|| GitError::InvalidArgument("g_N has no factorization".into()))?;
    let scaled: Vec<Factor> = fs
        .iter()
        .map(|f| Factor {
            root: f.root,
            multiplicity: f.multiplicity * factor,
        })
        .collect();
    Ok(BoundaryPoint::from_factors(
        Complex64::new(1.0, 0.0),
        scaled,
        g.k() * factor,
        g.b(),
        g.ambient_degree() * factor,
    )?)
}

pub fn verify_finite_determination(
    spec: &FamilySpec,
    opts: &ThmOptions,
) -> Result<TheoremTwoReport, GitError> {
    let d = spec.degree();
    let n = nd_bound(d)?;
    let mut steps = Vec::new();
    let mut report = TheoremTwoReport {
        family: spec.to_string(),
        schedule: spec.schedule.to_string(),
        degree: d,
        n,
        extra: opts.extra,
        rescale: String::new(),
        lambda: None,
        regime: None,
        normalized_heights: Vec::new(),
        limit_height: None,
        masses: Vec::new(),
        iterates: Vec::new(),
        steps: Vec::new(),
        witness: None,
        determination: "sampled evidence: checked on this family only".into(),
        pass: false,
    };
    steps.push(Step {
        step: 1,
        name: "fix N(d)".into(),
        pass: nd_inequality(d, n) && !nd_inequality(d, n - 1),
        margin: Some(0.5 - ((d - 1) as f64 / d as f64).powi(n as i32 - 1)),
        detail: format!("N = {n}: ((d-1)/d)^(N-1) < 1/2 holds and fails at N-1"),
    });

    // Step 2: representatives.
    let mut members = spec.members().map_err(GitError::from)?;
    let given = spec.lambda.is_some();
    report.rescale = if given {
        "given".into()
    } else {
        match opts.rescale {
            Rescale::Auto => "auto".into(),
            Rescale::Off => "off".into(),
        }
    };
    if !given && opts.rescale == Rescale::Auto {
        let mut last = 0.0;
        for (_, f) in members.iter_mut() {
            let lam = auto_lambda(f)?;
            *f = rescale_representative(f, lam)?;
            last = lam.norm();
        }
        report.lambda = Some(last);
    } else if given {
        let (t, _) = members.last().expect("nonempty");
        let lam = spec.lambda.as_ref().expect("given").eval_at("t", *t);
        report.lambda = Some(lam.norm());
    }
    steps.push(Step {
        step: 2,
        name: "choose representatives".into(),
        pass: true,
        margin: None,
        detail: format!("rescaling {}", report.rescale),
    });

    // Step 3: bounded basepoint heights, no power configuration.
    let analysis = analyze_members(d, members, opts.depth)?;
    report.regime = Some(analysis.regime.case);
    report.normalized_heights = analysis
        .regime
        .evidence
        .iter()
        .map(|s| s.normalized_height)
        .collect();
    let lm = limit_measure_of(&analysis)?;
    report.masses = lm.atoms.iter().map(|a| format_rational(&a.mass)).collect();
    let g_n = limit_iterate_of(&analysis, &lm, n);
    let escaping = analysis.regime.case == RegimeCase::EscapingBasepoint;
    let power = match &g_n {
        Ok(li) => is_power_configuration(&li.point)?,
        Err(_) => false,
    };
    if escaping || power {
        let li = g_n?;
        let v = stability(&li.point, li.point.ambient_degree())?;
        report.witness = Some(format!("{} ({})", li.point, v.tag));
        steps.push(Step {
            step: 3,
            name: "bounded basepoint heights".into(),
            pass: false,
            margin: Some(analysis.regime.margin),
            detail: if escaping {
                format!("basepoint escapes; g_N is the power configuration {}", li.point)
            } else {
                format!("g_N is the power configuration {}", li.point)
            },
        });
        report.steps = steps;
        return Ok(report);
    }
    steps.push(Step {
        step: 3,
        name: "bounded basepoint heights".into(),
        pass: true,
        margin: Some(analysis.regime.margin),
        detail: format!("regime {}", analysis.regime.case),
    });

    // Step 4.
    let h = lm.limit_height.unwrap_or(analysis.regime.limit_height.max(0.0));
    report.limit_height = Some(h);
    let bound = 1.0 / (d as f64).powi(n as i32 - 1);
    steps.push(Step {
        step: 4,
        name: "H(p) > 1/d^(N-1)".into(),
        pass: h > bound,
        margin: Some(h - bound),
        detail: format!("H(p) = {h:.6}, 1/d^(N-1) = {bound:.6}"),
    });

    // Steps 5 to 7.
    let mut iterates: Vec<(LimitIterate, IterateCheck)> = Vec::new();
    let mut step5 = Ok(());
    for m in n..=n + opts.extra {
        let li = match limit_iterate_of(&analysis, &lm, m) {
            Ok(li) => li,
            Err(e) => {
                step5 = Err(format!("m = {m}: {e}"));
                break;
            }
        };
        let dm = d.pow(m as u32);
        let verdict = stability(&li.point, dm)?;
        let mults = multiplicities(&lm, dm).unwrap_or_default();
        let divisible = (d % 2 == 1).then(|| !mults.is_empty() && mults.iter().all(|x| x % d == 0));
        let check = IterateCheck {
            m,
            point: li.point.to_string(),
            source: li.source.to_string(),
            deviation: li.deviation,
            verdict,
            multiplicities: mults,
            divisible,
        };
        iterates.push((li, check));
    }
    let worst_dev = iterates.iter().map(|x| x.0.deviation).fold(0.0, f64::max);
    let all_product = iterates.iter().all(|x| x.0.source == "product");
    steps.push(Step {
        step: 5,
        name: "product form of g_m".into(),
        pass: step5.is_ok() && all_product && iterates.len() == opts.extra + 1,
        margin: Some(EXTRAPOLATION_TOL - worst_dev),
        detail: match &step5 {
            Err(e) => e.clone(),
            Ok(()) if !all_product => "some g_m are coefficient limits only".into(),
            Ok(()) => format!("{} limits match to {worst_dev:.2e}", iterates.len()),
        },
    });
    let unstable: Vec<usize> = iterates
        .iter()
        .filter(|x| x.1.verdict.tag == StabilityTag::Unstable)
        .map(|x| x.1.m)
        .collect();
    if let Some(&m) = unstable.first() {
        let x = iterates.iter().find(|x| x.1.m == m).expect("listed");
        report.witness = Some(format!("{} (Unstable)", x.1.point));
    }
    let (name, inequality_ok) = if d.is_multiple_of(2) {
        ("even-degree inequalities", unstable.is_empty())
    } else {
        let div = iterates.iter().all(|x| x.1.divisible == Some(true));
        (
            "odd-degree inequalities and divisibility",
            unstable.is_empty() && div,
        )
    };
    steps.push(Step {
        step: if d.is_multiple_of(2) { 6 } else { 7 },
        name: name.into(),
        pass: inequality_ok && !iterates.is_empty(),
        margin: None,
        detail: iterates
            .iter()
            .map(|x| format!("g_{}: {}", x.1.m, x.1.verdict.tag))
            .collect::<Vec<_>>()
            .join(", "),
    });

    // Step 8.
    let mut det_dev = 0.0_f64;
    let mut det_ok = !iterates.is_empty();
    if let Some((g0, _)) = iterates.first() {
        for (li, _) in &iterates[1..] {
            match raise(&g0.point, d.pow((li.m - n) as u32)) {
                Ok(g) => {
                    let dev = projective_deviation(&g.projective_vector(), &li.extrapolated);
                    det_dev = det_dev.max(dev);
                    det_ok &= dev <= EXTRAPOLATION_TOL;
                }
                Err(_) => det_ok = false,
            }
        }
    }
    steps.push(Step {
        step: 8,
        name: "g_m determined by g_N".into(),
        pass: det_ok,
        margin: Some(EXTRAPOLATION_TOL - det_dev),
        detail: format!("largest deviation {det_dev:.2e}; {}", report.determination),
    });

    report.iterates = iterates.into_iter().map(|x| x.1).collect();
    report.pass = steps.iter().all(|s| s.pass);
    report.steps = steps;
    Ok(report)
}
