use serde::{Deserialize, Serialize};

use crate::polycore::{EscapeData, Escaper};
use crate::treebuild::circle_max;

use super::family::FamilySpec;
use super::DegenError;

/// Normalized basepoint height below which the basepoint tends to the Julia set.
pub const JULIA_HEIGHT: f64 = 0.05;
/// Normalized base-to-basepoint distance beyond which the basepoint escapes.
pub const ESCAPE_DISTANCE: f64 = 10.0;
/// Limit heights above this keep the basepoint on the trunk far above `v0`,
/// where the limit measure is a single atom as for an escaping basepoint.
pub const TRUNK_HEIGHT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeCase {
    InteriorBasepoint,
    JuliaBasepoint,
    EscapingBasepoint,
}

impl RegimeCase {
    pub fn tag(&self) -> &'static str {
        match self {
            RegimeCase::InteriorBasepoint => "interior-basepoint",
            RegimeCase::JuliaBasepoint => "julia-basepoint",
            RegimeCase::EscapingBasepoint => "escaping-basepoint",
        }
    }
}

impl std::fmt::Display for RegimeCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberSample {
    pub t: f64,
    pub max_rate: f64,
    /// Raw basepoint height `max G` on the unit circle.
    pub basepoint_height: f64,
    pub normalized_height: f64,
    /// Normalized distance from `v0` to the basepoint.
    pub base_distance: f64,
}

impl MemberSample {
    pub fn compute(t: f64, poly: &crate::polycore::Polynomial) -> Result<Self, DegenError> {
        let m = EscapeData::compute(poly)?.max_rate;
        let (_, h) = circle_max(&Escaper::new(poly), 4096);
        let nh = if m > 0.0 { h / m } else { f64::INFINITY };
        Ok(Self {
            t,
            max_rate: m,
            basepoint_height: h,
            normalized_height: nh,
            base_distance: (nh - 1.0).abs(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeClassification {
    pub case: RegimeCase,
    pub evidence: Vec<MemberSample>,
    /// Extrapolated limit of the normalized basepoint height.
    pub limit_height: f64,
    /// Distance of the deciding statistic from its threshold.
    pub margin: f64,
}

/// Intercept of the least-squares line `h = a + b/M` through the last
/// three samples: heights differ from a multiple of `M` by a bounded amount.
pub(crate) fn extrapolate_height(samples: &[MemberSample]) -> f64 {
    let tail = &samples[samples.len().saturating_sub(3)..];
    let xs: Vec<f64> = tail.iter().map(|s| 1.0 / s.max_rate).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.normalized_height).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 0.0) {
        return *ys.last().expect("nonempty");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    my - sxy / sxx * mx
}

pub(crate) fn classify_samples(samples: Vec<MemberSample>) -> Result<RegimeClassification, DegenError> {
    let n = samples.len();
    if n < 3 {
        return Err(DegenError::InvalidSpec(
            "at least three schedule points are needed".into(),
        ));
    }
    let ms: Vec<f64> = samples.iter().map(|s| s.max_rate).collect();
    let growing = ms[n - 3] < ms[n - 2] && ms[n - 2] < ms[n - 1];
    if !(ms[n - 1] > 0.0 && growing && ms[n - 1] > 1.5 * ms[0].max(1e-300)) {
        return Err(DegenError::NotDivergent(format!(
            "M(f) goes from {:.6} to {:.6} along the schedule",
            ms[0],
            ms[n - 1]
        )));
    }
    let h = |i: usize| samples[i].normalized_height;
    let dist = |i: usize| samples[i].base_distance;
    let limit_height = extrapolate_height(&samples);
    let (case, margin) = if h(n - 1) < JULIA_HEIGHT && h(n - 1) < h(n - 2) {
        (RegimeCase::JuliaBasepoint, JULIA_HEIGHT - h(n - 1))
    } else if dist(n - 1) > ESCAPE_DISTANCE && dist(n - 1) > dist(n - 2) {
        (RegimeCase::EscapingBasepoint, dist(n - 1) - ESCAPE_DISTANCE)
    } else if limit_height > TRUNK_HEIGHT && h(n - 1) > TRUNK_HEIGHT {
        (
            RegimeCase::EscapingBasepoint,
            limit_height.min(h(n - 1)) - TRUNK_HEIGHT,
        )
    } else {
        let m = (h(n - 1) - JULIA_HEIGHT)
            .min(ESCAPE_DISTANCE - dist(n - 1))
            .min((TRUNK_HEIGHT - limit_height).abs());
        (RegimeCase::InteriorBasepoint, m)
    };
    Ok(RegimeClassification {
        case,
        evidence: samples,
        limit_height,
        margin,
    })
}

/// Decides which of the three basepoint regimes the family is in.
pub fn classify_regime(spec: &FamilySpec) -> Result<RegimeClassification, DegenError> {
    let samples = spec
        .members()?
        .into_iter()
        .map(|(t, f)| MemberSample::compute(t, &f))
        .collect::<Result<Vec<_>, _>>()?;
    classify_samples(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_regimes() {
        let spec = FamilySpec::parse("t,0,-t", "10^j, 1..6").unwrap();
        let r = classify_regime(&spec).unwrap();
        assert_eq!(r.case, RegimeCase::InteriorBasepoint);
        assert!((r.limit_height - 1.0).abs() < 1e-2, "{}", r.limit_height);

        let spec = FamilySpec::parse("t,1,0,0", "1e-1*10^-j, 0..6").unwrap();
        let r = classify_regime(&spec).unwrap();
        assert_eq!(r.case, RegimeCase::JuliaBasepoint);

        let spec = FamilySpec::parse("1,2*t^2,t^4-t-t^2", "10^j, 1..4").unwrap();
        let r = classify_regime(&spec).unwrap();
        assert_eq!(r.case, RegimeCase::EscapingBasepoint);
    }

    #[test]
    fn bounded_family_rejected() {
        let spec = FamilySpec::parse("1,0,-2-t", "1e-1*10^-j, 0..4").unwrap();
        assert!(matches!(classify_regime(&spec), Err(DegenError::NotDivergent(_))));
    }
}
