//! One-parameter families `t -> f_t` sampled along a schedule `t_j`.
//!
//! Family text: comma-separated coefficient expressions in `t`, highest
//! degree first, optionally followed by `;lambda=<expr>`, for example
//! `t,1,0,0` or `1,0,-t;lambda=1/sqrt(t)`.
//!
//! Schedule text: `[t=]<expr in j>, [j=]<a>..<b>`, for example
//! `t=1e-1*10^-j, j=0..6` or `10^j,1..6`.

use std::fmt;

use num_complex::Complex64;

use crate::polycore::{rescale_representative, ParseError, Polynomial};

use super::expr::Expr;
use super::DegenError;

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub expr: Expr,
    pub start: i64,
    pub end: i64,
    text: String,
}

impl Schedule {
    pub fn parse(s: &str) -> Result<Self, ParseError> {
        let comma = s
            .rfind(',')
            .ok_or_else(|| ParseError::new(s.len(), "expected ', <a>..<b>'"))?;
        let (head, tail) = (&s[..comma], &s[comma + 1..]);
        let (off, body) = strip_prefix_ws(head, "t=");
        let expr = Expr::parse(body, &["j"]).map_err(|e| e.shifted(off))?;
        let (roff, range) = strip_prefix_ws(tail, "j=");
        let roff = comma + 1 + roff;
        let (a, b) = range
            .split_once("..")
            .ok_or_else(|| ParseError::new(roff, "expected <a>..<b>"))?;
        let start: i64 = a
            .trim()
            .parse()
            .map_err(|_| ParseError::new(roff, format!("bad range start {:?}", a.trim())))?;
        let bpos = roff + a.len() + 2;
        let end: i64 = b
            .trim()
            .parse()
            .map_err(|_| ParseError::new(bpos, format!("bad range end {:?}", b.trim())))?;
        if end < start {
            return Err(ParseError::new(bpos, "empty range"));
        }
        let sched = Self {
            expr,
            start,
            end,
            text: s.trim().to_string(),
        };
        let v = sched.values();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(ParseError::new(off, "schedule values must be finite reals"));
        }
        let inc = v.windows(2).all(|w| w[1] > w[0]);
        let dec = v.windows(2).all(|w| w[1] < w[0]);
        if !(inc || dec) {
            return Err(ParseError::new(off, "schedule must be strictly monotone"));
        }
        Ok(sched)
    }

    /// The parameter values `t_j`, in schedule order.
    pub fn values(&self) -> Vec<f64> {
        (self.start..=self.end)
            .map(|j| {
                let v = self.expr.eval_at("j", j as f64);
                if v.im == 0.0 {
                    v.re
                } else {
                    f64::NAN
                }
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Offset and remainder after an optional `prefix` (leading whitespace skipped).
fn strip_prefix_ws<'a>(s: &'a str, prefix: &str) -> (usize, &'a str) {
    let lead = s.len() - s.trim_start().len();
    let rest = &s[lead..];
    match rest.strip_prefix(prefix) {
        Some(r) => (lead + prefix.len(), r),
        None => (lead, rest),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    /// Coefficient expressions, highest degree first.
    pub coeffs: Vec<Expr>,
    pub schedule: Schedule,
    pub lambda: Option<Expr>,
    text: String,
}

impl FamilySpec {
    pub fn parse(family: &str, schedule: &str) -> Result<Self, DegenError> {
        let schedule = Schedule::parse(schedule).map_err(|e| DegenError::Parse {
            what: "schedule",
            error: e,
        })?;
        Self::with_schedule(family, schedule)
    }

    pub fn with_schedule(family: &str, schedule: Schedule) -> Result<Self, DegenError> {
        let perr = |e: ParseError| DegenError::Parse {
            what: "family",
            error: e,
        };
        let (list, lambda) = match family.find(';') {
            Some(i) => {
                let rest = &family[i + 1..];
                let (off, body) = strip_prefix_ws(rest, "lambda=");
                if off == rest.len() - rest.trim_start().len() {
                    return Err(perr(ParseError::new(i + 1, "expected 'lambda='")));
                }
                let e = Expr::parse(body, &["t"]).map_err(|e| perr(e.shifted(i + 1 + off)))?;
                (&family[..i], Some(e))
            }
            None => (family, None),
        };
        let mut coeffs = Vec::new();
        let mut offset = 0;
        for item in list.split(',') {
            if item.trim().is_empty() {
                return Err(perr(ParseError::new(offset, "empty coefficient")));
            }
            coeffs.push(Expr::parse(item, &["t"]).map_err(|e| perr(e.shifted(offset)))?);
            offset += item.len() + 1;
        }
        if coeffs.len() < 3 {
            return Err(perr(ParseError::new(0, "degree must be at least 2")));
        }
        Ok(Self {
            coeffs,
            schedule,
            lambda,
            text: family.trim().to_string(),
        })
    }

    /// Replaces the rescaling expression.
    pub fn with_lambda(mut self, lambda: &str) -> Result<Self, DegenError> {
        let e = Expr::parse(lambda, &["t"]).map_err(|e| DegenError::Parse {
            what: "lambda",
            error: e,
        })?;
        let base = self.text.split(';').next().unwrap_or("").to_string();
        self.text = format!("{base};lambda={lambda}");
        self.lambda = Some(e);
        Ok(self)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn params(&self) -> Vec<f64> {
        self.schedule.values()
    }

    /// `f_t`, rescaled by `lambda(t)` when given.
    pub fn member_at(&self, t: f64) -> Result<Polynomial, DegenError> {
        let c: Vec<Complex64> = self.coeffs.iter().map(|e| e.eval_at("t", t)).collect();
        if c.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(DegenError::InvalidSpec(format!(
                "non-finite coefficient at t = {t:e}"
            )));
        }
        if c[0] == Complex64::new(0.0, 0.0) {
            return Err(DegenError::DegreeDrop { t });
        }
        let f = Polynomial::from_highest_first(&c)?;
        match &self.lambda {
            None => Ok(f),
            Some(l) => {
                let lam = l.eval_at("t", t);
                if lam.norm() == 0.0 || !lam.norm().is_finite() {
                    return Err(DegenError::InvalidSpec(format!("lambda({t:e}) is {lam}")));
                }
                Ok(rescale_representative(&f, lam)?)
            }
        }
    }

    pub fn members(&self) -> Result<Vec<(f64, Polynomial)>, DegenError> {
        self.params()
            .into_iter()
            .map(|t| Ok((t, self.member_at(t)?)))
            .collect()
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Members at the first `count` schedule points.
pub fn sample_family(spec: &FamilySpec, count: usize) -> Result<Vec<Polynomial>, DegenError> {
    if count == 0 {
        return Err(DegenError::InvalidSpec("count must be at least 1".into()));
    }
    spec.params()
        .into_iter()
        .take(count)
        .map(|t| spec.member_at(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_forms() {
        let s = Schedule::parse("t=1e-1*10^-j, j=0..6").unwrap();
        let v = s.values();
        assert_eq!(v.len(), 7);
        assert!((v[0] - 0.1).abs() < 1e-17 && (v[6] - 1e-7).abs() < 1e-20);
        let s = Schedule::parse("1e-2*10^-j,0..5").unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.to_string(), "1e-2*10^-j,0..5");
        assert!(Schedule::parse("10^j").is_err());
        assert!(Schedule::parse("1, 0..3").is_err());
        let e = Schedule::parse("10^k, 0..3").unwrap_err();
        assert_eq!(e.position, 3);
    }

    #[test]
    fn members_and_degree_drop() {
        let spec = FamilySpec::parse("t,0,-t", "10^j, j=1..3").unwrap();
        let m = sample_family(&spec, 3).unwrap();
        assert_eq!(m[2], Polynomial::from_real(&[1000.0, 0.0, -1000.0]).unwrap());
        let spec = FamilySpec::parse("t,1,0,0", "1e-1*10^-j, 0..6").unwrap();
        assert!(sample_family(&spec, 7).unwrap().iter().all(|p| p.degree() == 3));
        let spec = FamilySpec::parse("t-1,0,1", "j, 0..2").unwrap();
        assert!(matches!(
            sample_family(&spec, 3),
            Err(DegenError::DegreeDrop { .. })
        ));
    }

    #[test]
    fn lambda_rescales() {
        let spec = FamilySpec::parse("1,0,-t;lambda=1/sqrt(t)", "10^j, 2..2").unwrap();
        let f = sample_family(&spec, 1).unwrap().remove(0);
        let want = Polynomial::from_real(&[10.0, 0.0, -10.0]).unwrap();
        for (a, b) in f.coeffs_lowest_first().iter().zip(want.coeffs_lowest_first()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(spec.to_string(), "1,0,-t;lambda=1/sqrt(t)");
    }

    #[test]
    fn family_errors_have_positions() {
        let e = FamilySpec::parse("t,1,0,q", "10^j,0..1").unwrap_err();
        match e {
            DegenError::Parse { error, .. } => assert_eq!(error.position, 6),
            other => panic!("{other:?}"),
        }
        assert!(FamilySpec::parse("t,,1", "10^j,0..1").is_err());
        assert!(FamilySpec::parse("t,1", "10^j,0..1").is_err());
    }
}
