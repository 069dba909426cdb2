use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::FamilySpec;
use super::limit::{member_atoms, MemberTree};
use super::regime::{classify_samples, MemberSample, RegimeCase};
use super::DegenError;

/// One schedule member of a parameter sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub param: f64,
    pub max_rate: f64,
    pub basepoint_height: f64,
    /// Regime of the schedule prefix ending here; `None` before three
    /// members or while `M` is not yet growing.
    pub regime: Option<RegimeCase>,
    /// Atoms of the member measure seen from its basepoint; `None` when the
    /// tree cannot be built (connected Julia set).
    pub n_atoms: Option<usize>,
}

/// Evaluates every schedule member in parallel; rows come back in
/// schedule order.
pub fn sweep_family(spec: &FamilySpec, depth: usize) -> Result<Vec<SweepRow>, DegenError> {
    let members = spec.members()?;
    let per_member: Vec<(MemberSample, Option<usize>)> = members
        .par_iter()
        .map(|(t, f)| {
            let sample = MemberSample::compute(*t, f)?;
            let atoms = MemberTree::build(*t, f.clone(), depth)
                .ok()
                .and_then(|mt| member_atoms(&mt, &mt.pointed.point).ok())
                .map(|a| a.len());
            Ok((sample, atoms))
        })
        .collect::<Result<_, DegenError>>()?;
    let samples: Vec<MemberSample> = per_member.iter().map(|(s, _)| s.clone()).collect();
    Ok(per_member
        .into_iter()
        .enumerate()
        .map(|(i, (s, n_atoms))| SweepRow {
            index: i,
            param: s.t,
            max_rate: s.max_rate,
            basepoint_height: s.basepoint_height,
            regime: classify_samples(samples[..=i].to_vec()).ok().map(|r| r.case),
            n_atoms,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_follow_schedule() {
        let spec = FamilySpec::parse("t,0,-t", "10^j, 1..4").unwrap();
        let rows = sweep_family(&spec, 2).unwrap();
        let params: Vec<f64> = rows.iter().map(|r| r.param).collect();
        assert_eq!(params, vec![10.0, 100.0, 1000.0, 10000.0]);
        assert!(rows[..2].iter().all(|r| r.regime.is_none()));
        assert_eq!(rows[3].regime, Some(RegimeCase::InteriorBasepoint));
        assert!(rows.iter().all(|r| r.n_atoms == Some(1)));
    }
}
