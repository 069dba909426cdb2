use num_bigint::BigInt;
use num_rational::BigRational;
use polytree::degeneration::{
    cluster_atoms, count_zeros_in_component, limit_measure, measure_from_json, measure_to_json,
    truncation_isomorphic, verify_kbound, Atom, DegenError, FamilySpec, LimitMeasure, RegimeCase,
    ATOM_CLUSTER,
};
use polytree::polycore::{Polynomial, SpherePoint};
use polytree::treebuild::{build_tree, weights_at, TreePoint};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn cubic_zero_counts_match_masses() {
    let f = Polynomial::from_real(&[0.01, 1.0, 0.0, 0.0]).unwrap();
    let (t, m) = build_tree(&f, 3).unwrap();
    for n in 1..=2usize {
        let dn = BigRational::from_integer(BigInt::from(3).pow(n as u32));
        let mut total = 0;
        // Components hanging below each vertex of the degree-2 branch.
        let mut v = t.base_level;
        for _ in 0..n {
            let w = weights_at(&t, &m, &TreePoint::Vertex(v), 0.01).unwrap();
            for x in &w {
                let z = count_zeros_in_component(&f, &t, n, &x.component).unwrap();
                assert!(z.is_exact());
                assert_eq!(BigRational::from_integer(z.count.into()), &x.mass * &dn);
            }
            total = w.len();
            let branch = t.vertices[v]
                .child_edges
                .iter()
                .copied()
                .find(|&e| t.edges[e].degree == 2)
                .unwrap();
            v = t.edges[branch].bottom;
        }
        assert!(total >= 3);
    }
}

#[test]
fn kbound_equality_for_cubic_family() {
    let spec = FamilySpec::parse("t,1,0,0", "1e-1*10^-j, 0..6").unwrap();
    for n in [2usize, 3] {
        let r = verify_kbound(&spec, n).unwrap();
        let want = 3usize.pow(n as u32) - 2usize.pow(n as u32);
        assert_eq!(r.k, want);
        assert_eq!(r.bound, format!("{want}/1"));
        assert!(r.pass);
    }
}

#[test]
fn kbound_for_quadratic_family() {
    let spec = FamilySpec::parse("t,0,-t", "10^j, 1..6").unwrap();
    let r = verify_kbound(&spec, 3).unwrap();
    assert_eq!((r.k, r.mass.as_str(), r.pass), (0, "0/1", true));
}

#[test]
fn atoms_file_round_trip() {
    let spec = FamilySpec::parse("t,0,-t", "10^j, 1..6").unwrap();
    let lm = limit_measure(&spec, 3).unwrap();
    assert_eq!(lm.total_mass(), q(1, 1));
    assert!(lm.masses_in_ring());
    let back = measure_from_json(&measure_to_json(&lm)).unwrap();
    assert_eq!(back, lm);
}

#[test]
fn escaping_family_single_atom() {
    let spec = FamilySpec::parse("1,2*t^2,t^4-t-t^2", "10^j, 1..4").unwrap();
    let lm = limit_measure(&spec, 2).unwrap();
    assert_eq!(lm.case, RegimeCase::EscapingBasepoint);
    assert_eq!(lm.atoms.len(), 1);
    assert_eq!(lm.atoms[0].mass, q(1, 1));
}

#[test]
fn non_divergent_family_rejected() {
    let spec = FamilySpec::parse("1,0,-1-t", "1e-1*10^-j, 0..4").unwrap();
    assert!(matches!(
        limit_measure(&spec, 2),
        Err(DegenError::NotDivergent(_))
    ));
}

#[test]
fn rescaled_cubic_atoms_follow_valence() {
    let t = |c: &[f64]| build_tree(&Polynomial::from_real(c).unwrap(), 3).unwrap().0;
    assert!(truncation_isomorphic(&t(&[1e-3, 1.0, 0.0, 0.0]), &t(&[1e-4, 1.0, 0.0, 0.0]), 2).is_some());
    for (i, val) in [(1usize, 4usize), (2, 6)] {
        let lambda = format!("t^(1/{})", 1 << i);
        let spec = FamilySpec::parse(&format!("t,1,0,0;lambda={lambda}"), "1e-4*10^-j, 0..5").unwrap();
        let lm = limit_measure(&spec, 4).unwrap();
        assert_eq!(lm.basepoint_valence, Some(val), "i = {i}");
        assert_eq!(lm.atoms.len(), val, "i = {i}: {:?}", lm.atoms);
        assert!(lm.atoms.iter().any(|a| a.location == SpherePoint::Infinity));
        assert_eq!(lm.total_mass(), q(1, 1));
    }
}

fn atoms() -> impl Strategy<Value = Vec<Atom>> {
    let location = prop_oneof![
        1 => Just(SpherePoint::Infinity),
        5 => (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| SpherePoint::finite(a, b)),
    ];
    prop::collection::vec((location, 1i64..9, 0u32..4), 1..8).prop_map(|v| {
        v.into_iter()
            .map(|(location, n, e)| Atom {
                location,
                mass: q(n, 3i64.pow(e)),
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clustering_keeps_mass(a in atoms()) {
        let total = a.iter().fold(q(0, 1), |acc, x| acc + &x.mass);
        let merged = cluster_atoms(a.clone(), ATOM_CLUSTER);
        prop_assert!(merged.len() <= a.len());
        prop_assert_eq!(merged.iter().fold(q(0, 1), |acc, x| acc + &x.mass), total);
    }

    #[test]
    fn atoms_json_round_trip(a in atoms(), generation in 0usize..4) {
        let lm = LimitMeasure {
            case: RegimeCase::InteriorBasepoint,
            degree: 3,
            generation,
            atoms: a,
            limit_height: Some(0.5),
            basepoint_valence: None,
        };
        prop_assert_eq!(measure_from_json(&measure_to_json(&lm)).unwrap(), lm);
    }
}
