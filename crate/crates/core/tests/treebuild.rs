use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use polytree::polycore::Polynomial;
use polytree::treebuild::{build_tree, mass_bound, tree_from_json, tree_to_json, Tree, TreeError};
use proptest::prelude::*;

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Vertices down the degree-2 branch of a cubic tree, starting at `v0`.
fn branch_valences(t: &Tree) -> Vec<usize> {
    let mut out = vec![t.vertices[t.base_level].valence];
    let mut v = t.base_level;
    loop {
        let next = t.vertices[v]
            .child_edges
            .iter()
            .copied()
            .find(|&e| t.edges[e].degree == 2);
        match next {
            Some(e) => {
                v = t.edges[e].bottom;
                if t.vertices[v].level + 1 == t.levels.len() {
                    break;
                }
                out.push(t.vertices[v].valence);
            }
            None => break,
        }
    }
    out
}

#[test]
fn quadratic_binary_tree() {
    let f = Polynomial::from_real(&[1.0, 0.0, -6.0]).unwrap();
    let (t, m) = build_tree(&f, 4).unwrap();
    assert!((t.max_rate - 0.84946).abs() < 1e-4);
    for k in 0..4 {
        let band: Vec<_> = t.edges_in_band(t.base_level + k).collect();
        assert_eq!(band.len(), 1 << (k + 1));
        for e in band {
            assert_eq!(e.degree, 1);
            assert_eq!(e.generation, k + 1);
            assert_eq!(m.mass(e.id), &frac(1, 1 << (k + 1)));
            assert_eq!(m.mass(e.id), &mass_bound(2, e.generation));
        }
    }
    for j in 0..t.base_level {
        assert_eq!(t.edges[j].degree, 2);
        assert!(m.mass(j).is_one());
    }
}

#[test]
fn cubic_branches() {
    for eps in [1e-2, 1e-3] {
        let f = Polynomial::from_real(&[eps, 1.0, 0.0, 0.0]).unwrap();
        let (t, m) = build_tree(&f, 4).unwrap();
        let mut gen1: Vec<_> = t
            .edges_in_band(t.base_level)
            .map(|e| (e.degree, m.mass(e.id).clone()))
            .collect();
        gen1.sort();
        assert_eq!(gen1, vec![(1, frac(1, 3)), (2, frac(2, 3))]);
        let vals = branch_valences(&t);
        assert!(vals.len() >= 4, "{vals:?}");
        assert_eq!(&vals[..4], &[3, 4, 6, 10]);
    }
}

#[test]
fn connected_julia_set_rejected() {
    let f = Polynomial::from_real(&[1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        build_tree(&f, 2),
        Err(TreeError::ConnectedJuliaSet { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn real_quadratics_are_binary(cc in 2.5f64..40.0) {
        let f = Polynomial::from_real(&[1.0, 0.0, -cc]).unwrap();
        let (t, m) = build_tree(&f, 3).unwrap();
        for e in t.edges.iter().filter(|e| !e.trunk) {
            prop_assert_eq!(e.degree, 1);
            prop_assert_eq!(m.mass(e.id), &mass_bound(2, e.generation));
        }
        for w in t.levels.windows(2) {
            let h = 0.5 * (w[0] + w[1]);
            prop_assert!(t.height_cut_mass(&m, h).is_one());
        }
    }

    #[test]
    fn cubic_generation_one_split(eps in 1e-3f64..3e-2) {
        let f = Polynomial::from_real(&[eps, 1.0, 0.0, 0.0]).unwrap();
        let (t, m) = build_tree(&f, 2).unwrap();
        let mut gen1: Vec<_> = t.edges_in_band(t.base_level).map(|e| m.mass(e.id).clone()).collect();
        gen1.sort();
        prop_assert_eq!(gen1, vec![frac(1, 3), frac(2, 3)]);
        for e in t.edges.iter().filter(|e| !e.trunk) {
            prop_assert!(m.mass(e.id) <= &mass_bound(3, e.generation));
        }
    }

    #[test]
    fn export_round_trip(cc in 2.5f64..40.0, im in -1.0f64..1.0) {
        let f: Polynomial = format!("1,0,{}{:+}i", -cc, im).parse().unwrap();
        let (t, m) = build_tree(&f, 2).unwrap();
        let back = tree_from_json(&tree_to_json(&t, &m)).unwrap();
        prop_assert!(back.matches(&t, &m));
    }
}
