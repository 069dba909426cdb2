//! Dynamics-respecting simplicial isomorphisms between truncations `T(k)`:
//! the subtrees spanned by vertices within `k` steps of the base vertex.

use std::collections::{BTreeMap, HashMap};

use crate::treebuild::{Tree, TreePoint};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeIsomorphism {
    pub vertex_map: BTreeMap<usize, usize>,
    pub edge_map: BTreeMap<usize, usize>,
}

/// Edges of `T(k)`: `k` trunk edges above the base and `k` bands below it.
fn truncation_edges(t: &Tree, k: usize) -> Option<Vec<usize>> {
    if t.base_level < k || t.levels.len() < t.base_level + k + 1 {
        return None;
    }
    let lo = t.base_level - k;
    let hi = t.base_level + k;
    Some(
        t.edges
            .iter()
            .filter(|e| e.band >= lo && e.band < hi)
            .map(|e| e.id)
            .collect(),
    )
}

/// Canonical colour of each below-base edge of `T(k)`: degree and the
/// sorted colours of its children, computed bottom-up.
fn colours(t: &Tree, k: usize) -> HashMap<usize, usize> {
    let mut table: HashMap<(usize, usize, Vec<usize>), usize> = HashMap::new();
    let mut out = HashMap::new();
    let hi = t.base_level + k;
    for band in (t.base_level..hi).rev() {
        for e in t.edges_in_band(band) {
            let mut kids: Vec<usize> = if band + 1 < hi {
                e.children.iter().map(|c| out[c]).collect()
            } else {
                Vec::new()
            };
            kids.sort_unstable();
            let key = (band - t.base_level, e.degree, kids);
            let n = table.len();
            let c = *table.entry(key).or_insert(n);
            out.insert(e.id, c);
        }
    }
    out
}

/// A simplicial isomorphism `T1(k) -> T2(k)` preserving degrees and the
/// self-map wherever both images lie in the truncation, or `None`.
///
/// Children are matched greedily by canonical colour subject to the image
/// constraint; the result is then verified in full.
pub fn truncation_isomorphic(t1: &Tree, t2: &Tree, k: usize) -> Option<TreeIsomorphism> {
    if t1.degree != t2.degree {
        return None;
    }
    let e1 = truncation_edges(t1, k)?;
    let e2 = truncation_edges(t2, k)?;
    if e1.len() != e2.len() {
        return None;
    }
    let (b1, b2) = (t1.base_level, t2.base_level);
    let mut emap: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..k {
        emap.insert(b1 - 1 - i, b2 - 1 - i);
    }
    let (c1, c2) = (colours(t1, k), colours(t2, k));
    // The trunk edge directly above the base has the base's children.
    let mut frontier: Vec<(usize, usize)> = vec![(b1 - 1, b2 - 1)];
    for _band in 0..k {
        let mut next = Vec::new();
        for &(u1, u2) in &frontier {
            let kids1 = &t1.edges[u1].children;
            let mut kids2: Vec<usize> = t2.edges[u2].children.clone();
            if kids1.len() != kids2.len() {
                return None;
            }
            for &a in kids1 {
                let pos = kids2
                    .iter()
                    .position(|&b| c1[&a] == c2[&b] && image_compatible(t1, t2, &emap, a, b))?;
                let b = kids2.remove(pos);
                emap.insert(a, b);
                next.push((a, b));
            }
        }
        frontier = next;
    }
    let vmap: BTreeMap<usize, usize> = emap
        .iter()
        .flat_map(|(&a, &b)| {
            [
                (t1.edges[a].bottom, t2.edges[b].bottom),
                (t1.edges[a].top, t2.edges[b].top),
            ]
        })
        .collect();
    let iso = TreeIsomorphism {
        vertex_map: vmap,
        edge_map: emap,
    };
    verify(t1, t2, &iso).then_some(iso)
}

fn image_compatible(t1: &Tree, t2: &Tree, emap: &BTreeMap<usize, usize>, a: usize, b: usize) -> bool {
    match (t1.edges[a].image, t2.edges[b].image) {
        (Some(ia), Some(ib)) => match emap.get(&ia) {
            Some(&m) => m == ib,
            None => !emap.values().any(|&v| v == ib),
        },
        (None, None) => true,
        _ => false,
    }
}

fn verify(t1: &Tree, t2: &Tree, iso: &TreeIsomorphism) -> bool {
    let m = &iso.edge_map;
    for (&a, &b) in m {
        let (ea, eb) = (&t1.edges[a], &t2.edges[b]);
        if ea.degree != eb.degree || ea.trunk != eb.trunk {
            return false;
        }
        if let (Some(pa), Some(pb)) = (ea.parent, eb.parent) {
            if let Some(&mp) = m.get(&pa) {
                if mp != pb {
                    return false;
                }
            }
        }
        match (ea.image, eb.image) {
            (Some(ia), Some(ib)) => {
                let inside_a = m.contains_key(&ia);
                let inside_b = m.values().any(|&v| v == ib);
                if inside_a != inside_b || (inside_a && m[&ia] != ib) {
                    return false;
                }
            }
            (None, None) => {}
            _ => {
                if m.contains_key(&a) && ea.trunk {
                    continue;
                }
                return false;
            }
        }
    }
    let mut seen: Vec<usize> = m.values().copied().collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len() == m.len()
}

/// The point of `T(k)` closest to `p`, as an edge or vertex id pair tag.
fn truncated_point(t: &Tree, p: &TreePoint, k: usize) -> Option<(bool, usize)> {
    let lo = t.base_level.checked_sub(k)?;
    let hi = t.base_level + k;
    let edge_of = |e: usize| -> (bool, usize) {
        let band = t.edges[e].band;
        if band >= hi {
            let a = t.ancestor(e, hi - 1).expect("ancestor exists");
            (true, t.edges[a].bottom)
        } else if band < lo {
            (true, lo)
        } else {
            (false, e)
        }
    };
    Some(match *p {
        TreePoint::Vertex(v) => {
            let level = t.vertices[v].level;
            if level < lo {
                (true, lo)
            } else if level > hi {
                let e = t.vertices[v].parent_edge?;
                edge_of(e)
            } else {
                (true, v)
            }
        }
        TreePoint::OnEdge { edge, .. } => edge_of(edge),
        TreePoint::Deep { above, .. } | TreePoint::Julia { above } => edge_of(above),
        TreePoint::Ray { .. } => (true, lo),
    })
}

/// As [`truncation_isomorphic`], additionally requiring that the points of
/// `T(k)` closest to `p1` and `p2` correspond.
pub fn truncation_isomorphic_pointed(
    t1: &Tree,
    p1: &TreePoint,
    t2: &Tree,
    p2: &TreePoint,
    k: usize,
) -> Option<TreeIsomorphism> {
    let iso = truncation_isomorphic(t1, t2, k)?;
    let (q1, q2) = (truncated_point(t1, p1, k)?, truncated_point(t2, p2, k)?);
    let ok = match (q1, q2) {
        ((true, v1), (true, v2)) => iso.vertex_map.get(&v1) == Some(&v2),
        ((false, e1), (false, e2)) => iso.edge_map.get(&e1) == Some(&e2),
        _ => false,
    };
    ok.then_some(iso)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::Polynomial;
    use crate::treebuild::build_tree;

    fn tree(c: &[f64], k: usize) -> Tree {
        build_tree(&Polynomial::from_real(c).unwrap(), k).unwrap().0
    }

    #[test]
    fn identity_and_quadratics() {
        let a = tree(&[1.0, 0.0, -6.0], 2);
        let iso = truncation_isomorphic(&a, &a, 2).unwrap();
        assert!(iso.edge_map.iter().all(|(x, y)| x == y));
        let b = tree(&[1.0, 0.0, -7.0], 2);
        assert!(truncation_isomorphic(&a, &b, 2).is_some());
        let v = TreePoint::Vertex(a.base_level);
        let w = TreePoint::Vertex(b.base_level);
        assert!(truncation_isomorphic_pointed(&a, &v, &b, &w, 2).is_some());
    }

    #[test]
    fn quadratic_vs_cubic() {
        let a = tree(&[1.0, 0.0, -6.0], 2);
        let c = tree(&[0.01, 1.0, 0.0, 0.0], 2);
        assert!(truncation_isomorphic(&a, &c, 2).is_none());
    }
}
