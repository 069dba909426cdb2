use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::polycore::{roots_of_iterate, Polynomial};
use crate::treebuild::{format_rational, weights_at, ComponentHandle, Locator, Tree, TreeMeasure, TreePoint};

use super::limit::atom_radius;
use super::DegenError;

/// Roots of `f^n` lying over a tree component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: usize,
    /// Roots whose escape rate is too close to the cut level to place.
    pub ambiguous: usize,
    pub total: usize,
}

impl ZeroCount {
    pub fn is_exact(&self) -> bool {
        self.ambiguous == 0
    }
}

const BOUNDARY_TOL: f64 = 1e-9;

/// Counts the zeros of `f^n` (with multiplicity) whose tree image lies in `c`.
pub fn count_zeros_in_component(
    poly: &Polynomial,
    tree: &Tree,
    n: usize,
    c: &ComponentHandle,
) -> Result<ZeroCount, DegenError> {
    let roots = roots_of_iterate(poly, n)?.roots;
    let (inside, ambiguous) = roots_in_component(poly, tree, &roots, c)?;
    Ok(ZeroCount {
        count: inside.len(),
        ambiguous,
        total: roots.len(),
    })
}

/// The points of `roots` over `c`, and the number too close to its boundary
/// to decide.
pub(crate) fn roots_in_component(
    poly: &Polynomial,
    tree: &Tree,
    roots: &[Complex64],
    c: &ComponentHandle,
) -> Result<(Vec<Complex64>, usize), DegenError> {
    let mut loc = Locator::new(poly, tree);
    let mut inside = Vec::new();
    let mut ambiguous = 0;
    for &r in roots {
        match classify(&mut loc, r, c)? {
            Some(true) => inside.push(r),
            Some(false) => {}
            None => ambiguous += 1,
        }
    }
    Ok((inside, ambiguous))
}

/// Zero count of one component of `T \ {v}` against its mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentZeros {
    /// `below edge e`, `outside edge e` or `unbounded`.
    pub component: String,
    pub mass: String,
    /// `mass · d^n`.
    pub expected: String,
    pub zeros: ZeroCount,
    /// Exact count equal to `mass · d^n`.
    pub matches: bool,
}

/// Zeros of `f^n` in every component of `T \ {v}`, vertex `v` given by id.
pub fn zero_counts_at(
    poly: &Polynomial,
    tree: &Tree,
    measure: &TreeMeasure,
    vertex: usize,
    n: usize,
) -> Result<Vec<ComponentZeros>, DegenError> {
    if vertex >= tree.vertices.len() {
        return Err(DegenError::InvalidSpec(format!("no vertex {vertex}")));
    }
    let p = TreePoint::Vertex(vertex);
    let r = atom_radius(tree, &p) / tree.unit;
    let roots = roots_of_iterate(poly, n)?.roots;
    let dn = BigRational::from_integer(BigInt::from(tree.degree).pow(n as u32));
    let mut out = Vec::new();
    for w in weights_at(tree, measure, &p, r)? {
        let (inside, ambiguous) = roots_in_component(poly, tree, &roots, &w.component)?;
        let expected = &w.mass * &dn;
        let zeros = ZeroCount {
            count: inside.len(),
            ambiguous,
            total: roots.len(),
        };
        let matches = zeros.is_exact() && expected == BigRational::from_integer(BigInt::from(zeros.count));
        out.push(ComponentZeros {
            component: match w.component {
                ComponentHandle::Below { edge, .. } => format!("below edge {edge}"),
                ComponentHandle::Unbounded { edge: Some(e), .. } => format!("outside edge {e}"),
                ComponentHandle::Unbounded { edge: None, .. } => "unbounded".into(),
            },
            mass: format_rational(&w.mass),
            expected: format_rational(&expected),
            zeros,
            matches,
        });
    }
    Ok(out)
}

/// `Some(inside)`, or `None` when `G(r)` is within tolerance of the cut.
fn classify(loc: &mut Locator, r: Complex64, c: &ComponentHandle) -> Result<Option<bool>, DegenError> {
    let g = loc.rate(r);
    let (level, branch) = match *c {
        ComponentHandle::Below { edge, level } => (level, Some((edge, true))),
        ComponentHandle::Unbounded { edge, level } => (level, edge.map(|e| (e, false))),
    };
    if (g - level).abs() < BOUNDARY_TOL * level {
        return Ok(None);
    }
    let below = g < level;
    Ok(Some(match branch {
        None => !below,
        Some((edge, want_below)) => {
            let on_branch = below && {
                let band = loc.tree().edges[edge].band;
                loc.locate(r, band)? == edge
            };
            on_branch == want_below
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebuild::{build_tree, weights_at, TreePoint};

    #[test]
    fn quadratic_counts() {
        let f = Polynomial::from_real(&[1.0, 0.0, -6.0]).unwrap();
        let (t, m) = build_tree(&f, 2).unwrap();
        let w = weights_at(&t, &m, &TreePoint::Vertex(t.base_level), 0.05).unwrap();
        for x in &w {
            let z = count_zeros_in_component(&f, &t, 1, &x.component).unwrap();
            assert!(z.is_exact());
            let want = x.mass.clone() * num_rational::BigRational::from_integer(2.into());
            assert_eq!(num_rational::BigRational::from_integer(z.count.into()), want);
        }
    }

    #[test]
    fn counts_at_vertex_match_masses() {
        let f = Polynomial::from_real(&[1.0, 0.0, -6.0]).unwrap();
        let (t, m) = build_tree(&f, 3).unwrap();
        let rows = zero_counts_at(&f, &t, &m, t.base, 2).unwrap();
        assert!(rows.iter().all(|r| r.matches), "{rows:?}");
        assert_eq!(rows.iter().map(|r| r.zeros.count).sum::<usize>(), 4);
    }

    #[test]
    fn cubic_branch_counts() {
        let f = Polynomial::from_real(&[0.01, 1.0, 0.0, 0.0]).unwrap();
        let (t, m) = build_tree(&f, 2).unwrap();
        let w = weights_at(&t, &m, &TreePoint::Vertex(t.base_level), 0.05).unwrap();
        let counts: Vec<usize> = w
            .iter()
            .map(|x| count_zeros_in_component(&f, &t, 1, &x.component).unwrap().count)
            .collect();
        // Sorted by mass: unbounded (0), co-critical (1/3), branch (2/3).
        assert_eq!(counts, vec![0, 1, 2]);
    }
}
