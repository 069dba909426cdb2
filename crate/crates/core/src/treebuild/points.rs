use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::polycore::{Escaper, Polynomial};

use super::build::{circle_max, Locator, LEVEL_TOL};
use super::tree::{Tree, TreeMeasure};
use super::TreeError;

/// A point of the truncated tree. Heights are raw escape rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TreePoint {
    Vertex(usize),
    /// Interior point of an edge.
    OnEdge {
        edge: usize,
        height: f64,
    },
    /// On the ray above the top vertex.
    Ray {
        height: f64,
    },
    /// Positive height below the truncation, under the given deepest edge.
    Deep {
        above: usize,
        height: f64,
    },
    /// A Julia end (height 0) below the given edge.
    Julia {
        above: usize,
    },
}

impl TreePoint {
    pub fn raw_height(&self, tree: &Tree) -> f64 {
        match *self {
            TreePoint::Vertex(v) => tree.levels[tree.vertices[v].level],
            TreePoint::OnEdge { height, .. } | TreePoint::Ray { height } | TreePoint::Deep { height, .. } => {
                height
            }
            TreePoint::Julia { .. } => 0.0,
        }
    }

    /// Height in the tree's reported scale.
    pub fn height(&self, tree: &Tree) -> f64 {
        self.raw_height(tree) / tree.unit
    }
}

/// A tree with a marked point, and the plane point it came from.
#[derive(Clone, Debug)]
pub struct PointedTree {
    pub tree: Tree,
    pub point: TreePoint,
    /// Reported height `H(p)`.
    pub height: f64,
    pub generation: Option<usize>,
    pub z: Complex64,
}

impl PointedTree {
    /// `H(p) / M(f)`.
    pub fn normalized_height(&self) -> f64 {
        self.point.raw_height(&self.tree) / self.tree.max_rate
    }

    /// Tree distance from the base vertex to the marked point, in units of
    /// `M(f)`. Every point lies on the trunk or below `v0`, so this is the
    /// height difference.
    pub fn base_distance(&self) -> f64 {
        let m = self.tree.max_rate;
        (self.point.raw_height(&self.tree) - m).abs() / m
    }
}

/// Classifies a raw height `h` of a plane point `z` as a tree point.
pub(crate) fn place(loc: &mut Locator, z: Complex64, h: f64) -> Result<TreePoint, TreeError> {
    let tree = loc.tree();
    let levels = tree.levels.clone();
    let base = tree.base_level;
    let last = levels.len() - 1;
    if h > levels[0] * (1.0 + LEVEL_TOL) {
        return Ok(TreePoint::Ray { height: h });
    }
    if let Some(l) = levels.iter().position(|&x| (x - h).abs() <= LEVEL_TOL * x) {
        if l <= base {
            return Ok(TreePoint::Vertex(l));
        }
        let e = loc.locate(z, l - 1)?;
        return Ok(TreePoint::Vertex(e + 1));
    }
    if h < levels[last] {
        let above = loc.locate(z, last - 1)?;
        return Ok(if h <= 0.0 {
            TreePoint::Julia { above }
        } else {
            TreePoint::Deep { above, height: h }
        });
    }
    let j = levels.iter().rposition(|&x| x > h).expect("h below top");
    let edge = if j < base { j } else { loc.locate(z, j)? };
    Ok(TreePoint::OnEdge { edge, height: h })
}

/// The highest point of the image of the closed unit disk.
pub fn basepoint(poly: &Polynomial, tree: &Tree) -> Result<PointedTree, TreeError> {
    let esc = Escaper::new(poly);
    let (z, h) = circle_max(&esc, 4096);
    let mut loc = Locator::new(poly, tree);
    let point = place(&mut loc, z, h)?;
    Ok(PointedTree {
        tree: tree.clone(),
        point,
        height: h / tree.unit,
        generation: generation(tree, &point),
        z,
    })
}

/// `F(p)`.
pub fn tree_map(tree: &Tree, p: &TreePoint) -> Result<TreePoint, TreeError> {
    let d = tree.degree as f64;
    let top = tree.levels[0];
    let image_of = |e: usize| {
        tree.edges[e]
            .image
            .ok_or_else(|| TreeError::TruncationExceeded(format!("image of edge {e} is above the top")))
    };
    match *p {
        TreePoint::Julia { above } => Ok(TreePoint::Julia {
            above: image_of(above)?,
        }),
        TreePoint::Ray { height } => Ok(TreePoint::Ray { height: d * height }),
        TreePoint::Vertex(v) => {
            let h = d * tree.levels[tree.vertices[v].level];
            match tree.vertices[v].parent_edge {
                None => Ok(TreePoint::Ray { height: h }),
                Some(e) => match tree.edges[e].image {
                    Some(w) => Ok(TreePoint::Vertex(tree.edges[w].bottom)),
                    None if h > top * (1.0 + LEVEL_TOL) => Ok(TreePoint::Ray { height: h }),
                    None if (h - top).abs() <= LEVEL_TOL * top => Ok(TreePoint::Vertex(0)),
                    None => Err(TreeError::Inconsistent(format!("edge {e} has no image"))),
                },
            }
        }
        TreePoint::OnEdge { edge, height } => {
            let h = d * height;
            match tree.edges[edge].image {
                Some(w) => Ok(TreePoint::OnEdge { edge: w, height: h }),
                None if h > top => Ok(TreePoint::Ray { height: h }),
                None => Err(TreeError::Inconsistent(format!("edge {edge} has no image"))),
            }
        }
        TreePoint::Deep { .. } => Err(TreeError::TruncationExceeded(
            "image of a point below the truncation is not determined".into(),
        )),
    }
}

/// `N(p) = min{n >= 1 : H(F^n(p)) > H(v0)}`, or `None` for Julia ends.
pub fn generation(tree: &Tree, p: &TreePoint) -> Option<usize> {
    let h = p.raw_height(tree);
    if h <= 0.0 {
        return None;
    }
    let m = tree.max_rate * (1.0 + LEVEL_TOL);
    let d = tree.degree as f64;
    let mut n = 1;
    let mut x = h * d;
    while x <= m {
        x *= d;
        n += 1;
    }
    Some(n)
}

/// A connected component of `T \ B(p, r)`, described by the raw level at
/// which it is cut off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComponentHandle {
    /// Points below `level` on the branch through `edge`.
    Below { edge: usize, level: f64 },
    /// Everything outside the branch through `edge` below `level`;
    /// `edge = None` means the whole tree below `level` is removed.
    Unbounded { edge: Option<usize>, level: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub component: ComponentHandle,
    pub mass: BigRational,
}

/// Masses of the components of `T \ B(p, r)`, unbounded component included;
/// `r` is in the reported scale. Sorted by mass.
pub fn weights_at(
    tree: &Tree,
    measure: &TreeMeasure,
    p: &TreePoint,
    r: f64,
) -> Result<Vec<Weight>, TreeError> {
    if !(r > 0.0) {
        return Err(TreeError::InvalidArgument("radius must be positive".into()));
    }
    let rr = r * tree.unit;
    let h = p.raw_height(tree);
    let last = tree.levels.len() - 1;
    let check = |vertex: usize| -> Result<(), TreeError> {
        let hv = tree.levels[tree.vertices[vertex].level];
        if (hv - h).abs() <= 2.0 * rr {
            Err(TreeError::VertexInBall { vertex })
        } else {
            Ok(())
        }
    };
    let one = BigRational::one();
    let mut out = match *p {
        TreePoint::Vertex(v) => {
            let vert = &tree.vertices[v];
            if vert.level == last {
                return Err(TreeError::TruncationExceeded(format!(
                    "vertex {v} is at the truncation depth"
                )));
            }
            if let Some(e) = vert.parent_edge {
                check(tree.edges[e].top)?;
            }
            let mut w = Vec::new();
            for &c in &vert.child_edges {
                check(tree.edges[c].bottom)?;
                w.push(Weight {
                    component: ComponentHandle::Below {
                        edge: c,
                        level: h - rr,
                    },
                    mass: measure.mass(c).clone(),
                });
            }
            let up_mass = match vert.parent_edge {
                Some(e) => &one - measure.mass(e),
                None => BigRational::zero(),
            };
            w.push(Weight {
                component: ComponentHandle::Unbounded {
                    edge: vert.parent_edge,
                    level: h + rr,
                },
                mass: up_mass,
            });
            w
        }
        TreePoint::OnEdge { edge, height } => {
            check(tree.edges[edge].top)?;
            check(tree.edges[edge].bottom)?;
            let m = measure.mass(edge).clone();
            vec![
                Weight {
                    component: ComponentHandle::Below {
                        edge,
                        level: height - rr,
                    },
                    mass: m.clone(),
                },
                Weight {
                    component: ComponentHandle::Unbounded {
                        edge: Some(edge),
                        level: height + rr,
                    },
                    mass: one - m,
                },
            ]
        }
        TreePoint::Ray { height } => {
            check(0)?;
            vec![
                Weight {
                    component: ComponentHandle::Below {
                        edge: 0,
                        level: height - rr,
                    },
                    mass: one,
                },
                Weight {
                    component: ComponentHandle::Unbounded {
                        edge: None,
                        level: height + rr,
                    },
                    mass: BigRational::zero(),
                },
            ]
        }
        TreePoint::Deep { .. } | TreePoint::Julia { .. } => {
            return Err(TreeError::TruncationExceeded(
                "weights below the truncation are not resolved".into(),
            ))
        }
    };
    out.sort_by(|a, b| a.mass.cmp(&b.mass));
    Ok(out)
}

/// Masses only, in the order given.
pub fn weight_masses(w: &[Weight]) -> Vec<BigRational> {
    w.iter().map(|x| x.mass.clone()).collect()
}
