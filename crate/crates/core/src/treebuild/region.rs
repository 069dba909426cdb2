use num_complex::Complex64;

use crate::polycore::{chordal_distance, Escaper, Polynomial, SpherePoint};

use super::grid::{adaptive_flood, Flood};
use super::points::ComponentHandle;
use super::tree::Tree;
use super::TreeError;

/// Grid approximation of the plane region over a tree component.
#[derive(Clone, Debug)]
pub struct Region {
    /// Boundary samples of the region (plus `Infinity` when unbounded).
    pub samples: Vec<SpherePoint>,
    /// Bounding box of the bounded part: the component itself, or the
    /// removed compact set for unbounded regions.
    pub bbox: (Complex64, Complex64),
    pub chordal_diameter: f64,
    pub contains_infinity: bool,
    pub resolution: usize,
    pub cell_size: f64,
}

impl Region {
    /// Chordal distance from `z` to the nearest sample.
    pub fn distance_to(&self, z: SpherePoint) -> f64 {
        self.samples
            .iter()
            .map(|&s| chordal_distance(s, z))
            .fold(f64::INFINITY, f64::min)
    }
}

const MAX_SAMPLES: usize = 400;

fn subsample(points: Vec<Complex64>, max: usize) -> Vec<Complex64> {
    if points.len() <= max {
        return points;
    }
    let step = points.len() as f64 / max as f64;
    (0..max).map(|k| points[(k as f64 * step) as usize]).collect()
}

fn diameter(points: &[SpherePoint]) -> f64 {
    let mut best = 0.0_f64;
    for (i, &a) in points.iter().enumerate() {
        for &b in &points[i + 1..] {
            best = best.max(chordal_distance(a, b));
        }
    }
    best
}

/// Sphere points spread evenly (Fibonacci lattice), projected to the plane.
fn sphere_lattice(n: usize) -> Vec<Complex64> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .filter_map(|k| {
            let y = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - y * y).sqrt();
            let th = golden * k as f64;
            // Stereographic projection from the north pole (y = 1).
            let s = 1.0 - y;
            (s > 1e-12).then(|| Complex64::new(r * th.cos(), r * th.sin()) / s)
        })
        .collect()
}

fn flood_for(esc: &Escaper, tree: &Tree, edge: usize, level: f64, n: usize) -> Result<Flood, TreeError> {
    if !(level > 0.0) {
        return Err(TreeError::InvalidArgument(
            "component level must be positive".into(),
        ));
    }
    let seed = tree.edges[edge].sample;
    let hint = (level.exp() * 2.0).min(esc.radius());
    adaptive_flood(esc, seed, level, hint, n)
}

/// Region of the plane collapsing onto the component `c`.
pub fn component_region(poly: &Polynomial, tree: &Tree, c: &ComponentHandle) -> Result<Region, TreeError> {
    let esc = Escaper::new(poly);
    let n = 513;
    match *c {
        ComponentHandle::Below { edge, level } => {
            let fl = flood_for(&esc, tree, edge, level, n)?;
            let pts: Vec<SpherePoint> = subsample(fl.boundary_nodes(), MAX_SAMPLES)
                .into_iter()
                .map(SpherePoint::Finite)
                .collect();
            Ok(Region {
                chordal_diameter: diameter(&pts),
                samples: pts,
                bbox: fl.bounding_box(),
                contains_infinity: false,
                resolution: fl.n,
                cell_size: fl.cell_size(),
            })
        }
        ComponentHandle::Unbounded { edge, level } => {
            // The removed set is the component below `level` around the branch.
            let anchor = edge.unwrap_or(0);
            let fl = flood_for(&esc, tree, anchor, level, n)?;
            let mut pts: Vec<SpherePoint> = subsample(fl.boundary_nodes(), MAX_SAMPLES)
                .into_iter()
                .map(SpherePoint::Finite)
                .collect();
            for z in sphere_lattice(256) {
                if fl.contains(z) != Some(true) {
                    pts.push(SpherePoint::Finite(z));
                }
            }
            pts.push(SpherePoint::Infinity);
            Ok(Region {
                chordal_diameter: diameter(&pts),
                samples: pts,
                bbox: fl.bounding_box(),
                contains_infinity: true,
                resolution: fl.n,
                cell_size: fl.cell_size(),
            })
        }
    }
}
