//! Limits of the maximal measures along a divergent family.
//!
//! Atoms export as
//! `{"case": ..., "degree": d, "generation": N, "atoms": [{"location": {"re": x, "im": y} | "inf", "mass": "n/d"}]}`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::polycore::{chordal_distance, roots_of_iterate, Polynomial, SpherePoint};
use crate::treebuild::{
    basepoint, build_tree, component_region, format_rational, generation, parse_rational,
    repelling_fixed_point, weights_at, ComponentHandle, PointedTree, Tree, TreeMeasure, TreePoint, LEVEL_TOL,
};

use super::family::FamilySpec;
use super::iso::truncation_isomorphic_pointed;
use super::regime::{classify_samples, MemberSample, RegimeCase, RegimeClassification};
use super::zeros::roots_in_component;
use super::DegenError;

/// Single-linkage threshold for merging atoms (chordal metric).
pub const ATOM_CLUSTER: f64 = 0.02;
/// Atoms closer than this to infinity are placed at infinity.
pub const INFINITY_SNAP: f64 = 0.05;
/// Normalized distance within which the limit height snaps to a vertex.
const VERTEX_SNAP: f64 = 0.02;

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub location: SpherePoint,
    pub mass: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitMeasure {
    pub case: RegimeCase,
    pub degree: usize,
    /// Generation `N(p)` of the limit basepoint; 0 when every atom has mass 1.
    pub generation: usize,
    pub atoms: Vec<Atom>,
    /// Normalized height of the limit basepoint (case 1).
    pub limit_height: Option<f64>,
    /// Valence of the vertex the basepoint converges to, if it is a vertex.
    pub basepoint_valence: Option<usize>,
}

impl LimitMeasure {
    pub fn total_mass(&self) -> BigRational {
        self.atoms
            .iter()
            .fold(BigRational::zero(), |acc, a| acc + &a.mass)
    }

    /// Whether every mass lies in `Z[1/d^N]` with `N` the generation witness.
    pub fn masses_in_ring(&self) -> bool {
        let dn = BigInt::from(self.degree).pow(self.generation as u32);
        self.atoms.iter().all(|a| (&dn % a.mass.denom()).is_zero())
    }
}

/// A schedule member with its tree and basepoint.
#[derive(Clone, Debug)]
pub struct MemberTree {
    pub t: f64,
    pub poly: Polynomial,
    pub pointed: PointedTree,
    pub measure: TreeMeasure,
}

impl MemberTree {
    pub fn build(t: f64, poly: Polynomial, depth: usize) -> Result<Self, DegenError> {
        let (tree, measure) = build_tree(&poly, depth)?;
        let pointed = basepoint(&poly, &tree)?;
        Ok(Self {
            t,
            poly,
            pointed,
            measure,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.pointed.tree
    }
}

#[derive(Clone, Debug)]
pub struct FamilyAnalysis {
    pub degree: usize,
    pub depth: usize,
    pub regime: RegimeClassification,
    pub members: Vec<(f64, Polynomial)>,
    /// Trees of the last two members (interior regime only).
    pub trees: Vec<MemberTree>,
}

impl FamilyAnalysis {
    pub fn last_member(&self) -> &(f64, Polynomial) {
        self.members.last().expect("classified families have members")
    }
}

pub fn analyze_family(spec: &FamilySpec, depth: usize) -> Result<FamilyAnalysis, DegenError> {
    analyze_members(spec.degree(), spec.members()?, depth)
}

/// As [`analyze_family`], for members already evaluated (and rescaled).
pub fn analyze_members(
    degree: usize,
    members: Vec<(f64, Polynomial)>,
    depth: usize,
) -> Result<FamilyAnalysis, DegenError> {
    let samples = members
        .iter()
        .map(|(t, f)| MemberSample::compute(*t, f))
        .collect::<Result<Vec<_>, _>>()?;
    let regime = classify_samples(samples)?;
    let mut trees = Vec::new();
    if regime.case == RegimeCase::InteriorBasepoint {
        for (t, f) in &members[members.len() - 2..] {
            trees.push(MemberTree::build(*t, f.clone(), depth)?);
        }
    }
    Ok(FamilyAnalysis {
        degree,
        depth,
        regime,
        members,
        trees,
    })
}

pub fn limit_measure(spec: &FamilySpec, depth: usize) -> Result<LimitMeasure, DegenError> {
    limit_measure_of(&analyze_family(spec, depth)?)
}

pub fn limit_measure_of(a: &FamilyAnalysis) -> Result<LimitMeasure, DegenError> {
    let one = BigRational::one();
    match a.regime.case {
        RegimeCase::JuliaBasepoint => Ok(LimitMeasure {
            case: a.regime.case,
            degree: a.degree,
            generation: 0,
            atoms: vec![Atom {
                location: SpherePoint::Infinity,
                mass: one,
            }],
            limit_height: None,
            basepoint_valence: None,
        }),
        RegimeCase::EscapingBasepoint => {
            let z = repelling_fixed_point(&a.last_member().1)?;
            Ok(LimitMeasure {
                case: a.regime.case,
                degree: a.degree,
                generation: 0,
                atoms: vec![Atom {
                    location: snap_infinity(SpherePoint::from_complex(z)),
                    mass: one,
                }],
                limit_height: None,
                basepoint_valence: None,
            })
        }
        RegimeCase::InteriorBasepoint => interior_limit(a),
    }
}

fn interior_limit(a: &FamilyAnalysis) -> Result<LimitMeasure, DegenError> {
    let h = a.regime.limit_height;
    let [prev, last] = match a.trees.as_slice() {
        [p, l] => [p, l],
        _ => {
            return Err(DegenError::NonStabilizedTree(
                "fewer than two member trees".into(),
            ))
        }
    };
    let p_prev = limit_point(prev.tree(), &prev.pointed.point, h)?;
    let p_last = limit_point(last.tree(), &last.pointed.point, h)?;
    let k = a.depth.min(prev.tree().base_level).min(last.tree().base_level);
    if truncation_isomorphic_pointed(prev.tree(), &p_prev, last.tree(), &p_last, k).is_none() {
        return Err(DegenError::NonStabilizedTree(format!(
            "pointed truncations T({k}) at t = {:e} and t = {:e} differ",
            prev.t, last.t
        )));
    }
    let atoms_prev = member_atoms(prev, &p_prev)?;
    let atoms_last = member_atoms(last, &p_last)?;
    if !atoms_agree(&atoms_prev, &atoms_last) {
        return Err(DegenError::NonStabilizedTree(format!(
            "atoms at t = {:e} and t = {:e} differ",
            prev.t, last.t
        )));
    }
    let tree = last.tree();
    let valence = match p_last {
        TreePoint::Vertex(v) => Some(tree.vertices[v].valence),
        _ => None,
    };
    Ok(LimitMeasure {
        case: RegimeCase::InteriorBasepoint,
        degree: a.degree,
        generation: generation(tree, &p_last).unwrap_or(0),
        atoms: atoms_last,
        limit_height: Some(p_last.raw_height(tree) / tree.max_rate),
        basepoint_valence: valence,
    })
}

/// The point of `tree` at normalized height `h` on the path of the member
/// basepoint `p`, snapped to a vertex when one is within [`VERTEX_SNAP`].
pub(crate) fn limit_point(tree: &Tree, p: &TreePoint, h: f64) -> Result<TreePoint, DegenError> {
    let m = tree.max_rate;
    let base = tree.base_level;
    let hp = p.raw_height(tree);
    let path_edge = match *p {
        TreePoint::Vertex(v) => tree.vertices[v].parent_edge,
        TreePoint::OnEdge { edge, .. } => Some(edge),
        TreePoint::Deep { above, .. } | TreePoint::Julia { above } => Some(above),
        TreePoint::Ray { .. } => None,
    };
    // Edge of `band` on the path from the top down to `p`, when determined.
    let on_path = |band: usize| -> Option<usize> {
        if band < base {
            return Some(band);
        }
        let e = path_edge?;
        (hp <= tree.levels[band + 1] * (1.0 + LEVEL_TOL) || tree.edges[e].band == band)
            .then(|| tree.ancestor(e, band))
            .flatten()
    };
    let nearest = (0..tree.levels.len())
        .map(|l| (l, (tree.levels[l] / m - h).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("levels are nonempty");
    if nearest.1 <= VERTEX_SNAP {
        let l = nearest.0;
        if l <= base {
            return Ok(TreePoint::Vertex(l));
        }
        return match on_path(l - 1) {
            Some(e) => Ok(TreePoint::Vertex(tree.edges[e].bottom)),
            None => Err(DegenError::NonStabilizedTree(format!(
                "limit vertex at level {l} is not on the basepoint path"
            ))),
        };
    }
    let raw = h * m;
    if raw > tree.levels[0] {
        return Ok(TreePoint::Ray { height: raw });
    }
    let last = tree.levels.len() - 1;
    if !(raw > tree.levels[last]) {
        return Err(DegenError::NonStabilizedTree(format!(
            "limit height {h} lies below the truncation"
        )));
    }
    let band = tree.levels.iter().rposition(|&x| x > raw).expect("raw below top");
    match on_path(band) {
        Some(edge) => Ok(TreePoint::OnEdge { edge, height: raw }),
        None => Err(DegenError::NonStabilizedTree(format!(
            "limit point at height {h} is not determined by the basepoint path"
        ))),
    }
}

/// Radius (raw) small enough that no vertex enters the doubled ball.
pub(crate) fn atom_radius(tree: &Tree, p: &TreePoint) -> f64 {
    let lv = &tree.levels;
    let gap = match *p {
        TreePoint::Vertex(v) => {
            let l = tree.vertices[v].level;
            let below = lv.get(l + 1).map_or(f64::INFINITY, |x| lv[l] - x);
            let above = if l > 0 { lv[l - 1] - lv[l] } else { f64::INFINITY };
            below.min(above)
        }
        TreePoint::OnEdge { edge, height } => {
            let b = tree.edges[edge].band;
            (lv[b] - height).min(height - lv[b + 1])
        }
        TreePoint::Ray { height } => height - lv[0],
        TreePoint::Deep { height, .. } => height,
        TreePoint::Julia { .. } => 0.0,
    };
    0.25 * gap
}

/// Atoms of one member: masses of the components of `T \ {p}`. A bounded
/// component is placed at the spherical centroid of the zeros of `f^n` it
/// contains, `n = N(p)`; these lie deep inside it. Without such zeros the
/// centroid of its region is used.
pub(crate) fn member_atoms(mt: &MemberTree, p: &TreePoint) -> Result<Vec<Atom>, DegenError> {
    let tree = mt.tree();
    let r = atom_radius(tree, p);
    let weights = weights_at(tree, &mt.measure, p, r / tree.unit)?;
    let n = generation(tree, p).unwrap_or(1).max(1);
    let roots = roots_of_iterate(&mt.poly, n)?.roots;
    let mut atoms = Vec::new();
    for w in weights {
        if !w.mass.is_positive() {
            continue;
        }
        let location = match w.component {
            ComponentHandle::Unbounded { .. } => SpherePoint::Infinity,
            c @ ComponentHandle::Below { .. } => {
                let (inside, _) = roots_in_component(&mt.poly, tree, &roots, &c)?;
                let centre = if inside.is_empty() {
                    let region = component_region(&mt.poly, tree, &c)?;
                    spherical_centroid(region.samples.iter().map(|&s| (s, 1.0)))
                } else {
                    spherical_centroid(inside.iter().map(|&z| (SpherePoint::Finite(z), 1.0)))
                };
                snap_infinity(centre)
            }
        };
        atoms.push(Atom {
            location,
            mass: w.mass,
        });
    }
    Ok(cluster_atoms(atoms, ATOM_CLUSTER))
}

fn atoms_agree(a: &[Atom], b: &[Atom]) -> bool {
    let mut used = vec![false; b.len()];
    a.len() == b.len()
        && a.iter().all(|x| {
            let hit = b.iter().enumerate().position(|(j, y)| {
                !used[j] && x.mass == y.mass && chordal_distance(x.location, y.location) <= ATOM_CLUSTER
            });
            hit.map(|j| used[j] = true).is_some()
        })
}

fn to_sphere(p: SpherePoint) -> [f64; 3] {
    match p {
        SpherePoint::Infinity => [0.0, 0.0, 1.0],
        SpherePoint::Finite(z) => {
            let n = z.norm_sqr();
            if !n.is_finite() {
                return [0.0, 0.0, 1.0];
            }
            [
                2.0 * z.re / (n + 1.0),
                2.0 * z.im / (n + 1.0),
                (n - 1.0) / (n + 1.0),
            ]
        }
    }
}

fn from_sphere(v: [f64; 3]) -> SpherePoint {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm == 0.0 {
        return SpherePoint::finite(0.0, 0.0);
    }
    let [x, y, z] = [v[0] / norm, v[1] / norm, v[2] / norm];
    if 1.0 - z < 1e-15 {
        return SpherePoint::Infinity;
    }
    SpherePoint::from_complex(Complex64::new(x, y) / (1.0 - z))
}

/// Weighted mean on the unit sphere, projected back radially.
fn spherical_centroid(points: impl Iterator<Item = (SpherePoint, f64)>) -> SpherePoint {
    let mut acc = [0.0; 3];
    for (p, w) in points {
        let s = to_sphere(p);
        for i in 0..3 {
            acc[i] += w * s[i];
        }
    }
    from_sphere(acc)
}

fn snap_infinity(p: SpherePoint) -> SpherePoint {
    if chordal_distance(p, SpherePoint::Infinity) < INFINITY_SNAP {
        SpherePoint::Infinity
    } else {
        p
    }
}

fn sort_key(p: &SpherePoint) -> (bool, f64, f64) {
    match p {
        SpherePoint::Finite(z) => (false, z.re, z.im),
        SpherePoint::Infinity => (true, 0.0, 0.0),
    }
}

/// Single-linkage clustering of atoms in the chordal metric; merged atoms
/// sit at the mass-weighted spherical centroid and carry the summed mass.
pub fn cluster_atoms(atoms: Vec<Atom>, threshold: f64) -> Vec<Atom> {
    let n = atoms.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if chordal_distance(atoms[i].location, atoms[j].location) <= threshold {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Atom> = groups
        .into_values()
        .map(|idx| {
            let mass = idx
                .iter()
                .fold(BigRational::zero(), |acc, &i| acc + &atoms[i].mass);
            let location = if idx.len() == 1 {
                atoms[idx[0]].location
            } else if idx.iter().any(|&i| atoms[i].location.is_infinity()) {
                SpherePoint::Infinity
            } else {
                let w = |i: usize| atoms[i].mass.to_f64().unwrap_or(1.0);
                snap_infinity(spherical_centroid(idx.iter().map(|&i| (atoms[i].location, w(i)))))
            };
            Atom { location, mass }
        })
        .collect();
    out.sort_by(|a, b| {
        sort_key(&a.location)
            .partial_cmp(&sort_key(&b.location))
            .expect("finite keys")
    });
    out
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LocationJson {
    Point { re: f64, im: f64 },
    Named(String),
}

#[derive(Serialize, Deserialize)]
struct AtomJson {
    location: LocationJson,
    mass: String,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    case: RegimeCase,
    degree: usize,
    generation: usize,
    atoms: Vec<AtomJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limit_height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    basepoint_valence: Option<usize>,
}

pub fn measure_to_json(m: &LimitMeasure) -> String {
    let j = MeasureJson {
        case: m.case,
        degree: m.degree,
        generation: m.generation,
        atoms: m
            .atoms
            .iter()
            .map(|a| AtomJson {
                location: match a.location {
                    SpherePoint::Infinity => LocationJson::Named("inf".into()),
                    SpherePoint::Finite(z) => LocationJson::Point { re: z.re, im: z.im },
                },
                mass: format_rational(&a.mass),
            })
            .collect(),
        limit_height: m.limit_height,
        basepoint_valence: m.basepoint_valence,
    };
    serde_json::to_string_pretty(&j).expect("measure serializes")
}

pub fn measure_from_json(s: &str) -> Result<LimitMeasure, DegenError> {
    let bad = |msg: String| DegenError::InvalidSpec(msg);
    let j: MeasureJson = serde_json::from_str(s).map_err(|e| bad(format!("atoms JSON: {e}")))?;
    let atoms = j
        .atoms
        .into_iter()
        .map(|a| {
            let location = match a.location {
                LocationJson::Point { re, im } => SpherePoint::finite(re, im),
                LocationJson::Named(n) if n == "inf" => SpherePoint::Infinity,
                LocationJson::Named(n) => return Err(bad(format!("unknown location {n:?}"))),
            };
            let mass = parse_rational(&a.mass).ok_or_else(|| bad(format!("bad mass {:?}", a.mass)))?;
            Ok(Atom { location, mass })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LimitMeasure {
        case: j.case,
        degree: j.degree,
        generation: j.generation,
        atoms,
        limit_height: j.limit_height,
        basepoint_valence: j.basepoint_valence,
    })
}
