//! Tree construction by pulling components back along `f`, and the locator
//! that places points of the plane on tree edges.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::polycore::{polynomial_roots, preimages, EscapeData, Escaper, Polynomial};

use super::grid::{adaptive_flood, Flood};
use super::tree::{Edge, Tree, TreeMeasure, Vertex};
use super::TreeError;

/// Grid sizes and sampling density for tree construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    pub grid: usize,
    pub max_grid: usize,
    pub circle_samples: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            grid: 257,
            max_grid: 2049,
            circle_samples: 4096,
        }
    }
}

/// Relative tolerance for identifying two heights.
pub const LEVEL_TOL: f64 = 1e-8;

/// Maximum of G on the unit circle and a point where it is attained.
pub fn circle_max(esc: &Escaper, samples: usize) -> (Complex64, f64) {
    let g = |t: f64| esc.rate(Complex64::from_polar(1.0, t), 1e-13);
    let step = 2.0 * std::f64::consts::PI / samples as f64;
    let (mut best_t, mut best) = (0.0, g(0.0));
    for k in 1..samples {
        let t = k as f64 * step;
        let v = g(t);
        if v > best {
            best = v;
            best_t = t;
        }
    }
    // Golden-section refinement in the bracketing interval.
    let (mut a, mut b) = (best_t - step, best_t + step);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..60 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    let v = g(t);
    if v >= best {
        (Complex64::from_polar(1.0, t), v)
    } else {
        (Complex64::from_polar(1.0, best_t), best)
    }
}

/// Sorted heights `d^j G(c)` in `(0, top]`, merged at relative tolerance,
/// keeping enough levels for `depth` bands below the base.
pub(crate) fn compute_levels(d: usize, rates: &[f64], m: f64, top: f64, depth: usize) -> Vec<f64> {
    let df = d as f64;
    let low = m / df.powi(depth as i32 + 1) * (1.0 - 1e-9);
    let mut raw: Vec<f64> = Vec::new();
    for &g in rates {
        if !(g > m * 1e-12) {
            continue;
        }
        // Climb to the largest d^j g <= top, then descend.
        let mut h = g;
        while h * df <= top * (1.0 + 1e-12) {
            h *= df;
        }
        while h > g * (1.0 + 1e-12) && h > top * (1.0 + 1e-12) {
            h /= df;
        }
        while h >= low {
            raw.push(h);
            h /= df;
        }
    }
    raw.sort_by(|a, b| b.total_cmp(a));
    let mut levels: Vec<f64> = Vec::new();
    for h in raw {
        if let Some(&last) = levels.last() {
            if (last - h).abs() <= LEVEL_TOL * last {
                continue;
            }
        }
        levels.push(h);
    }
    levels
}

pub(crate) fn level_map(levels: &[f64], d: usize) -> Vec<Option<usize>> {
    levels
        .iter()
        .map(|&h| {
            let target = h * d as f64;
            levels
                .iter()
                .position(|&x| (x - target).abs() <= 10.0 * LEVEL_TOL * target)
        })
        .collect()
}

/// Places points of the plane on edges of a built (or growing) tree.
pub struct Locator {
    esc: Escaper,
    tree: Tree,
    floods: HashMap<usize, Flood>,
    memo: HashMap<(u64, u64), Vec<usize>>,
    grid: usize,
    max_grid: usize,
}

fn key(z: Complex64) -> (u64, u64) {
    (z.re.to_bits(), z.im.to_bits())
}

impl Locator {
    pub fn new(poly: &Polynomial, tree: &Tree) -> Self {
        let opts = BuildOptions::default();
        Self::from_parts(Escaper::new(poly), tree.clone(), opts.grid, opts.max_grid)
    }

    fn from_parts(esc: Escaper, tree: Tree, grid: usize, max_grid: usize) -> Self {
        Self {
            esc,
            tree,
            floods: HashMap::new(),
            memo: HashMap::new(),
            grid,
            max_grid,
        }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn escaper(&self) -> &Escaper {
        &self.esc
    }

    pub fn rate(&self, z: Complex64) -> f64 {
        self.esc.rate(z, 1e-13)
    }

    /// Mid height (raw) of a band.
    pub fn mid_level(&self, band: usize) -> f64 {
        0.5 * (self.tree.levels[band] + self.tree.levels[band + 1])
    }

    /// Edge of `band` whose component contains `x`; needs `G(x) < levels[band]`.
    pub fn locate(&mut self, x: Complex64, band: usize) -> Result<usize, TreeError> {
        self.locate_with(x, band, None)
    }

    /// As [`Locator::locate`], given the edge containing `f(x)` in the image band.
    pub(crate) fn locate_with(
        &mut self,
        x: Complex64,
        band: usize,
        image: Option<usize>,
    ) -> Result<usize, TreeError> {
        let base = self.tree.base_level;
        if band < base {
            return Ok(band);
        }
        if band >= self.tree.levels.len() - 1 {
            return Err(TreeError::TruncationExceeded(format!(
                "band {band} is below the truncation"
            )));
        }
        let k = key(x);
        let mut path = self.memo.remove(&k).unwrap_or_default();
        let res = self.extend_path(x, band, image, &mut path);
        self.memo.insert(k, path);
        res
    }

    fn extend_path(
        &mut self,
        x: Complex64,
        band: usize,
        image: Option<usize>,
        path: &mut Vec<usize>,
    ) -> Result<usize, TreeError> {
        let base = self.tree.base_level;
        let mut gx: Option<f64> = None;
        while path.len() <= band - base {
            let j = base + path.len();
            let parent = if j == base { base - 1 } else { path[j - base - 1] };
            let children = self.tree.edges[parent].children.clone();
            let chosen = match children.len() {
                0 => {
                    return Err(TreeError::TruncationExceeded(format!(
                        "edge {parent} has no children"
                    )))
                }
                1 => children[0],
                _ => {
                    let jp = self.tree.up[j]
                        .ok_or_else(|| TreeError::Inconsistent(format!("band {j} has no image band")))?;
                    let w = match image {
                        Some(w0) => self.tree.ancestor(w0, jp).ok_or_else(|| {
                            TreeError::Inconsistent(format!("edge {w0} has no ancestor in band {jp}"))
                        })?,
                        None => {
                            let fx = self.esc.poly().eval(x);
                            self.locate_with(fx, jp, None)?
                        }
                    };
                    let cands: Vec<usize> = children
                        .iter()
                        .copied()
                        .filter(|&c| self.tree.edges[c].image == Some(w))
                        .collect();
                    match cands.len() {
                        0 => {
                            return Err(TreeError::Inconsistent(format!(
                                "no child of edge {parent} maps to edge {w}"
                            )))
                        }
                        1 => cands[0],
                        _ => {
                            let g = *gx.get_or_insert_with(|| self.esc.rate(x, 1e-13));
                            self.geometric(x, g, j, &cands)?
                        }
                    }
                }
            };
            path.push(chosen);
        }
        Ok(path[band - base])
    }

    /// Cached flood of the component below `edge` at its band's mid level.
    pub fn edge_flood(&mut self, edge: usize, min_n: usize) -> Result<&Flood, TreeError> {
        let stale = self.floods.get(&edge).is_none_or(|f| f.n < min_n);
        if stale {
            let e = &self.tree.edges[edge];
            let level = self.mid_level(e.band);
            let hint = e
                .parent
                .and_then(|p| self.floods.get(&p))
                .map(|f| f.extent())
                .unwrap_or(self.esc.radius());
            let fl = adaptive_flood(&self.esc, e.sample, level, hint, min_n)?;
            self.floods.insert(edge, fl);
        }
        Ok(&self.floods[&edge])
    }

    fn geometric(&mut self, x: Complex64, g: f64, band: usize, cands: &[usize]) -> Result<usize, TreeError> {
        let lam = self.mid_level(band);
        let mut n = self.grid;
        let mut hint = 0.0_f64;
        loop {
            // Per-candidate floods, refined until they separate the samples.
            let mut separated = true;
            for &c in cands {
                let fl = self.edge_flood(c, n)?.clone();
                hint = hint.max(fl.extent());
                for &o in cands {
                    if o != c && fl.contains(self.tree.edges[o].sample) == Some(true) {
                        separated = false;
                    }
                }
            }
            if separated {
                if g < lam {
                    let hits: Vec<usize> = cands
                        .iter()
                        .copied()
                        .filter(|&c| self.floods[&c].contains(x) == Some(true))
                        .collect();
                    if hits.len() == 1 {
                        return Ok(hits[0]);
                    }
                }
                let level = if g < lam {
                    lam
                } else {
                    0.5 * (g + self.tree.levels[band])
                };
                let fl = adaptive_flood(&self.esc, x, level, hint.max(1e-300) * 2.0, n)?;
                let hits: Vec<usize> = cands
                    .iter()
                    .copied()
                    .filter(|&c| fl.contains(self.tree.edges[c].sample) == Some(true))
                    .collect();
                if hits.len() == 1 {
                    return Ok(hits[0]);
                }
            }
            if n * 2 > self.max_grid {
                return Err(TreeError::ResolutionExhausted(format!(
                    "cannot place {x} among {} components in band {band}",
                    cands.len()
                )));
            }
            n = 2 * n - 1;
        }
    }
}

/// Builds the tree truncated `depth` levels below the base, with its measure.
pub fn build_tree(poly: &Polynomial, depth: usize) -> Result<(Tree, TreeMeasure), TreeError> {
    build_tree_with(poly, depth, BuildOptions::default())
}

pub fn build_tree_with(
    poly: &Polynomial,
    depth: usize,
    opts: BuildOptions,
) -> Result<(Tree, TreeMeasure), TreeError> {
    let data = EscapeData::compute(poly)?;
    let m = data.max_rate;
    if !(m > 1e-9) {
        return Err(TreeError::ConnectedJuliaSet { max_rate: m });
    }
    let esc = Escaper::new(poly);
    let (_, h_base) = circle_max(&esc, opts.circle_samples);
    let d = poly.degree();
    let df = d as f64;
    let mut top = m * df.powi(depth.max(2) as i32);
    while top < df * h_base * (1.0 + 1e-9) {
        top *= df;
    }
    let rates: Vec<f64> = data.critical.iter().map(|c| c.1).collect();
    let levels = compute_levels(d, &rates, m, top, depth);
    let base = levels
        .iter()
        .position(|&h| (h - m).abs() <= LEVEL_TOL * m)
        .ok_or_else(|| TreeError::Inconsistent("maximal rate missing from levels".into()))?;
    if levels.len() < base + depth + 1 {
        return Err(TreeError::Inconsistent("too few levels below the base".into()));
    }
    let mut levels = levels;
    levels.truncate(base + depth + 1);
    let up = level_map(&levels, d);

    let julia = repelling_fixed_point(poly)?;
    let mut n = opts.grid;
    loop {
        let skeleton = Tree {
            degree: d,
            max_rate: m,
            unit: 1.0,
            levels: levels.clone(),
            base_level: base,
            depth,
            up: up.clone(),
            vertices: Vec::new(),
            edges: Vec::new(),
            base,
            critical: data.critical.clone(),
        };
        let mut loc = Locator::from_parts(esc.clone(), skeleton, n, opts.max_grid);
        match grow(&mut loc, julia) {
            Ok(()) => {
                let tree = finish(loc.tree);
                let measure = tree.measure()?;
                return Ok((tree, measure));
            }
            Err(TreeError::Inconsistent(_)) | Err(TreeError::ResolutionExhausted(_))
                if n * 2 <= opts.max_grid =>
            {
                n = 2 * n - 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// The fixed point with the largest multiplier; its orbit is bounded, so it
/// lies in every component of every sublevel set.
pub fn repelling_fixed_point(poly: &Polynomial) -> Result<Complex64, TreeError> {
    let mut c = poly.coeffs_lowest_first().to_vec();
    c[1] -= Complex64::new(1.0, 0.0);
    let fixed = polynomial_roots(&c)?;
    fixed
        .into_iter()
        .map(|z| (z, poly.eval_with_derivative(z).1.norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|x| x.0)
        .ok_or_else(|| TreeError::Inconsistent("no fixed points".into()))
}

fn grow(loc: &mut Locator, julia: Complex64) -> Result<(), TreeError> {
    let base = loc.tree.base_level;
    let d = loc.tree.degree;
    let depth = loc.tree.depth;
    loc.tree.vertices.push(Vertex {
        id: 0,
        level: 0,
        parent_edge: None,
        child_edges: Vec::new(),
        valence: 0,
    });
    for j in 0..base {
        loc.tree.edges.push(Edge {
            id: j,
            band: j,
            top: j,
            bottom: j + 1,
            degree: d,
            generation: 1,
            image: loc.tree.up[j],
            parent: j.checked_sub(1),
            children: if j + 1 < base { vec![j + 1] } else { Vec::new() },
            sample: julia,
            trunk: true,
        });
        loc.tree.vertices.push(Vertex {
            id: j + 1,
            level: j + 1,
            parent_edge: Some(j),
            child_edges: Vec::new(),
            valence: 0,
        });
    }
    let crit: Vec<(Complex64, usize, f64)> = loc
        .tree
        .critical
        .iter()
        .map(|(c, g)| (c.location, c.multiplicity, *g))
        .collect();
    for i in base..base + depth {
        build_band(loc, i, &crit)?;
    }
    Ok(())
}

struct NewEdge {
    parent: usize,
    degree: usize,
    image: usize,
    sample: Complex64,
}

fn build_band(loc: &mut Locator, i: usize, crit: &[(Complex64, usize, f64)]) -> Result<(), TreeError> {
    let parents: Vec<usize> = loc.tree.edges_in_band(i - 1).map(|e| e.id).collect();
    let poly = loc.esc.poly().clone();
    let level_i = loc.tree.levels[i];
    let ip = loc.tree.up[i].ok_or_else(|| TreeError::Inconsistent(format!("band {i} has no image")))?;

    // Roots over each child W of each image edge, assigned to parents.
    let mut images: Vec<usize> = Vec::new();
    for &u in &parents {
        let fu = loc.tree.edges[u]
            .image
            .ok_or_else(|| TreeError::TruncationExceeded(format!("edge {u} maps above the top")))?;
        if !images.contains(&fu) {
            images.push(fu);
        }
    }
    let mut over: HashMap<(usize, usize), Vec<Complex64>> = HashMap::new();
    for &fu in &images {
        let ws = loc.tree.edges[fu].children.clone();
        if ws.is_empty() {
            return Err(TreeError::Inconsistent(format!(
                "image edge {fu} has no children"
            )));
        }
        for w in ws {
            let y = loc.tree.edges[w].sample;
            for r in preimages(&poly, y)? {
                let u = loc.locate_with(r, i - 1, Some(fu))?;
                over.entry((u, w)).or_default().push(r);
            }
        }
    }

    // Critical points strictly inside the band-i components.
    let mut crit_at: Vec<(usize, usize, Complex64, usize)> = Vec::new(); // (U, W, c, mult)
    for &(c, mult, g) in crit {
        if g >= level_i * (1.0 - 1e-7) {
            continue;
        }
        let u = loc.locate(c, i - 1)?;
        let w = loc.locate(poly.eval(c), ip)?;
        crit_at.push((u, w, c, mult));
    }

    let mut created: Vec<NewEdge> = Vec::new();
    for &u in &parents {
        let deg_u = loc.tree.edges[u].degree;
        let fu = loc.tree.edges[u].image.expect("checked");
        for w in loc.tree.edges[fu].children.clone() {
            let roots = over.get(&(u, w)).cloned().unwrap_or_default();
            if roots.len() != deg_u {
                return Err(TreeError::Inconsistent(format!(
                    "edge {u} has {} preimages over edge {w}, expected {deg_u}",
                    roots.len()
                )));
            }
            let cs: Vec<(Complex64, usize)> = crit_at
                .iter()
                .filter(|x| x.0 == u && x.1 == w)
                .map(|x| (x.2, x.3))
                .collect();
            for (degree, sample) in split_preimages(loc, i, &roots, &cs)? {
                created.push(NewEdge {
                    parent: u,
                    degree,
                    image: w,
                    sample,
                });
            }
        }
    }

    for ne in created {
        let id = loc.tree.edges.len();
        let top = loc.tree.edges[ne.parent].bottom;
        loc.tree.edges.push(Edge {
            id,
            band: i,
            top,
            bottom: id + 1,
            degree: ne.degree,
            generation: Tree::edge_generation(&loc.tree.up, loc.tree.base_level, i),
            image: Some(ne.image),
            parent: Some(ne.parent),
            children: Vec::new(),
            sample: ne.sample,
            trunk: false,
        });
        loc.tree.edges[ne.parent].children.push(id);
        loc.tree.vertices.push(Vertex {
            id: id + 1,
            level: i + 1,
            parent_edge: Some(id),
            child_edges: Vec::new(),
            valence: 0,
        });
    }
    Ok(())
}

/// Splits the preimages in one parent over one image edge into child
/// components: one per group of critical points, and singletons otherwise.
/// Returns `(degree, sample)` per child.
fn split_preimages(
    loc: &mut Locator,
    band: usize,
    roots: &[Complex64],
    crit: &[(Complex64, usize)],
) -> Result<Vec<(usize, Complex64)>, TreeError> {
    if crit.is_empty() {
        return Ok(roots.iter().map(|&r| (1, r)).collect());
    }
    if crit.len() == 1 && roots.len() == 1 + crit[0].1 {
        return Ok(vec![(roots.len(), roots[0])]);
    }
    let lam = loc.mid_level(band);
    let mut groups: Vec<(usize, Flood)> = Vec::new(); // (total multiplicity, flood)
    for &(c, mult) in crit {
        if let Some(g) = groups.iter_mut().find(|g| g.1.contains(c) == Some(true)) {
            g.0 += mult;
            continue;
        }
        let hint = roots.iter().map(|r| (r - c).norm()).fold(0.0, f64::max) * 1.2;
        let fl = adaptive_flood(&loc.esc, c, lam, hint, loc.grid)?;
        groups.push((mult, fl));
    }
    let mut members: Vec<Vec<Complex64>> = vec![Vec::new(); groups.len()];
    let mut singles: Vec<Complex64> = Vec::new();
    for &r in roots {
        let hits: Vec<usize> = (0..groups.len())
            .filter(|&g| groups[g].1.contains(r) == Some(true))
            .collect();
        match hits.len() {
            0 => singles.push(r),
            1 => members[hits[0]].push(r),
            _ => {
                return Err(TreeError::Inconsistent(
                    "a preimage lies in two critical components".into(),
                ))
            }
        }
    }
    let mut out = Vec::new();
    for (g, mem) in groups.iter().zip(&members) {
        if mem.len() != 1 + g.0 {
            return Err(TreeError::Inconsistent(format!(
                "critical component holds {} preimages, expected {}",
                mem.len(),
                1 + g.0
            )));
        }
        out.push((mem.len(), mem[0]));
    }
    out.extend(singles.into_iter().map(|r| (1, r)));
    Ok(out)
}

fn finish(mut tree: Tree) -> Tree {
    let n = tree.vertices.len();
    for v in 0..n {
        let children = match tree.vertices[v].parent_edge {
            None => vec![0],
            Some(e) => tree.edges[e].children.clone(),
        };
        let up = 1; // parent edge, or the ray to infinity at the top
        tree.vertices[v].valence = up + children.len();
        tree.vertices[v].child_edges = children;
    }
    tree
}
