use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::polycore::CriticalPoint;

use super::TreeError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    /// Index into `Tree::levels`.
    pub level: usize,
    pub parent_edge: Option<usize>,
    pub child_edges: Vec<usize>,
    pub valence: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    /// The edge spans heights `levels[band+1] .. levels[band]`.
    pub band: usize,
    pub top: usize,
    pub bottom: usize,
    pub degree: usize,
    pub generation: usize,
    pub image: Option<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// A Julia-set point in the component below this edge.
    pub sample: Complex64,
    pub trunk: bool,
}

/// Metrized simplicial tree with self-map, truncated at a finite depth.
///
/// Heights are stored in raw escape-rate units; reported heights are divided
/// by `unit` (1 for raw trees, `M(f)` for normalized ones).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub degree: usize,
    pub max_rate: f64,
    pub unit: f64,
    /// Vertex heights in raw units, strictly decreasing.
    pub levels: Vec<f64>,
    /// Level index of the base vertex `v0` (height `M(f)`).
    pub base_level: usize,
    pub depth: usize,
    /// `up[l]` is the level index of `d * levels[l]`, when within range.
    pub up: Vec<Option<usize>>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub base: usize,
    pub critical: Vec<(CriticalPoint, f64)>,
}

/// Exact masses per edge.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeMeasure {
    pub masses: Vec<BigRational>,
}

impl TreeMeasure {
    pub fn mass(&self, edge: usize) -> &BigRational {
        &self.masses[edge]
    }
}

impl Tree {
    pub fn is_normalized(&self) -> bool {
        self.unit != 1.0
    }

    /// Height of a level in the reported scale.
    pub fn level_height(&self, level: usize) -> f64 {
        self.levels[level] / self.unit
    }

    pub fn vertex_height(&self, v: usize) -> f64 {
        self.level_height(self.vertices[v].level)
    }

    pub fn edge_top_height(&self, e: usize) -> f64 {
        self.level_height(self.edges[e].band)
    }

    pub fn edge_bottom_height(&self, e: usize) -> f64 {
        self.level_height(self.edges[e].band + 1)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edge_top_height(e) - self.edge_bottom_height(e)
    }

    pub fn base_height(&self) -> f64 {
        self.level_height(self.base_level)
    }

    /// Deepest band with edges.
    pub fn deepest_band(&self) -> usize {
        self.edges.iter().map(|e| e.band).max().unwrap_or(0)
    }

    pub fn edges_in_band(&self, band: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.band == band)
    }

    /// The trunk edge in a band above the base, if any.
    pub fn trunk_edge(&self, band: usize) -> Option<usize> {
        (band < self.base_level).then_some(band)
    }

    /// Ancestor of `e` lying in `band` (which must not be below `e`).
    pub fn ancestor(&self, e: usize, band: usize) -> Option<usize> {
        let mut cur = e;
        while self.edges[cur].band > band {
            cur = self.edges[cur].parent?;
        }
        (self.edges[cur].band == band).then_some(cur)
    }

    /// Product of local degrees along the orbit `e, F(e), ..., F^{n-1}(e)`.
    pub fn iterate_degree(&self, e: usize, n: usize) -> Result<u64, TreeError> {
        let mut cur = e;
        let mut prod = 1u64;
        for step in 0..n {
            prod *= self.edges[cur].degree as u64;
            if step + 1 < n {
                cur = self.edges[cur].image.ok_or_else(|| {
                    TreeError::TruncationExceeded(format!("image of edge {cur} is above the top"))
                })?;
            }
        }
        Ok(prod)
    }

    /// `F^n(e)`.
    pub fn edge_iterate(&self, e: usize, n: usize) -> Result<usize, TreeError> {
        let mut cur = e;
        for _ in 0..n {
            cur = self.edges[cur].image.ok_or_else(|| {
                TreeError::TruncationExceeded(format!("image of edge {cur} is above the top"))
            })?;
        }
        Ok(cur)
    }

    /// Least `n >= 1` with `d^n · (bottom level of e) >= M`.
    pub(crate) fn edge_generation(up: &[Option<usize>], base: usize, band: usize) -> usize {
        let mut l = band + 1;
        let mut n = 0;
        loop {
            n += 1;
            match up.get(l).copied().flatten() {
                Some(next) => l = next,
                None => return n,
            }
            if l <= base {
                return n;
            }
        }
    }

    /// The measure `deg(e, F^N) / d^N` with `N = N(e)`.
    pub fn measure(&self) -> Result<TreeMeasure, TreeError> {
        let d = BigInt::from(self.degree);
        let mut masses = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let n = e.generation;
            let deg = self.iterate_degree(e.id, n)?;
            let mut denom = BigInt::one();
            for _ in 0..n {
                denom *= &d;
            }
            masses.push(BigRational::new(BigInt::from(deg), denom));
        }
        Ok(TreeMeasure { masses })
    }

    /// A copy with heights reported in units of `M(f)`.
    pub fn normalize(&self) -> Tree {
        let mut t = self.clone();
        t.unit = self.max_rate;
        t
    }

    /// Edges crossing the reported height `t` (which must avoid vertex heights).
    pub fn edges_at_height(&self, t: f64) -> Vec<usize> {
        self.edges
            .iter()
            .filter(|e| self.edge_bottom_height(e.id) < t && t < self.edge_top_height(e.id))
            .map(|e| e.id)
            .collect()
    }

    /// Sum of masses of the edges crossing height `t`.
    pub fn height_cut_mass(&self, measure: &TreeMeasure, t: f64) -> BigRational {
        self.edges_at_height(t)
            .into_iter()
            .fold(BigRational::zero(), |acc, e| acc + measure.mass(e))
    }
}

/// `((d-1)/d)^n` exactly.
pub fn mass_bound(d: usize, n: usize) -> BigRational {
    let num = BigInt::from(d - 1).pow(n as u32);
    let den = BigInt::from(d).pow(n as u32);
    BigRational::new(num, den)
}

/// Formats a rational as `num/denom`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `num/denom` (or a bare integer).
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            (!b.is_zero()).then(|| BigRational::new(a, b))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text() {
        let r = BigRational::new(BigInt::from(2), BigInt::from(6));
        assert_eq!(format_rational(&r), "1/3");
        assert_eq!(parse_rational("1/3"), Some(r));
        assert_eq!(format_rational(&BigRational::one()), "1/1");
        assert_eq!(
            parse_rational("4"),
            Some(BigRational::from_integer(BigInt::from(4)))
        );
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn bound_values() {
        assert_eq!(format_rational(&mass_bound(3, 2)), "4/9");
        assert_eq!(format_rational(&mass_bound(2, 3)), "1/8");
    }
}
