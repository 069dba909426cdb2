use serde::{Deserialize, Serialize};

use super::tree::{format_rational, parse_rational, Tree, TreeMeasure};
use super::TreeError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportVertex {
    pub id: usize,
    pub height: f64,
    pub valence: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportEdge {
    pub id: usize,
    pub top: usize,
    pub bottom: usize,
    pub degree: usize,
    pub generation: usize,
    pub mass: String,
}

/// The tree file format: vertices and edges in id order, base vertex id,
/// and the height scale (`raw` or `normalized`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeExport {
    pub vertices: Vec<ExportVertex>,
    pub edges: Vec<ExportEdge>,
    pub base: usize,
    pub scale: String,
}

impl TreeExport {
    pub fn new(tree: &Tree, measure: &TreeMeasure) -> Self {
        Self {
            vertices: tree
                .vertices
                .iter()
                .map(|v| ExportVertex {
                    id: v.id,
                    height: tree.vertex_height(v.id),
                    valence: v.valence,
                })
                .collect(),
            edges: tree
                .edges
                .iter()
                .map(|e| ExportEdge {
                    id: e.id,
                    top: e.top,
                    bottom: e.bottom,
                    degree: e.degree,
                    generation: e.generation,
                    mass: format_rational(measure.mass(e.id)),
                })
                .collect(),
            base: tree.base,
            scale: if tree.is_normalized() { "normalized" } else { "raw" }.to_string(),
        }
    }

    /// Agreement with an in-memory tree: structure and masses exactly,
    /// heights to 12 significant digits.
    pub fn matches(&self, tree: &Tree, measure: &TreeMeasure) -> bool {
        let other = TreeExport::new(tree, measure);
        let heights_ok = self.vertices.len() == other.vertices.len()
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| {
                a.id == b.id
                    && a.valence == b.valence
                    && (a.height - b.height).abs() <= 1e-12 * b.height.abs().max(1e-300)
            });
        let masses_ok = self.edges.len() == other.edges.len()
            && self.edges.iter().zip(&other.edges).all(|(a, b)| {
                a.id == b.id
                    && a.top == b.top
                    && a.bottom == b.bottom
                    && a.degree == b.degree
                    && a.generation == b.generation
                    && parse_rational(&a.mass) == Some(measure.mass(b.id).clone())
            });
        heights_ok && masses_ok && self.base == other.base && self.scale == other.scale
    }
}

/// Pretty-printed JSON for a tree and its measure.
pub fn tree_to_json(tree: &Tree, measure: &TreeMeasure) -> String {
    serde_json::to_string_pretty(&TreeExport::new(tree, measure)).expect("serializable")
}

pub fn tree_from_json(text: &str) -> Result<TreeExport, TreeError> {
    let t: TreeExport =
        serde_json::from_str(text).map_err(|e| TreeError::InvalidArgument(format!("tree JSON: {e}")))?;
    for e in &t.edges {
        if parse_rational(&e.mass).is_none() {
            return Err(TreeError::InvalidArgument(format!(
                "edge {}: malformed mass {:?}",
                e.id, e.mass
            )));
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::super::build::build_tree;
    use super::*;
    use crate::polycore::Polynomial;

    #[test]
    fn json_round_trip() {
        let f = Polynomial::from_real(&[1.0, 0.0, -6.0]).unwrap();
        let (t, m) = build_tree(&f, 2).unwrap();
        for tree in [t.clone(), t.normalize()] {
            let text = tree_to_json(&tree, &m);
            let back = tree_from_json(&text).unwrap();
            assert!(back.matches(&tree, &m));
            assert_eq!(text, tree_to_json(&tree, &m));
        }
        let text = tree_to_json(&t, &m);
        assert!(text.contains("\"mass\": \"1/2\""));
        assert!(tree_from_json(&text.replace("\"1/2\"", "\"x\"")).is_err());
    }
}
