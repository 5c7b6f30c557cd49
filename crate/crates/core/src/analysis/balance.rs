//! Balance equations along maximal paths of the positively weighted forest.
//!
//! With constant limit curvature κ, multiplying each edge equation of a path
//! `u_0 … u_l` by its weight and alternating signs telescopes to
//! `Σ_i (-1)^{i+1} c_i w_i = 0` with `c_i = κ`, except that a terminal edge
//! whose outer endpoint is a leaf of the tree uses `κ - 1`.

use crate::tree::{EdgeId, VertexId, WeightedTree};

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalKind {
    /// Outer endpoint is a leaf of the tree.
    Leaf,
    /// Outer endpoint has only cutting edges besides the path edge.
    Internal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalancedPathSystem {
    pub path: Vec<EdgeId>,
    pub terminals: (TerminalKind, TerminalKind),
    pub kappa: f64,
    /// Signed coefficient per path edge.
    pub coefficients: Vec<f64>,
    /// Set when κ = 0, outside the negative-curvature setting the
    /// equations are derived for.
    pub extrapolated: bool,
}

impl BalancedPathSystem {
    /// `|Σ c_i w_i|` for a full per-edge weight vector.
    pub fn residual(&self, weights: &[f64]) -> f64 {
        self.path
            .iter()
            .zip(&self.coefficients)
            .map(|(e, c)| c * weights[e.0])
            .sum::<f64>()
            .abs()
    }

    /// Residual divided by `Σ |c_i| w_i`.
    pub fn relative_residual(&self, weights: &[f64]) -> f64 {
        let scale: f64 = self
            .path
            .iter()
            .zip(&self.coefficients)
            .map(|(e, c)| c.abs() * weights[e.0])
            .sum();
        if scale == 0.0 {
            0.0
        } else {
            self.residual(weights) / scale
        }
    }
}

/// Vertex sequence of an edge path, or `None` if the edges do not chain
/// into a simple path.
fn path_vertices(tree: &WeightedTree, path: &[EdgeId]) -> Option<Vec<VertexId>> {
    let (a, b) = tree.endpoints(*path.first()?);
    let mut vertices = if path.len() == 1 {
        vec![a, b]
    } else {
        let (c, d) = tree.endpoints(path[1]);
        if b == c || b == d {
            vec![a, b]
        } else if a == c || a == d {
            vec![b, a]
        } else {
            return None;
        }
    };
    for &e in &path[1..] {
        let next = tree.other_endpoint(e, *vertices.last()?)?;
        if vertices.contains(&next) {
            return None;
        }
        vertices.push(next);
    }
    Some(vertices)
}

fn outer_is_terminal(tree: &WeightedTree, x: VertexId, edge: EdgeId, cutting: &[EdgeId]) -> bool {
    tree.neighbors(x)
        .iter()
        .all(|&(_, f)| f == edge || cutting.contains(&f))
}

pub fn balance_system(
    tree: &WeightedTree,
    path: &[EdgeId],
    kappa: f64,
    cutting: &[EdgeId],
) -> Result<BalancedPathSystem, AnalysisError> {
    if kappa > 0.0 {
        return Err(AnalysisError::PositiveCurvature(kappa));
    }
    let not_maximal = |why: &str| AnalysisError::NotMaximalPath(why.to_string());
    let vertices = path_vertices(tree, path).ok_or_else(|| not_maximal("edges do not form a simple path"))?;
    if path.iter().any(|e| cutting.contains(e)) {
        return Err(not_maximal("path contains a cutting edge"));
    }
    let (first, last) = (vertices[0], vertices[vertices.len() - 1]);
    if !outer_is_terminal(tree, first, path[0], cutting)
        || !outer_is_terminal(tree, last, path[path.len() - 1], cutting)
    {
        return Err(not_maximal("a terminal edge can be extended by a positive edge"));
    }
    let kind = |x: VertexId| {
        if tree.is_leaf(x) {
            TerminalKind::Leaf
        } else {
            TerminalKind::Internal
        }
    };
    let terminals = (kind(first), kind(last));
    let l = path.len();
    let coefficients = (0..l)
        .map(|i| {
            let mut c = kappa;
            if i == 0 && terminals.0 == TerminalKind::Leaf {
                c -= 1.0;
            }
            if i == l - 1 && terminals.1 == TerminalKind::Leaf {
                c -= 1.0;
            }
            if i % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    Ok(BalancedPathSystem {
        path: path.to_vec(),
        terminals,
        kappa,
        coefficients,
        extrapolated: kappa == 0.0,
    })
}

/// Maximal paths of the forest left after deleting `cutting`: one per pair
/// of forest leaves in the same component.
pub fn maximal_paths(tree: &WeightedTree, cutting: &[EdgeId]) -> Vec<Vec<EdgeId>> {
    let live = |e: EdgeId| !cutting.contains(&e);
    let forest_degree = |v: VertexId| tree.neighbors(v).iter().filter(|&&(_, e)| live(e)).count();
    let ends: Vec<VertexId> = tree.vertices().filter(|&v| forest_degree(v) == 1).collect();
    let mut paths = Vec::new();
    for (i, &a) in ends.iter().enumerate() {
        // Walk the forest from `a`, recording the edge path to each vertex.
        let mut route: Vec<Option<Vec<EdgeId>>> = vec![None; tree.vertex_count()];
        route[a.0] = Some(Vec::new());
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            for &(y, e) in tree.neighbors(x) {
                if live(e) && route[y.0].is_none() {
                    let mut r = route[x.0].clone().unwrap_or_default();
                    r.push(e);
                    route[y.0] = Some(r);
                    stack.push(y);
                }
            }
        }
        for &b in &ends[i + 1..] {
            if let Some(r) = &route[b.0] {
                paths.push(r.clone());
            }
        }
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(t: &WeightedTree, pairs: &[(&str, &str)]) -> Vec<EdgeId> {
        pairs.iter().map(|(a, b)| t.edge(a, b).unwrap()).collect()
    }

    #[test]
    fn two_internal_edges_balance_equal_weights() {
        // Path a-b-c-d with the leaves a-b and c-d cut away.
        let t = WeightedTree::parse("a b 1\nb c 1\nc d 1\nd e 1").unwrap();
        let cutting = ids(&t, &[("a", "b"), ("d", "e")]);
        let path = ids(&t, &[("b", "c"), ("c", "d")]);
        let sys = balance_system(&t, &path, -0.5, &cutting).unwrap();
        assert_eq!(sys.terminals, (TerminalKind::Internal, TerminalKind::Internal));
        assert_eq!(sys.coefficients, vec![-0.5, 0.5]);
        let mut w = vec![1.0; 4];
        assert_eq!(sys.residual(&w), 0.0);
        w[path[1].0] = 2.0;
        assert!((sys.relative_residual(&w) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn leaf_terminal_uses_kappa_minus_one() {
        let t = WeightedTree::parse("a b 1\nb c 1\nc d 1").unwrap();
        let cutting = ids(&t, &[("a", "b")]);
        let path = ids(&t, &[("b", "c"), ("c", "d")]);
        let sys = balance_system(&t, &path, -0.25, &cutting).unwrap();
        assert_eq!(sys.terminals.1, TerminalKind::Leaf);
        // (-1)^{l+1} (κ - 1) with l = 2.
        assert_eq!(sys.coefficients, vec![-0.25, 1.25]);
    }

    #[test]
    fn single_edge_paths() {
        let k2 = WeightedTree::parse("a b 1").unwrap();
        let sys = balance_system(&k2, &[EdgeId(0)], 0.0, &[]).unwrap();
        assert_eq!(sys.coefficients, vec![-2.0]);
        assert!(sys.extrapolated);
    }

    #[test]
    fn rejects_non_maximal_and_positive_curvature() {
        let t = WeightedTree::parse("a b 1\nb c 1\nc d 1").unwrap();
        let path = ids(&t, &[("b", "c")]);
        assert!(matches!(
            balance_system(&t, &path, -0.1, &[]),
            Err(AnalysisError::NotMaximalPath(_))
        ));
        let broken = ids(&t, &[("a", "b"), ("c", "d")]);
        assert!(balance_system(&t, &broken, -0.1, &[]).is_err());
        assert!(matches!(
            balance_system(&t, &ids(&t, &[("a", "b"), ("b", "c"), ("c", "d")]), 0.2, &[]),
            Err(AnalysisError::PositiveCurvature(_))
        ));
    }

    #[test]
    fn maximal_paths_of_a_star_forest() {
        // Center h with three internal arms whose leaves are cut.
        let t = WeightedTree::parse("h a 1\nh b 1\nh c 1\na a1 1\nb b1 1\nc c1 1").unwrap();
        let cutting = ids(&t, &[("a", "a1"), ("b", "b1"), ("c", "c1")]);
        let paths = maximal_paths(&t, &cutting);
        assert_eq!(paths.len(), 3);
        for p in &paths {
            assert_eq!(p.len(), 2);
            assert!(balance_system(&t, p, -1.0 / 3.0, &cutting).is_ok());
        }
        assert_eq!(maximal_paths(&t, &[]).len(), 3);
    }
}
