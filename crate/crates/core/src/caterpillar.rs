//! Caterpillar recognition.
//!
//! A tree is a caterpillar when deleting its leaves leaves a path. The spine
//! reported here is that path of non-leaf vertices, which satisfies the
//! leaf-count conditions: interior spine vertices carry `d - 2` leaves and
//! the two ends carry `d - 1`.
//!
//! Conventions for degenerate shapes:
//! - a star (one non-leaf vertex) gets the spine `(center, smallest leaf)`;
//! - `K_2` gets its single edge as spine.

use crate::tree::{VertexId, WeightedTree};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaterpillarReport {
    pub is_caterpillar: bool,
    /// Spine as a vertex path; empty for non-caterpillars.
    pub spine: Vec<VertexId>,
    /// Leaf count of each spine vertex, aligned with `spine`.
    pub spine_leaf_counts: Vec<usize>,
    /// Non-leaf vertices `v` with `d'_v = d_v - 1`, found by walking the
    /// deepest branches from a vertex with three internal neighbors.
    pub witnesses: Vec<VertexId>,
}

pub fn caterpillar_classify(tree: &WeightedTree) -> CaterpillarReport {
    let internal: Vec<VertexId> = tree.vertices().filter(|&v| !tree.is_leaf(v)).collect();
    let internal_neighbors = |v: VertexId| {
        tree.neighbors(v)
            .iter()
            .filter(|(n, _)| !tree.is_leaf(*n))
            .map(|&(n, _)| n)
            .collect::<Vec<_>>()
    };

    if let Some(&hub) = internal.iter().find(|&&v| internal_neighbors(v).len() >= 3) {
        return CaterpillarReport {
            is_caterpillar: false,
            spine: Vec::new(),
            spine_leaf_counts: Vec::new(),
            witnesses: branch_tips(tree, hub),
        };
    }

    let spine = match internal.len() {
        0 => {
            let (a, b) = tree.endpoints(crate::tree::EdgeId(0));
            vec![a, b]
        }
        1 => {
            let center = internal[0];
            // Neighbors are sorted by id, which is name order.
            let leaf = tree.neighbors(center)[0].0;
            vec![center, leaf]
        }
        _ => {
            // The non-leaf vertices induce a path; walk it from one end.
            let start = *internal
                .iter()
                .find(|&&v| internal_neighbors(v).len() == 1)
                .expect("a path of two or more vertices has an end");
            let mut path = vec![start];
            let mut prev = None;
            let mut cur = start;
            loop {
                let next = internal_neighbors(cur).into_iter().find(|&n| Some(n) != prev);
                match next {
                    Some(n) => {
                        path.push(n);
                        prev = Some(cur);
                        cur = n;
                    }
                    None => break,
                }
            }
            path
        }
    };
    let on_spine = |v: VertexId| spine.contains(&v);
    let spine_leaf_counts = spine
        .iter()
        .map(|&v| {
            tree.neighbors(v)
                .iter()
                .filter(|(n, _)| tree.is_leaf(*n) && !on_spine(*n))
                .count()
        })
        .collect();
    CaterpillarReport {
        is_caterpillar: true,
        spine,
        spine_leaf_counts,
        witnesses: Vec::new(),
    }
}

/// For each internal branch at `hub`, the parent of the farthest leaf in
/// that branch. Such a parent has exactly one non-leaf neighbor.
fn branch_tips(tree: &WeightedTree, hub: VertexId) -> Vec<VertexId> {
    let mut tips = Vec::new();
    for &(first, _) in tree.neighbors(hub) {
        if tree.is_leaf(first) {
            continue;
        }
        // BFS inside the branch, tracking hop depth and parent.
        let mut frontier = vec![(first, hub)];
        let mut deepest = (first, hub);
        while !frontier.is_empty() {
            deepest = frontier[0];
            let mut next = Vec::new();
            for &(v, parent) in &frontier {
                for &(n, _) in tree.neighbors(v) {
                    if n != parent {
                        next.push((n, v));
                    }
                }
            }
            frontier = next;
        }
        let (leaf, parent) = deepest;
        debug_assert!(tree.is_leaf(leaf));
        if !tips.contains(&parent) {
            tips.push(parent);
        }
    }
    tips.sort();
    tips
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(tree: &WeightedTree, vs: &[VertexId]) -> Vec<String> {
        vs.iter().map(|&v| tree.name(v).to_string()).collect()
    }

    #[test]
    fn k2_spine_is_its_edge() {
        let t = WeightedTree::parse("a b 1").unwrap();
        let r = caterpillar_classify(&t);
        assert!(r.is_caterpillar);
        assert_eq!(names(&t, &r.spine), ["a", "b"]);
        assert_eq!(r.spine_leaf_counts, [0, 0]);
    }

    #[test]
    fn star_spine_uses_smallest_leaf() {
        let t = WeightedTree::parse("c d 1\nc b 1\nc e 1").unwrap();
        let r = caterpillar_classify(&t);
        assert!(r.is_caterpillar);
        assert_eq!(names(&t, &r.spine), ["c", "b"]);
        assert_eq!(r.spine_leaf_counts, [2, 0]);
    }

    #[test]
    fn paths_are_caterpillars() {
        for n in 2..8 {
            let text: String = (0..n - 1).map(|i| format!("p{i} p{} 1\n", i + 1)).collect();
            let t = WeightedTree::parse(&text).unwrap();
            assert!(caterpillar_classify(&t).is_caterpillar, "path of {n} vertices");
        }
    }

    #[test]
    fn spider_is_not_a_caterpillar() {
        let t = WeightedTree::parse("h a1 1\na1 a2 1\nh b1 1\nb1 b2 1\nh c1 1\nc1 c2 1").unwrap();
        let r = caterpillar_classify(&t);
        assert!(!r.is_caterpillar);
        assert_eq!(names(&t, &r.witnesses), ["a1", "b1", "c1"]);
    }

    #[test]
    fn simple_tree_spine() {
        let t = WeightedTree::parse("x u 1\ny u 1\nu v 1\nv z 1").unwrap();
        let r = caterpillar_classify(&t);
        assert!(r.is_caterpillar);
        assert_eq!(names(&t, &r.spine), ["u", "v"]);
        assert_eq!(r.spine_leaf_counts, [2, 1]);
    }
}
