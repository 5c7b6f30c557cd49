//! Finite weighted trees: validation, parsing and structural queries.
//!
//! Vertices are stored in lexicographic (byte) order of their names and
//! edges in `(min-endpoint, max-endpoint)` order, so every per-vertex and
//! per-edge vector in the crate shares one canonical layout.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Index of a vertex in canonical (name-sorted) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of an edge in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: edge {u}-{v} closes a cycle")]
    Cycle { line: usize, u: String, v: String },
    #[error("line {line}: edge {u}-{v} is not connected to the rest of the tree")]
    Disconnected { line: usize, u: String, v: String },
    #[error("line {line}: weight {weight} is not strictly positive")]
    NonPositiveWeight { line: usize, weight: f64 },
    #[error("line {line}: edge {u}-{v} duplicates line {first_line}")]
    DuplicateEdge {
        line: usize,
        first_line: usize,
        u: String,
        v: String,
    },
    #[error("line {line}: self-loop at {v}")]
    SelfLoop { line: usize, v: String },
    #[error("tree has no edges")]
    Empty,
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("{0}-{1} is not an edge of the tree")]
    UnknownEdge(String, String),
}

/// Degree data of one vertex: `degree = leaf_degree + internal_degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexProfile {
    pub degree: usize,
    /// Number of neighbors that are leaves.
    pub leaf_degree: usize,
    /// Number of non-leaf neighbors; for a non-leaf vertex this is the
    /// number of incident internal edges.
    pub internal_degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeClass {
    Leaf,
    Internal,
}

/// Immutable tree topology plus its initial metric.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTree {
    names: Vec<String>,
    edges: Vec<(VertexId, VertexId)>,
    /// Per vertex: `(neighbor, edge)` sorted by neighbor.
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    initial_weights: Vec<f64>,
}

impl WeightedTree {
    /// Builds a tree from `(u, v, weight)` entries. Entry `i` is reported
    /// as line `i + 1` in errors.
    pub fn from_edges<I, S>(entries: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: Into<String>,
    {
        let numbered = entries
            .into_iter()
            .enumerate()
            .map(|(i, (u, v, w))| (i + 1, u.into(), v.into(), w));
        Self::build(numbered)
    }

    /// Parses the edge-list text format: one `u v w` triple per line,
    /// `#` starts a comment, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let fields: Vec<&str> = content.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 3 {
                return Err(TreeError::Parse {
                    line,
                    message: format!("expected `<name> <name> <weight>`, found {} field(s)", fields.len()),
                });
            }
            let weight = parse_decimal(fields[2]).ok_or_else(|| TreeError::Parse {
                line,
                message: format!("invalid weight {:?}", fields[2]),
            })?;
            entries.push((line, fields[0].to_string(), fields[1].to_string(), weight));
        }
        Self::build(entries)
    }

    fn build<I>(entries: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = (usize, String, String, f64)>,
    {
        let mut raw = Vec::new();
        let mut seen: BTreeMap<(String, String), usize> = BTreeMap::new();
        for (line, u, v, w) in entries {
            if u == v {
                return Err(TreeError::SelfLoop { line, v: u });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(TreeError::NonPositiveWeight { line, weight: w });
            }
            let key = if u < v { (u, v) } else { (v, u) };
            if let Some(&first_line) = seen.get(&key) {
                return Err(TreeError::DuplicateEdge {
                    line,
                    first_line,
                    u: key.0,
                    v: key.1,
                });
            }
            seen.insert(key.clone(), line);
            raw.push((line, key.0, key.1, w));
        }
        if raw.is_empty() {
            return Err(TreeError::Empty);
        }

        let names: Vec<String> = raw
            .iter()
            .flat_map(|(_, u, v, _)| [u.clone(), v.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let id = |name: &str| VertexId(names.binary_search_by(|n| n.as_str().cmp(name)).unwrap());

        // Cycle detection in input order so the closing line is reported.
        let mut dsu = DisjointSet::new(names.len());
        for (line, u, v, _) in &raw {
            if !dsu.union(id(u).0, id(v).0) {
                return Err(TreeError::Cycle {
                    line: *line,
                    u: u.clone(),
                    v: v.clone(),
                });
            }
        }
        let root = dsu.find(0);
        if let Some((line, u, v, _)) = raw.iter().find(|(_, u, _, _)| dsu.find(id(u).0) != root) {
            return Err(TreeError::Disconnected {
                line: *line,
                u: u.clone(),
                v: v.clone(),
            });
        }

        let mut canonical: Vec<(VertexId, VertexId, f64)> =
            raw.iter().map(|(_, u, v, w)| (id(u), id(v), *w)).collect();
        canonical.sort_by_key(|&(a, b, _)| (a, b));

        let mut adjacency = vec![Vec::new(); names.len()];
        for (e, &(a, b, _)) in canonical.iter().enumerate() {
            adjacency[a.0].push((b, EdgeId(e)));
            adjacency[b.0].push((a, EdgeId(e)));
        }
        for list in &mut adjacency {
            list.sort();
        }

        Ok(WeightedTree {
            names,
            edges: canonical.iter().map(|&(a, b, _)| (a, b)).collect(),
            adjacency,
            initial_weights: canonical.iter().map(|&(_, _, w)| w).collect(),
        })
    }

    /// Same topology with a different initial metric.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self, TreeError> {
        assert_eq!(weights.len(), self.edge_count(), "weight vector length");
        if let Some((i, &w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0) || !w.is_finite()) {
            return Err(TreeError::NonPositiveWeight { line: i + 1, weight: w });
        }
        let mut tree = self.clone();
        tree.initial_weights = weights.to_vec();
        Ok(tree)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, TreeError> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .map(VertexId)
            .map_err(|_| TreeError::UnknownVertex(name.to_string()))
    }

    /// Endpoints of `e`, smaller name first.
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e.0]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adjacency[u.0]
            .binary_search_by_key(&v, |&(n, _)| n)
            .ok()
            .map(|i| self.adjacency[u.0][i].1)
    }

    /// Looks up an edge by endpoint names, in either order.
    pub fn edge(&self, u: &str, v: &str) -> Result<EdgeId, TreeError> {
        let (a, b) = (self.vertex(u)?, self.vertex(v)?);
        self.edge_between(a, b)
            .ok_or_else(|| TreeError::UnknownEdge(u.to_string(), v.to_string()))
    }

    /// `u-v` label of an edge, canonical orientation.
    pub fn edge_label(&self, e: EdgeId) -> String {
        let (a, b) = self.endpoints(e);
        format!("{}-{}", self.name(a), self.name(b))
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v.0].len()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.degree(v) == 1
    }

    pub fn initial_weights(&self) -> &[f64] {
        &self.initial_weights
    }

    pub fn other_endpoint(&self, e: EdgeId, v: VertexId) -> Option<VertexId> {
        let (a, b) = self.endpoints(e);
        if v == a {
            Some(b)
        } else if v == b {
            Some(a)
        } else {
            None
        }
    }

    pub fn profile(&self, v: VertexId) -> VertexProfile {
        let degree = self.degree(v);
        let leaf_degree = self.neighbors(v).iter().filter(|(n, _)| self.is_leaf(*n)).count();
        VertexProfile {
            degree,
            leaf_degree,
            internal_degree: degree - leaf_degree,
        }
    }

    pub fn vertex_profile(&self, name: &str) -> Result<VertexProfile, TreeError> {
        Ok(self.profile(self.vertex(name)?))
    }

    pub fn edge_class(&self, e: EdgeId) -> EdgeClass {
        let (a, b) = self.endpoints(e);
        if self.degree(a).min(self.degree(b)) == 1 {
            EdgeClass::Leaf
        } else {
            EdgeClass::Internal
        }
    }

    pub fn classify_edges(&self) -> Vec<EdgeClass> {
        self.edge_ids().map(|e| self.edge_class(e)).collect()
    }

    pub fn internal_edges(&self) -> Vec<EdgeId> {
        self.edge_ids()
            .filter(|&e| self.edge_class(e) == EdgeClass::Internal)
            .collect()
    }

    pub fn leaf_edges(&self) -> Vec<EdgeId> {
        self.edge_ids()
            .filter(|&e| self.edge_class(e) == EdgeClass::Leaf)
            .collect()
    }

    /// For a leaf edge, the endpoint that is not a leaf (`None` for K_2).
    pub fn leaf_attachment(&self, e: EdgeId) -> Option<VertexId> {
        let (a, b) = self.endpoints(e);
        match (self.is_leaf(a), self.is_leaf(b)) {
            (true, false) => Some(b),
            (false, true) => Some(a),
            _ => None,
        }
    }

    /// The two components of `T - e`; the one containing the smaller
    /// endpoint comes first. Each side is sorted.
    pub fn split_at_edge(&self, e: EdgeId) -> (Vec<VertexId>, Vec<VertexId>) {
        let (a, b) = self.endpoints(e);
        let side_a = self.component_without(a, e);
        let mut in_a = vec![false; self.vertex_count()];
        for v in &side_a {
            in_a[v.0] = true;
        }
        let side_b = self.vertices().filter(|v| !in_a[v.0]).collect();
        debug_assert!(!in_a[b.0]);
        (side_a, side_b)
    }

    /// Named variant of [`split_at_edge`](Self::split_at_edge).
    pub fn split_at(&self, u: &str, v: &str) -> Result<(Vec<VertexId>, Vec<VertexId>), TreeError> {
        Ok(self.split_at_edge(self.edge(u, v)?))
    }

    fn component_without(&self, start: VertexId, removed: EdgeId) -> Vec<VertexId> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([start]);
        seen[start.0] = true;
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            out.push(v);
            for &(n, e) in self.neighbors(v) {
                if e != removed && !seen[n.0] {
                    seen[n.0] = true;
                    queue.push_back(n);
                }
            }
        }
        out.sort();
        out
    }

    /// Vertices in BFS order from `root` with each vertex's parent edge.
    pub fn bfs_order(&self, root: VertexId) -> Vec<(VertexId, Option<(VertexId, EdgeId)>)> {
        let mut seen = vec![false; self.vertex_count()];
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([(root, None)]);
        seen[root.0] = true;
        while let Some((v, parent)) = queue.pop_front() {
            order.push((v, parent));
            for &(n, e) in self.neighbors(v) {
                if !seen[n.0] {
                    seen[n.0] = true;
                    queue.push_back((n, Some((v, e))));
                }
            }
        }
        order
    }

    /// Unique path between two vertices, as a vertex sequence.
    pub fn path_between(&self, from: VertexId, to: VertexId) -> Vec<VertexId> {
        let mut parent = vec![None; self.vertex_count()];
        for (v, p) in self.bfs_order(from) {
            parent[v.0] = p.map(|(pv, _)| pv);
        }
        let mut path = vec![to];
        let mut cur = to;
        while let Some(p) = parent[cur.0] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// All-pairs path distance under `weights`.
    pub fn distance_matrix(&self, weights: &[f64]) -> Vec<Vec<f64>> {
        self.vertices()
            .map(|s| {
                let mut dist = vec![0.0; self.vertex_count()];
                for (v, parent) in self.bfs_order(s) {
                    if let Some((p, e)) = parent {
                        dist[v.0] = dist[p.0] + weights[e.0];
                    }
                }
                dist
            })
            .collect()
    }

    /// Serializes to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            out.push_str(&format!("{} {} {}\n", self.name(a), self.name(b), self.initial_weights[e]));
        }
        out
    }
}

impl fmt::Display for WeightedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tree(|V|={}, |E|={})", self.vertex_count(), self.edge_count())
    }
}

fn parse_decimal(s: &str) -> Option<f64> {
    let ok = s
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    if !ok {
        return None;
    }
    s.parse::<f64>().ok().filter(|w| w.is_finite())
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIMPLE: &str = "x u 1\ny u 1\nu v 1\nv z 1\n";

    fn names(tree: &WeightedTree, vs: &[VertexId]) -> Vec<String> {
        vs.iter().map(|&v| tree.name(v).to_string()).collect()
    }

    #[test]
    fn smallest_tree() {
        let t = WeightedTree::parse("a b 1.0").unwrap();
        assert_eq!(t.vertex_count(), 2);
        assert_eq!(t.edge_count(), 1);
        assert_eq!(t.classify_edges(), vec![EdgeClass::Leaf]);
    }

    #[test]
    fn simple_tree_structure() {
        let t = WeightedTree::parse(SIMPLE).unwrap();
        assert_eq!(t.vertex_count(), 5);
        assert_eq!(t.edge_count(), 4);
        assert_eq!(t.names(), &["u", "v", "x", "y", "z"]);
        let labels: Vec<_> = t.edge_ids().map(|e| t.edge_label(e)).collect();
        assert_eq!(labels, ["u-v", "u-x", "u-y", "v-z"]);
        let u = t.vertex_profile("u").unwrap();
        assert_eq!((u.degree, u.leaf_degree, u.internal_degree), (3, 2, 1));
        assert_eq!(t.edge_class(t.edge("u", "v").unwrap()), EdgeClass::Internal);
        for (a, b) in [("u", "x"), ("u", "y"), ("v", "z")] {
            assert_eq!(t.edge_class(t.edge(a, b).unwrap()), EdgeClass::Leaf);
        }
    }

    #[test]
    fn comments_and_blank_lines() {
        let t = WeightedTree::parse("# header\n\na b 1.5 # trailing\n  \nb c 2e-1\n").unwrap();
        assert_eq!(t.edge_count(), 2);
        assert_eq!(t.initial_weights(), &[1.5, 0.2]);
    }

    #[test]
    fn star_and_path_profiles() {
        let star = WeightedTree::parse("c a 1\nc b 1\nc d 1\nc e 1").unwrap();
        let p = star.vertex_profile("c").unwrap();
        assert_eq!((p.degree, p.leaf_degree, p.internal_degree), (4, 4, 0));

        let path = WeightedTree::parse("a b 1\nb c 1\nc d 1").unwrap();
        let b = path.vertex_profile("b").unwrap();
        assert_eq!((b.degree, b.leaf_degree, b.internal_degree), (2, 1, 1));
        let p3 = WeightedTree::parse("a b 1\nb c 1").unwrap();
        let b = p3.vertex_profile("b").unwrap();
        assert_eq!((b.degree, b.leaf_degree, b.internal_degree), (2, 2, 0));
        let p5 = WeightedTree::parse("a b 1\nb c 1\nc d 1\nd e 1").unwrap();
        let c = p5.vertex_profile("c").unwrap();
        assert_eq!((c.degree, c.leaf_degree, c.internal_degree), (2, 0, 2));
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert!(matches!(
            WeightedTree::parse("a b 1.0\nb a 2.0"),
            Err(TreeError::DuplicateEdge { line: 2, first_line: 1, .. })
        ));
        assert!(matches!(
            WeightedTree::parse("a b 1\nb c 1\nc a 1"),
            Err(TreeError::Cycle { line: 3, .. })
        ));
        assert!(matches!(
            WeightedTree::parse("a b 1\nc d 1"),
            Err(TreeError::Disconnected { line: 2, .. })
        ));
        assert!(matches!(
            WeightedTree::parse("a b 0"),
            Err(TreeError::NonPositiveWeight { line: 1, .. })
        ));
        assert!(matches!(
            WeightedTree::parse("a b -1"),
            Err(TreeError::NonPositiveWeight { line: 1, .. })
        ));
        assert!(matches!(WeightedTree::parse("a a 1"), Err(TreeError::SelfLoop { line: 1, .. })));
        assert!(matches!(WeightedTree::parse("a b"), Err(TreeError::Parse { line: 1, .. })));
        assert!(matches!(WeightedTree::parse("\na b one"), Err(TreeError::Parse { line: 2, .. })));
        assert!(matches!(WeightedTree::parse("a b inf"), Err(TreeError::Parse { line: 1, .. })));
        assert!(matches!(WeightedTree::parse("# nothing\n"), Err(TreeError::Empty)));
    }

    #[test]
    fn unknown_lookups() {
        let t = WeightedTree::parse(SIMPLE).unwrap();
        assert!(matches!(t.vertex_profile("q"), Err(TreeError::UnknownVertex(_))));
        assert!(matches!(t.split_at("x", "z"), Err(TreeError::UnknownEdge(..))));
    }

    #[test]
    fn split_examples() {
        let k2 = WeightedTree::parse("a b 1").unwrap();
        let (l, r) = k2.split_at("a", "b").unwrap();
        assert_eq!((names(&k2, &l), names(&k2, &r)), (vec!["a".to_string()], vec!["b".to_string()]));

        let t = WeightedTree::parse(SIMPLE).unwrap();
        let (l, r) = t.split_at("v", "u").unwrap();
        assert_eq!(names(&t, &l), ["u", "x", "y"]);
        assert_eq!(names(&t, &r), ["v", "z"]);

        let p = WeightedTree::parse("a b 1\nb c 1").unwrap();
        let (l, r) = p.split_at("a", "b").unwrap();
        assert_eq!(names(&p, &l), ["a"]);
        assert_eq!(names(&p, &r), ["b", "c"]);
    }

    #[test]
    fn distances_follow_paths() {
        let t = WeightedTree::parse("x u 1\ny u 2\nu v 3\nv z 4").unwrap();
        let d = t.distance_matrix(t.initial_weights());
        let (x, z) = (t.vertex("x").unwrap(), t.vertex("z").unwrap());
        assert_eq!(d[x.0][z.0], 8.0);
        assert_eq!(names(&t, &t.path_between(x, z)), ["x", "u", "v", "z"]);
    }

    #[test]
    fn edge_list_round_trip() {
        let t = WeightedTree::parse("x u 0.1\ny u 2.5\nu v 3\nv z 1e-3").unwrap();
        assert_eq!(WeightedTree::parse(&t.to_edge_list()).unwrap(), t);
    }
}
