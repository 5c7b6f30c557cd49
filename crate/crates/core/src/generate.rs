//! Tree corpora: exhaustive non-isomorphic enumeration and seeded random
//! trees with log-uniform weights.

use std::collections::BTreeSet;

use rand::Rng;

use crate::tree::WeightedTree;

/// All non-isomorphic free trees on `n >= 2` vertices with unit weights.
/// Vertices are named `v0..v{n-1}`.
pub fn all_free_trees(n: usize) -> Vec<WeightedTree> {
    assert!(n >= 2, "trees need at least one edge");
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for levels in rooted_level_sequences(n) {
        let adj = adjacency_from_levels(&levels);
        if seen.insert(free_canonical_form(&adj)) {
            out.push(tree_from_adjacency(&adj, &vec![1.0; n - 1]));
        }
    }
    out
}

/// Every non-isomorphic tree with `2..=max_n` vertices.
pub fn all_trees_up_to(max_n: usize) -> Vec<WeightedTree> {
    (2..=max_n).flat_map(all_free_trees).collect()
}

/// Canonical level sequences of all rooted trees on `n` vertices, root at
/// level 1 (Beyer-Hedetniemi successor rule).
fn rooted_level_sequences(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (1..=n).collect();
    let mut all = vec![current.clone()];
    while let Some(p) = current.iter().rposition(|&l| l > 2) {
        let q = current[..p]
            .iter()
            .rposition(|&l| l == current[p] - 1)
            .expect("a shallower ancestor exists");
        let shift = p - q;
        for i in p..n {
            current[i] = current[i - shift];
        }
        all.push(current.clone());
    }
    all
}

fn adjacency_from_levels(levels: &[usize]) -> Vec<Vec<usize>> {
    let n = levels.len();
    let mut adj = vec![Vec::new(); n];
    let mut stack: Vec<usize> = Vec::new();
    for (i, &level) in levels.iter().enumerate() {
        stack.truncate(level - 1);
        if let Some(&parent) = stack.last() {
            adj[parent].push(i);
            adj[i].push(parent);
        }
        stack.push(i);
    }
    adj
}

/// Center-rooted AHU encoding; for bicentral trees the smaller of the two.
pub(crate) fn free_canonical_form(adj: &[Vec<usize>]) -> String {
    centers(adj)
        .into_iter()
        .map(|c| rooted_encoding(adj, c, usize::MAX))
        .min()
        .expect("every tree has a center")
}

fn centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &nb in &adj[leaf] {
                if degree[nb] == 0 {
                    continue;
                }
                degree[nb] -= 1;
                if degree[nb] == 1 {
                    next.push(nb);
                }
            }
            degree[leaf] = 0;
        }
        layer = next;
    }
    layer
}

fn rooted_encoding(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&c| c != parent)
        .map(|&c| rooted_encoding(adj, c, v))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

fn tree_from_adjacency(adj: &[Vec<usize>], weights: &[f64]) -> WeightedTree {
    let mut entries = Vec::new();
    for (u, list) in adj.iter().enumerate() {
        for &v in list {
            if u < v {
                entries.push((format!("v{u}"), format!("v{v}")));
            }
        }
    }
    WeightedTree::from_edges(
        entries
            .into_iter()
            .zip(weights)
            .map(|((a, b), &w)| (a, b, w)),
    )
    .expect("generated edge set is a tree")
}

/// Uniform labelled tree on `n` vertices via a random Pruefer sequence,
/// with weights log-uniform in `[lo, hi]`.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> WeightedTree {
    assert!(n >= 2);
    let adj = if n == 2 {
        vec![vec![1], vec![0]]
    } else {
        let code: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
        pruefer_decode(&code, n)
    };
    let weights = random_weights(rng, n - 1, lo, hi);
    tree_from_adjacency(&adj, &weights)
}

pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, m: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..m).map(|_| (a + (b - a) * rng.random::<f64>()).exp()).collect()
}

pub(crate) fn pruefer_decode(code: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut adj = vec![Vec::new(); n];
    let link = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for &c in code {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        link(leaf, c, &mut adj);
        degree[leaf] -= 1;
        degree[c] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    link(rest[0], rest[1], &mut adj);
    adj
}
