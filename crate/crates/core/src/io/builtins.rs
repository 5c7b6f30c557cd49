//! Named example trees and initial metrics.

use crate::curvature::Metric;
use crate::tree::WeightedTree;

use super::IoError;

/// Built-in tree names.
pub const BUILTIN_NAMES: [&str; 7] = ["simple", "k2", "path5", "star4", "t1", "t2", "t3"];

const SIMPLE: &[(&str, &str)] = &[("x", "u"), ("y", "u"), ("u", "v"), ("v", "z")];
const T1: &[(&str, &str)] = &[
    ("x1", "x2"),
    ("u1", "x2"),
    ("x2", "x3"),
    ("x4", "x3"),
    ("x3", "x5"),
    ("u2", "x5"),
    ("u3", "x5"),
];

fn unit(edges: &[(&str, &str)]) -> WeightedTree {
    WeightedTree::from_edges(edges.iter().map(|&(a, b)| (a, b, 1.0))).expect("builtin is a tree")
}

/// Topology of a built-in tree with unit weights.
pub fn builtin_tree(name: &str) -> Result<WeightedTree, IoError> {
    let extended = |extra: (&'static str, &'static str)| {
        let mut edges = T1.to_vec();
        edges.push(extra);
        unit(&edges)
    };
    Ok(match name {
        "simple" => unit(SIMPLE),
        "k2" => unit(&[("a", "b")]),
        "path5" => unit(&[("p1", "p2"), ("p2", "p3"), ("p3", "p4"), ("p4", "p5")]),
        "star4" => unit(&[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]),
        "t1" => unit(T1),
        "t2" => extended(("u4", "x4")),
        "t3" => extended(("x6", "x3")),
        other => return Err(IoError::UnknownExample(other.to_string())),
    })
}

/// Named initial metrics per builtin; the first entry is the default.
pub fn metric_names(tree: &str) -> &'static [&'static str] {
    match tree {
        "simple" => &["unit", "asymmetric", "uv-0.5", "uv-1", "uv-2"],
        "t3" => &["unit", "appendix"],
        _ => &["unit"],
    }
}

/// A builtin tree carrying one of its named initial metrics:
/// - `simple/asymmetric`: `w_ux = 1.2`, others 1;
/// - `simple/uv-<c>`: `w_uv = c`, others 1;
/// - `t3/appendix`: `w_x3x4 = 0.1`, others 1, so that leaf's curvature
///   starts negative.
pub fn builtin_with_metric(tree: &str, metric: &str) -> Result<WeightedTree, IoError> {
    let base = builtin_tree(tree)?;
    let mut weights = vec![1.0; base.edge_count()];
    let mut set = |a: &str, b: &str, w: f64| -> Result<(), IoError> {
        let e = base.edge(a, b).map_err(|err| IoError::Format(err.to_string()))?;
        weights[e.0] = w;
        Ok(())
    };
    match (tree, metric) {
        (_, "unit") => {}
        ("simple", "asymmetric") => set("u", "x", 1.2)?,
        ("simple", "uv-0.5") => set("u", "v", 0.5)?,
        ("simple", "uv-1") => {}
        ("simple", "uv-2") => set("u", "v", 2.0)?,
        ("t3", "appendix") => set("x3", "x4", 0.1)?,
        _ => {
            return Err(IoError::UnknownMetric {
                tree: tree.to_string(),
                metric: metric.to_string(),
            })
        }
    }
    base.with_weights(&weights).map_err(|e| IoError::Format(e.to_string()))
}

/// Initial metric of a builtin by name.
pub fn builtin_metric(tree: &str, metric: &str) -> Result<Metric, IoError> {
    Ok(Metric::initial(&builtin_with_metric(tree, metric)?))
}
