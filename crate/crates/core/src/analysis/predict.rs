use std::fmt;

use crate::tree::{EdgeClass, EdgeId, VertexId, WeightedTree};

/// Predicted long-time curvature behavior of one edge, from topology alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitClass {
    /// Leaf at a degree-2 vertex: κ is identically 1.
    LeafIdentityOne,
    /// Leaf at `u` with `d'_u = d_u - 1`: κ tends to `1/(d_u - 1)`.
    LeafPositive { limit: f64 },
    /// Leaf at `u` with `d'_u = d_u - 2`: κ tends to 0.
    LeafZero,
    /// Leaf at `u` with `d'_u <= d_u - 3`: κ is eventually at most
    /// `-d'_u / d_u`.
    LeafNegativeBounded { bound: f64 },
    /// Leaf of a star `K_{1,d}`, `d >= 3`: κ tends to `2/d`.
    StarLeaf { limit: f64 },
    /// `K_2`: κ is identically 2.
    SingleEdge,
    /// Internal edge whose endpoints both have degree 2 or `d' >= d - 2`.
    InternalZero,
    InternalUnknown,
}

impl LimitClass {
    /// The limit value when the class pins one.
    pub fn predicted_value(self) -> Option<f64> {
        match self {
            LimitClass::LeafIdentityOne => Some(1.0),
            LimitClass::LeafPositive { limit } | LimitClass::StarLeaf { limit } => Some(limit),
            LimitClass::LeafZero | LimitClass::InternalZero => Some(0.0),
            LimitClass::SingleEdge => Some(2.0),
            LimitClass::LeafNegativeBounded { .. } | LimitClass::InternalUnknown => None,
        }
    }

    pub fn is_leaf(self) -> bool {
        !matches!(self, LimitClass::InternalZero | LimitClass::InternalUnknown)
    }

    pub fn name(self) -> &'static str {
        match self {
            LimitClass::LeafIdentityOne => "LeafIdentityOne",
            LimitClass::LeafPositive { .. } => "LeafPositive",
            LimitClass::LeafZero => "LeafZero",
            LimitClass::LeafNegativeBounded { .. } => "LeafNegativeBounded",
            LimitClass::StarLeaf { .. } => "StarLeaf",
            LimitClass::SingleEdge => "SingleEdge",
            LimitClass::InternalZero => "InternalZero",
            LimitClass::InternalUnknown => "InternalUnknown",
        }
    }
}

impl fmt::Display for LimitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitClass::LeafPositive { limit } | LimitClass::StarLeaf { limit } => {
                write!(f, "{}({limit})", self.name())
            }
            LimitClass::LeafNegativeBounded { bound } => write!(f, "{}({bound})", self.name()),
            _ => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgePrediction {
    pub edge: EdgeId,
    pub class: LimitClass,
    /// The degree condition that selected the class.
    pub justification: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitPrediction {
    pub edges: Vec<EdgePrediction>,
}

impl LimitPrediction {
    pub fn class(&self, e: EdgeId) -> LimitClass {
        self.edges[e.0].class
    }
}

pub fn predict_limits(tree: &WeightedTree) -> LimitPrediction {
    let edges = tree
        .edge_ids()
        .map(|e| {
            let (class, justification) = match tree.edge_class(e) {
                EdgeClass::Leaf => predict_leaf(tree, e),
                EdgeClass::Internal => predict_internal(tree, e),
            };
            EdgePrediction {
                edge: e,
                class,
                justification,
            }
        })
        .collect();
    LimitPrediction { edges }
}

fn predict_leaf(tree: &WeightedTree, e: EdgeId) -> (LimitClass, String) {
    let Some(u) = tree.leaf_attachment(e) else {
        return (LimitClass::SingleEdge, "both endpoints are leaves".into());
    };
    let p = tree.profile(u);
    let (d, dl) = (p.degree, p.leaf_degree);
    let name = tree.name(u);
    if d == 2 {
        (LimitClass::LeafIdentityOne, format!("d_{name} = 2"))
    } else if dl == d {
        (
            LimitClass::StarLeaf {
                limit: 2.0 / d as f64,
            },
            format!("d'_{name} = d_{name} = {d}"),
        )
    } else if dl + 1 == d {
        (
            LimitClass::LeafPositive {
                limit: 1.0 / (d - 1) as f64,
            },
            format!("d'_{name} = d_{name} - 1 = {dl}"),
        )
    } else if dl + 2 == d {
        (LimitClass::LeafZero, format!("d'_{name} = d_{name} - 2 = {dl}"))
    } else {
        (
            LimitClass::LeafNegativeBounded {
                bound: -(dl as f64) / d as f64,
            },
            format!("d'_{name} = {dl} <= d_{name} - 3 = {}", d - 3),
        )
    }
}

fn zero_side(tree: &WeightedTree, v: VertexId) -> bool {
    let p = tree.profile(v);
    p.degree == 2 || p.leaf_degree + 2 >= p.degree
}

fn predict_internal(tree: &WeightedTree, e: EdgeId) -> (LimitClass, String) {
    let (u, v) = tree.endpoints(e);
    let describe = |x: VertexId| {
        let p = tree.profile(x);
        format!("{}: d = {}, d' = {}", tree.name(x), p.degree, p.leaf_degree)
    };
    let detail = format!("{}; {}", describe(u), describe(v));
    if zero_side(tree, u) && zero_side(tree, v) {
        (LimitClass::InternalZero, detail)
    } else {
        (LimitClass::InternalUnknown, detail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(t: &WeightedTree, p: &LimitPrediction, a: &str, b: &str) -> LimitClass {
        p.class(t.edge(a, b).unwrap())
    }

    #[test]
    fn simple_tree() {
        let t = WeightedTree::parse("x u 1\ny u 1\nu v 1\nv z 1").unwrap();
        let p = predict_limits(&t);
        assert_eq!(class(&t, &p, "v", "z"), LimitClass::LeafIdentityOne);
        assert_eq!(class(&t, &p, "u", "x"), LimitClass::LeafPositive { limit: 0.5 });
        assert_eq!(class(&t, &p, "u", "v"), LimitClass::InternalZero);
    }

    #[test]
    fn negative_bounded_and_unknown() {
        // h has degree 4 with one leaf; its three internal neighbors each
        // carry two leaves.
        let text = "h l 1\nh a 1\nh b 1\nh c 1\na a1 1\na a2 1\nb b1 1\nb b2 1\nc c1 1\nc c2 1";
        let t = WeightedTree::parse(text).unwrap();
        let p = predict_limits(&t);
        assert_eq!(class(&t, &p, "h", "l"), LimitClass::LeafNegativeBounded { bound: -0.25 });
        assert_eq!(class(&t, &p, "h", "a"), LimitClass::InternalUnknown);
        assert_eq!(class(&t, &p, "a", "a1"), LimitClass::LeafPositive { limit: 0.5 });
    }

    #[test]
    fn stars_and_k2() {
        let k2 = WeightedTree::parse("a b 1").unwrap();
        assert_eq!(predict_limits(&k2).class(EdgeId(0)), LimitClass::SingleEdge);
        let star = WeightedTree::parse("c a 1\nc b 1\nc d 1\nc e 1").unwrap();
        let p = predict_limits(&star);
        assert!(p.edges.iter().all(|e| e.class == LimitClass::StarLeaf { limit: 0.5 }));
        let p3 = WeightedTree::parse("a b 1\nb c 1").unwrap();
        assert!(predict_limits(&p3).edges.iter().all(|e| e.class == LimitClass::LeafIdentityOne));
    }

    #[test]
    fn independent_of_weights() {
        let a = WeightedTree::parse("x u 1\ny u 1\nu v 1\nv z 1").unwrap();
        let b = a.with_weights(&[5.0, 0.1, 2.0, 3.0]).unwrap();
        assert_eq!(predict_limits(&a), predict_limits(&b));
    }
}
