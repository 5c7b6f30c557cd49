//! Lin-Lu-Yau curvature of weighted trees in closed form.
//!
//! For `γ(x) = 1/x` the curvature of `uv` splits into two directional parts
//! `κ_{u→v} = (2 - d_u) / (w_uv D_u)` with `D_u = Σ_{x~u} 1/w_ux`.

use thiserror::Error;

use crate::summation::compensated_sum;
use crate::tree::{EdgeId, VertexId, WeightedTree};

/// Tolerance on `|Σw - 1|` for a metric flagged as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("metric has {got} weights but the tree has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("weight {weight} on edge {edge} is not strictly positive and finite")]
    NonPositiveWeight { edge: usize, weight: f64 },
    #[error("metric sums to {sum}, not 1")]
    NotNormalized { sum: f64 },
    #[error("vertex {vertex} is not an endpoint of edge {edge}")]
    NotEndpoint { edge: usize, vertex: usize },
    #[error("invalid parameter function: {0}")]
    InvalidGamma(String),
}

/// Parameter function of the random walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    /// `γ(x) = 1/x`.
    Reciprocal,
    /// `γ(x) = scale * x^exponent` with `scale > 0`, `exponent != 0`.
    Power { scale: f64, exponent: f64 },
}

impl Gamma {
    pub fn power(scale: f64, exponent: f64) -> Result<Self, CurvatureError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(CurvatureError::InvalidGamma(format!("scale {scale} must be positive")));
        }
        if exponent == 0.0 || !exponent.is_finite() {
            return Err(CurvatureError::InvalidGamma(format!(
                "exponent {exponent} gives a function that is not one-to-one"
            )));
        }
        Ok(Gamma::Power { scale, exponent })
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Gamma::Reciprocal => 1.0 / x,
            Gamma::Power { scale, exponent } => scale * x.powf(exponent),
        }
    }
}

/// Positive edge weights in canonical edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    weights: Vec<f64>,
    normalized: bool,
}

impl Metric {
    pub fn new(tree: &WeightedTree, weights: Vec<f64>) -> Result<Self, CurvatureError> {
        check_weights(tree, &weights)?;
        Ok(Metric {
            weights,
            normalized: false,
        })
    }

    /// A metric asserted to sum to one.
    pub fn normalized(tree: &WeightedTree, weights: Vec<f64>) -> Result<Self, CurvatureError> {
        check_weights(tree, &weights)?;
        let sum = compensated_sum(weights.iter().copied());
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(CurvatureError::NotNormalized { sum });
        }
        Ok(Metric {
            weights,
            normalized: true,
        })
    }

    /// Unchecked constructor for states produced by the integrator.
    pub(crate) fn from_parts(weights: Vec<f64>, normalized: bool) -> Self {
        Metric {
            weights,
            normalized,
        }
    }

    /// The tree's initial weights.
    pub fn initial(tree: &WeightedTree) -> Self {
        Metric {
            weights: tree.initial_weights().to_vec(),
            normalized: false,
        }
    }

    /// Rescales to unit total weight.
    pub fn to_normalized(&self) -> Self {
        let sum = compensated_sum(self.weights.iter().copied());
        Metric {
            weights: self.weights.iter().map(|w| w / sum).collect(),
            normalized: true,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }
}

fn check_weights(tree: &WeightedTree, weights: &[f64]) -> Result<(), CurvatureError> {
    if weights.len() != tree.edge_count() {
        return Err(CurvatureError::LengthMismatch {
            expected: tree.edge_count(),
            got: weights.len(),
        });
    }
    for (edge, &weight) in weights.iter().enumerate() {
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(CurvatureError::NonPositiveWeight { edge, weight });
        }
    }
    Ok(())
}

/// Per-edge curvature with its directional parts and the weighted degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureVector {
    pub kappa: Vec<f64>,
    /// `(κ_{u→v}, κ_{v→u})` with `(u, v)` the canonical endpoint order.
    pub directional: Vec<(f64, f64)>,
    pub weighted_degree: Vec<f64>,
}

impl CurvatureVector {
    pub fn sum(&self) -> f64 {
        compensated_sum(self.kappa.iter().copied())
    }
}

pub fn weighted_degree(tree: &WeightedTree, metric: &Metric, gamma: Gamma, v: VertexId) -> f64 {
    weighted_degree_raw(tree, metric.weights(), gamma, v)
}

pub(crate) fn weighted_degree_raw(
    tree: &WeightedTree,
    weights: &[f64],
    gamma: Gamma,
    v: VertexId,
) -> f64 {
    compensated_sum(tree.neighbors(v).iter().map(|&(_, e)| gamma.eval(weights[e.0])))
}

/// Weighted degree looked up by vertex name.
pub fn weighted_degree_of(
    tree: &WeightedTree,
    metric: &Metric,
    gamma: Gamma,
    name: &str,
) -> Result<f64, crate::tree::TreeError> {
    Ok(weighted_degree(tree, metric, gamma, tree.vertex(name)?))
}

/// Closed-form curvature of `e` for `γ(x) = 1/x`.
pub fn kappa_edge(tree: &WeightedTree, metric: &Metric, e: EdgeId) -> f64 {
    let (u, v) = tree.endpoints(e);
    let w = metric.weights();
    directional_raw(tree, w, e, u) + directional_raw(tree, w, e, v)
}

fn directional_raw(tree: &WeightedTree, weights: &[f64], e: EdgeId, u: VertexId) -> f64 {
    let d = tree.degree(u) as f64;
    let du = weighted_degree_raw(tree, weights, Gamma::Reciprocal, u);
    (2.0 - d) / (weights[e.0] * du)
}

/// `κ_{u→v}` for `γ(x) = 1/x`: 1 at a leaf, 0 at a degree-2 vertex.
pub fn kappa_directional(
    tree: &WeightedTree,
    metric: &Metric,
    e: EdgeId,
    u: VertexId,
) -> Result<f64, CurvatureError> {
    let (a, b) = tree.endpoints(e);
    if u != a && u != b {
        return Err(CurvatureError::NotEndpoint {
            edge: e.0,
            vertex: u.0,
        });
    }
    Ok(directional_raw(tree, metric.weights(), e, u))
}

/// Curvature for an arbitrary parameter function `γ`.
pub fn kappa_general(tree: &WeightedTree, metric: &Metric, gamma: Gamma, e: EdgeId) -> f64 {
    let w = metric.weights();
    let (u, v) = tree.endpoints(e);
    let wuv = w[e.0];
    let g = gamma.eval(wuv);
    let side = |x: VertexId| {
        let dx = weighted_degree_raw(tree, w, gamma, x);
        let moment =
            compensated_sum(tree.neighbors(x).iter().map(|&(_, f)| w[f.0] * gamma.eval(w[f.0])));
        -moment / (wuv * dx) + 2.0 * g / dx
    };
    side(u) + side(v)
}

pub fn kappa_all(tree: &WeightedTree, metric: &Metric) -> CurvatureVector {
    kappa_all_raw(tree, metric.weights())
}

pub(crate) fn kappa_all_raw(tree: &WeightedTree, weights: &[f64]) -> CurvatureVector {
    let weighted_degree: Vec<f64> = tree
        .vertices()
        .map(|v| weighted_degree_raw(tree, weights, Gamma::Reciprocal, v))
        .collect();
    let part = |e: EdgeId, x: VertexId| {
        (2.0 - tree.degree(x) as f64) / (weights[e.0] * weighted_degree[x.0])
    };
    let mut kappa = Vec::with_capacity(tree.edge_count());
    let mut directional = Vec::with_capacity(tree.edge_count());
    for e in tree.edge_ids() {
        let (u, v) = tree.endpoints(e);
        let pair = (part(e, u), part(e, v));
        kappa.push(pair.0 + pair.1);
        directional.push(pair);
    }
    CurvatureVector {
        kappa,
        directional,
        weighted_degree,
    }
}

/// `Σ_h κ_h w_h` via the vertex identity `Σ_u d_u (2 - d_u) / D_u`.
///
/// A leaf contributes `1/D_u = w_e`, so this equals the leaf-weight sum plus
/// the contributions of vertices of degree at least 2.
pub fn kappa_weight_sum(tree: &WeightedTree, metric: &Metric) -> f64 {
    kappa_weight_sum_raw(tree, metric.weights())
}

pub(crate) fn kappa_weight_sum_raw(tree: &WeightedTree, weights: &[f64]) -> f64 {
    compensated_sum(tree.vertices().map(|u| {
        let d = tree.degree(u) as f64;
        d * (2.0 - d) / weighted_degree_raw(tree, weights, Gamma::Reciprocal, u)
    }))
}

/// Time derivative of every κ along the flow (the normalized flow gives the
/// same values since κ is scale invariant).
pub fn kappa_derivative(tree: &WeightedTree, metric: &Metric) -> Vec<f64> {
    let w = metric.weights();
    let cv = kappa_all_raw(tree, w);
    // Σ_{x~u} κ_ux / w_ux, i.e. dD_u/dt.
    let flux: Vec<f64> = tree
        .vertices()
        .map(|u| compensated_sum(tree.neighbors(u).iter().map(|&(_, f)| cv.kappa[f.0] / w[f.0])))
        .collect();
    tree.edge_ids()
        .map(|e| {
            let (u, v) = tree.endpoints(e);
            let k = cv.kappa[e.0];
            let term = |x: VertexId| {
                let dx = cv.weighted_degree[x.0];
                (tree.degree(x) as f64 - 2.0) / (w[e.0] * dx) * (flux[x.0] / dx - k)
            };
            term(u) + term(v)
        })
        .collect()
}

/// Interval `[4 - d_u - d_v, 1]` that every κ lies in, except on `K_2`
/// where κ is identically 2.
pub fn kappa_bounds(tree: &WeightedTree, e: EdgeId) -> (f64, f64) {
    let (u, v) = tree.endpoints(e);
    let (du, dv) = (tree.degree(u), tree.degree(v));
    if du == 1 && dv == 1 {
        return (2.0, 2.0);
    }
    (4.0 - (du + dv) as f64, 1.0)
}
