use crate::summation::compensated_sum;
use crate::tree::{EdgeClass, EdgeId, WeightedTree};

use super::FlowVariant;

/// Conservation and growth diagnostics for one sample. Fields that only
/// make sense for one flow variant are `None` in the other.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorRecord {
    /// `|Σκ - 2|`.
    pub gauss_bonnet_residual: f64,
    /// `|log Πw(t) - log Πw(0) + 2t|`.
    pub product_log_residual: Option<f64>,
    /// `|Σw - 1|`.
    pub total_weight_residual: Option<f64>,
    /// Per same-vertex leaf pair `(e, g)`:
    /// `|(w_e - w_g)(t) - (w_e - w_g)(0) e^{-t}|`.
    pub leaf_pair_residuals: Option<Vec<f64>>,
    /// `S(t)`: sum of internal-edge weights.
    pub internal_sum: Option<f64>,
    /// `P(t)`: product of internal-edge weights.
    pub internal_product: Option<f64>,
}

/// Pairs of leaf edges hanging off the same vertex, in canonical order.
pub fn leaf_pairs(tree: &WeightedTree) -> Vec<(EdgeId, EdgeId)> {
    let mut pairs = Vec::new();
    for v in tree.vertices() {
        let leaves: Vec<EdgeId> = tree
            .neighbors(v)
            .iter()
            .filter(|&&(n, _)| tree.is_leaf(n) && !tree.is_leaf(v))
            .map(|&(_, e)| e)
            .collect();
        for (i, &a) in leaves.iter().enumerate() {
            for &b in &leaves[i + 1..] {
                pairs.push((a.min(b), a.max(b)));
            }
        }
    }
    pairs.sort();
    pairs
}

pub fn monitor(
    tree: &WeightedTree,
    variant: FlowVariant,
    initial: &[f64],
    t: f64,
    weights: &[f64],
    kappa: &[f64],
) -> MonitorRecord {
    let gauss_bonnet_residual = (compensated_sum(kappa.iter().copied()) - 2.0).abs();
    match variant {
        FlowVariant::Unnormalized => {
            let log_now = compensated_sum(weights.iter().map(|w| w.ln()));
            let log_start = compensated_sum(initial.iter().map(|w| w.ln()));
            let decay = (-t).exp();
            let leaf_pair_residuals = leaf_pairs(tree)
                .into_iter()
                .map(|(a, b)| {
                    let now = weights[a.0] - weights[b.0];
                    let start = initial[a.0] - initial[b.0];
                    (now - start * decay).abs()
                })
                .collect();
            let internal: Vec<f64> = tree
                .edge_ids()
                .filter(|&e| tree.edge_class(e) == EdgeClass::Internal)
                .map(|e| weights[e.0])
                .collect();
            MonitorRecord {
                gauss_bonnet_residual,
                product_log_residual: Some((log_now - log_start + 2.0 * t).abs()),
                total_weight_residual: None,
                leaf_pair_residuals: Some(leaf_pair_residuals),
                internal_sum: Some(compensated_sum(internal.iter().copied())),
                internal_product: Some(internal.iter().product()),
            }
        }
        FlowVariant::Normalized => MonitorRecord {
            gauss_bonnet_residual,
            product_log_residual: None,
            total_weight_residual: Some((compensated_sum(weights.iter().copied()) - 1.0).abs()),
            leaf_pair_residuals: None,
            internal_sum: None,
            internal_product: None,
        },
    }
}
