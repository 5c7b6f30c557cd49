use crate::flow::{FlowVariant, Trajectory};
use crate::tree::{EdgeId, VertexId, VertexProfile};

use super::detect::tail_start;
use super::predict::{predict_limits, LimitClass};
use super::AnalysisError;

/// Slack on the eventual upper bound for leaves at vertices with
/// `d' <= d - 3`.
pub const NEGATIVE_BOUND_SLACK: f64 = 1e-3;

/// Rounding allowance on the strict max-leaf inequality. When `d' = d - 1`
/// the leaf limit `1/(d - 1)` equals the bound, so late samples sit on it.
pub const MAX_LEAF_SLACK: f64 = 1e-9;

/// Leaf at a vertex with `d'_u <= d_u - 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeLeafCheck {
    pub edge: EdgeId,
    pub vertex: VertexId,
    pub profile: VertexProfile,
    pub tail_kappa: f64,
    /// `-d'_u / d_u`.
    pub bound: f64,
    pub passed: bool,
    /// `1 - (d - 2) / (d' + (d'' - 2) d'' / (d'' - 2 + d))`.
    pub full_bound: f64,
    pub full_passed: bool,
}

/// The heaviest initial leaf at a vertex stays above `1 - (d_u - 2)/d'_u`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxLeafCheck {
    pub edge: EdgeId,
    pub vertex: VertexId,
    pub bound: f64,
    pub min_kappa: f64,
    pub passed: bool,
}

/// Leaves predicted to have a nonnegative limit keep bounded weights that
/// eventually decrease.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundedLeafCheck {
    pub edge: EdgeId,
    pub class: LimitClass,
    pub tail_log_slope: f64,
    pub eventually_decreasing: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropBoundsReport {
    pub negative: Vec<NegativeLeafCheck>,
    pub max_leaf: Vec<MaxLeafCheck>,
    pub bounded: Vec<BoundedLeafCheck>,
}

impl PropBoundsReport {
    pub fn passed(&self) -> bool {
        self.negative.iter().all(|c| c.passed)
            && self.max_leaf.iter().all(|c| c.passed)
            && self.bounded.iter().all(|c| c.passed)
    }
}

pub(crate) fn full_negative_bound(p: VertexProfile) -> f64 {
    let d = p.degree as f64;
    let dl = p.leaf_degree as f64;
    let di = p.internal_degree as f64;
    1.0 - (d - 2.0) / (dl + (di - 2.0) * di / (di - 2.0 + d))
}

pub fn verify_prop_bounds(traj: &Trajectory) -> Result<PropBoundsReport, AnalysisError> {
    if traj.variant != FlowVariant::Unnormalized {
        return Err(AnalysisError::NotUnnormalized);
    }
    let tree = &traj.tree;
    let n = traj.samples.len();
    let start = tail_start(n, 0.25)?;
    let prediction = predict_limits(tree);
    let tail_mean = |e: EdgeId| {
        let tail = &traj.samples[start..];
        tail.iter().map(|s| s.kappa()[e.0]).sum::<f64>() / tail.len() as f64
    };

    let mut negative = Vec::new();
    let mut bounded = Vec::new();
    for p in &prediction.edges {
        let e = p.edge;
        match p.class {
            LimitClass::LeafNegativeBounded { bound } => {
                let vertex = tree.leaf_attachment(e).expect("leaf edge");
                let profile = tree.profile(vertex);
                let tail_kappa = tail_mean(e);
                let full_bound = full_negative_bound(profile);
                negative.push(NegativeLeafCheck {
                    edge: e,
                    vertex,
                    profile,
                    tail_kappa,
                    bound,
                    passed: tail_kappa <= bound + NEGATIVE_BOUND_SLACK,
                    full_bound,
                    full_passed: tail_kappa <= full_bound + NEGATIVE_BOUND_SLACK,
                });
            }
            LimitClass::LeafPositive { .. } | LimitClass::LeafZero => {
                let series = traj.weight_series(e);
                let span = traj.samples[n - 1].t - traj.samples[start].t;
                let tail_log_slope = (series[n - 1].ln() - series[start].ln()) / span;
                let eventually_decreasing = series[start..].windows(2).all(|w| w[1] <= w[0]);
                bounded.push(BoundedLeafCheck {
                    edge: e,
                    class: p.class,
                    tail_log_slope,
                    eventually_decreasing,
                    passed: eventually_decreasing && tail_log_slope <= 0.0,
                });
            }
            _ => {}
        }
    }

    // Stars are excluded: with equal leaves the bound holds with equality.
    let initial = tree.initial_weights();
    let mut max_leaf = Vec::new();
    for u in tree.vertices() {
        let p = tree.profile(u);
        if tree.is_leaf(u) || p.degree < 3 || p.leaf_degree == 0 || p.leaf_degree == p.degree {
            continue;
        }
        let edge = tree
            .neighbors(u)
            .iter()
            .filter(|(x, _)| tree.is_leaf(*x))
            .map(|&(_, e)| e)
            .max_by(|a, b| initial[a.0].total_cmp(&initial[b.0]).then(b.cmp(a)))
            .expect("vertex has a leaf");
        let bound = 1.0 - (p.degree - 2) as f64 / p.leaf_degree as f64;
        let min_kappa = traj
            .kappa_series(edge)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        max_leaf.push(MaxLeafCheck {
            edge,
            vertex: u,
            bound,
            min_kappa,
            passed: min_kappa > bound - MAX_LEAF_SLACK,
        });
    }
    Ok(PropBoundsReport {
        negative,
        max_leaf,
        bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(degree: usize, leaf_degree: usize) -> VertexProfile {
        VertexProfile {
            degree,
            leaf_degree,
            internal_degree: degree - leaf_degree,
        }
    }

    #[test]
    fn full_bound_values() {
        assert!((full_negative_bound(profile(4, 1)) + 0.25).abs() < 1e-15);
        assert!((full_negative_bound(profile(5, 2)) + 0.2).abs() < 1e-15);
        assert!((full_negative_bound(profile(6, 1)) + 0.5).abs() < 1e-15);
    }
}
