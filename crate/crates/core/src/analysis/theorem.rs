use crate::caterpillar::caterpillar_classify;
use crate::flow::{FlowVariant, Trajectory};
use crate::tree::{EdgeClass, EdgeId};

use super::detect::{detect_limits_with, tail_start, DetectOptions, EmpiricalVerdict, WeightLimit};
use super::predict::predict_limits;
use super::AnalysisError;

/// Allowed gap between a leaf's tail curvature and its predicted limit.
pub const LEAF_LIMIT_TOL: f64 = 5e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaterpillarTheoremReport {
    pub is_caterpillar: bool,
    pub checks: Vec<TheoremCheck>,
    pub verdict: EmpiricalVerdict,
}

impl CaterpillarTheoremReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Mean log-slope of a positive series over the tail window.
fn tail_log_slope(times: &[f64], values: &[f64], start: usize) -> f64 {
    let n = values.len();
    (values[n - 1].ln() - values[start].ln()) / (times[n - 1] - times[start])
}

/// Checks an unnormalized run against the caterpillar dichotomy.
///
/// Caterpillars: leaf curvatures reach their predicted limits, normalized
/// leaf weights decrease, and the product of internal weights and of leaves
/// at interior spine vertices stays bounded. Other trees: the internal
/// weight sum grows, some internal weight diverges, and every edge with
/// curvature tending to 0 loses normalized weight.
pub fn check_caterpillar_theorem(
    traj: &Trajectory,
    opts: &DetectOptions,
) -> Result<CaterpillarTheoremReport, AnalysisError> {
    if traj.variant != FlowVariant::Unnormalized {
        return Err(AnalysisError::NotUnnormalized);
    }
    let tree = &traj.tree;
    let verdict = detect_limits_with(traj, opts)?;
    let report = caterpillar_classify(tree);
    let start = tail_start(traj.samples.len(), opts.tail_fraction)?;
    let times = traj.times();
    let label = |e: EdgeId| tree.edge_label(e);
    let mut checks = Vec::new();

    if report.is_caterpillar {
        let prediction = predict_limits(tree);
        let mut worst = (0.0f64, String::new());
        for p in &prediction.edges {
            if let (true, Some(value)) = (p.class.is_leaf(), p.class.predicted_value()) {
                let gap = (verdict.edge(p.edge).kappa_tail_mean - value).abs();
                if gap >= worst.0 {
                    worst = (gap, label(p.edge));
                }
            }
        }
        checks.push(TheoremCheck {
            name: "leaf curvature limits".into(),
            passed: worst.0 <= LEAF_LIMIT_TOL,
            detail: format!("largest gap {:.3e} on {}", worst.0, worst.1),
        });

        if !tree.internal_edges().is_empty() {
            let rising: Vec<String> = tree
                .leaf_edges()
                .into_iter()
                .filter(|&e| verdict.edge(e).normalized_log_slope >= 0.0)
                .map(label)
                .collect();
            checks.push(TheoremCheck {
                name: "normalized leaf weights decrease".into(),
                passed: rising.is_empty(),
                detail: if rising.is_empty() {
                    "all leaves".into()
                } else {
                    format!("not decreasing: {}", rising.join(", "))
                },
            });
        }

        let interior = if report.spine.len() > 2 {
            &report.spine[1..report.spine.len() - 1]
        } else {
            &[][..]
        };
        let members: Vec<EdgeId> = tree
            .edge_ids()
            .filter(|&e| {
                tree.edge_class(e) == EdgeClass::Internal
                    || tree.leaf_attachment(e).is_some_and(|u| interior.contains(&u))
            })
            .collect();
        if !members.is_empty() {
            let log_p: Vec<f64> = traj
                .samples
                .iter()
                .map(|s| members.iter().map(|e| s.weights()[e.0].ln()).sum::<f64>())
                .collect();
            let n = log_p.len();
            let slope = (log_p[n - 1] - log_p[start]) / (times[n - 1] - times[start]);
            checks.push(TheoremCheck {
                name: "spine product bounded".into(),
                passed: slope <= opts.diverging_slope,
                detail: format!("tail log-slope {slope:.3e} over {} edges", members.len()),
            });
        }
    } else {
        let s: Vec<f64> = traj
            .samples
            .iter()
            .map(|s| s.monitor.internal_sum.unwrap_or(f64::NAN))
            .collect();
        let slope = tail_log_slope(&times, &s, start);
        checks.push(TheoremCheck {
            name: "internal sum grows".into(),
            passed: slope > 0.0,
            detail: format!("tail log-slope of S {slope:.3e}"),
        });

        let diverging: Vec<String> = tree
            .internal_edges()
            .into_iter()
            .filter(|&e| verdict.edge(e).weight == WeightLimit::Diverging)
            .map(label)
            .collect();
        checks.push(TheoremCheck {
            name: "internal weight diverges".into(),
            passed: !diverging.is_empty(),
            detail: if diverging.is_empty() {
                "none".into()
            } else {
                diverging.join(", ")
            },
        });

        let flat: Vec<&super::detect::EdgeVerdict> = verdict
            .edges
            .iter()
            .filter(|v| v.kappa_tail_mean.abs() <= opts.tol)
            .collect();
        let bad: Vec<String> = flat
            .iter()
            .filter(|v| v.normalized_log_slope >= 0.0)
            .map(|v| label(v.edge))
            .collect();
        checks.push(TheoremCheck {
            name: "flat edges shrink".into(),
            passed: bad.is_empty(),
            detail: format!("{} edges with curvature near 0, {} not shrinking", flat.len(), bad.len()),
        });
    }
    Ok(CaterpillarTheoremReport {
        is_caterpillar: report.is_caterpillar,
        checks,
        verdict,
    })
}
