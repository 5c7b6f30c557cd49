use crate::curvature::kappa_weight_sum_raw;
use crate::flow::{FlowVariant, Trajectory};
use crate::tree::EdgeId;

use super::AnalysisError;

/// Thresholds for finite-horizon limit detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectOptions {
    /// Fraction of samples (from the end) forming the tail window.
    pub tail_fraction: f64,
    /// Maximum curvature gap over `E+` for a constant-curvature verdict.
    pub tol: f64,
    /// Mean `d(log w~)/dt` over the tail at or above which a weight diverges.
    pub diverging_slope: f64,
    /// Level below which a decreasing weight counts as converged to zero.
    pub zero_level: f64,
    /// Log-slope at or below which a weight decays exponentially to zero.
    pub decay_slope: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        DetectOptions {
            tail_fraction: 0.25,
            tol: 1e-2,
            diverging_slope: 1e-3,
            zero_level: 1e-6,
            decay_slope: -1e-2,
        }
    }
}

/// Minimum number of samples in the tail window.
pub const MIN_TAIL_SAMPLES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightLimit {
    Zero,
    Finite(f64),
    Diverging,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureVerdict {
    ConstantCurvature(f64),
    NotConstant,
    /// Some edge of `E+` still moves by more than the tolerance in the tail.
    Inconclusive,
}

impl CurvatureVerdict {
    /// Constant curvature with `|τ| <= tol`.
    pub fn is_zero(&self, tol: f64) -> bool {
        matches!(self, CurvatureVerdict::ConstantCurvature(tau) if tau.abs() <= tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVerdict {
    pub edge: EdgeId,
    /// Class of the unnormalized weight.
    pub weight: WeightLimit,
    /// Class of the normalized weight; `Finite` carries the last value.
    pub normalized: WeightLimit,
    /// Mean `d(log w~)/dt` over the tail.
    pub log_slope: f64,
    /// Mean `d(log w)/dt` of the normalized weight over the tail.
    pub normalized_log_slope: f64,
    pub kappa_tail_mean: f64,
    /// `max - min` of κ over the tail.
    pub kappa_tail_variation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalVerdict {
    pub edges: Vec<EdgeVerdict>,
    /// Edges whose normalized weight does not go to zero.
    pub e_plus: Vec<EdgeId>,
    pub constant_curvature: CurvatureVerdict,
    pub tail_start: f64,
    pub tail_end: f64,
}

impl EmpiricalVerdict {
    pub fn edge(&self, e: EdgeId) -> &EdgeVerdict {
        &self.edges[e.0]
    }

    /// Edges whose normalized weight goes to zero.
    pub fn cutting_edges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|v| v.normalized == WeightLimit::Zero)
            .map(|v| v.edge)
            .collect()
    }
}

/// Index of the first sample in the tail window.
pub(crate) fn tail_start(len: usize, fraction: f64) -> Result<usize, AnalysisError> {
    let count = ((len as f64) * fraction).floor() as usize;
    if count < MIN_TAIL_SAMPLES || count > len {
        return Err(AnalysisError::TrajectoryTooShort {
            samples: len,
            needed: (MIN_TAIL_SAMPLES as f64 / fraction).ceil() as usize,
        });
    }
    Ok(len - count)
}

/// Per-sample `(log w~, log w)`: unnormalized and normalized log-weights.
/// For a normalized input the unnormalized logs are recovered up to a
/// common additive constant from `d log Σw~/dt = -Σκw`.
pub(crate) fn log_weights(traj: &Trajectory) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut unnorm = Vec::with_capacity(traj.samples.len());
    let mut norm = Vec::with_capacity(traj.samples.len());
    let mut log_scale = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for s in &traj.samples {
        let logs: Vec<f64> = s.weights().iter().map(|w| w.ln()).collect();
        match traj.variant {
            FlowVariant::Unnormalized => {
                let log_total = s.metric.total().ln();
                norm.push(logs.iter().map(|l| l - log_total).collect());
                unnorm.push(logs);
            }
            FlowVariant::Normalized => {
                let drift = kappa_weight_sum_raw(&traj.tree, s.weights());
                if let Some((t0, d0)) = prev {
                    log_scale -= 0.5 * (drift + d0) * (s.t - t0);
                }
                prev = Some((s.t, drift));
                unnorm.push(logs.iter().map(|l| l + log_scale).collect());
                norm.push(logs);
            }
        }
    }
    (unnorm, norm)
}

pub fn detect_limits(
    traj: &Trajectory,
    tail_fraction: f64,
    tol: f64,
) -> Result<EmpiricalVerdict, AnalysisError> {
    detect_limits_with(
        traj,
        &DetectOptions {
            tail_fraction,
            tol,
            ..DetectOptions::default()
        },
    )
}

/// Classifies weight and curvature limits from the tail of a trajectory.
///
/// A weight is `Diverging` when its tail log-slope is at least
/// `diverging_slope`; `Zero` when it is frozen at the floor, decays with
/// log-slope at most `decay_slope`, or is decreasing below `zero_level`;
/// otherwise `Finite`. `E+` collects edges whose normalized weight is not
/// `Zero`.
pub fn detect_limits_with(
    traj: &Trajectory,
    opts: &DetectOptions,
) -> Result<EmpiricalVerdict, AnalysisError> {
    let n = traj.samples.len();
    let start = tail_start(n, opts.tail_fraction)?;
    let (first, last) = (&traj.samples[start], &traj.samples[n - 1]);
    let span = last.t - first.t;
    let (log_unnorm, log_norm) = log_weights(traj);

    let classify = |slope: f64, level: Option<f64>, frozen: bool, allow_diverging: bool| {
        let decreasing = slope < 0.0;
        if frozen
            || slope <= opts.decay_slope
            || (decreasing && level.is_some_and(|w| w <= opts.zero_level))
        {
            WeightLimit::Zero
        } else if allow_diverging && slope >= opts.diverging_slope {
            WeightLimit::Diverging
        } else {
            WeightLimit::Finite(level.unwrap_or(f64::NAN))
        }
    };

    let mut edges = Vec::with_capacity(traj.tree.edge_count());
    for e in traj.tree.edge_ids() {
        let i = e.0;
        let frozen = last.frozen[i];
        let log_slope = (log_unnorm[n - 1][i] - log_unnorm[start][i]) / span;
        let normalized_log_slope = (log_norm[n - 1][i] - log_norm[start][i]) / span;
        let unnorm_level = match traj.variant {
            FlowVariant::Unnormalized => Some(last.weights()[i]),
            FlowVariant::Normalized => None,
        };
        let weight = classify(log_slope, unnorm_level, frozen, true);
        let normalized = classify(normalized_log_slope, Some(log_norm[n - 1][i].exp()), frozen, false);

        let tail: Vec<f64> = traj.samples[start..].iter().map(|s| s.kappa()[i]).collect();
        let kappa_tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
        let (lo, hi) = tail
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &k| (lo.min(k), hi.max(k)));
        edges.push(EdgeVerdict {
            edge: e,
            weight,
            normalized,
            log_slope,
            normalized_log_slope,
            kappa_tail_mean,
            kappa_tail_variation: hi - lo,
        });
    }

    let e_plus: Vec<EdgeId> = edges
        .iter()
        .filter(|v| v.normalized != WeightLimit::Zero)
        .map(|v| v.edge)
        .collect();
    let constant_curvature = if e_plus.is_empty()
        || e_plus.iter().any(|e| edges[e.0].kappa_tail_variation > opts.tol)
    {
        CurvatureVerdict::Inconclusive
    } else {
        let means: Vec<f64> = e_plus.iter().map(|e| edges[e.0].kappa_tail_mean).collect();
        let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo <= opts.tol {
            CurvatureVerdict::ConstantCurvature(means.iter().sum::<f64>() / means.len() as f64)
        } else {
            CurvatureVerdict::NotConstant
        }
    };
    Ok(EmpiricalVerdict {
        edges,
        e_plus,
        constant_curvature,
        tail_start: first.t,
        tail_end: last.t,
    })
}
