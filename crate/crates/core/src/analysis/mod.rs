//! Verdicts from trajectories: predicted and detected limits, the
//! caterpillar dichotomy, balance equations and leaf curvature bounds.

mod balance;
mod bounds;
mod detect;
mod predict;
mod theorem;

pub use balance::{balance_system, maximal_paths, BalancedPathSystem, TerminalKind};
pub use bounds::{
    verify_prop_bounds, BoundedLeafCheck, MaxLeafCheck, NegativeLeafCheck, PropBoundsReport,
    MAX_LEAF_SLACK, NEGATIVE_BOUND_SLACK,
};
pub use detect::{
    detect_limits, detect_limits_with, CurvatureVerdict, DetectOptions, EdgeVerdict,
    EmpiricalVerdict, WeightLimit, MIN_TAIL_SAMPLES,
};
pub use predict::{predict_limits, EdgePrediction, LimitClass, LimitPrediction};
pub use theorem::{check_caterpillar_theorem, CaterpillarTheoremReport, TheoremCheck, LEAF_LIMIT_TOL};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("trajectory has {samples} samples; the tail window needs at least {needed}")]
    TrajectoryTooShort { samples: usize, needed: usize },
    #[error("expected an unnormalized trajectory")]
    NotUnnormalized,
    #[error("not a maximal path: {0}")]
    NotMaximalPath(String),
    #[error("balance equations need κ <= 0, got {0}")]
    PositiveCurvature(f64),
}

/// Sign of a value relative to a dead band `[-eps, eps]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Run-length compressed signs of a series, ignoring the dead band
/// between sign changes.
pub fn sign_pattern(values: &[f64], eps: f64) -> Vec<Sign> {
    let mut out: Vec<Sign> = Vec::new();
    for &v in values {
        let s = if v < -eps {
            Sign::Negative
        } else if v > eps {
            Sign::Positive
        } else {
            Sign::Zero
        };
        if out.last() != Some(&s) {
            out.push(s);
        }
    }
    out
}

/// Index of the maximum if the series rises to it and falls afterwards
/// (each side monotone up to `slack`), else `None`.
pub fn rise_then_fall(values: &[f64], slack: f64) -> Option<usize> {
    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)?;
    if peak == 0 || peak + 1 == values.len() {
        return None;
    }
    let rises = values[..=peak].windows(2).all(|w| w[1] >= w[0] - slack);
    let falls = values[peak..].windows(2).all(|w| w[1] <= w[0] + slack);
    (rises && falls).then_some(peak)
}
