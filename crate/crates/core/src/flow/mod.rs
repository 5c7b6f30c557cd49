//! Continuous-time Ricci flow on a tree.
//!
//! Unnormalized: `w' = -κ w`. Normalized: `w' = -κ w + w Σκw`, which keeps
//! `Σw = 1`. Both are integrated with an adaptive Dormand-Prince 5(4) pair
//! or with classical RK4 at a fixed step.

mod integrate;
mod monitor;
mod rhs;

pub use integrate::integrate;
pub use monitor::{leaf_pairs, monitor, MonitorRecord};
pub use rhs::{rhs_normalized, rhs_unnormalized};

use thiserror::Error;

use crate::curvature::{CurvatureError, CurvatureVector, Metric};
use crate::tree::{EdgeId, WeightedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowVariant {
    Unnormalized,
    Normalized,
}

impl FlowVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            FlowVariant::Unnormalized => "unnormalized",
            FlowVariant::Normalized => "normalized",
        }
    }
}

impl std::str::FromStr for FlowVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unnormalized" => Ok(FlowVariant::Unnormalized),
            "normalized" => Ok(FlowVariant::Normalized),
            other => Err(format!("unknown flow variant {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    FixedRk4 {
        dt: f64,
    },
    Adaptive {
        rel_tol: f64,
        abs_tol: f64,
        dt_min: f64,
        dt_max: f64,
    },
}

impl Integrator {
    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Self {
        Integrator::Adaptive {
            rel_tol,
            abs_tol,
            dt_min: 1e-12,
            dt_max: 1.0,
        }
    }
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::adaptive(1e-8, 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpec {
    pub variant: FlowVariant,
    pub t_end: f64,
    pub integrator: Integrator,
    /// Sampling stride in time units.
    pub record_every: f64,
    /// Edges that fall below this are frozen at it.
    pub weight_floor: f64,
}

impl FlowSpec {
    pub fn new(variant: FlowVariant, t_end: f64) -> Self {
        FlowSpec {
            variant,
            t_end,
            integrator: Integrator::default(),
            record_every: 0.1,
            weight_floor: 1e-14,
        }
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn with_record_every(mut self, record_every: f64) -> Self {
        self.record_every = record_every;
        self
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        let problem = if !positive(self.t_end) {
            Some(format!("t_end {} must be positive", self.t_end))
        } else if !positive(self.record_every) {
            Some(format!("record_every {} must be positive", self.record_every))
        } else if !positive(self.weight_floor) {
            Some(format!("weight_floor {} must be positive", self.weight_floor))
        } else {
            match self.integrator {
                Integrator::FixedRk4 { dt } if !positive(dt) => {
                    Some(format!("dt {dt} must be positive"))
                }
                Integrator::Adaptive {
                    rel_tol,
                    abs_tol,
                    dt_min,
                    dt_max,
                } => {
                    if !positive(rel_tol) || !positive(abs_tol) {
                        Some("tolerances must be positive".to_string())
                    } else if !positive(dt_min) || !positive(dt_max) || dt_min > dt_max {
                        Some(format!("need 0 < dt_min <= dt_max, got {dt_min} and {dt_max}"))
                    } else {
                        None
                    }
                }
                _ => None,
            }
        };
        match problem {
            Some(msg) => Err(FlowError::InvalidSpec(msg)),
            None => Ok(()),
        }
    }
}

impl Default for FlowSpec {
    fn default() -> Self {
        FlowSpec::new(FlowVariant::Unnormalized, 40.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedTEnd,
    /// Every edge fell below the weight floor.
    WeightFloor,
    StepUnderflow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub metric: Metric,
    pub curvature: CurvatureVector,
    pub monitor: MonitorRecord,
    /// Edges held at the weight floor.
    pub frozen: Vec<bool>,
}

impl Sample {
    pub fn weights(&self) -> &[f64] {
        self.metric.weights()
    }

    pub fn kappa(&self) -> &[f64] {
        &self.curvature.kappa
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub tree: WeightedTree,
    pub variant: FlowVariant,
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    /// Weight history of one edge.
    pub fn weight_series(&self, e: EdgeId) -> Vec<f64> {
        self.samples.iter().map(|s| s.weights()[e.0]).collect()
    }

    pub fn kappa_series(&self, e: EdgeId) -> Vec<f64> {
        self.samples.iter().map(|s| s.kappa()[e.0]).collect()
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectories are never empty")
    }

    /// Sample closest to time `t`.
    pub fn at(&self, t: f64) -> &Sample {
        self.samples
            .iter()
            .min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
            .expect("trajectories are never empty")
    }

    pub fn any_frozen(&self) -> bool {
        self.samples.iter().any(|s| s.frozen.iter().any(|&f| f))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid flow specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Metric(#[from] CurvatureError),
    #[error("metric sums to {sum}, the normalized flow needs 1")]
    NotNormalized { sum: f64 },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("step size {dt:e} fell below the minimum at t = {t}")]
    StepUnderflow {
        t: f64,
        dt: f64,
        partial: Box<Trajectory>,
    },
}

/// Rescales each sample of an unnormalized trajectory to unit total weight.
/// Curvatures carry over unchanged since κ is scale invariant.
pub fn normalized_from_unnormalized(traj: &Trajectory) -> Trajectory {
    let initial = traj.samples[0].metric.to_normalized();
    let samples = traj
        .samples
        .iter()
        .map(|s| {
            let metric = s.metric.to_normalized();
            let monitor = monitor(
                &traj.tree,
                FlowVariant::Normalized,
                initial.weights(),
                s.t,
                metric.weights(),
                &s.curvature.kappa,
            );
            Sample {
                t: s.t,
                curvature: s.curvature.clone(),
                monitor,
                frozen: s.frozen.clone(),
                metric,
            }
        })
        .collect();
    Trajectory {
        tree: traj.tree.clone(),
        variant: FlowVariant::Normalized,
        samples,
        termination: traj.termination,
    }
}
