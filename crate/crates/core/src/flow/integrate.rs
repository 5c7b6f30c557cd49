use crate::curvature::{kappa_all_raw, Metric, NORMALIZATION_TOL};
use crate::tree::WeightedTree;

use super::monitor::monitor;
use super::rhs::{project_to_simplex, rhs_raw};
use super::{FlowError, FlowSpec, FlowVariant, Integrator, Sample, Termination, Trajectory};

// Dormand-Prince 5(4) tableau; row 6 doubles as the fifth-order weights.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Fixed-step RK4 halves a step at most this many times.
const MAX_RK4_HALVINGS: u32 = 40;

struct System<'a> {
    tree: &'a WeightedTree,
    variant: FlowVariant,
    initial: Vec<f64>,
}

impl System<'_> {
    fn rhs(&self, y: &[f64], frozen: &[bool]) -> Vec<f64> {
        rhs_raw(self.tree, y, self.variant, frozen)
    }

    fn sample(&self, t: f64, y: &[f64], frozen: &[bool]) -> Sample {
        let curvature = kappa_all_raw(self.tree, y);
        let monitor = monitor(self.tree, self.variant, &self.initial, t, y, &curvature.kappa);
        Sample {
            t,
            metric: Metric::from_parts(y.to_vec(), self.variant == FlowVariant::Normalized),
            curvature,
            monitor,
            frozen: frozen.to_vec(),
        }
    }

    fn trajectory(&self, samples: Vec<Sample>, termination: Termination) -> Trajectory {
        Trajectory {
            tree: self.tree.clone(),
            variant: self.variant,
            samples,
            termination,
        }
    }
}

fn axpy(y: &[f64], h: f64, stages: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (k, &a) in stages.iter().zip(coeffs) {
        if a != 0.0 {
            for (o, ki) in out.iter_mut().zip(k) {
                *o += h * a * ki;
            }
        }
    }
    out
}

fn admissible(y: &[f64]) -> bool {
    y.iter().all(|&x| x > 0.0 && x.is_finite())
}

/// One Dormand-Prince attempt. `None` if a stage leaves the positive orthant.
fn dopri_step(
    sys: &System,
    y: &[f64],
    k1: &[f64],
    h: f64,
    frozen: &[bool],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut stages = vec![k1.to_vec()];
    for s in 1..7 {
        let ys = axpy(y, h, &stages, &A[s][..s]);
        if !admissible(&ys) {
            return None;
        }
        stages.push(sys.rhs(&ys, frozen));
    }
    let y_new = axpy(y, h, &stages[..6], &A[6]);
    let err = axpy(&vec![0.0; y.len()], h, &stages, &E);
    Some((y_new, err))
}

fn rk4_step(sys: &System, y: &[f64], h: f64, frozen: &[bool]) -> Option<Vec<f64>> {
    let k1 = sys.rhs(y, frozen);
    let y2 = axpy(y, h, std::slice::from_ref(&k1), &[0.5]);
    if !admissible(&y2) {
        return None;
    }
    let k2 = sys.rhs(&y2, frozen);
    let y3 = axpy(y, h, std::slice::from_ref(&k2), &[0.5]);
    if !admissible(&y3) {
        return None;
    }
    let k3 = sys.rhs(&y3, frozen);
    let y4 = axpy(y, h, std::slice::from_ref(&k3), &[1.0]);
    if !admissible(&y4) {
        return None;
    }
    let k4 = sys.rhs(&y4, frozen);
    let out = axpy(y, h, &[k1, k2, k3, k4], &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0]);
    admissible(&out).then_some(out)
}

/// Scaled max-norm of the local error estimate over free edges.
fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], frozen: &[bool], rel: f64, abs: f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..y.len() {
        if frozen[i] {
            continue;
        }
        let scale = abs + rel * y[i].abs().max(y_new[i].abs());
        worst = worst.max(err[i].abs() / scale);
    }
    worst
}

fn initial_step(y: &[f64], f: &[f64], rel: f64, abs: f64) -> f64 {
    let mut d0 = 0.0f64;
    let mut d1 = 0.0f64;
    for (yi, fi) in y.iter().zip(f) {
        let scale = abs + rel * yi.abs();
        d0 = d0.max(yi.abs() / scale);
        d1 = d1.max(fi.abs() / scale);
    }
    if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
}

/// Integrates the flow from `initial` over `[0, spec.t_end]`.
///
/// Samples are taken at multiples of `record_every` and at `t_end`. Steps
/// that would leave the positive orthant are rejected and shrunk. Edges
/// below `weight_floor` are frozen there and flagged; once all edges are
/// frozen the run stops with [`Termination::WeightFloor`].
pub fn integrate(
    tree: &WeightedTree,
    initial: &Metric,
    spec: &FlowSpec,
) -> Result<Trajectory, FlowError> {
    spec.validate()?;
    let y0 = Metric::new(tree, initial.weights().to_vec())?.into_weights();
    if spec.variant == FlowVariant::Normalized {
        let sum: f64 = crate::summation::compensated_sum(y0.iter().copied());
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(FlowError::NotNormalized { sum });
        }
    }
    let sys = System {
        tree,
        variant: spec.variant,
        initial: y0.clone(),
    };
    let m = y0.len();
    let mut y = y0;
    let mut frozen = vec![false; m];
    let mut t = 0.0f64;
    let mut samples = vec![sys.sample(0.0, &y, &frozen)];

    let (rel, abs, dt_min, dt_max) = match spec.integrator {
        Integrator::Adaptive {
            rel_tol,
            abs_tol,
            dt_min,
            dt_max,
        } => (rel_tol, abs_tol, dt_min, dt_max),
        Integrator::FixedRk4 { dt } => (0.0, 0.0, dt / f64::powi(2.0, MAX_RK4_HALVINGS as i32), dt),
    };
    let mut k1 = sys.rhs(&y, &frozen);
    let mut h = match spec.integrator {
        Integrator::Adaptive { .. } => initial_step(&y, &k1, rel, abs).clamp(dt_min, dt_max),
        Integrator::FixedRk4 { dt } => dt,
    };

    let mut index = 1u64;
    loop {
        let target = (index as f64 * spec.record_every).min(spec.t_end);
        while t < target {
            if k1.iter().any(|x| !x.is_finite()) {
                return Err(FlowError::NonFiniteState { t });
            }
            let remaining = target - t;
            if remaining <= 1e-13 * target.max(1.0) {
                t = target;
                break;
            }
            let clipped = h >= remaining;
            let h_try = if clipped { remaining } else { h };

            let accepted = match spec.integrator {
                Integrator::Adaptive { .. } => match dopri_step(&sys, &y, &k1, h_try, &frozen) {
                    Some((y_new, err)) if admissible(&y_new) => {
                        let norm = error_norm(&y, &y_new, &err, &frozen, rel, abs);
                        if norm <= 1.0 {
                            let factor = if norm == 0.0 {
                                5.0
                            } else {
                                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
                            };
                            let proposal = h_try * factor;
                            h = if clipped && factor >= 1.0 { proposal.max(h) } else { proposal };
                            Some(y_new)
                        } else {
                            h = h_try * (0.9 * norm.powf(-0.2)).max(0.2);
                            None
                        }
                    }
                    _ => {
                        h = h_try * 0.5;
                        None
                    }
                },
                Integrator::FixedRk4 { dt } => match rk4_step(&sys, &y, h_try, &frozen) {
                    Some(y_new) => {
                        h = dt;
                        Some(y_new)
                    }
                    None => {
                        h = h_try * 0.5;
                        None
                    }
                },
            };
            h = h.min(dt_max);

            match accepted {
                Some(y_new) => {
                    y = y_new;
                    t = if clipped { target } else { t + h_try };
                    for (x, f) in y.iter_mut().zip(frozen.iter_mut()) {
                        if !*f && *x < spec.weight_floor {
                            *x = spec.weight_floor;
                            *f = true;
                        }
                    }
                    if spec.variant == FlowVariant::Normalized {
                        project_to_simplex(&mut y, &frozen);
                    }
                    if frozen.iter().all(|&f| f) {
                        samples.push(sys.sample(t, &y, &frozen));
                        return Ok(sys.trajectory(samples, Termination::WeightFloor));
                    }
                    k1 = sys.rhs(&y, &frozen);
                }
                None if h < dt_min => {
                    samples.push(sys.sample(t, &y, &frozen));
                    let partial = Box::new(sys.trajectory(samples, Termination::StepUnderflow));
                    return Err(FlowError::StepUnderflow { t, dt: h, partial });
                }
                None => {}
            }
        }
        if y.iter().any(|x| !x.is_finite()) {
            return Err(FlowError::NonFiniteState { t });
        }
        samples.push(sys.sample(target, &y, &frozen));
        if target >= spec.t_end {
            break;
        }
        index += 1;
    }
    Ok(sys.trajectory(samples, Termination::ReachedTEnd))
}
