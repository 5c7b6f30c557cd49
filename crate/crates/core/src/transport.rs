//! Curvature from optimal transport, independent of the closed form.
//!
//! The lazy random walk at `x` keeps mass `α` and spreads `1 - α` over the
//! neighbors in proportion to `γ(w)`. On a tree, W1 is exact through edge
//! cuts: `W = Σ_e w_e |μ(S_e) - ν(S_e)|`.

use thiserror::Error;

use crate::curvature::{weighted_degree_raw, Gamma, Metric};
use crate::summation::compensated_sum;
use crate::tree::{EdgeId, VertexId, WeightedTree};

/// Tolerance on `|Σ mass - 1|`.
pub const MASS_TOL: f64 = 1e-12;

/// Idleness values at which the limit `κ_α / (1 - α)` is sampled.
pub const ORACLE_ALPHAS: [f64; 3] = [0.5, 0.9, 0.99];

/// Agreement required between the sampled ratios.
pub const ORACLE_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("idleness {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("measure has total mass {total} or a negative entry")]
    MeasureNotNormalized { total: f64 },
    #[error("measure has {got} entries but the tree has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("κ_α/(1-α) varies with α: {values:?}")]
    NonlinearAlphaProfile { values: Vec<(f64, f64)> },
}

/// Probability measure on the vertices, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    mass: Vec<f64>,
}

impl ProbabilityMeasure {
    pub fn new(mass: Vec<f64>) -> Result<Self, TransportError> {
        let total = compensated_sum(mass.iter().copied());
        if mass.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) || (total - 1.0).abs() > MASS_TOL {
            return Err(TransportError::MeasureNotNormalized { total });
        }
        Ok(ProbabilityMeasure { mass })
    }

    pub fn point(n: usize, x: VertexId) -> Self {
        let mut mass = vec![0.0; n];
        mass[x.0] = 1.0;
        ProbabilityMeasure { mass }
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Vertices with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(i, &m)| (VertexId(i), m))
    }
}

/// Real-valued function on the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialFunction {
    pub values: Vec<f64>,
}

impl PotentialFunction {
    /// `Σ_x g(x) (μ(x) - ν(x))`.
    pub fn dual_value(&self, mu: &ProbabilityMeasure, nu: &ProbabilityMeasure) -> f64 {
        compensated_sum(
            self.values
                .iter()
                .zip(mu.mass.iter().zip(&nu.mass))
                .map(|(g, (a, b))| g * (a - b)),
        )
    }

    /// Largest `|g(x) - g(y)| - d(x, y)` over all pairs; `<= 0` means
    /// 1-Lipschitz.
    pub fn lipschitz_excess(&self, tree: &WeightedTree, metric: &Metric) -> f64 {
        let dist = tree.distance_matrix(metric.weights());
        let mut worst = f64::NEG_INFINITY;
        for (i, row) in dist.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                if i != j {
                    worst = worst.max((self.values[i] - self.values[j]).abs() - d);
                }
            }
        }
        worst
    }
}

fn check_alpha(alpha: f64) -> Result<(), TransportError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(TransportError::AlphaOutOfRange(alpha))
    }
}

pub fn walk_measure(
    tree: &WeightedTree,
    metric: &Metric,
    gamma: Gamma,
    x: VertexId,
    alpha: f64,
) -> Result<ProbabilityMeasure, TransportError> {
    check_alpha(alpha)?;
    let w = metric.weights();
    let dx = weighted_degree_raw(tree, w, gamma, x);
    let mut mass = vec![0.0; tree.vertex_count()];
    mass[x.0] = alpha;
    for &(y, e) in tree.neighbors(x) {
        mass[y.0] = (1.0 - alpha) * gamma.eval(w[e.0]) / dx;
    }
    Ok(ProbabilityMeasure { mass })
}

/// Exact W1 under the tree path metric.
pub fn wasserstein_tree(
    tree: &WeightedTree,
    metric: &Metric,
    mu: &ProbabilityMeasure,
    nu: &ProbabilityMeasure,
) -> Result<f64, TransportError> {
    for m in [mu, nu] {
        if m.mass.len() != tree.vertex_count() {
            return Err(TransportError::LengthMismatch {
                expected: tree.vertex_count(),
                got: m.mass.len(),
            });
        }
        let total = compensated_sum(m.mass.iter().copied());
        if (total - 1.0).abs() > MASS_TOL || m.mass.iter().any(|&x| x < 0.0) {
            return Err(TransportError::MeasureNotNormalized { total });
        }
    }
    let w = metric.weights();
    let mut excess: Vec<f64> = mu.mass.iter().zip(&nu.mass).map(|(a, b)| a - b).collect();
    let mut terms = Vec::with_capacity(tree.edge_count());
    // Children before parents: each subtree's net excess crosses its parent edge.
    for &(v, parent) in tree.bfs_order(VertexId(0)).iter().rev() {
        if let Some((p, e)) = parent {
            terms.push(w[e.0] * excess[v.0].abs());
            excess[p.0] += excess[v.0];
        }
    }
    Ok(compensated_sum(terms))
}

/// Optimal potential for the walks at the endpoints of `e = uv`: the
/// distance to `v` on `u`'s side and minus the distance to `v` on `v`'s
/// side. On the walk supports this is `w_ux + w_uv`, `w_uv`, `0`, `-w_vy`.
pub fn kantorovich_potential(tree: &WeightedTree, metric: &Metric, e: EdgeId) -> PotentialFunction {
    let (u, v) = tree.endpoints(e);
    let w = metric.weights();
    let mut values = vec![0.0; tree.vertex_count()];
    for (start, sign) in [(u, 1.0), (v, -1.0)] {
        let base = if start == u { w[e.0] } else { 0.0 };
        values[start.0] = sign * base;
        let mut stack = vec![(start, if start == u { v } else { u })];
        while let Some((x, from)) = stack.pop() {
            for &(y, f) in tree.neighbors(x) {
                if y != from {
                    values[y.0] = values[x.0] + sign * w[f.0];
                    stack.push((y, x));
                }
            }
        }
    }
    PotentialFunction { values }
}

/// Same potential, addressed by endpoint names.
pub fn kantorovich_potential_named(
    tree: &WeightedTree,
    metric: &Metric,
    u: &str,
    v: &str,
) -> Result<PotentialFunction, crate::tree::TreeError> {
    Ok(kantorovich_potential(tree, metric, tree.edge(u, v)?))
}

/// `κ_α(u, v) = 1 - W(μ_u^α, μ_v^α) / w_uv`.
pub fn alpha_curvature(
    tree: &WeightedTree,
    metric: &Metric,
    gamma: Gamma,
    e: EdgeId,
    alpha: f64,
) -> Result<f64, TransportError> {
    let (u, v) = tree.endpoints(e);
    let mu = walk_measure(tree, metric, gamma, u, alpha)?;
    let nu = walk_measure(tree, metric, gamma, v, alpha)?;
    Ok(1.0 - wasserstein_tree(tree, metric, &mu, &nu)? / metric.weights()[e.0])
}

/// Lin-Lu-Yau curvature as `κ_α / (1 - α)`, sampled at [`ORACLE_ALPHAS`].
/// On a tree the ratio does not depend on `α` for `α >= 1/2`; any spread
/// above [`ORACLE_AGREEMENT`] is reported as an error.
pub fn lly_oracle(
    tree: &WeightedTree,
    metric: &Metric,
    gamma: Gamma,
    e: EdgeId,
) -> Result<f64, TransportError> {
    let mut values = Vec::with_capacity(ORACLE_ALPHAS.len());
    for alpha in ORACLE_ALPHAS {
        values.push((alpha, alpha_curvature(tree, metric, gamma, e, alpha)? / (1.0 - alpha)));
    }
    let first = values[0].1;
    if values.iter().any(|&(_, r)| (r - first).abs() > ORACLE_AGREEMENT) {
        return Err(TransportError::NonlinearAlphaProfile { values });
    }
    Ok(first)
}
