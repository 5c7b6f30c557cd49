//! Seeded self-check suite over random metrics: curvature oracle agreement,
//! Gauss-Bonnet, the product decay law, W1 metric axioms and duality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{kappa_all, Gamma, Metric};
use crate::flow::{integrate, FlowSpec, FlowVariant, Integrator};
use crate::generate::{random_tree, random_weights};
use crate::io::{builtin_with_metric, metric_names, BUILTIN_NAMES};
use crate::transport::{
    kantorovich_potential, lly_oracle, walk_measure, wasserstein_tree, ProbabilityMeasure,
    ORACLE_ALPHAS,
};
use crate::tree::{EdgeId, WeightedTree};

pub const GAUSS_BONNET_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-9;
pub const PRODUCT_LAW_TOL: f64 = 1e-6;
pub const W1_TOL: f64 = 1e-10;
pub const DUALITY_TOL: f64 = 1e-10;

/// Horizon of the short flow run behind the product-law check.
const PRODUCT_LAW_T_END: f64 = 2.0;
const MAX_RANDOM_VERTICES: usize = 12;
const WEIGHT_RANGE: (f64, f64) = (0.1, 10.0);

/// Where suite cases come from.
#[derive(Debug, Clone)]
pub enum CaseSource {
    /// Builtin trees with their named metrics, then random trees.
    Corpus,
    /// The given tree as is, then random reweightings of it.
    Topology(WeightedTree),
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Number of random cases after the fixed ones.
    pub count: usize,
    /// Negative control: shifts one curvature value before checking.
    pub corrupt_curvature: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            count: 100,
            corrupt_curvature: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseFailure {
    pub case: usize,
    /// Seed that regenerates the case; `None` for fixed cases.
    pub seed: Option<u64>,
    pub tree: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub failures: Vec<CaseFailure>,
}

impl PropertyResult {
    fn new(name: &'static str, tolerance: f64) -> Self {
        PropertyResult {
            name,
            cases: 0,
            worst: 0.0,
            tolerance,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }
}

/// Seed of random case `i`; each case can be rebuilt alone from it.
pub fn case_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

struct Case {
    seed: Option<u64>,
    tree: WeightedTree,
    rng: ChaCha8Rng,
}

fn cases(source: &CaseSource, config: &SuiteConfig) -> Vec<Case> {
    let mut out = Vec::new();
    let fixed = |tree: WeightedTree, i: usize| Case {
        seed: None,
        tree,
        rng: ChaCha8Rng::seed_from_u64(case_seed(config.seed, usize::MAX - i)),
    };
    match source {
        CaseSource::Corpus => {
            for name in BUILTIN_NAMES {
                for metric in metric_names(name) {
                    let tree = builtin_with_metric(name, metric).expect("builtin metric");
                    out.push(fixed(tree, out.len()));
                }
            }
        }
        CaseSource::Topology(tree) => out.push(fixed(tree.clone(), 0)),
    }
    for i in 0..config.count {
        let seed = case_seed(config.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lo, hi) = WEIGHT_RANGE;
        let tree = match source {
            CaseSource::Corpus => {
                let n = rng.random_range(2..=MAX_RANDOM_VERTICES);
                random_tree(&mut rng, n, lo, hi)
            }
            CaseSource::Topology(t) => {
                let w = random_weights(&mut rng, t.edge_count(), lo, hi);
                t.with_weights(&w).expect("positive weights")
            }
        };
        out.push(Case {
            seed: Some(seed),
            tree,
            rng,
        });
    }
    out
}

fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> ProbabilityMeasure {
    let raw: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.5) { rng.random::<f64>() } else { 0.0 })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        return ProbabilityMeasure::point(n, crate::tree::VertexId(rng.random_range(0..n)));
    }
    let mut mass: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // push rounding into the largest atom so the total is 1 to the last bit
    let drift = 1.0 - mass.iter().sum::<f64>();
    let top = (0..n).max_by(|&a, &b| mass[a].total_cmp(&mass[b])).unwrap();
    mass[top] += drift;
    ProbabilityMeasure::new(mass).expect("normalized by construction")
}

pub fn run_suite(source: &CaseSource, config: &SuiteConfig) -> SuiteReport {
    let mut gauss = PropertyResult::new("gauss_bonnet", GAUSS_BONNET_TOL);
    let mut oracle = PropertyResult::new("oracle_equivalence", ORACLE_TOL);
    let mut product = PropertyResult::new("product_law", PRODUCT_LAW_TOL);
    let mut axioms = PropertyResult::new("w1_axioms", W1_TOL);
    let mut duality = PropertyResult::new("duality", DUALITY_TOL);

    let all = cases(source, config);
    let n_cases = all.len();
    for (i, mut case) in all.into_iter().enumerate() {
        let tree = &case.tree;
        let metric = Metric::initial(tree);
        let label = tree.to_edge_list().trim_end().replace('\n', "; ");
        let record = |p: &mut PropertyResult, err: f64, detail: String| {
            p.cases += 1;
            p.worst = p.worst.max(err);
            if !(err <= p.tolerance) {
                p.failures.push(CaseFailure {
                    case: i,
                    seed: case.seed,
                    tree: label.clone(),
                    detail,
                });
            }
        };

        let mut kappa = kappa_all(tree, &metric).kappa;
        if config.corrupt_curvature {
            kappa[0] += 1e-3;
        }

        let sum: f64 = kappa.iter().sum();
        record(&mut gauss, (sum - 2.0).abs(), format!("sum kappa = {sum}"));

        let mut worst = (0.0f64, String::new());
        for e in tree.edge_ids() {
            let err = match lly_oracle(tree, &metric, Gamma::Reciprocal, e) {
                Ok(k) => (k - kappa[e.0]).abs(),
                Err(_) => f64::INFINITY,
            };
            if !(err <= worst.0) {
                worst = (err, tree.edge_label(e));
            }
        }
        record(&mut oracle, worst.0, format!("edge {} off by {:.3e}", worst.1, worst.0));

        let spec = FlowSpec::new(FlowVariant::Unnormalized, PRODUCT_LAW_T_END)
            .with_integrator(Integrator::adaptive(1e-10, 1e-20));
        let err = match integrate(tree, &metric, &spec) {
            Ok(traj) => {
                let log_p0: f64 = metric.weights().iter().map(|w| w.ln()).sum();
                traj.samples
                    .iter()
                    .map(|s| {
                        let log_p: f64 = s.weights().iter().map(|w| w.ln()).sum();
                        (log_p - log_p0 + 2.0 * s.t).abs()
                    })
                    .fold(0.0, f64::max)
            }
            Err(_) => f64::INFINITY,
        };
        record(&mut product, err, format!("log-product drift {err:.3e}"));

        let n = tree.vertex_count();
        let [a, b, c] = [0, 1, 2].map(|_| random_measure(&mut case.rng, n));
        let w = |x: &ProbabilityMeasure, y: &ProbabilityMeasure| {
            wasserstein_tree(tree, &metric, x, y).expect("valid measures")
        };
        let (ab, ba, bc, ac, aa) = (w(&a, &b), w(&b, &a), w(&b, &c), w(&a, &c), w(&a, &a));
        let scale = 1.0 + ab.max(bc).max(ac);
        let err = [aa.abs(), (ab - ba).abs(), (ac - ab - bc).max(0.0), (-ab).max(0.0)]
            .into_iter()
            .fold(0.0, f64::max)
            / scale;
        record(&mut axioms, err, format!("W(a,a)={aa}, W(a,b)={ab}, W(b,a)={ba}, W(a,c)={ac}, W(b,c)={bc}"));

        let mut worst = (0.0f64, String::new());
        for e in tree.edge_ids() {
            let err = duality_gap(tree, &metric, e);
            if !(err <= worst.0) {
                worst = (err, tree.edge_label(e));
            }
        }
        record(&mut duality, worst.0, format!("edge {} gap {:.3e}", worst.1, worst.0));
    }

    SuiteReport {
        seed: config.seed,
        cases: n_cases,
        properties: vec![oracle, gauss, product, axioms, duality],
    }
}

/// Gap between W1 of the endpoint walks and the dual value of the explicit
/// potential, plus any Lipschitz violation, relative to the edge weight.
/// The potential is optimal for lazy walks only, hence `α >= 1/2`.
fn duality_gap(tree: &WeightedTree, metric: &Metric, e: EdgeId) -> f64 {
    let (u, v) = tree.endpoints(e);
    let g = kantorovich_potential(tree, metric, e);
    let mut gap = g.lipschitz_excess(tree, metric).max(0.0);
    for alpha in ORACLE_ALPHAS {
        let mu = walk_measure(tree, metric, Gamma::Reciprocal, u, alpha).expect("alpha in range");
        let nu = walk_measure(tree, metric, Gamma::Reciprocal, v, alpha).expect("alpha in range");
        let w1 = wasserstein_tree(tree, metric, &mu, &nu).expect("valid measures");
        gap = gap.max((w1 - g.dual_value(&mu, &nu)).abs());
    }
    gap / metric.weights()[e.0].max(1.0)
}
