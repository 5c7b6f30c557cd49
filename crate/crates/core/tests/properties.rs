use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trf_core::analysis::predict_limits;
use trf_core::curvature::{kappa_bounds, Gamma};
use trf_core::flow::{integrate, FlowSpec, FlowVariant, Integrator};
use trf_core::generate::{random_tree, random_weights};
use trf_core::io::{parse_trajectory_csv, write_trajectory_csv};
use trf_core::transport::{
    kantorovich_potential, lly_oracle, walk_measure, wasserstein_tree, ProbabilityMeasure,
};
use trf_core::{kappa_all, kappa_edge, kappa_general, EdgeId, Metric, VertexId, WeightedTree};

fn tree_from(seed: u64, n: usize) -> WeightedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_tree(&mut rng, n, 0.1, 10.0)
}

fn arb_tree(max_n: usize) -> impl Strategy<Value = WeightedTree> {
    (2..=max_n, any::<u64>()).prop_map(|(n, seed)| tree_from(seed, n))
}

fn arb_measure(n: usize) -> impl Strategy<Value = ProbabilityMeasure> {
    proptest::collection::vec(0.0f64..1.0, n).prop_map(move |raw| {
        let total: f64 = raw.iter().sum();
        if total <= 1e-9 {
            return ProbabilityMeasure::point(n, VertexId(0));
        }
        let mut mass: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let drift = 1.0 - mass.iter().sum::<f64>();
        mass[0] = (mass[0] + drift).max(0.0);
        ProbabilityMeasure::new(mass).unwrap()
    })
}

fn leaf_groups(tree: &WeightedTree) -> Vec<(VertexId, Vec<EdgeId>)> {
    tree.vertices()
        .filter(|&u| !tree.is_leaf(u))
        .map(|u| {
            let leaves = tree
                .neighbors(u)
                .iter()
                .filter(|(x, _)| tree.is_leaf(*x))
                .map(|&(_, e)| e)
                .collect();
            (u, leaves)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn handshake_and_split(tree in arb_tree(14)) {
        let degree_sum: usize = tree.vertices().map(|v| tree.degree(v)).sum();
        prop_assert_eq!(degree_sum, 2 * tree.edge_count());
        prop_assert_eq!(tree.edge_count() + 1, tree.vertex_count());
        for e in tree.edge_ids() {
            let (a, b) = tree.split_at_edge(e);
            prop_assert!(!a.is_empty() && !b.is_empty());
            prop_assert_eq!(a.len() + b.len(), tree.vertex_count());
            prop_assert!(a.iter().all(|v| !b.contains(v)));
            prop_assert!(a.contains(&tree.endpoints(e).0));
        }
    }

    #[test]
    fn edge_list_round_trip(tree in arb_tree(12)) {
        let back = WeightedTree::parse(&tree.to_edge_list()).unwrap();
        prop_assert_eq!(back.initial_weights(), tree.initial_weights());
        prop_assert_eq!(back.names(), tree.names());
    }

    #[test]
    fn gauss_bonnet_and_bounds(tree in arb_tree(12)) {
        let cv = kappa_all(&tree, &Metric::initial(&tree));
        prop_assert!((cv.sum() - 2.0).abs() <= 1e-12);
        for e in tree.edge_ids() {
            let (lo, hi) = kappa_bounds(&tree, e);
            let k = cv.kappa[e.0];
            prop_assert!(k >= lo - 1e-12 && k <= hi + 1e-12, "{} not in [{}, {}]", k, lo, hi);
            let (a, b) = cv.directional[e.0];
            prop_assert!((a + b - k).abs() <= 1e-12);
        }
    }

    #[test]
    fn scale_invariance(tree in arb_tree(12), c in 1e-3f64..1e3, k in -20i32..20) {
        let base = kappa_all(&tree, &Metric::initial(&tree)).kappa;
        let w = tree.initial_weights();
        // powers of two scale every term exactly
        let p2: Vec<f64> = w.iter().map(|x| x * 2f64.powi(k)).collect();
        prop_assert_eq!(&kappa_all(&tree, &Metric::new(&tree, p2).unwrap()).kappa, &base);
        let scaled: Vec<f64> = w.iter().map(|x| x * c).collect();
        let other = kappa_all(&tree, &Metric::new(&tree, scaled).unwrap()).kappa;
        for (a, b) in base.iter().zip(&other) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn general_form_matches_closed_form(tree in arb_tree(12)) {
        let m = Metric::initial(&tree);
        let power = Gamma::power(1.0, -1.0).unwrap();
        for e in tree.edge_ids() {
            let k = kappa_edge(&tree, &m, e);
            for g in [Gamma::Reciprocal, power] {
                let kg = kappa_general(&tree, &m, g, e);
                prop_assert!((kg - k).abs() <= 1e-14 * k.abs().max(1.0), "{} vs {}", kg, k);
            }
        }
    }

    #[test]
    fn leaf_comparison_and_max_leaf_bound(tree in arb_tree(12)) {
        let m = Metric::initial(&tree);
        let w = m.weights();
        let kappa = kappa_all(&tree, &m).kappa;
        for (u, leaves) in leaf_groups(&tree) {
            for &e in &leaves {
                for &g in &leaves {
                    if w[e.0] >= w[g.0] {
                        prop_assert!(kappa[e.0] >= kappa[g.0] - 1e-12);
                    }
                }
            }
            let p = tree.profile(u);
            if let Some(&top) = leaves.iter().max_by(|a, b| w[a.0].total_cmp(&w[b.0])) {
                let bound = 1.0 - (p.degree as f64 - 2.0) / p.leaf_degree as f64;
                prop_assert!(kappa[top.0] > bound - 1e-12, "{} <= {}", kappa[top.0], bound);
            }
        }
    }

    #[test]
    fn predictions_ignore_weights(tree in arb_tree(12), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let other = tree.with_weights(&random_weights(&mut rng, tree.edge_count(), 0.01, 100.0)).unwrap();
        prop_assert_eq!(predict_limits(&tree), predict_limits(&other));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn oracle_matches_closed_form(tree in arb_tree(12)) {
        let m = Metric::initial(&tree);
        for e in tree.edge_ids() {
            let k = lly_oracle(&tree, &m, Gamma::Reciprocal, e).unwrap();
            prop_assert!((k - kappa_edge(&tree, &m, e)).abs() <= 1e-9);
        }
    }

    #[test]
    fn oracle_matches_power_family(
        tree in arb_tree(10),
        scale in 0.5f64..2.0,
        exponent in prop::sample::select(vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]),
    ) {
        let m = Metric::initial(&tree);
        let g = Gamma::power(scale, exponent).unwrap();
        for e in tree.edge_ids() {
            let k = lly_oracle(&tree, &m, g, e).unwrap();
            let kg = kappa_general(&tree, &m, g, e);
            prop_assert!((k - kg).abs() <= 1e-9 * kg.abs().max(1.0), "{} vs {}", k, kg);
        }
    }

    #[test]
    fn w1_axioms((tree, a, b, c) in arb_tree(10).prop_flat_map(|t| {
        let n = t.vertex_count();
        (Just(t), arb_measure(n), arb_measure(n), arb_measure(n))
    })) {
        let m = Metric::initial(&tree);
        let w = |x: &ProbabilityMeasure, y: &ProbabilityMeasure| wasserstein_tree(&tree, &m, x, y).unwrap();
        let (ab, ba, bc, ac) = (w(&a, &b), w(&b, &a), w(&b, &c), w(&a, &c));
        prop_assert!(w(&a, &a).abs() <= 1e-10);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - ba).abs() <= 1e-10 * (1.0 + ab));
        prop_assert!(ac <= ab + bc + 1e-10 * (1.0 + ac));
        // any coupling bounds from above; the independent one is the cheapest to write
        let dist = tree.distance_matrix(m.weights());
        let product: f64 = (0..tree.vertex_count())
            .flat_map(|i| (0..tree.vertex_count()).map(move |j| (i, j)))
            .map(|(i, j)| a.mass()[i] * b.mass()[j] * dist[i][j])
            .sum();
        prop_assert!(ab <= product + 1e-10);
    }

    #[test]
    fn potential_attains_w1(tree in arb_tree(10), alpha in 0.5f64..1.0) {
        let m = Metric::initial(&tree);
        for e in tree.edge_ids() {
            let (u, v) = tree.endpoints(e);
            let g = kantorovich_potential(&tree, &m, e);
            prop_assert!(g.lipschitz_excess(&tree, &m) <= 1e-12);
            let mu = walk_measure(&tree, &m, Gamma::Reciprocal, u, alpha).unwrap();
            let nu = walk_measure(&tree, &m, Gamma::Reciprocal, v, alpha).unwrap();
            let w1 = wasserstein_tree(&tree, &m, &mu, &nu).unwrap();
            prop_assert!((w1 - g.dual_value(&mu, &nu)).abs() <= 1e-10 * (1.0 + w1));
        }
    }
}

fn flow_spec(t_end: f64) -> FlowSpec {
    FlowSpec::new(FlowVariant::Unnormalized, t_end)
        .with_integrator(Integrator::adaptive(1e-10, 1e-20))
        .with_record_every(0.05)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn unnormalized_flow_invariants(tree in arb_tree(10)) {
        let traj = integrate(&tree, &Metric::initial(&tree), &flow_spec(3.0)).unwrap();
        let log_p0: f64 = tree.initial_weights().iter().map(|w| w.ln()).sum();
        let internal = tree.internal_edges();
        let groups = leaf_groups(&tree);
        for (s, next) in traj.samples.iter().zip(traj.samples.iter().skip(1)) {
            let (w0, w1) = (s.weights(), next.weights());
            prop_assert!(w1.iter().all(|&x| x > 0.0));
            for &f in &internal {
                prop_assert!(w1[f.0] >= w0[f.0] * (1.0 - 1e-12));
            }
            for (u, leaves) in &groups {
                for &(_, f) in tree.neighbors(*u) {
                    if tree.is_leaf(tree.other_endpoint(f, *u).unwrap()) {
                        continue;
                    }
                    for &e in leaves {
                        let before = w0[f.0] - w0[e.0];
                        let after = w1[f.0] - w1[e.0];
                        prop_assert!(after >= before - 1e-9 * (1.0 + before.abs()));
                    }
                }
                for &e in leaves {
                    for &g in leaves {
                        let gap = |w: &[f64]| (w[e.0] / w[g.0] - 1.0).abs();
                        prop_assert!(gap(w1) <= gap(w0) + 1e-9);
                    }
                }
            }
        }
        for s in &traj.samples {
            let log_p: f64 = s.weights().iter().map(|w| w.ln()).sum();
            prop_assert!((log_p - log_p0 + 2.0 * s.t).abs() <= 1e-6);
        }
    }

    #[test]
    fn trajectory_csv_round_trip(tree in arb_tree(9), variant in prop::sample::select(vec![FlowVariant::Unnormalized, FlowVariant::Normalized])) {
        let m = match variant {
            FlowVariant::Unnormalized => Metric::initial(&tree),
            FlowVariant::Normalized => Metric::initial(&tree).to_normalized(),
        };
        let spec = FlowSpec::new(variant, 1.0).with_integrator(Integrator::adaptive(1e-10, 1e-20));
        let traj = integrate(&tree, &m, &spec).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).unwrap();
        let table = parse_trajectory_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        for (i, s) in traj.samples.iter().enumerate() {
            prop_assert_eq!(table.times[i].to_bits(), s.t.to_bits());
            for (a, b) in table.weights[i].iter().zip(s.weights()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            for (a, b) in table.kappa[i].iter().zip(s.kappa()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
