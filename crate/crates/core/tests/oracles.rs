//! Independent oracles: a linear program for W1, brute-force caterpillar
//! recognition, and finite differences for the curvature derivative.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trf_core::generate::{all_trees_up_to, random_tree};
use trf_core::transport::{wasserstein_tree, ProbabilityMeasure};
use trf_core::{caterpillar_classify, kappa_all, kappa_derivative, Metric, VertexId, WeightedTree};

fn lp_w1(dist: &[Vec<f64>], mu: &[f64], nu: &[f64]) -> f64 {
    let n = mu.len();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let plan: Vec<Vec<_>> = (0..n)
        .map(|i| (0..n).map(|j| problem.add_var(dist[i][j], (0.0, f64::INFINITY))).collect())
        .collect();
    for i in 0..n {
        let row: Vec<_> = (0..n).map(|j| (plan[i][j], 1.0)).collect();
        problem.add_constraint(&row, ComparisonOp::Eq, mu[i]);
        let col: Vec<_> = (0..n).map(|j| (plan[j][i], 1.0)).collect();
        problem.add_constraint(&col, ComparisonOp::Eq, nu[i]);
    }
    problem.solve().expect("feasible transport").objective()
}

fn random_measure(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.6) { rng.random::<f64>() } else { 0.0 })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut m = vec![0.0; n];
        m[rng.random_range(0..n)] = 1.0;
        return m;
    }
    let mut m: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let drift = 1.0 - m.iter().sum::<f64>();
    let top = (0..n).max_by(|&a, &b| m[a].total_cmp(&m[b])).unwrap();
    m[top] += drift;
    m
}

#[test]
fn tree_w1_matches_linear_program() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(2..=7);
        let tree = random_tree(&mut rng, n, 0.1, 10.0);
        let metric = Metric::initial(&tree);
        let dist = tree.distance_matrix(metric.weights());
        let (a, b) = (random_measure(&mut rng, n), random_measure(&mut rng, n));
        let exact = wasserstein_tree(
            &tree,
            &metric,
            &ProbabilityMeasure::new(a.clone()).unwrap(),
            &ProbabilityMeasure::new(b.clone()).unwrap(),
        )
        .unwrap();
        worst = worst.max((exact - lp_w1(&dist, &a, &b)).abs());
    }
    assert!(worst <= 1e-9, "worst gap {worst:e}");
}

/// Definition checked literally: some vertex path (two or more vertices)
/// leaves only leaves of the tree off it.
fn brute_force_caterpillar(tree: &WeightedTree) -> bool {
    let n = tree.vertex_count();
    (0..n).any(|a| {
        (0..n).filter(|&b| b != a).any(|b| {
            let path = tree.path_between(VertexId(a), VertexId(b));
            tree.vertices().all(|v| path.contains(&v) || tree.is_leaf(v))
        })
    })
}

fn off_spine_leaves(tree: &WeightedTree, spine: &[VertexId], v: VertexId) -> usize {
    tree.neighbors(v)
        .iter()
        .filter(|(x, _)| !spine.contains(x) && tree.is_leaf(*x))
        .count()
}

#[test]
fn caterpillar_recognition_matches_brute_force() {
    for tree in all_trees_up_to(8) {
        let report = caterpillar_classify(&tree);
        assert_eq!(report.is_caterpillar, brute_force_caterpillar(&tree), "{tree}");
        if !report.is_caterpillar {
            continue;
        }
        let spine = &report.spine;
        assert!(spine.len() >= 2);
        for w in spine.windows(2) {
            assert!(tree.edge_between(w[0], w[1]).is_some());
        }
        assert!(tree.vertices().all(|v| spine.contains(&v) || tree.is_leaf(v)));
        let l = spine.len();
        for (i, &v) in spine.iter().enumerate() {
            let off = off_spine_leaves(&tree, spine, v);
            let expected = if i == 0 || i == l - 1 { tree.degree(v) - 1 } else { tree.degree(v) - 2 };
            assert_eq!(off, expected, "{tree}: spine vertex {}", tree.name(v));
            assert_eq!(report.spine_leaf_counts[i], off);
        }
    }
}

#[test]
fn non_caterpillars_have_three_witnesses() {
    let mut seen = 0;
    for tree in all_trees_up_to(10) {
        let report = caterpillar_classify(&tree);
        if report.is_caterpillar {
            continue;
        }
        seen += 1;
        let mut w = report.witnesses.clone();
        w.sort();
        w.dedup();
        assert!(w.len() >= 3, "{tree}");
        for v in w {
            let p = tree.profile(v);
            assert!(!tree.is_leaf(v));
            assert_eq!(p.leaf_degree + 1, p.degree, "{tree}: {}", tree.name(v));
        }
    }
    // trees minus caterpillars for n = 7..10: (11-10) + (23-20) + (47-36) + (106-72)
    assert_eq!(seen, 49);
}

#[test]
fn curvature_derivative_matches_finite_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let tree = random_tree(&mut rng, 8, 0.1, 10.0);
        let metric = Metric::initial(&tree);
        let w = metric.weights();
        let kappa = kappa_all(&tree, &metric).kappa;
        let velocity: Vec<f64> = w.iter().zip(&kappa).map(|(w, k)| -k * w).collect();
        let h = 1e-6;
        let shifted = |s: f64| {
            let ws: Vec<f64> = w.iter().zip(&velocity).map(|(w, v)| w + s * v).collect();
            kappa_all(&tree, &Metric::new(&tree, ws).unwrap()).kappa
        };
        let (plus, minus) = (shifted(h), shifted(-h));
        let analytic = kappa_derivative(&tree, &metric);
        for e in tree.edge_ids() {
            let fd = (plus[e.0] - minus[e.0]) / (2.0 * h);
            assert!((fd - analytic[e.0]).abs() <= 1e-6, "{tree}: {} vs {}", fd, analytic[e.0]);
        }
    }
}
