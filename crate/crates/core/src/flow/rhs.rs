use crate::curvature::{kappa_all_raw, kappa_weight_sum_raw, Metric, NORMALIZATION_TOL};
use crate::summation::compensated_sum;
use crate::tree::WeightedTree;

use super::{FlowError, FlowVariant};

/// `dw_e/dt = -κ_e w_e`.
pub fn rhs_unnormalized(tree: &WeightedTree, metric: &Metric) -> Vec<f64> {
    let w = metric.weights();
    let kappa = kappa_all_raw(tree, w).kappa;
    kappa.iter().zip(w).map(|(k, w)| -k * w).collect()
}

/// `dw_e/dt = -κ_e w_e + w_e Σ_h κ_h w_h`, tangent to `Σw = 1`.
pub fn rhs_normalized(tree: &WeightedTree, metric: &Metric) -> Result<Vec<f64>, FlowError> {
    let total = metric.total();
    if !metric.is_normalized() || (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(FlowError::NotNormalized { sum: total });
    }
    Ok(rhs_raw(tree, metric.weights(), FlowVariant::Normalized, &[]))
}

/// RHS with frozen entries held fixed; frozen edges still enter every
/// weighted degree.
pub(crate) fn rhs_raw(
    tree: &WeightedTree,
    w: &[f64],
    variant: FlowVariant,
    frozen: &[bool],
) -> Vec<f64> {
    let kappa = kappa_all_raw(tree, w).kappa;
    let drift = match variant {
        FlowVariant::Unnormalized => 0.0,
        FlowVariant::Normalized => kappa_weight_sum_raw(tree, w),
    };
    kappa
        .iter()
        .zip(w)
        .enumerate()
        .map(|(i, (k, w))| {
            if frozen.get(i).copied().unwrap_or(false) {
                0.0
            } else {
                -k * w + w * drift
            }
        })
        .collect()
}

/// Rescales the free entries so the whole vector sums to one.
pub(crate) fn project_to_simplex(w: &mut [f64], frozen: &[bool]) {
    let fixed = compensated_sum(w.iter().zip(frozen).filter(|(_, &f)| f).map(|(x, _)| *x));
    let free = compensated_sum(w.iter().zip(frozen).filter(|(_, &f)| !f).map(|(x, _)| *x));
    if free > 0.0 {
        let scale = (1.0 - fixed) / free;
        for (x, &f) in w.iter_mut().zip(frozen) {
            if !f {
                *x *= scale;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple() -> WeightedTree {
        WeightedTree::parse("x u 1\ny u 1\nu v 1\nv z 1").unwrap()
    }

    #[test]
    fn unnormalized_examples() {
        let path = WeightedTree::parse("a b 1\nb c 2\nc d 3").unwrap();
        let r = rhs_unnormalized(&path, &Metric::initial(&path));
        assert_eq!(r[path.edge("b", "c").unwrap().0], 0.0);

        let t = simple();
        let m = Metric::new(&t, vec![1.7, 0.4, 2.0, 0.3]).unwrap();
        let r = rhs_unnormalized(&t, &m);
        let vz = t.edge("v", "z").unwrap().0;
        assert!((r[vz] + 0.3).abs() < 1e-15);
        // dw_uv/dt = 1 / (1/w_uv + 1/w_ux + 1/w_uy)
        let uv = t.edge("u", "v").unwrap().0;
        assert!((r[uv] - 1.0 / (1.0 / 1.7 + 1.0 / 0.4 + 1.0 / 2.0)).abs() < 1e-15);

        let r = rhs_unnormalized(&t, &Metric::initial(&t));
        assert!((r[uv] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_is_tangent() {
        let t = simple();
        let m = Metric::initial(&t).to_normalized();
        let r = rhs_normalized(&t, &m).unwrap();
        assert!(r.iter().sum::<f64>().abs() < 1e-12);

        let k2 = WeightedTree::parse("a b 1").unwrap();
        let m = Metric::normalized(&k2, vec![1.0]).unwrap();
        assert_eq!(rhs_normalized(&k2, &m).unwrap(), vec![0.0]);

        assert!(matches!(
            rhs_normalized(&t, &Metric::initial(&t)),
            Err(FlowError::NotNormalized { .. })
        ));
    }

    #[test]
    fn projection_keeps_frozen_entries() {
        let mut w = vec![1e-14, 0.5, 1.5];
        project_to_simplex(&mut w, &[true, false, false]);
        assert_eq!(w[0], 1e-14);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
