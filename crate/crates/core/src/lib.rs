//! Ricci flow on weighted trees under Lin-Lu-Yau curvature with
//! `γ(x) = 1/x`.
//!
//! Layers, bottom up: [`tree`] topology, [`curvature`] closed forms,
//! [`transport`] as an independent optimal-transport check, [`flow`] for
//! ODE integration, [`analysis`] for limit detection and theorem checks,
//! and [`io`] for file formats and the built-in example trees.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod caterpillar;
pub mod curvature;
pub mod flow;
pub mod generate;
pub mod io;
pub mod summation;
pub mod transport;
pub mod tree;
pub mod verify;

pub use caterpillar::{caterpillar_classify, CaterpillarReport};
pub use curvature::{
    kappa_all, kappa_derivative, kappa_directional, kappa_edge, kappa_general, kappa_weight_sum,
    weighted_degree, CurvatureError, CurvatureVector, Gamma, Metric,
};
pub use tree::{EdgeClass, EdgeId, TreeError, VertexId, VertexProfile, WeightedTree};
