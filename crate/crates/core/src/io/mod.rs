//! File formats and the built-in example corpus.
//!
//! - `trajectory.csv`: `t,w:<u>-<v>,...,kappa:<u>-<v>,...` in canonical
//!   edge order, every float written in shortest round-trip form;
//! - `monitors.csv`: one row of diagnostics per sample, empty cells for
//!   fields the flow variant does not define;
//! - `.dat`: whitespace-separated columns with a `#` header, for gnuplot;
//! - reports: `key: value` lines.

mod builtins;
mod report;

pub use builtins::{builtin_metric, builtin_tree, builtin_with_metric, metric_names, BUILTIN_NAMES};
pub use report::Report;

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::flow::Trajectory;
use crate::tree::WeightedTree;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("unknown example {0:?}")]
    UnknownExample(String),
    #[error("no metric {metric:?} for example {tree:?}")]
    UnknownMetric { tree: String, metric: String },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn trajectory_header(tree: &WeightedTree) -> String {
    let mut header = String::from("t");
    for prefix in ["w", "kappa"] {
        for e in tree.edge_ids() {
            let _ = write!(header, ",{prefix}:{}", tree.edge_label(e));
        }
    }
    header
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "{}", trajectory_header(&traj.tree))?;
    for s in &traj.samples {
        let mut row = format_f64(s.t);
        for x in s.weights().iter().chain(s.kappa()) {
            row.push(',');
            row.push_str(&format_f64(*x));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Columns read back from a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub edge_labels: Vec<String>,
    pub times: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
    pub kappa: Vec<Vec<f64>>,
}

impl TrajectoryTable {
    pub fn column(&self, label: &str) -> Option<Vec<f64>> {
        let (kind, edge) = label.split_once(':')?;
        let i = self.edge_labels.iter().position(|l| l == edge)?;
        let rows = match kind {
            "w" => &self.weights,
            "kappa" => &self.kappa,
            _ => return None,
        };
        Some(rows.iter().map(|r| r[i]).collect())
    }
}

pub fn parse_trajectory_csv(text: &str) -> Result<TrajectoryTable, IoError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| IoError::Format("empty trajectory file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"t") || cols.len().is_multiple_of(2) {
        return Err(IoError::Format(format!("bad header {header:?}")));
    }
    let m = (cols.len() - 1) / 2;
    let mut edge_labels = Vec::with_capacity(m);
    for (i, c) in cols[1..].iter().enumerate() {
        let (kind, edge) = c
            .split_once(':')
            .ok_or_else(|| IoError::Format(format!("bad column {c:?}")))?;
        let expected = if i < m { "w" } else { "kappa" };
        if kind != expected || (i >= m && edge != edge_labels[i - m]) {
            return Err(IoError::Format(format!("unexpected column {c:?}")));
        }
        if i < m {
            edge_labels.push(edge.to_string());
        }
    }
    let mut table = TrajectoryTable {
        edge_labels,
        times: Vec::new(),
        weights: Vec::new(),
        kappa: Vec::new(),
    };
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .split(',')
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| IoError::Format(format!("line {}: {e}", idx + 2)))?;
        if values.len() != cols.len() {
            return Err(IoError::Format(format!(
                "line {}: {} fields, expected {}",
                idx + 2,
                values.len(),
                cols.len()
            )));
        }
        table.times.push(values[0]);
        table.weights.push(values[1..=m].to_vec());
        table.kappa.push(values[m + 1..].to_vec());
    }
    Ok(table)
}

pub const MONITOR_HEADER: &str = "t,gauss_bonnet_residual,product_log_residual,total_weight_residual,\
max_leaf_pair_residual,internal_sum,internal_product,frozen_edges";

pub fn write_monitors_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "{MONITOR_HEADER}")?;
    let opt = |x: Option<f64>| x.map(format_f64).unwrap_or_default();
    for s in &traj.samples {
        let m = &s.monitor;
        let max_pair = m
            .leaf_pair_residuals
            .as_ref()
            .map(|r| r.iter().copied().fold(0.0, f64::max));
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            format_f64(s.t),
            format_f64(m.gauss_bonnet_residual),
            opt(m.product_log_residual),
            opt(m.total_weight_residual),
            opt(max_pair),
            opt(m.internal_sum),
            opt(m.internal_product),
            s.frozen.iter().filter(|&&f| f).count()
        )?;
    }
    Ok(())
}

/// Writes a gnuplot data block: a `#` header naming the columns, then one
/// whitespace-separated row per entry.
pub fn write_dat<W: Write>(mut out: W, title: &str, columns: &[String], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(out, "# {title}")?;
    writeln!(out, "# {}", columns.join(" "))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format_f64(*x)).collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    Ok(())
}

/// Weight and curvature panels of a trajectory, as `.dat` files in `dir`.
pub fn write_panels(traj: &Trajectory, dir: &Path, stem: &str) -> io::Result<Vec<std::path::PathBuf>> {
    let labels: Vec<String> = traj.tree.edge_ids().map(|e| traj.tree.edge_label(e)).collect();
    let mut columns = vec!["t".to_string()];
    columns.extend(labels);
    let mut written = Vec::new();
    for (suffix, title, pick) in [
        ("weights", "unnormalized edge weights", 0),
        ("curvature", "edge curvature", 1),
    ] {
        let rows: Vec<Vec<f64>> = traj
            .samples
            .iter()
            .map(|s| {
                let mut row = vec![s.t];
                row.extend_from_slice(if pick == 0 { s.weights() } else { s.kappa() });
                row
            })
            .collect();
        let path = dir.join(format!("{stem}_{suffix}.dat"));
        write_dat(std::fs::File::create(&path)?, title, &columns, &rows)?;
        written.push(path);
    }
    Ok(written)
}
