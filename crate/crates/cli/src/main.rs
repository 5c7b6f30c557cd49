// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trf_core::flow::{FlowSpec, FlowVariant, Integrator};
use trf_core::io::{builtin_with_metric, IoError, BUILTIN_NAMES};
use trf_core::WeightedTree;

mod commands;
mod style;

#[derive(Parser, Debug)]
#[command(name = "trf", version, about = "Ricci flow on weighted trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print per-edge curvature and weighted degrees.
    Curvature(TreeArgs),
    /// Integrate the flow and write trajectory.csv and monitors.csv.
    Simulate {
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        flow: FlowArgs,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Caterpillar verdict, spine and predicted limits.
    Classify(TreeArgs),
    /// Randomized self-check suite; exit code 2 on any failure.
    Verify {
        #[command(flatten)]
        tree: OptionalTreeArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random cases on top of the fixed ones.
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, hide = true)]
        corrupt_curvature: bool,
    },
    /// Regenerate the data behind the example figures.
    Reproduce {
        #[arg(value_parser = ["simple", "t1", "t2", "t3"])]
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 40.0)]
        t_end: f64,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct TreeSource {
    /// Edge-list file: one `u v weight` per line, `#` comments.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Built-in example tree.
    #[arg(long, value_parser = BUILTIN_NAMES)]
    builtin: Option<String>,
}

#[derive(Args, Debug)]
struct TreeArgs {
    #[command(flatten)]
    source: TreeSource,
    /// Named initial metric of a builtin (default `unit`).
    #[arg(long, requires = "builtin")]
    metric: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = false, multiple = false)]
struct OptionalSource {
    #[arg(long)]
    tree: Option<PathBuf>,
    #[arg(long, value_parser = BUILTIN_NAMES)]
    builtin: Option<String>,
}

#[derive(Args, Debug)]
struct OptionalTreeArgs {
    #[command(flatten)]
    source: OptionalSource,
    #[arg(long, requires = "builtin")]
    metric: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowKind {
    Unnormalized,
    Normalized,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long, value_enum, default_value_t = FlowKind::Unnormalized)]
    flow: FlowKind,
    #[arg(long, default_value_t = 40.0)]
    t_end: f64,
    /// Fixed-step RK4 with this step.
    #[arg(long, conflicts_with_all = ["adaptive", "rel_tol", "abs_tol"])]
    dt: Option<f64>,
    /// Adaptive Dormand-Prince 5(4) (the default).
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-20)]
    abs_tol: f64,
    #[arg(long, default_value_t = 0.1)]
    record_every: f64,
}

impl FlowArgs {
    fn spec(&self) -> FlowSpec {
        let variant = match self.flow {
            FlowKind::Unnormalized => FlowVariant::Unnormalized,
            FlowKind::Normalized => FlowVariant::Normalized,
        };
        let integrator = match self.dt {
            Some(dt) => Integrator::FixedRk4 { dt },
            None => Integrator::adaptive(self.rel_tol, self.abs_tol),
        };
        FlowSpec::new(variant, self.t_end)
            .with_integrator(integrator)
            .with_record_every(self.record_every)
    }
}

pub enum CliError {
    Input(String),
    Verification(String),
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Input(e.to_string())
    }
}

/// A tree plus the label it is reported under.
pub struct Loaded {
    pub label: String,
    pub tree: WeightedTree,
}

fn load(tree: Option<&PathBuf>, builtin: Option<&String>, metric: Option<&String>) -> Result<Loaded, CliError> {
    if let Some(path) = tree {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let tree = WeightedTree::parse(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok(Loaded {
            label: path.display().to_string(),
            tree,
        });
    }
    let name = builtin.expect("clap enforces one source");
    let metric = metric.map(String::as_str).unwrap_or("unit");
    Ok(Loaded {
        label: if metric == "unit" {
            name.clone()
        } else {
            format!("{name}/{metric}")
        },
        tree: builtin_with_metric(name, metric)?,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Curvature(args) => {
            let loaded = load(args.source.tree.as_ref(), args.source.builtin.as_ref(), args.metric.as_ref())?;
            commands::curvature(&loaded)
        }
        Command::Simulate { tree, flow, out } => {
            let loaded = load(tree.source.tree.as_ref(), tree.source.builtin.as_ref(), tree.metric.as_ref())?;
            commands::simulate(&loaded, &flow.spec(), &out)
        }
        Command::Classify(args) => {
            let loaded = load(args.source.tree.as_ref(), args.source.builtin.as_ref(), args.metric.as_ref())?;
            commands::classify(&loaded)
        }
        Command::Verify {
            tree,
            seed,
            count,
            corrupt_curvature,
        } => {
            let loaded = if tree.source.tree.is_some() || tree.source.builtin.is_some() {
                Some(load(tree.source.tree.as_ref(), tree.source.builtin.as_ref(), tree.metric.as_ref())?)
            } else {
                None
            };
            commands::verify(loaded, seed, count, corrupt_curvature)
        }
        Command::Reproduce { name, out, t_end } => commands::reproduce(&name, &out, t_end),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
