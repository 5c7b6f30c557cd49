use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use trf_core::analysis::{
    detect_limits, predict_limits, rise_then_fall, sign_pattern, Sign, WeightLimit,
};
use trf_core::flow::{integrate, FlowError, FlowSpec, FlowVariant, Integrator, Trajectory};
use trf_core::io::{
    builtin_with_metric, format_f64, write_dat, write_monitors_csv, write_panels,
    write_trajectory_csv, Report,
};
use trf_core::verify::{run_suite, CaseSource, SuiteConfig};
use trf_core::{caterpillar_classify, kappa_all, Metric, WeightedTree};

use crate::style::status;
use crate::{CliError, Loaded};

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn curvature(loaded: &Loaded) -> Result<(), CliError> {
    let tree = &loaded.tree;
    let cv = kappa_all(tree, &Metric::initial(tree));
    let width = tree
        .edge_ids()
        .map(|e| tree.edge_label(e).len())
        .max()
        .unwrap_or(4)
        .max(4);
    println!("{:<width$}  {:>24}  {:>24}  {:>24}", "edge", "kappa", "kappa_u->v", "kappa_v->u");
    for e in tree.edge_ids() {
        let (a, b) = cv.directional[e.0];
        println!(
            "{:<width$}  {:>24}  {:>24}  {:>24}",
            tree.edge_label(e),
            format_f64(cv.kappa[e.0]),
            format_f64(a),
            format_f64(b)
        );
    }
    println!();
    let vwidth = tree.names().iter().map(String::len).max().unwrap_or(6).max(6);
    println!("{:<vwidth$}  {:>6}  {:>24}", "vertex", "degree", "D");
    for v in tree.vertices() {
        println!(
            "{:<vwidth$}  {:>6}  {:>24}",
            tree.name(v),
            tree.degree(v),
            format_f64(cv.weighted_degree[v.0])
        );
    }
    println!();
    println!("sum_kappa = {}", format_f64(cv.sum()));
    Ok(())
}

fn write_outputs(traj: &Trajectory, dir: &Path, stem: &str) -> Result<(), CliError> {
    let traj_path = dir.join(format!("{stem}.csv"));
    let file = File::create(&traj_path).map_err(|e| io_err(&traj_path, e))?;
    write_trajectory_csv(traj, BufWriter::new(file)).map_err(|e| io_err(&traj_path, e))?;
    let mon_name = if stem == "trajectory" {
        "monitors.csv".to_string()
    } else {
        format!("{stem}_monitors.csv")
    };
    let mon_path = dir.join(mon_name);
    let file = File::create(&mon_path).map_err(|e| io_err(&mon_path, e))?;
    write_monitors_csv(traj, BufWriter::new(file)).map_err(|e| io_err(&mon_path, e))?;
    Ok(())
}

fn initial_metric(tree: &WeightedTree, variant: FlowVariant) -> Metric {
    let m = Metric::initial(tree);
    match variant {
        FlowVariant::Unnormalized => m,
        FlowVariant::Normalized => m.to_normalized(),
    }
}

pub fn simulate(loaded: &Loaded, spec: &FlowSpec, out: &Path) -> Result<(), CliError> {
    spec.validate().map_err(|e| CliError::Input(e.to_string()))?;
    create_dir(out)?;
    let tree = &loaded.tree;
    let traj = match integrate(tree, &initial_metric(tree, spec.variant), spec) {
        Ok(traj) => traj,
        Err(FlowError::StepUnderflow { t, dt, partial }) => {
            write_outputs(&partial, out, "trajectory")?;
            return Err(CliError::Input(format!(
                "step size underflow at t = {t} (dt = {dt}); partial trajectory written to {}",
                out.display()
            )));
        }
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    write_outputs(&traj, out, "trajectory")?;
    let mut r = Report::new();
    r.push("tree", &loaded.label)
        .push("flow", traj.variant.as_str())
        .push("samples", traj.samples.len())
        .push("t_final", format_f64(traj.last().t))
        .push("termination", format!("{:?}", traj.termination))
        .push("trajectory", out.join("trajectory.csv").display())
        .push("monitors", out.join("monitors.csv").display());
    print!("{r}");
    Ok(())
}

pub fn classify(loaded: &Loaded) -> Result<(), CliError> {
    let tree = &loaded.tree;
    let cat = caterpillar_classify(tree);
    let mut r = Report::new();
    r.push("tree", &loaded.label)
        .push("vertices", tree.vertex_count())
        .push("edges", tree.edge_count())
        .push("caterpillar", cat.is_caterpillar);
    if cat.is_caterpillar {
        let spine: Vec<&str> = cat.spine.iter().map(|&v| tree.name(v)).collect();
        r.push("spine", spine.join(" "));
        r.push(
            "expected",
            "unnormalized flow converges to constant curvature 0 on the limit support",
        );
    } else {
        let witnesses: Vec<&str> = cat.witnesses.iter().map(|&v| tree.name(v)).collect();
        r.push("witnesses", witnesses.join(" "));
        r.push(
            "expected",
            "no convergence to constant curvature 0; internal weights diverge",
        );
    }
    for p in &predict_limits(tree).edges {
        r.push(
            format!("edge {}", tree.edge_label(p.edge)),
            format!("{} ({})", p.class, p.justification),
        );
    }
    print!("{r}");
    Ok(())
}

pub fn verify(loaded: Option<Loaded>, seed: u64, count: usize, corrupt: bool) -> Result<(), CliError> {
    let source = match &loaded {
        Some(l) => CaseSource::Topology(l.tree.clone()),
        None => CaseSource::Corpus,
    };
    let report = run_suite(
        &source,
        &SuiteConfig {
            seed,
            count,
            corrupt_curvature: corrupt,
        },
    );
    println!(
        "source: {}",
        loaded.as_ref().map_or("builtin corpus + random trees", |l| l.label.as_str())
    );
    println!("seed: {seed}");
    println!("cases: {}", report.cases);
    for p in &report.properties {
        println!(
            "{} {:<20} cases={} worst={:.3e} tol={:.0e}",
            status(p.passed()),
            p.name,
            p.cases,
            p.worst,
            p.tolerance
        );
    }
    if report.passed() {
        return Ok(());
    }
    let mut msg = String::from("verification failed");
    for p in report.properties.iter().filter(|p| !p.passed()) {
        let f = &p.failures[0];
        let origin = match f.seed {
            Some(s) => format!("case seed {s}"),
            None => format!("fixed case {}", f.case),
        };
        msg.push_str(&format!(
            "\n  {}: {} failing cases; first: {origin}, suite seed {seed}: {} [{}]",
            p.name,
            p.failures.len(),
            f.detail,
            f.tree
        ));
    }
    Err(CliError::Verification(msg))
}

fn run_builtin(name: &str, metric: &str, t_end: f64) -> Result<Trajectory, CliError> {
    let tree = builtin_with_metric(name, metric)?;
    let spec = FlowSpec::new(FlowVariant::Unnormalized, t_end)
        .with_integrator(Integrator::adaptive(1e-10, 1e-20));
    integrate(&tree, &Metric::initial(&tree), &spec).map_err(|e| CliError::Input(e.to_string()))
}

fn edge_of(traj: &Trajectory, u: &str, v: &str) -> trf_core::EdgeId {
    traj.tree.edge(u, v).expect("builtin edge")
}

fn pattern(signs: &[Sign]) -> String {
    let names: Vec<&str> = signs
        .iter()
        .map(|s| match s {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        })
        .collect();
    names.join(" -> ")
}

pub fn reproduce(name: &str, out: &Path, t_end: f64) -> Result<(), CliError> {
    if !(t_end > 0.0) {
        return Err(CliError::Input(format!("t_end must be positive, got {t_end}")));
    }
    create_dir(out)?;
    let mut r = Report::new();
    r.push("example", name).push("t_end", format_f64(t_end));
    let panel_err = |e| io_err(out, e);

    if name == "simple" {
        // initial values of the figure are not given; these are ours
        let metrics = ["uv-0.5", "uv-1", "uv-2"];
        let runs: Vec<Trajectory> = metrics
            .iter()
            .map(|m| run_builtin("simple", m, t_end))
            .collect::<Result<_, _>>()?;
        let uv = edge_of(&runs[0], "u", "v");
        let mut rows = Vec::new();
        for (i, s) in runs[0].samples.iter().enumerate() {
            let mut row = vec![s.t];
            row.extend(runs.iter().map(|t| t.samples[i].weights()[uv.0]));
            rows.push(row);
        }
        let columns: Vec<String> = std::iter::once("t".to_string())
            .chain(metrics.iter().map(|m| format!("w_uv[{m}]")))
            .collect();
        let path = out.join("simple_uv.dat");
        let file = File::create(&path).map_err(|e| io_err(&path, e))?;
        write_dat(file, "unnormalized weight of uv for initial w_uv = 0.5, 1, 2", &columns, &rows)
            .map_err(|e| io_err(&path, e))?;
        for (m, traj) in metrics.iter().zip(&runs) {
            let stem = format!("simple_{m}");
            write_outputs(traj, out, &stem)?;
            write_panels(traj, out, &stem).map_err(panel_err)?;
            let w = traj.weight_series(uv);
            let monotone = w.windows(2).all(|p| p[1] >= p[0]);
            r.push(format!("w_uv final [{m}]"), format_f64(*w.last().unwrap()));
            r.push(format!("w_uv increasing [{m}]"), monotone);
        }
        r.push("panel", path.display());
    } else {
        let metric = if name == "t3" { "appendix" } else { "unit" };
        let traj = run_builtin(name, metric, t_end)?;
        write_outputs(&traj, out, "trajectory")?;
        let panels = write_panels(&traj, out, name).map_err(panel_err)?;
        let tree = &traj.tree;
        r.push("metric", metric)
            .push("caterpillar", caterpillar_classify(tree).is_caterpillar);
        for e in tree.internal_edges() {
            r.push(
                format!("kappa final {}", tree.edge_label(e)),
                format_f64(traj.last().kappa()[e.0]),
            );
        }
        if let Ok(v) = detect_limits(&traj, 0.25, 1e-2) {
            r.push("curvature verdict", format!("{:?}", v.constant_curvature));
            let diverging: Vec<String> = v
                .edges
                .iter()
                .filter(|ev| ev.weight == WeightLimit::Diverging)
                .map(|ev| tree.edge_label(ev.edge))
                .collect();
            r.push("diverging", diverging.join(" "));
        }
        if name == "t3" {
            let e = edge_of(&traj, "x3", "x4");
            let k = traj.kappa_series(e);
            r.push("x3-x4 curvature signs", pattern(&sign_pattern(&k, 1e-3)));
            match rise_then_fall(&traj.weight_series(e), 0.0) {
                Some(i) => r.push("x3-x4 weight peak t", format_f64(traj.samples[i].t)),
                None => r.push("x3-x4 weight peak t", "none"),
            };
            let x35 = edge_of(&traj, "x3", "x5");
            let w = traj.weight_series(x35);
            r.push("x3-x5 weight still rising", w[w.len() - 1] > w[w.len() - 2]);
        }
        for p in panels {
            r.push("panel", p.display());
        }
    }
    let text = r.to_string();
    let path = out.join("report.txt");
    fs::write(&path, &text).map_err(|e| io_err(&path, e))?;
    print!("{text}");
    Ok(())
}
