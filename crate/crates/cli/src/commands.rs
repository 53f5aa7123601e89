use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use fj_conflict::bridge::{bridge_example, GROUPS};
use fj_conflict::forest::{enumerate_forests, forest_table, to_f64, MAX_ENUM_EDGES, MAX_ENUM_NODES};
use fj_conflict::graph::{builtin_dataset, load_graph, load_graph_with_nodes, load_opinions, parse_graph};
use fj_conflict::harness::{self, ExperimentConfig, OpinionSource};
use fj_conflict::opinion::measures;
use fj_conflict::opt::{self, Mode, SolverOptions};
use fj_conflict::plot::{self, Series};
use fj_conflict::spectral::contraction_experiment;
use fj_conflict::{stats, FjSystem, Graph, Opinions};
use serde_json::json;

use crate::{Command, GraphSource, SolveMode};

/// Tolerance for the checked identities and sign claims.
const TOL: f64 = 1e-12;

#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, unreadable input or unwritable output.
    Input(String),
    /// A checked property does not hold.
    Property(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Property(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "error: {m}"),
            Failure::Property(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl From<fj_conflict::Error> for Failure {
    fn from(e: fj_conflict::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

pub fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Metrics { graph, opinions } => metrics(&graph, &opinions),
        Command::DeltaScan { source, opinions, seed, sigma2, out } => {
            delta_scan(&source, opinions.as_deref(), seed, sigma2, out.as_deref())
        }
        Command::VerifyDelta { datasets, seed, sigma2, out, svg_dir } => {
            verify_delta(&datasets, seed, sigma2, out.as_deref(), svg_dir.as_deref())
        }
        Command::VerifyContraction { n, seed, out, svg } => verify_contraction(n, seed, out.as_deref(), svg.as_deref()),
        Command::ForestCheck { graph, dataset, sigma2 } => forest_check(graph.as_deref(), dataset.as_deref(), sigma2),
        Command::SbmExample { seeds, links_per_group, seed, sigma2, svg } => {
            sbm_example(seeds, links_per_group, seed, sigma2, svg.as_deref())
        }
        Command::Solve { source, opinions, mode, budget, candidates, seed, sigma2, tol, max_iter, out } => {
            let opts = SolverOptions { tol, max_iter };
            solve(&source, opinions.as_deref(), mode, budget, candidates.as_deref(), seed, sigma2, opts, out.as_deref())
        }
        Command::Evaluate { config, out } => evaluate(&config, &out),
    }
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(Failure::from),
    }
}

fn write_file(path: &Path, text: &str) -> Outcome {
    emit(Some(path), text)
}

fn load_source(source: &GraphSource) -> Result<Graph, Failure> {
    match (&source.graph, &source.dataset) {
        (Some(p), _) => Ok(load_graph(p)?),
        (None, Some(name)) => Ok(builtin_dataset(name)?.0),
        (None, None) => Err(Failure::Input("pass --graph or --dataset".into())),
    }
}

/// Loads the opinion file against `g`, or draws Gaussian opinions.
fn opinions_for(g: &Graph, path: Option<&Path>, seed: u64) -> Result<Opinions, Failure> {
    match path {
        Some(p) => Ok(Opinions::centered(&load_opinions(p, g.node_count())?)?),
        None => Ok(stats::gaussian_opinions(g.node_count(), seed)),
    }
}

fn metrics(graph: &Path, opinions: &Path) -> Outcome {
    let text = fs::read_to_string(opinions).map_err(|e| Failure::Input(format!("{}: {e}", opinions.display())))?;
    let raw = fj_conflict::graph::parse_opinions(&text, opinions)?;
    let g = load_graph_with_nodes(graph, raw.len())?;
    let s = Opinions::centered(&raw)?;
    let r = measures(&g, &s)?;
    let out = json!({
        "disagreement": r.disagreement,
        "polarization": r.polarization,
        "conflict": r.conflict,
        "internal_conflict": r.internal_conflict,
        "unhappiness": r.unhappiness,
        "s_norm_sq": s.norm_sq(),
    });
    emit(None, &format!("{}\n", serde_json::to_string_pretty(&out).expect("plain values")))
}

fn delta_csv(rows: impl IntoIterator<Item = (String, (usize, usize), f64, f64)>, with_label: bool) -> String {
    let mut out = String::from(if with_label { "dataset,u,v,delta_c,delta_ec\n" } else { "u,v,delta_c,delta_ec\n" });
    for (label, (u, v), dc, de) in rows {
        if with_label {
            out.push_str(&label);
            out.push(',');
        }
        out.push_str(&format!("{u},{v},{dc:e},{de:e}\n"));
    }
    out
}

fn delta_scan(source: &GraphSource, opinions: Option<&Path>, seed: u64, sigma2: f64, out: Option<&Path>) -> Outcome {
    let g = load_source(source)?;
    let s = opinions_for(&g, opinions, seed)?;
    let recs = fj_conflict::delta::scan_candidates(&g, &s, sigma2, &g.non_edges())?;
    emit(out, &delta_csv(recs.into_iter().map(|r| (String::new(), r.edge, r.delta_c, r.delta_ec)), false))
}

fn verify_delta(datasets: &[String], seed: u64, sigma2: f64, out: Option<&Path>, svg_dir: Option<&Path>) -> Outcome {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for name in datasets {
        let (g, _) = builtin_dataset(name)?;
        let s = stats::gaussian_opinions(g.node_count(), seed);
        let recs = fj_conflict::delta::scan_candidates(&g, &s, sigma2, &g.non_edges())?;
        let max = recs.iter().flat_map(|r| [r.delta_c, r.delta_ec]).fold(f64::NEG_INFINITY, f64::max);
        eprintln!("{name}: {} deltas, max {max:e}", recs.len());
        if max > TOL {
            violations.push(format!("{name} has a positive delta {max:e}"));
        }
        if let Some(dir) = svg_dir {
            fs::create_dir_all(dir)?;
            let values: Vec<f64> = recs.iter().map(|r| r.delta_c).collect();
            let svg = plot::histogram(&format!("{name}: conflict change per added link"), "delta C", &values, 30);
            write_file(&dir.join(format!("{name}_deltas.svg")), &svg)?;
        }
        rows.extend(recs.into_iter().map(|r| (name.clone(), r.edge, r.delta_c, r.delta_ec)));
    }
    if let Some(p) = out {
        write_file(p, &delta_csv(rows, true))?;
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(violations.join("; ")))
    }
}

fn verify_contraction(n: usize, seed: u64, out: Option<&Path>, svg: Option<&Path>) -> Outcome {
    let trace = contraction_experiment(n, seed)?;
    let mut csv = String::from("edges,lower,ratio,upper\n");
    for r in &trace {
        let lower = r.lower.map(|x| format!("{x:e}")).unwrap_or_default();
        csv.push_str(&format!("{},{lower},{:e},{:e}\n", r.edges, r.ratio, r.upper));
    }
    emit(out, &csv)?;
    if let Some(p) = svg {
        let line = |name: &str, f: &dyn Fn(&fj_conflict::spectral::TraceRow) -> Option<f64>| Series {
            name: name.into(),
            points: trace.iter().filter_map(|r| f(r).map(|y| (r.edges as f64, y, 0.0))).collect(),
        };
        let series = [
            line("upper", &|r| Some(r.upper)),
            line("ratio", &|r| Some(r.ratio)),
            line("lower", &|r| r.lower),
        ];
        write_file(p, &plot::line_plot(&format!("Contraction bounds, n = {n}"), "edges", "ratio", &series))?;
    }
    let bad: Vec<usize> = trace.iter().filter(|r| !r.sandwich_holds(1e-9)).map(|r| r.edges).collect();
    eprintln!("{} steps, {} violations", trace.len(), bad.len());
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(format!("bounds violated at edge counts {bad:?}")))
    }
}

fn forest_report(label: &str, g: &Graph, sigma2: f64) -> Result<(serde_json::Value, bool), Failure> {
    let n = g.node_count();
    let table = forest_table(g)?;
    let enumeration = if n <= MAX_ENUM_NODES && g.edge_count() <= MAX_ENUM_EDGES && g.has_integer_weights() {
        if enumerate_forests(g)? == table {
            "match"
        } else {
            "mismatch"
        }
    } else {
        "skipped"
    };
    let sys = FjSystem::new(g);
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let (mut local, mut global, mut expected) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let r = sys.pair_resistance(i, j);
            let spread = sigma2 * sys.pair_spread(i, j);
            local = local.max(rel(to_f64(&table.local_distance(i, j)), r));
            global = global.max(rel(table.global_distance(i, j, sigma2), spread));
            expected = expected.max(rel(table.expected_delta(i, j, sigma2), -spread / (1.0 + r)));
        }
    }
    let ok = enumeration != "mismatch" && local.max(global).max(expected) <= TOL;
    let report = json!({
        "graph": label,
        "nodes": n,
        "edges": g.edge_count(),
        "forests": table.total.to_string(),
        "enumeration": enumeration,
        "max_residual_local": local,
        "max_residual_global": global,
        "max_residual_expected_delta": expected,
    });
    Ok((report, ok))
}

fn forest_check(graph: Option<&Path>, dataset: Option<&str>, sigma2: f64) -> Outcome {
    let graphs: Vec<(String, Graph)> = match (graph, dataset) {
        (Some(p), _) => vec![(p.display().to_string(), load_graph(p)?)],
        (None, Some(name)) => vec![(name.to_string(), builtin_dataset(name)?.0)],
        (None, None) => vec![
            ("K2".into(), Graph::complete(2)),
            ("P3".into(), Graph::path(3)),
            ("K3".into(), Graph::complete(3)),
        ],
    };
    let mut reports = Vec::new();
    let mut failed = Vec::new();
    for (label, g) in &graphs {
        let (report, ok) = forest_report(label, g, sigma2)?;
        if !ok {
            failed.push(label.clone());
        }
        reports.push(report);
    }
    emit(None, &format!("{}\n", serde_json::to_string_pretty(&reports).expect("plain values")))?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(format!("forest identities fail on {}", failed.join(", "))))
    }
}

fn sbm_example(seeds: usize, links: usize, first: u64, sigma2: f64, svg: Option<&Path>) -> Outcome {
    let seed_list: Vec<u64> = (first..first + seeds as u64).collect();
    let groups = bridge_example(&seed_list, links, sigma2)?;
    let mut csv = String::from("group,name,samples,mean,ci95\n");
    for (k, g) in groups.iter().enumerate() {
        csv.push_str(&format!("{},{},{},{:e},{:e}\n", k + 1, g.group, g.deltas.len(), g.mean, g.ci95));
        if !g.empty_seeds.is_empty() {
            eprintln!("group {} ({}) had no eligible pairs for seeds {:?}", k + 1, GROUPS[k], g.empty_seeds);
        }
    }
    emit(None, &csv)?;
    if let Some(p) = svg {
        let bars: Vec<(String, f64, f64)> =
            groups.iter().enumerate().map(|(k, g)| (format!("Group {}", k + 1), g.mean, g.ci95)).collect();
        write_file(p, &plot::bar_chart("Expected conflict change per added link", "mean delta E[C]", &bars))?;
    }
    let m: Vec<f64> = groups.iter().map(|g| g.mean.abs()).collect();
    let holds = m[0] < m[2] && m[2] < m[1];
    eprintln!("ordering |G1| < |G3| < |G2|: {}", if holds { "holds" } else { "does not hold" });
    Ok(())
}

fn read_candidates(path: &Path, n: usize) -> Result<Vec<(usize, usize)>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let g = parse_graph(&text, Some(n), path)?;
    Ok(g.edges().iter().map(|e| (e.u, e.v)).collect())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    source: &GraphSource,
    opinions: Option<&Path>,
    mode: SolveMode,
    budget: f64,
    candidates: Option<&Path>,
    seed: u64,
    sigma2: f64,
    opts: SolverOptions,
    out: Option<&Path>,
) -> Outcome {
    let g = load_source(source)?;
    let s = opinions_for(&g, opinions, seed)?;
    let cands = match candidates {
        Some(p) => read_candidates(p, g.node_count())?,
        None => g.non_edges(),
    };
    let m = match mode {
        SolveMode::Opinion => Mode::Opinion(&s),
        SolveMode::Expected => Mode::Expected { sigma2 },
    };
    let r = opt::solve(&g, m, &cands, budget, opts)?;
    let mut csv = String::from("u,v,weight\n");
    for (&(u, v), &w) in cands.iter().zip(&r.weights) {
        if w > 0.0 {
            csv.push_str(&format!("{u},{v},{w:e}\n"));
        }
    }
    emit(out, &csv)?;
    eprintln!(
        "{}",
        json!({"objective": r.objective, "iterations": r.iterations, "converged": r.converged, "gap": r.gap})
    );
    Ok(())
}

fn evaluate(config: &Path, out: &PathBuf) -> Outcome {
    let text = fs::read_to_string(config).map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
    let (cfg, paths) = ExperimentConfig::parse(&text)?;
    let g = match paths.get("graph") {
        Some(p) => load_graph(p)?,
        None => builtin_dataset(&cfg.dataset)?.0,
    };
    let source = match paths.get("opinions") {
        Some(p) => OpinionSource::Fixed(Opinions::centered(&load_opinions(p, g.node_count())?)?),
        None => OpinionSource::Gaussian,
    };
    let ex = harness::run_experiment(&g, &source, &cfg)?;
    fs::create_dir_all(out)?;
    let mut buf = Vec::new();
    harness::write_csv(&ex.records, &mut buf)?;
    fs::write(out.join("results.csv"), buf)?;
    if !ex.failures.is_empty() {
        let mut f = String::from("method,eta,seed,error\n");
        for c in &ex.failures {
            f.push_str(&format!("{},{},{},\"{}\"\n", c.method, c.eta, c.seed, c.error.replace('"', "'")));
        }
        fs::write(out.join("failures.csv"), f)?;
        eprintln!("{} of {} cells failed; see failures.csv", ex.failures.len(), cfg.cell_count());
    }

    let summary = harness::summarize(&ex.records);
    let series = |pick: fn(&harness::SummaryRow) -> harness::Estimate| -> Vec<Series> {
        cfg.methods
            .iter()
            .map(|m| Series {
                name: m.name().into(),
                points: summary.iter().filter(|r| r.method == m.name()).map(|r| (r.eta, pick(r).mean, pick(r).ci95)).collect(),
            })
            .filter(|s| !s.points.is_empty())
            .collect()
    };
    for (file, title, pick) in [
        ("ca.svg", "Conflict awareness", (|r: &harness::SummaryRow| r.ca) as fn(&harness::SummaryRow) -> harness::Estimate),
        ("cae.svg", "Expected conflict awareness", |r| r.cae),
        ("recall.svg", "Recall", |r| r.recall),
    ] {
        let svg = plot::line_plot(&format!("{title} on {}", cfg.dataset), "eta", title, &series(pick));
        fs::write(out.join(file), svg)?;
    }

    let mut table = format!("{:<24} {:>10} {:>10} {:>10}\n", "method", "mean CA", "mean CAE", "recall");
    for m in &cfg.methods {
        let rs: Vec<_> = ex.records.iter().filter(|r| r.method == m.name()).collect();
        if rs.is_empty() {
            continue;
        }
        let avg = |f: fn(&harness::EvalRecord) -> f64| stats::mean(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
        table.push_str(&format!("{:<24} {:>10.4} {:>10.4} {:>10.4}\n", m.name(), avg(|r| r.ca), avg(|r| r.cae), avg(|r| r.recall)));
    }
    emit(None, &table)
}
