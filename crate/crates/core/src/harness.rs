//! Conflict-awareness evaluation of link recommenders.
//!
//! One repetition hides `beta` random edges (the positives), samples
//! `beta * eta` non-edges of the original graph (the negatives) and asks each
//! recommender to score the union. Scores become weights summing to `beta`;
//! only the weight landing on positives can be realized, and the conflict
//! reduction it achieves is compared with the best reduction available on the
//! positives under the same budget.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{pair, Graph};
use crate::opinion::Opinions;
use crate::opt::{self, BudgetedAddition, Mode, SolverOptions};
use crate::par;
use crate::predictors::{self, adjacency_spectral_radius, Method, PredictorConfig, ScoredPair};
use crate::stats;

/// Slack allowed above 1 before a ratio counts as a genuine overshoot.
pub const CA_SLACK: f64 = 1e-9;

/// Anything that turns test candidates into a ranking and a weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Recommender {
    Heuristic(Method),
    /// The solver run on every candidate, blind to which ones are real.
    ConflictMinimization,
}

impl Recommender {
    pub fn all() -> Vec<Recommender> {
        Method::ALL.into_iter().map(Recommender::Heuristic).chain([Recommender::ConflictMinimization]).collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Recommender::Heuristic(m) => m.name(),
            Recommender::ConflictMinimization => "conflict_minimization",
        }
    }
}

impl fmt::Display for Recommender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recommender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == Recommender::ConflictMinimization.name() {
            return Ok(Recommender::ConflictMinimization);
        }
        s.parse().map(Recommender::Heuristic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub beta: usize,
    pub eta: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn negative_count(&self) -> usize {
        (self.beta as f64 * self.eta).round() as usize
    }

    fn validate(&self) -> Result<()> {
        if self.beta == 0 {
            return Err(Error::Config("beta must be at least 1".into()));
        }
        if !(self.eta >= 1.0 && self.eta.is_finite()) {
            return Err(Error::Config(format!("eta must be at least 1, got {}", self.eta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub train: Graph,
    /// Removed edges, sorted.
    pub positives: Vec<(usize, usize)>,
    /// Sampled non-edges of the original graph, sorted.
    pub negatives: Vec<(usize, usize)>,
}

impl Split {
    /// Positives followed by negatives.
    pub fn candidates(&self) -> Vec<(usize, usize)> {
        self.positives.iter().chain(&self.negatives).copied().collect()
    }
}

/// Positives are drawn first from the seeded stream, so every `eta` shares
/// them and only the negatives change.
pub fn split(g: &Graph, spec: SplitSpec) -> Result<Split> {
    spec.validate()?;
    let m = g.edge_count();
    if m <= spec.beta {
        return Err(Error::Insufficient { what: "edges", need: spec.beta + 1, have: m });
    }
    let non_edges = g.non_edges();
    let k = spec.negative_count();
    if non_edges.len() < k {
        return Err(Error::Insufficient { what: "non-edges", need: k, have: non_edges.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut positives: Vec<_> =
        index::sample(&mut rng, m, spec.beta).into_iter().map(|i| g.edges()[i]).map(|e| (e.u, e.v)).collect();
    positives.sort_unstable();
    let mut negatives: Vec<_> = index::sample(&mut rng, non_edges.len(), k).into_iter().map(|i| non_edges[i]).collect();
    negatives.sort_unstable();
    Ok(Split { train: g.without_edges(&positives), positives, negatives })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub weights: Vec<f64>,
    /// Set when every score was zero and the budget was spread uniformly.
    pub fallback: bool,
}

/// Scales nonnegative scores to sum to `beta`.
pub fn normalize_weights(scores: &[f64], beta: f64) -> Result<Normalized> {
    if scores.is_empty() {
        return Err(Error::Config("no scores to normalize".into()));
    }
    if let Some(s) = scores.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::Config(format!("scores must be finite and nonnegative, got {s}")));
    }
    let total: f64 = scores.iter().sum();
    if total == 0.0 {
        let w = beta / scores.len() as f64;
        return Ok(Normalized { weights: vec![w; scores.len()], fallback: true });
    }
    Ok(Normalized { weights: scores.iter().map(|s| beta * s / total).collect(), fallback: false })
}

/// Conflict change from adding only the weight placed on positives.
pub fn realized_delta(
    train: &Graph,
    mode: Mode<'_>,
    positives: &[(usize, usize)],
    candidates: &[(usize, usize)],
    weights: &[f64],
) -> Result<f64> {
    if candidates.len() != weights.len() {
        return Err(Error::LengthMismatch { expected: candidates.len(), found: weights.len() });
    }
    let pos: HashSet<(usize, usize)> = positives.iter().map(|&(i, j)| pair(i, j)).collect();
    let (kept, w): (Vec<_>, Vec<_>) =
        candidates.iter().zip(weights).filter(|(e, _)| pos.contains(&pair(e.0, e.1))).map(|(e, w)| (*e, *w)).unzip();
    let budget = w.iter().sum::<f64>();
    if kept.is_empty() || budget == 0.0 {
        return Ok(0.0);
    }
    opt::evaluate(train, mode, &BudgetedAddition { candidates: kept, weights: w, budget })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Awareness {
    /// Ratio clipped to `[0, 1]`.
    pub value: f64,
    pub raw: f64,
}

/// `realized / optimum`, both conflict changes (nonpositive).
pub fn conflict_awareness(realized: f64, optimum: f64) -> Result<Awareness> {
    if optimum.is_nan() || optimum >= 0.0 {
        return Err(Error::DegenerateOptimum);
    }
    let raw = realized / optimum;
    Ok(Awareness { value: raw.clamp(0.0, 1.0), raw })
}

/// Share of the top `beta` ranked pairs that are positives.
pub fn recall(ranked: &[(usize, usize)], positives: &[(usize, usize)], beta: usize) -> f64 {
    let pos: HashSet<_> = positives.iter().map(|&(i, j)| pair(i, j)).collect();
    let hits = ranked.iter().take(beta).filter(|&&(i, j)| pos.contains(&pair(i, j))).count();
    hits as f64 / beta as f64
}

/// Precision among the top `k`; the flag reports a ranking shorter than `k`,
/// in which case the denominator is the available count.
pub fn precision_at_k(ranked: &[(usize, usize)], positives: &[(usize, usize)], k: usize) -> (f64, bool) {
    let pos: HashSet<_> = positives.iter().map(|&(i, j)| pair(i, j)).collect();
    let top = k.min(ranked.len());
    if top == 0 {
        return (0.0, true);
    }
    let hits = ranked[..top].iter().filter(|&&(i, j)| pos.contains(&pair(i, j))).count();
    (hits as f64 / top as f64, top < k)
}

/// Katz `alpha` actually used on `g`: the configured value when the series
/// converges, otherwise the same value divided by the spectral radius.
pub fn effective_katz_alpha(g: &Graph, alpha: f64) -> f64 {
    let radius = adjacency_spectral_radius(g);
    if alpha * radius < 1.0 {
        alpha
    } else {
        alpha / radius
    }
}

/// Results of one (method, eta, seed) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRecord {
    pub dataset: String,
    pub method: String,
    pub beta: usize,
    pub eta: f64,
    pub seed: u64,
    pub ca: f64,
    pub cae: f64,
    pub recall: f64,
    pub precision_at_10: f64,
    pub realized_delta: f64,
    pub optimum_delta: f64,
    pub ca_raw: f64,
    pub cae_raw: f64,
    pub realized_delta_expected: f64,
    pub optimum_delta_expected: f64,
    pub precision_truncated: bool,
    pub uniform_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub method: String,
    pub eta: f64,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub methods: Vec<Recommender>,
    pub beta: usize,
    pub etas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub sigma2: f64,
    pub predictor: PredictorConfig,
    pub solver: SolverOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: "sbm200".into(),
            methods: Recommender::all(),
            beta: 100,
            etas: vec![1.0, 3.0, 5.0, 7.0, 9.0],
            seeds: (0..10).collect(),
            sigma2: 1.0,
            predictor: PredictorConfig::default(),
            solver: SolverOptions::default(),
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Config(format!("bad entry {t:?} for {key}"))))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

impl ExperimentConfig {
    /// Reads flat `key = value` text. Lists are comma or space separated;
    /// `seeds` also accepts a range `a..b`. Unknown keys are rejected.
    /// Returns the config and any `graph` / `opinions` paths it names.
    pub fn parse(text: &str) -> Result<(Self, BTreeMap<String, String>)> {
        let mut cfg = Self::default();
        let mut paths = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dataset" => cfg.dataset = value.to_string(),
                "methods" => {
                    cfg.methods = if value == "all" {
                        Recommender::all()
                    } else {
                        value.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(str::parse).collect::<Result<_>>()?
                    }
                }
                "beta" => cfg.beta = parse_one(key, value)?,
                "eta" | "etas" => cfg.etas = parse_list(key, value)?,
                "seeds" => {
                    cfg.seeds = match value.split_once("..") {
                        Some((a, b)) => (parse_one::<u64>(key, a.trim())?..parse_one(key, b.trim())?).collect(),
                        None => parse_list(key, value)?,
                    }
                }
                "sigma2" => cfg.sigma2 = parse_one(key, value)?,
                "katz_alpha" => cfg.predictor.katz_alpha = parse_one(key, value)?,
                "ppr_alpha" => cfg.predictor.ppr_alpha = parse_one(key, value)?,
                "tol" => cfg.solver.tol = parse_one(key, value)?,
                "max_iter" => cfg.solver.max_iter = parse_one(key, value)?,
                "graph" | "opinions" => {
                    paths.insert(key.to_string(), value.to_string());
                }
                other => return Err(Error::Config(format!("line {}: unknown key {other:?}", no + 1))),
            }
        }
        cfg.validate()?;
        Ok((cfg, paths))
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() || self.etas.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("methods, eta and seeds must be nonempty".into()));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Config(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        for &eta in &self.etas {
            SplitSpec { beta: self.beta, eta, seed: 0 }.validate()?;
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.methods.len() * self.etas.len() * self.seeds.len()
    }
}

/// Where a run's opinions come from.
#[derive(Debug, Clone, PartialEq)]
pub enum OpinionSource {
    Fixed(Opinions),
    /// Fresh centered standard normal opinions for every seed.
    Gaussian,
}

impl OpinionSource {
    fn for_seed(&self, n: usize, seed: u64) -> Opinions {
        match self {
            OpinionSource::Fixed(s) => s.clone(),
            OpinionSource::Gaussian => stats::gaussian_opinions(n, seed ^ 0x9e37_79b9_7f4a_7c15),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Experiment {
    pub records: Vec<EvalRecord>,
    pub failures: Vec<CellFailure>,
}

/// Per-seed artifacts shared by every eta and method.
struct SeedContext {
    split: Split,
    s: Opinions,
    optimum: f64,
    optimum_expected: f64,
    katz_alpha: f64,
}

fn seed_context(g: &Graph, cfg: &ExperimentConfig, source: &OpinionSource, seed: u64) -> Result<SeedContext> {
    let split = split(g, SplitSpec { beta: cfg.beta, eta: 1.0, seed })?;
    let s = source.for_seed(g.node_count(), seed);
    let beta = cfg.beta as f64;
    let optimum = opt::solve(&split.train, Mode::Opinion(&s), &split.positives, beta, cfg.solver)?.objective;
    let optimum_expected =
        opt::solve(&split.train, Mode::Expected { sigma2: cfg.sigma2 }, &split.positives, beta, cfg.solver)?.objective;
    let katz_alpha = effective_katz_alpha(&split.train, cfg.predictor.katz_alpha);
    Ok(SeedContext { split, s, optimum, optimum_expected, katz_alpha })
}

struct Recommendation {
    ranked: Vec<(usize, usize)>,
    weights: Vec<f64>,
    weights_expected: Vec<f64>,
    fallback: bool,
}

fn recommend(
    method: Recommender,
    ctx: &SeedContext,
    candidates: &[(usize, usize)],
    cfg: &ExperimentConfig,
) -> Result<Recommendation> {
    let train = &ctx.split.train;
    let beta = cfg.beta as f64;
    match method {
        Recommender::Heuristic(m) => {
            let pc = PredictorConfig { katz_alpha: ctx.katz_alpha, ..cfg.predictor };
            let scored = predictors::heuristic_score(m, train, candidates, &pc)?;
            let scores: Vec<f64> = scored.iter().map(|p| p.score).collect();
            let norm = normalize_weights(&scores, beta)?;
            let ranked = predictors::rank(scored).into_iter().map(|p| p.pair).collect();
            Ok(Recommendation {
                ranked,
                weights_expected: norm.weights.clone(),
                weights: norm.weights,
                fallback: norm.fallback,
            })
        }
        Recommender::ConflictMinimization => {
            let r = opt::solve(train, Mode::Opinion(&ctx.s), candidates, beta, cfg.solver)?;
            let re = opt::solve(train, Mode::Expected { sigma2: cfg.sigma2 }, candidates, beta, cfg.solver)?;
            let scored = candidates.iter().zip(&r.weights).map(|(&e, &w)| ScoredPair { pair: pair(e.0, e.1), score: w });
            let ranked = predictors::rank(scored.collect()).into_iter().map(|p| p.pair).collect();
            Ok(Recommendation { ranked, weights: r.weights, weights_expected: re.weights, fallback: false })
        }
    }
}

fn run_cell(
    g: &Graph,
    cfg: &ExperimentConfig,
    ctx: &SeedContext,
    method: Recommender,
    eta: f64,
    seed: u64,
) -> Result<EvalRecord> {
    let sp = split(g, SplitSpec { beta: cfg.beta, eta, seed })?;
    let candidates = sp.candidates();
    let rec = recommend(method, ctx, &candidates, cfg)?;
    let train = &ctx.split.train;
    let realized = realized_delta(train, Mode::Opinion(&ctx.s), &sp.positives, &candidates, &rec.weights)?;
    let realized_expected =
        realized_delta(train, Mode::Expected { sigma2: cfg.sigma2 }, &sp.positives, &candidates, &rec.weights_expected)?;
    let ca = conflict_awareness(realized, ctx.optimum)?;
    let cae = conflict_awareness(realized_expected, ctx.optimum_expected)?;
    let (p10, truncated) = precision_at_k(&rec.ranked, &sp.positives, 10);
    Ok(EvalRecord {
        dataset: cfg.dataset.clone(),
        method: method.name().to_string(),
        beta: cfg.beta,
        eta,
        seed,
        ca: ca.value,
        cae: cae.value,
        recall: recall(&rec.ranked, &sp.positives, cfg.beta),
        precision_at_10: p10,
        realized_delta: realized,
        optimum_delta: ctx.optimum,
        ca_raw: ca.raw,
        cae_raw: cae.raw,
        realized_delta_expected: realized_expected,
        optimum_delta_expected: ctx.optimum_expected,
        precision_truncated: truncated,
        uniform_fallback: rec.fallback,
    })
}

/// Runs the full method x eta x seed factorial on `g`. Records come back
/// ordered by method (config order), then eta, then seed; failed cells are
/// listed separately and do not stop the run.
pub fn run_experiment(g: &Graph, source: &OpinionSource, cfg: &ExperimentConfig) -> Result<Experiment> {
    cfg.validate()?;
    if let OpinionSource::Fixed(s) = source {
        if s.len() != g.node_count() {
            return Err(Error::LengthMismatch { expected: g.node_count(), found: s.len() });
        }
    }
    let contexts = par::map(&cfg.seeds, |&seed| seed_context(g, cfg, source, seed).map_err(|e| e.to_string()));

    let mut cells = Vec::with_capacity(cfg.cell_count());
    for &method in &cfg.methods {
        for &eta in &cfg.etas {
            for (k, &seed) in cfg.seeds.iter().enumerate() {
                cells.push((method, eta, seed, k));
            }
        }
    }
    let outcomes = par::map(&cells, |&(method, eta, seed, k)| match &contexts[k] {
        Ok(ctx) => run_cell(g, cfg, ctx, method, eta, seed).map_err(|e| e.to_string()),
        Err(e) => Err(e.clone()),
    });

    let mut out = Experiment::default();
    for (&(method, eta, seed, _), outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(r) => out.records.push(r),
            Err(error) => out.failures.push(CellFailure { method: method.name().to_string(), eta, seed, error }),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    dataset: &'a str,
    method: &'a str,
    beta: usize,
    eta: f64,
    seed: u64,
    ca: f64,
    cae: f64,
    recall: f64,
    precision_at_10: f64,
    realized_delta: f64,
    optimum_delta: f64,
}

/// Writes the records as CSV with the columns
/// `dataset,method,beta,eta,seed,ca,cae,recall,precision_at_10,realized_delta,optimum_delta`.
pub fn write_csv<W: Write>(records: &[EvalRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            dataset: &r.dataset,
            method: &r.method,
            beta: r.beta,
            eta: r.eta,
            seed: r.seed,
            ca: r.ca,
            cae: r.cae,
            recall: r.recall,
            precision_at_10: r.precision_at_10,
            realized_delta: r.realized_delta,
            optimum_delta: r.optimum_delta,
        })?;
    }
    if records.is_empty() {
        w.write_record([
            "dataset", "method", "beta", "eta", "seed", "ca", "cae", "recall", "precision_at_10", "realized_delta",
            "optimum_delta",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean and 95% half width over seeds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci95: f64,
}

impl Estimate {
    fn of(xs: &[f64]) -> Self {
        Self { mean: stats::mean(xs), ci95: stats::ci95_half_width(xs) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub method: String,
    pub eta: f64,
    pub cells: usize,
    pub ca: Estimate,
    pub cae: Estimate,
    pub recall: Estimate,
    pub precision_at_10: Estimate,
}

/// Seed-level aggregates per (method, eta), in first-appearance order.
pub fn summarize(records: &[EvalRecord]) -> Vec<SummaryRow> {
    let mut keys: Vec<(&str, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|&(m, e)| m == r.method && e == r.eta) {
            keys.push((&r.method, r.eta));
        }
    }
    keys.into_iter()
        .map(|(method, eta)| {
            let cell: Vec<&EvalRecord> = records.iter().filter(|r| r.method == method && r.eta == eta).collect();
            let col = |f: fn(&EvalRecord) -> f64| Estimate::of(&cell.iter().map(|r| f(r)).collect::<Vec<_>>());
            SummaryRow {
                method: method.to_string(),
                eta,
                cells: cell.len(),
                ca: col(|r| r.ca),
                cae: col(|r| r.cae),
                recall: col(|r| r.recall),
                precision_at_10: col(|r| r.precision_at_10),
            }
        })
        .collect()
}

/// Spearman correlation between eta and the method's mean CA per eta.
pub fn ca_trend(summary: &[SummaryRow], method: &str) -> f64 {
    let (etas, cas): (Vec<f64>, Vec<f64>) =
        summary.iter().filter(|r| r.method == method).map(|r| (r.eta, r.ca.mean)).unzip();
    stats::spearman(&etas, &cas)
}

/// Mean recall of every method over all of its cells.
pub fn mean_recall(records: &[EvalRecord]) -> Vec<(String, f64)> {
    let mut names: Vec<&str> = Vec::new();
    for r in records {
        if !names.contains(&r.method.as_str()) {
            names.push(&r.method);
        }
    }
    names
        .into_iter()
        .map(|m| {
            let xs: Vec<f64> = records.iter().filter(|r| r.method == m).map(|r| r.recall).collect();
            (m.to_string(), stats::mean(&xs))
        })
        .collect()
}

/// Share of (eta, seed) cells where `method` has the highest CA (ties count).
pub fn max_ca_share(records: &[EvalRecord], method: &str) -> f64 {
    let mut cells: BTreeMap<(u64, u64), Vec<&EvalRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.eta.to_bits(), r.seed)).or_default().push(r);
    }
    let wins = cells
        .values()
        .filter(|rs| {
            let best = rs.iter().map(|r| r.ca).fold(f64::NEG_INFINITY, f64::max);
            rs.iter().any(|r| r.method == method && r.ca >= best)
        })
        .count();
    wins as f64 / cells.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::karate_club;

    #[test]
    fn karate_split_arithmetic() {
        let g = karate_club();
        let sp = split(&g, SplitSpec { beta: 10, eta: 1.0, seed: 3 }).unwrap();
        assert_eq!(sp.train.edge_count(), 68);
        assert_eq!(sp.positives.len(), 10);
        assert_eq!(sp.negatives.len(), 10);
        assert!(sp.positives.iter().all(|&(i, j)| g.has_edge(i, j) && !sp.train.has_edge(i, j)));
        assert!(sp.negatives.iter().all(|&(i, j)| !g.has_edge(i, j)));
        assert_eq!(sp, split(&g, SplitSpec { beta: 10, eta: 1.0, seed: 3 }).unwrap());
    }

    #[test]
    fn positives_shared_across_eta() {
        let g = karate_club();
        let a = split(&g, SplitSpec { beta: 12, eta: 1.0, seed: 5 }).unwrap();
        let b = split(&g, SplitSpec { beta: 12, eta: 7.0, seed: 5 }).unwrap();
        assert_eq!(a.positives, b.positives);
        assert_eq!(b.negatives.len(), 84);
    }

    #[test]
    fn split_errors() {
        let g = Graph::path(51);
        assert!(matches!(
            split(&g, SplitSpec { beta: 100, eta: 1.0, seed: 0 }),
            Err(Error::Insufficient { what: "edges", .. })
        ));
        let k4 = Graph::complete(4);
        assert!(split(&k4, SplitSpec { beta: 1, eta: 1.0, seed: 0 }).is_err());
        assert!(split(&karate_club(), SplitSpec { beta: 1, eta: 0.5, seed: 0 }).is_err());
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_weights(&[1.0, 1.0], 100.0).unwrap().weights, vec![50.0, 50.0]);
        assert_eq!(normalize_weights(&[3.0, 1.0], 4.0).unwrap().weights, vec![3.0, 1.0]);
        let z = normalize_weights(&[0.0, 0.0], 2.0).unwrap();
        assert_eq!(z, Normalized { weights: vec![1.0, 1.0], fallback: true });
        assert!(normalize_weights(&[-1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn ranking_metrics() {
        let pos = [(0, 1), (2, 3)];
        let perfect = [(0, 1), (2, 3), (4, 5), (6, 7)];
        assert_eq!(recall(&perfect, &pos, 2), 1.0);
        assert_eq!(precision_at_k(&perfect, &pos, 2), (1.0, false));
        let inverted = [(4, 5), (6, 7), (2, 3), (0, 1)];
        assert_eq!(recall(&inverted, &pos, 2), 0.0);
        assert_eq!(precision_at_k(&perfect, &pos, 10), (0.5, true));
    }

    #[test]
    fn awareness() {
        assert_eq!(conflict_awareness(-2.0, -2.0).unwrap().value, 1.0);
        assert_eq!(conflict_awareness(0.0, -2.0).unwrap().value, 0.0);
        let over = conflict_awareness(-2.0 - 1e-12, -2.0).unwrap();
        assert_eq!(over.value, 1.0);
        assert!(over.raw > 1.0);
        assert!(matches!(conflict_awareness(0.0, 0.0), Err(Error::DegenerateOptimum)));
    }

    #[test]
    fn realized_ignores_negatives() {
        let g = Graph::path(4);
        let s = Opinions::centered(&[1.0, 0.0, 0.5, -1.0]).unwrap();
        let d = realized_delta(&g, Mode::Opinion(&s), &[(0, 2)], &[(0, 2), (1, 3)], &[0.0, 3.0]).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn config_parsing() {
        let text = "dataset = karate\nmethods = jaccard, conflict_minimization # two\nbeta = 10\neta = 1 3\nseeds = 0..4\n";
        let (cfg, paths) = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.methods, vec![Recommender::Heuristic(Method::Jaccard), Recommender::ConflictMinimization]);
        assert_eq!(cfg.seeds, vec![0, 1, 2, 3]);
        assert_eq!(cfg.etas, vec![1.0, 3.0]);
        assert!(paths.is_empty());
        assert!(matches!(ExperimentConfig::parse("methods = node2vec"), Err(Error::UnknownMethod(m)) if m == "node2vec"));
        assert!(ExperimentConfig::parse("speed = 3").is_err());
    }

    #[test]
    fn recommender_names() {
        let all = Recommender::all();
        assert_eq!(all.len(), 8);
        for r in all {
            assert_eq!(r.name().parse::<Recommender>().unwrap(), r);
        }
    }
}
