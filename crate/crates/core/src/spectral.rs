//! How much a network contracts conflict relative to isolated individuals.
//!
//! The ratio `s^T s / s^T (I + L)^{-1} s` compares the conflict of a
//! population with no links to the same population at equilibrium on `G`.
//! For centered `s` it lies in `[1 + lambda_2, 1 + lambda_max]`, and those
//! eigenvalues are in turn bracketed combinatorially:
//! `lambda_max <= max_{(i,j) in E} (d_i + d_j)` and
//! `lambda_2 >= d_min h^2 / 2`, where `h` is the conductance-form Cheeger
//! constant `min_S cut(S) / min(vol S, vol S^c)`.

use nalgebra::SymmetricEigen;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::opinion::{FjSystem, Opinions};
use crate::par;

/// Largest graph the exhaustive Cheeger scan accepts.
pub const MAX_CHEEGER_NODES: usize = 20;

/// `s^T s / s^T (I + L)^{-1} s`.
pub fn contraction_ratio(g: &Graph, s: &Opinions) -> Result<f64> {
    if s.len() != g.node_count() {
        return Err(Error::LengthMismatch { expected: g.node_count(), found: s.len() });
    }
    let norm = s.norm_sq();
    if norm == 0.0 {
        return Err(Error::ZeroOpinions);
    }
    Ok(norm / FjSystem::new(g).conflict(s))
}

/// Sorted Laplacian spectrum.
pub fn laplacian_spectrum(g: &Graph) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(g.laplacian()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

// Gray-code walk over subsets of the first n-1 nodes (node n-1 is always on
// the complement side, which covers every cut once). Returns the minimum
// conductance seen over Gray indices [start, end).
fn cheeger_chunk(adj: &[Vec<(usize, f64)>], deg: &[f64], total_vol: f64, start: u64, end: u64) -> f64 {
    let gray = |k: u64| k ^ (k >> 1);
    let mut mask = gray(start);
    let (mut cut, mut vol) = (0.0, 0.0);
    for v in 0..deg.len() {
        if mask >> v & 1 == 1 {
            vol += deg[v];
            cut += adj[v].iter().filter(|&&(u, _)| mask >> u & 1 == 0).map(|&(_, w)| w).sum::<f64>();
        }
    }
    let score = |cut: f64, vol: f64| cut / vol.min(total_vol - vol);
    let mut best = if mask != 0 { score(cut, vol) } else { f64::INFINITY };
    for k in start + 1..end {
        let v = k.trailing_zeros() as usize;
        let inside: f64 = adj[v].iter().filter(|&&(u, _)| mask >> u & 1 == 1).map(|&(_, w)| w).sum();
        let swing = deg[v] - 2.0 * inside;
        if mask >> v & 1 == 0 {
            cut += swing;
            vol += deg[v];
        } else {
            cut -= swing;
            vol -= deg[v];
        }
        mask ^= 1 << v;
        best = best.min(score(cut, vol));
    }
    best
}

/// Exhaustive conductance-form Cheeger constant of a connected graph.
pub fn cheeger_bruteforce(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    if n > MAX_CHEEGER_NODES {
        return Err(Error::TooLarge(format!("{n} nodes; Cheeger scan supports at most {MAX_CHEEGER_NODES}")));
    }
    if n < 2 {
        return Err(Error::Config("Cheeger constant needs at least two nodes".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let deg = g.degrees();
    let total_vol: f64 = deg.iter().sum();
    let subsets: u64 = 1 << (n - 1);
    let chunks = subsets.min(256);
    let len = subsets / chunks;
    let mins = par::map_range(0..chunks as usize, |c| {
        let start = c as u64 * len;
        cheeger_chunk(&adj, &deg, total_vol, start, start + len)
    });
    Ok(mins.into_iter().fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionReport {
    pub ratio: f64,
    /// `1 + d_min h^2 / 2`.
    pub lower: f64,
    /// `1 + max over edges of d_i + d_j`.
    pub upper: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
    pub cheeger: f64,
    pub d_min: f64,
}

fn upper_bound(g: &Graph, deg: &[f64]) -> f64 {
    1.0 + g.edges().iter().map(|e| deg[e.u] + deg[e.v]).fold(0.0, f64::max)
}

fn min_degree(deg: &[f64]) -> f64 {
    deg.iter().copied().filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min)
}

impl ContractionReport {
    /// `upper >= 1 + lambda_max >= ratio >= 1 + lambda_2 >= lower >= 1`,
    /// each step allowed `tol` relative slack.
    pub fn chain_holds(&self, tol: f64) -> bool {
        let chain = [self.upper, 1.0 + self.lambda_max, self.ratio, 1.0 + self.lambda2, self.lower, 1.0];
        chain.windows(2).all(|w| w[0] >= w[1] - tol * w[0].abs().max(1.0))
    }
}

/// Ratio, eigenvalues, Cheeger constant and both bounds for a connected `g`.
pub fn contraction_report(g: &Graph, s: &Opinions) -> Result<ContractionReport> {
    let ratio = contraction_ratio(g, s)?;
    let cheeger = cheeger_bruteforce(g)?;
    let ev = laplacian_spectrum(g);
    let deg = g.degrees();
    let d_min = min_degree(&deg);
    Ok(ContractionReport {
        ratio,
        lower: 1.0 + 0.5 * d_min * cheeger * cheeger,
        upper: upper_bound(g, &deg),
        lambda2: ev[1],
        lambda_max: ev[ev.len() - 1],
        cheeger,
        d_min,
    })
}

/// One step of the incremental-edge experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub edges: usize,
    /// Absent while the graph is still disconnected.
    pub lower: Option<f64>,
    pub ratio: f64,
    pub upper: f64,
    pub lambda2: f64,
    pub lambda_max: f64,
}

impl TraceRow {
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        let slack = |x: f64| tol * x.abs().max(1.0);
        let eigen = self.upper >= 1.0 + self.lambda_max - slack(self.upper)
            && 1.0 + self.lambda_max >= self.ratio - slack(self.ratio)
            && self.ratio >= 1.0 + self.lambda2 - slack(self.ratio);
        let comb = self.lower.is_none_or(|lo| 1.0 + self.lambda2 >= lo - slack(lo) && lo >= 1.0);
        eigen && comb
    }
}

/// Starts from `n` isolated nodes with Gaussian opinions and adds the
/// missing pairs one at a time in a seeded random order until the graph is
/// complete, recording the contraction ratio and its bounds after each
/// addition.
pub fn contraction_experiment(n: usize, seed: u64) -> Result<Vec<TraceRow>> {
    if n > MAX_CHEEGER_NODES {
        return Err(Error::TooLarge(format!("{n} nodes; experiment supports at most {MAX_CHEEGER_NODES}")));
    }
    if n < 2 {
        return Err(Error::Config("experiment needs at least two nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let s = Opinions::centered(&raw)?;
    let mut order: Vec<(usize, usize)> = Graph::empty(n).non_edges();
    order.shuffle(&mut rng);
    let graphs: Vec<Graph> =
        (1..=order.len()).map(|k| Graph::unweighted(n, order[..k].iter().copied()).expect("distinct pairs")).collect();
    let rows = par::map(&graphs, |g| -> Result<TraceRow> {
        let ev = laplacian_spectrum(g);
        let deg = g.degrees();
        let lower = if g.is_connected() {
            let h = cheeger_bruteforce(g)?;
            Some(1.0 + 0.5 * min_degree(&deg) * h * h)
        } else {
            None
        };
        Ok(TraceRow {
            edges: g.edge_count(),
            lower,
            ratio: contraction_ratio(g, &s)?,
            upper: upper_bound(g, &deg),
            lambda2: ev[1],
            lambda_max: ev[n - 1],
        })
    });
    rows.into_iter().collect()
}
