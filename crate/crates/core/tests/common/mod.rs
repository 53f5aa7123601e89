//! Test-side oracles. They rebuild everything from the edge list with plain
//! LU solves so they share no code path with the library's factorizations.
#![allow(dead_code)]

use fj_conflict::Graph;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                pairs.push((i, j));
            }
        }
    }
    Graph::unweighted(n, pairs).unwrap()
}

/// Integer weights in `1..=max_w`.
pub fn random_weighted(rng: &mut ChaCha8Rng, n: usize, p: f64, max_w: u32) -> Graph {
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                triples.push((i, j, rng.random_range(1..=max_w) as f64));
            }
        }
    }
    Graph::build(n, triples).unwrap()
}

pub fn random_connected(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    loop {
        let g = random_graph(rng, n, p);
        if g.is_connected() {
            return g;
        }
    }
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let m = raw.iter().sum::<f64>() / n as f64;
    raw.into_iter().map(|x| x - m).collect()
}

/// `I + L + sum w b b^T` assembled entry by entry.
pub fn dense_m(g: &Graph, extra: &[((usize, usize), f64)]) -> DMatrix<f64> {
    let n = g.node_count();
    let mut m = DMatrix::identity(n, n);
    let edges = g.edges().iter().map(|e| ((e.u, e.v), e.weight));
    for ((i, j), w) in edges.chain(extra.iter().copied()) {
        m[(i, i)] += w;
        m[(j, j)] += w;
        m[(i, j)] -= w;
        m[(j, i)] -= w;
    }
    m
}

pub fn dense_solve(m: &DMatrix<f64>, s: &[f64]) -> DVector<f64> {
    m.clone().lu().solve(&DVector::from_column_slice(s)).unwrap()
}

pub fn dense_conflict(m: &DMatrix<f64>, s: &[f64]) -> f64 {
    DVector::from_column_slice(s).dot(&dense_solve(m, s))
}

pub fn dense_trace_inv(m: &DMatrix<f64>) -> f64 {
    m.clone().lu().try_inverse().unwrap().trace()
}

/// `(disagreement, polarization, conflict, internal, unhappiness)` from the
/// definitions.
pub fn dense_measures(g: &Graph, s: &[f64]) -> (f64, f64, f64, f64, f64) {
    let z = dense_solve(&dense_m(g, &[]), s);
    let d: f64 = g.edges().iter().map(|e| e.weight * (z[e.u] - z[e.v]).powi(2)).sum();
    let mean = z.mean();
    let p: f64 = z.iter().map(|x| (x - mean).powi(2)).sum();
    let i: f64 = z.iter().zip(s).map(|(a, b)| (a - b).powi(2)).sum();
    (d, p, d + p, i, d + i)
}
