//! Unsupervised link-prediction scores.
//!
//! Neighborhood scores use the unweighted topology: `N_u` is the neighbor
//! set and degrees are neighbor counts. Katz and personalized PageRank solve
//! one dense system per graph and read pair scores off the result.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{pair, Graph};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    CommonNeighbors,
    Jaccard,
    AdamicAdar,
    PreferentialAttachment,
    ResourceAllocation,
    Katz,
    PersonalizedPageRank,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::PersonalizedPageRank,
        Method::Katz,
        Method::Jaccard,
        Method::AdamicAdar,
        Method::CommonNeighbors,
        Method::PreferentialAttachment,
        Method::ResourceAllocation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::CommonNeighbors => "common_neighbors",
            Method::Jaccard => "jaccard",
            Method::AdamicAdar => "adamic_adar",
            Method::PreferentialAttachment => "preferential_attachment",
            Method::ResourceAllocation => "resource_allocation",
            Method::Katz => "katz",
            Method::PersonalizedPageRank => "ppr",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig {
    pub katz_alpha: f64,
    pub ppr_alpha: f64,
    /// L1 stopping tolerance for [`personalized_pagerank`].
    pub ppr_tol: f64,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self { katz_alpha: 0.5, ppr_alpha: 0.85, ppr_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoredPair {
    pub pair: (usize, usize),
    pub score: f64,
}

fn common(g: &Graph, u: usize, v: usize) -> Vec<usize> {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i].0);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Largest eigenvalue of the adjacency matrix.
pub fn adjacency_spectral_radius(g: &Graph) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(g.adjacency()).eigenvalues.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

/// `(I - alpha A)^{-1} - I`, the Katz walk-count series in closed form.
pub fn katz_matrix(g: &Graph, alpha: f64) -> Result<DMatrix<f64>> {
    let radius = adjacency_spectral_radius(g);
    if alpha <= 0.0 || alpha * radius >= 1.0 {
        return Err(Error::KatzDivergent { alpha, radius });
    }
    let n = g.node_count();
    let m = DMatrix::identity(n, n) - g.adjacency() * alpha;
    let inv = Cholesky::new(m).ok_or(Error::KatzDivergent { alpha, radius })?.inverse();
    Ok(inv - DMatrix::identity(n, n))
}

fn check_ppr_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("ppr alpha must be in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Row `u` is the personalized PageRank vector seeded at `u`.
///
/// The walk follows `W = D^{-1} A` with probability `alpha` and teleports to
/// the seed otherwise; a walker on a node with no neighbors also returns to
/// the seed. With `R = (I - alpha W_0)^{-1}` (`W_0` having zero rows at those
/// nodes) every stationary vector is a multiple of `R[u, :]`, fixed by
/// normalizing to unit mass.
pub fn ppr_matrix(g: &Graph, alpha: f64) -> Result<DMatrix<f64>> {
    check_ppr_alpha(alpha)?;
    let n = g.node_count();
    let mut m = DMatrix::identity(n, n);
    for u in 0..n {
        let d = g.neighbor_count(u) as f64;
        for &(v, _) in g.neighbors(u) {
            m[(u, v)] -= alpha / d;
        }
    }
    let mut r = m.lu().try_inverse().expect("I - alpha W is nonsingular for alpha < 1");
    for mut row in r.row_iter_mut() {
        let total: f64 = row.iter().sum();
        row /= total;
    }
    Ok(r)
}

/// Power iteration for one seed, stopped when the L1 change drops below
/// `tol`. Same walk as [`ppr_matrix`].
pub fn personalized_pagerank(g: &Graph, seed: usize, alpha: f64, tol: f64) -> Result<Vec<f64>> {
    check_ppr_alpha(alpha)?;
    let n = g.node_count();
    let mut pi = vec![0.0; n];
    pi[seed] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..100_000 {
        next.iter_mut().for_each(|x| *x = 0.0);
        next[seed] = 1.0 - alpha;
        for (u, &mass) in pi.iter().enumerate() {
            let nb = g.neighbors(u);
            if nb.is_empty() {
                next[seed] += alpha * mass;
            } else {
                let share = alpha * mass / nb.len() as f64;
                for &(v, _) in nb {
                    next[v] += share;
                }
            }
        }
        let change: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut pi, &mut next);
        if change < tol {
            break;
        }
    }
    Ok(pi)
}

fn neighborhood_score(method: Method, g: &Graph, u: usize, v: usize) -> f64 {
    let deg = |x: usize| g.neighbor_count(x) as f64;
    match method {
        Method::CommonNeighbors => common(g, u, v).len() as f64,
        Method::Jaccard => {
            let c = common(g, u, v).len();
            let union = g.neighbor_count(u) + g.neighbor_count(v) - c;
            if union == 0 {
                0.0
            } else {
                c as f64 / union as f64
            }
        }
        // degree-1 common neighbors are impossible for u != v, but weights
        // of ln(1) = 0 are skipped regardless
        Method::AdamicAdar => {
            common(g, u, v).into_iter().filter(|&w| g.neighbor_count(w) > 1).map(|w| 1.0 / deg(w).ln()).sum()
        }
        Method::PreferentialAttachment => deg(u) * deg(v),
        Method::ResourceAllocation => common(g, u, v).into_iter().map(|w| 1.0 / deg(w)).sum(),
        Method::Katz | Method::PersonalizedPageRank => unreachable!("matrix methods"),
    }
}

/// Scores each pair with `method` on graph `g`. Pairs are reported in
/// canonical `(min, max)` orientation, in input order.
pub fn heuristic_score(
    method: Method,
    g: &Graph,
    pairs: &[(usize, usize)],
    cfg: &PredictorConfig,
) -> Result<Vec<ScoredPair>> {
    let n = g.node_count();
    if let Some(&(u, v)) = pairs.iter().find(|&&(u, v)| u >= n || v >= n || u == v) {
        return Err(Error::OutOfRange { u, v, weight: 0.0, n });
    }
    let scored = match method {
        Method::Katz => {
            let k = katz_matrix(g, cfg.katz_alpha)?;
            pairs.iter().map(|&(u, v)| ScoredPair { pair: pair(u, v), score: k[(u, v)].max(0.0) }).collect()
        }
        Method::PersonalizedPageRank => {
            let p = ppr_matrix(g, cfg.ppr_alpha)?;
            pairs
                .iter()
                .map(|&(u, v)| ScoredPair { pair: pair(u, v), score: (p[(u, v)] + p[(v, u)]).max(0.0) })
                .collect()
        }
        m => par::map(pairs, |&(u, v)| ScoredPair { pair: pair(u, v), score: neighborhood_score(m, g, u, v) }),
    };
    Ok(scored)
}

/// Descending by score, ties broken by ascending pair.
pub fn rank(mut scored: Vec<ScoredPair>) -> Vec<ScoredPair> {
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.pair.cmp(&b.pair)));
    scored
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(m: Method, g: &Graph, u: usize, v: usize) -> f64 {
        heuristic_score(m, g, &[(u, v)], &PredictorConfig::default()).unwrap()[0].score
    }

    #[test]
    fn p3_neighborhood_scores() {
        let g = Graph::path(3);
        assert_eq!(score(Method::CommonNeighbors, &g, 0, 2), 1.0);
        assert_eq!(score(Method::Jaccard, &g, 0, 2), 1.0);
        assert!((score(Method::AdamicAdar, &g, 0, 2) - std::f64::consts::LOG2_E).abs() < 1e-12);
        assert_eq!(score(Method::ResourceAllocation, &g, 0, 2), 0.5);
        assert_eq!(score(Method::PreferentialAttachment, &g, 0, 2), 1.0);
    }

    #[test]
    fn p3_katz() {
        let k = katz_matrix(&Graph::path(3), 0.5).unwrap();
        let want = DMatrix::from_row_slice(3, 3, &[0.5, 1.0, 0.5, 1.0, 1.0, 1.0, 0.5, 1.0, 0.5]);
        assert!((k - want).amax() < 1e-12);
        assert!((score(Method::Katz, &Graph::path(3), 0, 2) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn katz_divergence() {
        let err = heuristic_score(Method::Katz, &Graph::complete(4), &[(0, 1)], &PredictorConfig::default());
        assert!(matches!(err, Err(Error::KatzDivergent { .. })));
    }

    #[test]
    fn isolated_pair_scores_zero() {
        let g = Graph::empty(2);
        for m in Method::ALL {
            assert_eq!(score(m, &g, 0, 1), 0.0, "{m}");
        }
    }

    #[test]
    fn ppr_direct_matches_power_iteration() {
        let g = Graph::unweighted(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let p = ppr_matrix(&g, 0.85).unwrap();
        for u in 0..6 {
            let it = personalized_pagerank(&g, u, 0.85, 1e-13).unwrap();
            let row_sum: f64 = p.row(u).iter().sum();
            assert!((row_sum - 1.0).abs() < 1e-12);
            for v in 0..6 {
                assert!((p[(u, v)] - it[v]).abs() < 1e-10, "{u} {v}");
                assert!(p[(u, v)] >= 0.0);
            }
        }
        // isolated node 5 keeps all its mass
        assert!((p[(5, 5)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parse_methods() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!(matches!("node2vec".parse::<Method>(), Err(Error::UnknownMethod(s)) if s == "node2vec"));
    }

    #[test]
    fn ranking() {
        let sp = |u, v, s| ScoredPair { pair: (u, v), score: s };
        assert_eq!(rank(vec![sp(0, 2, 1.0), sp(0, 3, 0.5)]), vec![sp(0, 2, 1.0), sp(0, 3, 0.5)]);
        assert_eq!(rank(vec![sp(0, 3, 1.0), sp(0, 2, 1.0)]), vec![sp(0, 2, 1.0), sp(0, 3, 1.0)]);
        assert!(rank(vec![]).is_empty());
    }
}
