//! Closed-form conflict change for adding one link.
//!
//! Adding `w` units of weight on pair `e = (i, j)` is the rank-one update
//! `M + w b_e b_e^T`, so by Sherman-Morrison
//!
//! ```text
//! dC   = -w (z_i - z_j)^2        / (1 + w b_e^T M^{-1} b_e)
//! dE[C] = -w sigma^2 |M^{-1} b_e|^2 / (1 + w b_e^T M^{-1} b_e)
//! ```
//!
//! with `M = I + L`. Both are nonpositive for every pair. The scanner keeps
//! one factorization and explicit inverse of `M`, after which each candidate
//! costs `O(n)`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{pair, Graph};
use crate::opinion::{FjSystem, Opinions};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaRecord {
    pub edge: (usize, usize),
    pub delta_c: f64,
    pub delta_ec: f64,
}

pub(crate) fn check_new_pair(g: &Graph, i: usize, j: usize) -> Result<()> {
    let n = g.node_count();
    if i >= n || j >= n {
        return Err(Error::OutOfRange { u: i, v: j, weight: 1.0, n });
    }
    if i == j {
        return Err(Error::SelfLoop { u: i, v: j, weight: 1.0 });
    }
    if g.has_edge(i, j) {
        let (u, v) = pair(i, j);
        return Err(Error::EdgePresent(u, v));
    }
    Ok(())
}

/// Shared state for repeated single-link queries on one graph.
pub struct DeltaScanner<'g> {
    graph: &'g Graph,
    sys: FjSystem,
    z: Option<DVector<f64>>,
}

impl<'g> DeltaScanner<'g> {
    /// `s` may be omitted when only expectation-mode deltas are needed.
    pub fn new(graph: &'g Graph, s: Option<&Opinions>) -> Result<Self> {
        let sys = FjSystem::new(graph);
        let z = match s {
            Some(s) => {
                if s.len() != graph.node_count() {
                    return Err(Error::LengthMismatch { expected: graph.node_count(), found: s.len() });
                }
                Some(sys.equilibrium(s))
            }
            None => None,
        };
        // factor once up front; every query below reads the inverse
        sys.inverse();
        Ok(Self { graph, sys, z })
    }

    pub fn system(&self) -> &FjSystem {
        &self.sys
    }

    pub fn equilibrium(&self) -> Option<&DVector<f64>> {
        self.z.as_ref()
    }

    /// Conflict change for adding `(i, j)` with weight `w`.
    pub fn delta(&self, i: usize, j: usize, w: f64) -> Result<f64> {
        check_new_pair(self.graph, i, j)?;
        let z = self.z.as_ref().ok_or_else(|| Error::Config("no opinions supplied".into()))?;
        let gap = z[i] - z[j];
        Ok(-w * gap * gap / (1.0 + w * self.sys.pair_resistance(i, j)))
    }

    /// Expected conflict change over opinions with covariance `sigma2 * I`.
    pub fn expected_delta(&self, i: usize, j: usize, w: f64, sigma2: f64) -> Result<f64> {
        check_new_pair(self.graph, i, j)?;
        if sigma2 < 0.0 {
            return Err(Error::Config(format!("sigma2 must be nonnegative, got {sigma2}")));
        }
        Ok(-sigma2 * w * self.sys.pair_spread(i, j) / (1.0 + w * self.sys.pair_resistance(i, j)))
    }

    pub fn record(&self, i: usize, j: usize, sigma2: f64) -> Result<DeltaRecord> {
        Ok(DeltaRecord {
            edge: pair(i, j),
            delta_c: self.delta(i, j, 1.0)?,
            delta_ec: self.expected_delta(i, j, 1.0, sigma2)?,
        })
    }

    /// One record per candidate, in input order.
    pub fn scan(&self, candidates: &[(usize, usize)], sigma2: f64) -> Result<Vec<DeltaRecord>> {
        par::map(candidates, |&(i, j)| self.record(i, j, sigma2))
            .into_iter()
            .enumerate()
            .map(|(index, r)| r.map_err(|e| Error::Candidate { index, source: Box::new(e) }))
            .collect()
    }
}

/// Conflict change from adding the unit-weight link `(i, j)`.
pub fn conflict_delta(g: &Graph, s: &Opinions, i: usize, j: usize) -> Result<f64> {
    check_new_pair(g, i, j)?;
    DeltaScanner::new(g, Some(s))?.delta(i, j, 1.0)
}

/// Expected conflict change from adding the unit-weight link `(i, j)`.
pub fn expected_conflict_delta(g: &Graph, i: usize, j: usize, sigma2: f64) -> Result<f64> {
    check_new_pair(g, i, j)?;
    DeltaScanner::new(g, None)?.expected_delta(i, j, 1.0, sigma2)
}

/// Batch form of [`conflict_delta`] and [`expected_conflict_delta`] sharing
/// one factorization.
pub fn scan_candidates(
    g: &Graph,
    s: &Opinions,
    sigma2: f64,
    candidates: &[(usize, usize)],
) -> Result<Vec<DeltaRecord>> {
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    DeltaScanner::new(g, Some(s))?.scan(candidates, sigma2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opinion::measures;

    fn s(v: &[f64]) -> Opinions {
        Opinions::centered(v).unwrap()
    }

    #[test]
    fn isolated_pair() {
        let d = conflict_delta(&Graph::empty(2), &s(&[1.0, -1.0]), 0, 1).unwrap();
        assert!((d + 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn closing_p3() {
        let g = Graph::path(3);
        let s = s(&[1.0, 0.0, -1.0]);
        let d = conflict_delta(&g, &s, 0, 2).unwrap();
        assert!((d + 0.5).abs() < 1e-14);
        let after = measures(&g.with_edge(0, 2, 1.0).unwrap(), &s).unwrap().conflict;
        assert!((after - 0.5).abs() < 1e-14);
        assert!((expected_conflict_delta(&g, 0, 2, 1.0).unwrap() + 0.25).abs() < 1e-14);
        assert_eq!(expected_conflict_delta(&g, 0, 2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn equal_expressed_opinions_give_zero() {
        // z_0 = z_2 by symmetry of the star
        let g = Graph::star(3);
        let d = conflict_delta(&g, &s(&[0.0, 1.0, 1.0, -2.0]), 1, 2).unwrap();
        assert!(d.abs() < 1e-15);
    }

    #[test]
    fn weighted_matches_recompute() {
        let g = Graph::unweighted(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let s = s(&[1.0, 0.2, -0.4, 2.0]);
        let sc = DeltaScanner::new(&g, Some(&s)).unwrap();
        let w = 2.5;
        let before = measures(&g, &s).unwrap().conflict;
        let after = measures(&g.with_edge(0, 3, w).unwrap(), &s).unwrap().conflict;
        assert!((sc.delta(0, 3, w).unwrap() - (after - before)).abs() < 1e-12);
    }

    #[test]
    fn invalid_pairs() {
        let g = Graph::path(3);
        let s = s(&[1.0, 0.0, -1.0]);
        assert!(matches!(conflict_delta(&g, &s, 0, 1), Err(Error::EdgePresent(0, 1))));
        assert!(matches!(conflict_delta(&g, &s, 1, 1), Err(Error::SelfLoop { .. })));
        let err = scan_candidates(&g, &s, 1.0, &[(0, 2), (2, 1)]).unwrap_err();
        assert!(matches!(err, Error::Candidate { index: 1, .. }));
    }

    #[test]
    fn batch_matches_single() {
        let g = Graph::path(3);
        let s = s(&[1.0, 0.0, -1.0]);
        let batch = scan_candidates(&g, &s, 1.0, &[(0, 2)]).unwrap();
        assert_eq!(batch.len(), 1);
        assert_eq!(batch[0].delta_c, conflict_delta(&g, &s, 0, 2).unwrap());
        assert_eq!(batch[0].delta_ec, expected_conflict_delta(&g, 0, 2, 1.0).unwrap());
        assert!(scan_candidates(&g, &s, 1.0, &[]).unwrap().is_empty());
    }
}
