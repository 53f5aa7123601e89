//! Undirected weighted graphs and their matrix views.
//!
//! A [`Graph`] is immutable once built. Nodes are dense `0..n` indices and
//! every edge is stored once with `u < v`. The Laplacian, adjacency and edge
//! vector views are materialized on demand as dense `nalgebra` matrices,
//! which is the representation the rest of the crate solves against.

mod datasets;
mod io;
mod sbm;

pub use datasets::{builtin_dataset, karate_club, sbm200_config, BUILTIN_DATASETS};
pub use io::{load_graph, load_graph_with_nodes, load_labeled_graph, load_opinions, parse_graph, parse_opinions};
pub use sbm::{sbm_generate, SbmConfig};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// An undirected edge `(u, v)` with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Canonical unordered node pair, smaller index first.
pub fn pair(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    // sorted by neighbor id
    adj: Vec<Vec<(usize, f64)>>,
}

impl Graph {
    /// Builds a graph from `(u, v, weight)` triples.
    ///
    /// Pairs are canonicalized to `u < v`. Self loops, out-of-range indices,
    /// duplicates (in either orientation) and negative or non-finite weights
    /// are rejected with the offending triple.
    pub fn build(n: usize, triples: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut edges = Vec::new();
        for (u, v, weight) in triples {
            if u >= n || v >= n {
                return Err(Error::OutOfRange { u, v, weight, n });
            }
            if u == v {
                return Err(Error::SelfLoop { u, v, weight });
            }
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::InvalidWeight { u, v, weight });
            }
            let (a, b) = pair(u, v);
            edges.push(Edge { u: a, v: b, weight });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        if let Some(w) = edges.windows(2).find(|w| (w[0].u, w[0].v) == (w[1].u, w[1].v)) {
            let e = w[1];
            return Err(Error::DuplicateEdge { u: e.u, v: e.v, weight: e.weight });
        }
        Ok(Self::from_sorted(n, edges))
    }

    /// Unit-weight graph from plain pairs.
    pub fn unweighted(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::build(n, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted(n, Vec::new())
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n).map(|v| Edge { u: v - 1, v, weight: 1.0 }).collect();
        Self::from_sorted(n, edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push(Edge { u, v, weight: 1.0 });
            }
        }
        Self::from_sorted(n, edges)
    }

    /// `rows x cols` 4-neighbour lattice, node `r * cols + c`.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut pairs = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    pairs.push((v, v + 1));
                }
                if r + 1 < rows {
                    pairs.push((v, v + cols));
                }
            }
        }
        Self::unweighted(rows * cols, pairs).expect("lattice edges are valid")
    }

    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves).map(|v| Edge { u: 0, v, weight: 1.0 }).collect();
        Self::from_sorted(leaves + 1, edges)
    }

    // `edges` must already be sorted, canonical and duplicate free.
    fn from_sorted(n: usize, edges: Vec<Edge>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.u].push((e.v, e.weight));
            adj[e.v].push((e.u, e.weight));
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        Self { n, edges, adj }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |&(w, _)| w).ok().map(|k| list[k].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.weight(u, v).is_some()
    }

    /// Weighted degree `d_v = sum_j a_vj`.
    pub fn degree(&self, v: usize) -> f64 {
        self.adj[v].iter().map(|&(_, w)| w).sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    /// Number of neighbors, ignoring weights.
    pub fn neighbor_count(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// `L = D - A`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.u, e.v)] -= e.weight;
            l[(e.v, e.u)] -= e.weight;
            l[(e.u, e.u)] += e.weight;
            l[(e.v, e.v)] += e.weight;
        }
        l
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.u, e.v)] = e.weight;
            a[(e.v, e.u)] = e.weight;
        }
        a
    }

    /// Edge indicator vector: `+1` at `i`, `-1` at `j`.
    pub fn edge_vector(&self, i: usize, j: usize) -> DVector<f64> {
        let mut b = DVector::zeros(self.n);
        b[i] = 1.0;
        b[j] = -1.0;
        b
    }

    /// Copy of the graph with one more edge.
    pub fn with_edge(&self, u: usize, v: usize, weight: f64) -> Result<Self> {
        Self::build(
            self.n,
            self.edges.iter().map(|e| (e.u, e.v, e.weight)).chain(std::iter::once((u, v, weight))),
        )
    }

    /// Copy of the graph with the listed pairs removed. Pairs that are not
    /// edges are ignored.
    pub fn without_edges(&self, removed: &[(usize, usize)]) -> Self {
        let mut drop: Vec<(usize, usize)> = removed.iter().map(|&(u, v)| pair(u, v)).collect();
        drop.sort_unstable();
        let edges = self
            .edges
            .iter()
            .filter(|e| drop.binary_search(&(e.u, e.v)).is_err())
            .copied()
            .collect();
        Self::from_sorted(self.n, edges)
    }

    /// All unordered pairs `u < v` that are not edges, in lexicographic order.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            let mut nb = self.adj[u].iter().map(|&(v, _)| v).filter(|&v| v > u).peekable();
            for v in u + 1..self.n {
                if nb.peek() == Some(&v) {
                    nb.next();
                } else {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn non_edge_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2 - self.edges.len()
    }

    /// Component label per node, labels assigned in order of first node.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = Vec::new();
        for root in 0..self.n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            stack.push(root);
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().iter().all(|&c| c == 0)
    }

    /// True when every weight is a nonnegative integer.
    pub fn has_integer_weights(&self) -> bool {
        self.edges.iter().all(|e| e.weight.fract() == 0.0)
    }
}
