//! Spanning rooted forest counts behind the inverse of `I + L`.
//!
//! By the matrix-forest theorem `det(I + L)` counts spanning rooted forests
//! and the cofactor `C[x][y]` counts those in which `x` and `y` share a tree
//! rooted at `x`. The separation count `sep[x][y] = C[x][x] - C[x][y]` is the
//! number of forests where `x` is a root and `y` sits in another tree.
//!
//! Orientation matters for the global-position term. The identity
//! `|(I + L)^{-1} b_e|^2 = N^{-2} sum_k (C[i][k] - C[j][k])^2` rewrites, via
//! symmetry of `C`, as a sum over `sep[k][i] - sep[k][j]`: the summation node
//! `k` is the root side. Writing it with `i`/`j` as roots (`sep[i][k]`) gives
//! a different, wrong number already on the path `a - b - c` (17/64 instead
//! of 14/64 for the pair `(a, b)`). [`ForestCountTable::global_gap`] uses the
//! root-at-`k` orientation; [`ForestCountTable::local_distance`] is symmetric
//! and unaffected.
//!
//! Counts are exact big integers. [`forest_table`] gets them from rational
//! Gauss-Jordan elimination; [`enumerate_forests`] is a brute-force oracle
//! that walks every acyclic edge subset.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph [`forest_table`] accepts.
pub const MAX_EXACT_NODES: usize = 64;
/// Largest graph [`enumerate_forests`] accepts.
pub const MAX_ENUM_NODES: usize = 10;
/// Edge cap for enumeration; the walk visits up to `2^edges` subsets.
pub const MAX_ENUM_EDGES: usize = 28;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestCountTable {
    /// Total spanning rooted forests, `det(I + L)`.
    pub total: BigInt,
    /// `sep[x][y]`: forests with `x` a root and `y` in a different tree.
    pub sep: Vec<Vec<BigInt>>,
    /// Cofactors of `I + L`: forests with `x`, `y` in one tree rooted at `x`.
    pub cof: Vec<Vec<BigInt>>,
}

fn integer_weights(g: &Graph) -> Result<Vec<(usize, usize, u64)>> {
    g.edges()
        .iter()
        .map(|e| {
            if e.weight.fract() != 0.0 || e.weight > u32::MAX as f64 {
                Err(Error::NonIntegerWeight(e.weight))
            } else {
                Ok((e.u, e.v, e.weight as u64))
            }
        })
        .collect()
}

impl ForestCountTable {
    fn from_cofactors(total: BigInt, cof: Vec<Vec<BigInt>>) -> Self {
        let n = cof.len();
        let sep = (0..n).map(|x| (0..n).map(|y| &cof[x][x] - &cof[x][y]).collect()).collect();
        Self { total, sep, cof }
    }

    pub fn node_count(&self) -> usize {
        self.cof.len()
    }

    /// `(sep[i][j] + sep[j][i]) / N`, equal to `b_e^T (I + L)^{-1} b_e`.
    pub fn local_distance(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(&self.sep[i][j] + &self.sep[j][i], self.total.clone())
    }

    /// `N^{-2} sum_k (sep[k][i] - sep[k][j])^2`, equal to
    /// `|(I + L)^{-1} b_e|^2`.
    pub fn global_gap(&self, i: usize, j: usize) -> BigRational {
        let sum: BigInt = (0..self.node_count())
            .map(|k| {
                let d = &self.sep[k][i] - &self.sep[k][j];
                &d * &d
            })
            .sum();
        BigRational::new(sum, &self.total * &self.total)
    }

    /// `sigma2` times [`Self::global_gap`].
    pub fn global_distance(&self, i: usize, j: usize, sigma2: f64) -> f64 {
        sigma2 * to_f64(&self.global_gap(i, j))
    }

    /// Expected conflict change per unit variance, written purely in counts:
    /// `-N^{-1} (N + sep[i][j] + sep[j][i])^{-1} sum_k (sep[k][i] - sep[k][j])^2`.
    pub fn expected_delta_exact(&self, i: usize, j: usize) -> BigRational {
        let sum: BigInt = (0..self.node_count())
            .map(|k| {
                let d = &self.sep[k][i] - &self.sep[k][j];
                &d * &d
            })
            .sum();
        let denom = &self.total * (&self.total + &self.sep[i][j] + &self.sep[j][i]);
        -BigRational::new(sum, denom)
    }

    pub fn expected_delta(&self, i: usize, j: usize, sigma2: f64) -> f64 {
        sigma2 * to_f64(&self.expected_delta_exact(i, j))
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Exact counts from the cofactor matrix `det(M) M^{-1}` of `M = I + L`.
pub fn forest_table(g: &Graph) -> Result<ForestCountTable> {
    let n = g.node_count();
    if n > MAX_EXACT_NODES {
        return Err(Error::TooLarge(format!("{n} nodes; exact counts support at most {MAX_EXACT_NODES}")));
    }
    let weights = integer_weights(g)?;
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = BigRational::one();
    }
    for &(u, v, w) in &weights {
        let w = BigRational::from_integer(BigInt::from(w));
        m[u][u] += &w;
        m[v][v] += &w;
        m[u][v] -= &w;
        m[v][u] -= &w;
    }
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let mut det = BigRational::one();
    // M is positive definite, so every leading pivot is nonzero
    for p in 0..n {
        let pivot = m[p][p].clone();
        det *= &pivot;
        let inv_pivot = pivot.recip();
        for c in 0..n {
            m[p][c] *= &inv_pivot;
            inv[p][c] *= &inv_pivot;
        }
        for r in 0..n {
            if r == p || m[r][p].is_zero() {
                continue;
            }
            let f = m[r][p].clone();
            for c in 0..n {
                let dm = &f * &m[p][c];
                m[r][c] -= dm;
                let di = &f * &inv[p][c];
                inv[r][c] -= di;
            }
        }
    }
    assert!(det.is_integer(), "determinant of an integer matrix");
    let total = det.to_integer();
    let cof = inv
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let c = x * &det;
                    assert!(c.is_integer(), "cofactor of an integer matrix");
                    c.to_integer()
                })
                .collect()
        })
        .collect();
    Ok(ForestCountTable::from_cofactors(total, cof))
}

struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    undo: Vec<(usize, usize)>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n], undo: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.undo.push((a, b));
        true
    }

    fn rollback(&mut self) {
        let (a, b) = self.undo.pop().expect("matching union");
        self.parent[b] = b;
        self.size[a] -= self.size[b];
    }
}

struct Tally {
    total: u128,
    sep: Vec<Vec<u128>>,
    cof: Vec<Vec<u128>>,
}

fn walk(edges: &[(usize, usize, u64)], k: usize, weight: u128, dsu: &mut Dsu, t: &mut Tally) {
    if k == edges.len() {
        let n = dsu.parent.len();
        let roots: Vec<usize> = (0..n).map(|x| dsu.find(x)).collect();
        // rootings: one root per tree, so sizes multiply
        let rootings: u128 = (0..n).filter(|&x| roots[x] == x).map(|x| dsu.size[x] as u128).product();
        let forests = weight * rootings;
        t.total += forests;
        for x in 0..n {
            // forests where x roots its own tree
            let with_x_root = forests / dsu.size[roots[x]] as u128;
            for y in 0..n {
                if roots[x] == roots[y] {
                    t.cof[x][y] += with_x_root;
                } else {
                    t.sep[x][y] += with_x_root;
                }
            }
        }
        return;
    }
    walk(edges, k + 1, weight, dsu, t);
    let (u, v, w) = edges[k];
    if dsu.union(u, v) {
        walk(edges, k + 1, weight * w as u128, dsu, t);
        dsu.rollback();
    }
}

/// Brute-force counts: walks every acyclic edge subset, multiplies in the
/// number of ways to root each tree, and tallies `total`, `sep` and `cof`
/// straight from their definitions. Integer weights count as edge
/// multiplicities.
pub fn enumerate_forests(g: &Graph) -> Result<ForestCountTable> {
    let n = g.node_count();
    if n > MAX_ENUM_NODES || g.edge_count() > MAX_ENUM_EDGES {
        return Err(Error::TooLarge(format!(
            "{n} nodes / {} edges; enumeration supports at most {MAX_ENUM_NODES} nodes and {MAX_ENUM_EDGES} edges",
            g.edge_count()
        )));
    }
    let edges = integer_weights(g)?;
    let mut t = Tally { total: 0, sep: vec![vec![0; n]; n], cof: vec![vec![0; n]; n] };
    walk(&edges, 0, 1, &mut Dsu::new(n), &mut t);
    let big = |m: Vec<Vec<u128>>| m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    Ok(ForestCountTable { total: BigInt::from(t.total), sep: big(t.sep), cof: big(t.cof) })
}
