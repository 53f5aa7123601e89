//! Friedkin-Johnsen equilibrium and the tension measures built on it.
//!
//! Everything here reduces to solves against the regularized Laplacian
//! `M = I + L`, which is symmetric positive definite for every graph. A
//! [`FjSystem`] holds one Cholesky factorization of `M` and, on first
//! request, its explicit inverse; both are read-only afterwards and shared
//! across every query made against the same graph.

use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Subtracts the mean.
pub fn center(raw: &[f64]) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::EmptyOpinions);
    }
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    Ok(raw.iter().map(|x| x - mean).collect())
}

/// Mean-centered initial opinions `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Opinions(DVector<f64>);

impl Opinions {
    pub fn centered(raw: &[f64]) -> Result<Self> {
        Ok(Self(DVector::from_vec(center(raw)?)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// `s^T s`, the conflict of the same population with no links.
    pub fn norm_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: self.len() });
        }
        Ok(())
    }
}

/// Factorized `I + L (+ L_f)` for one graph.
pub struct FjSystem {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    inverse: OnceLock<DMatrix<f64>>,
}

impl FjSystem {
    pub fn new(g: &Graph) -> Self {
        Self::with_additions(g, &[])
    }

    /// Factorizes `I + L + sum_e w_e b_e b_e^T` for the extra weighted pairs.
    pub fn with_additions(g: &Graph, additions: &[((usize, usize), f64)]) -> Self {
        let mut m = g.laplacian();
        for ((i, j), w) in additions {
            let (i, j, w) = (*i, *j, *w);
            m[(i, i)] += w;
            m[(j, j)] += w;
            m[(i, j)] -= w;
            m[(j, i)] -= w;
        }
        for k in 0..m.nrows() {
            m[(k, k)] += 1.0;
        }
        Self::from_matrix(m)
    }

    /// `m` must be symmetric positive definite.
    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        let chol = Cholesky::new(m.clone()).expect("I + L is positive definite");
        Self { matrix: m, chol, inverse: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(rhs)
    }

    /// `M^{-1}`, computed once from the factorization.
    pub fn inverse(&self) -> &DMatrix<f64> {
        self.inverse.get_or_init(|| {
            let inv = self.chol.inverse();
            // symmetrize away rounding asymmetry
            (&inv + inv.transpose()) * 0.5
        })
    }

    pub fn trace_inverse(&self) -> f64 {
        self.inverse().trace()
    }

    /// `z = M^{-1} s`.
    pub fn equilibrium(&self, s: &Opinions) -> DVector<f64> {
        self.solve(s.vector())
    }

    /// `s^T M^{-1} s`.
    pub fn conflict(&self, s: &Opinions) -> f64 {
        s.vector().dot(&self.equilibrium(s))
    }

    /// `b_e^T M^{-1} b_e` read off the explicit inverse.
    pub fn pair_resistance(&self, i: usize, j: usize) -> f64 {
        let x = self.inverse();
        x[(i, i)] + x[(j, j)] - x[(i, j)] - x[(j, i)]
    }

    /// `||M^{-1} b_e||^2` read off the explicit inverse.
    pub fn pair_spread(&self, i: usize, j: usize) -> f64 {
        let x = self.inverse();
        x.column(i).iter().zip(x.column(j).iter()).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

/// Equilibrium expressed opinions `z = (I + L)^{-1} s`.
pub fn equilibrium(g: &Graph, s: &Opinions) -> Result<DVector<f64>> {
    s.check_len(g.node_count())?;
    Ok(FjSystem::new(g).equilibrium(s))
}

/// Runs `steps` synchronous rounds of neighbor averaging from `z = s`.
pub fn iterate_fj(g: &Graph, s: &Opinions, steps: usize) -> Result<Vec<f64>> {
    s.check_len(g.node_count())?;
    let s = s.as_slice();
    let mut z = s.to_vec();
    let mut next = vec![0.0; z.len()];
    for _ in 0..steps {
        for (i, out) in next.iter_mut().enumerate() {
            let (mut num, mut den) = (s[i], 1.0);
            for &(j, w) in g.neighbors(i) {
                num += w * z[j];
                den += w;
            }
            *out = num / den;
        }
        std::mem::swap(&mut z, &mut next);
    }
    Ok(z)
}

/// The five tension measures of one `(G, s)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConflictReport {
    pub disagreement: f64,
    pub polarization: f64,
    pub conflict: f64,
    pub internal_conflict: f64,
    pub unhappiness: f64,
}

pub fn measures(g: &Graph, s: &Opinions) -> Result<ConflictReport> {
    s.check_len(g.node_count())?;
    Ok(measures_with(&FjSystem::new(g), g, s))
}

/// Measures against an existing factorization of `I + L` for `g`.
pub fn measures_with(sys: &FjSystem, g: &Graph, s: &Opinions) -> ConflictReport {
    let z = sys.equilibrium(s);
    let disagreement = g.edges().iter().map(|e| e.weight * (z[e.u] - z[e.v]).powi(2)).sum();
    let mean = z.mean();
    let polarization = z.iter().map(|x| (x - mean).powi(2)).sum();
    let conflict = s.vector().dot(&z);
    let internal_conflict = z.iter().zip(s.as_slice()).map(|(zi, si)| (zi - si).powi(2)).sum::<f64>();
    ConflictReport {
        disagreement,
        polarization,
        conflict,
        internal_conflict,
        unhappiness: disagreement + internal_conflict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Opinions {
        Opinions::centered(v).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn centering() {
        assert_eq!(center(&[1.0, -1.0]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(center(&[2.0, 0.0]).unwrap(), vec![1.0, -1.0]);
        assert_eq!(center(&[5.0, 5.0, 5.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        assert!(matches!(center(&[]), Err(Error::EmptyOpinions)));
    }

    #[test]
    fn k2_equilibrium() {
        let z = equilibrium(&Graph::path(2), &s(&[1.0, -1.0])).unwrap();
        assert!(close(z[0], 1.0 / 3.0) && close(z[1], -1.0 / 3.0));
    }

    #[test]
    fn p3_equilibrium_and_residual() {
        let g = Graph::path(3);
        let s = s(&[1.0, 0.0, -1.0]);
        let z = equilibrium(&g, &s).unwrap();
        assert!(close(z[0], 0.5) && close(z[1], 0.0) && close(z[2], -0.5));
        let m = FjSystem::new(&g);
        let r = m.matrix() * &z - s.vector();
        assert!(r.norm() <= 1e-10 * s.vector().norm());
        let want = DMatrix::from_row_slice(3, 3, &[5.0, 2.0, 1.0, 2.0, 4.0, 2.0, 1.0, 2.0, 5.0]) / 8.0;
        assert!((m.inverse() - want).amax() < 1e-14);
    }

    #[test]
    fn empty_graph_equilibrium_is_identity() {
        let s = s(&[0.3, -1.2, 0.9]);
        assert_eq!(equilibrium(&Graph::empty(3), &s).unwrap(), s.vector().clone());
    }

    #[test]
    fn iteration() {
        let g = Graph::path(2);
        let s2 = s(&[1.0, -1.0]);
        assert_eq!(iterate_fj(&g, &s2, 0).unwrap(), vec![1.0, -1.0]);
        assert_eq!(iterate_fj(&g, &s2, 1).unwrap(), vec![0.0, 0.0]);
        let z = iterate_fj(&Graph::path(3), &s(&[1.0, 0.0, -1.0]), 200).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-8 && z[1].abs() < 1e-8 && (z[2] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn k2_measures() {
        let r = measures(&Graph::path(2), &s(&[1.0, -1.0])).unwrap();
        assert!(close(r.disagreement, 4.0 / 9.0));
        assert!(close(r.polarization, 2.0 / 9.0));
        assert!(close(r.conflict, 2.0 / 3.0));
        assert!(close(r.internal_conflict, 8.0 / 9.0));
        assert!(close(r.unhappiness, 4.0 / 3.0));
    }

    #[test]
    fn p3_measures() {
        let r = measures(&Graph::path(3), &s(&[1.0, 0.0, -1.0])).unwrap();
        assert!(close(r.conflict, 1.0) && close(r.unhappiness, 1.0));
        assert!(close(r.disagreement, 0.5) && close(r.polarization, 0.5) && close(r.internal_conflict, 0.5));
    }

    #[test]
    fn empty_graph_measures() {
        let s = s(&[2.0, -1.0, -1.0]);
        let r = measures(&Graph::empty(3), &s).unwrap();
        assert_eq!((r.disagreement, r.internal_conflict, r.unhappiness), (0.0, 0.0, 0.0));
        assert!(close(r.conflict, s.norm_sq()) && close(r.polarization, s.norm_sq()));
    }

    #[test]
    fn length_checked() {
        assert!(matches!(measures(&Graph::path(3), &s(&[1.0, 0.0])), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn pair_quantities_match_dense_products() {
        let g = Graph::unweighted(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        let m = FjSystem::new(&g);
        let b = g.edge_vector(0, 3);
        let y = m.solve(&b);
        assert!((m.pair_resistance(0, 3) - b.dot(&y)).abs() < 1e-14);
        assert!((m.pair_spread(0, 3) - y.norm_squared()).abs() < 1e-14);
    }
}
