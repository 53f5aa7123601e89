//! Budgeted conflict minimization over weighted link additions.
//!
//! A link addition puts weight `w_e >= 0` on candidate pairs, forming
//! `L_f = sum_e w_e b_e b_e^T`, with total weight at most the budget `beta`
//! (`Tr L_f <= 2 beta`). Its effect is
//!
//! ```text
//! opinion mode:     s^T (I + L + L_f)^{-1} s - s^T (I + L)^{-1} s
//! expectation mode: sigma^2 [Tr (I + L + L_f)^{-1} - Tr (I + L)^{-1}]
//! ```
//!
//! Both are convex in `w` and nonincreasing in every coordinate, so the
//! minimum over the budget polytope sits on the face `sum w = beta`.
//! [`solve`] runs pairwise Frank-Wolfe on that simplex: each step shifts mass
//! from the worst active candidate to the best candidate with an exact line
//! search. The shift is a rank-2 change of `M = I + L + L_f`, so the explicit
//! inverse is carried along by Woodbury updates and only refactorized every
//! [`REFRESH_EVERY`] steps.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::Serialize;

use crate::delta::check_new_pair;
use crate::error::{Error, Result};
use crate::graph::{pair, Graph};
use crate::opinion::{FjSystem, Opinions};

/// Steps between full refactorizations of `M`.
pub const REFRESH_EVERY: usize = 40;

/// What the addition is scored against.
#[derive(Debug, Clone, Copy)]
pub enum Mode<'a> {
    /// Fixed opinions.
    Opinion(&'a Opinions),
    /// Opinions with covariance `sigma2 * I`.
    Expected { sigma2: f64 },
}

/// Weights on candidate pairs under a total budget.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetedAddition {
    pub candidates: Vec<(usize, usize)>,
    pub weights: Vec<f64>,
    pub budget: f64,
}

impl BudgetedAddition {
    pub fn new(candidates: Vec<(usize, usize)>, weights: Vec<f64>, budget: f64) -> Result<Self> {
        let a = Self { candidates, weights, budget };
        a.check_feasible()?;
        Ok(a)
    }

    pub fn uniform(candidates: Vec<(usize, usize)>, budget: f64) -> Result<Self> {
        let w = budget / candidates.len().max(1) as f64;
        let weights = vec![w; candidates.len()];
        Self::new(candidates, weights, budget)
    }

    /// Whole budget on candidate `k`.
    pub fn vertex(candidates: Vec<(usize, usize)>, k: usize, budget: f64) -> Result<Self> {
        let mut weights = vec![0.0; candidates.len()];
        weights[k] = budget;
        Self::new(candidates, weights, budget)
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn check_feasible(&self) -> Result<()> {
        if self.weights.len() != self.candidates.len() {
            return Err(Error::Infeasible(format!(
                "{} weights for {} candidates",
                self.weights.len(),
                self.candidates.len()
            )));
        }
        if let Some(w) = self.weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Infeasible(format!("weight {w} is not a finite nonnegative number")));
        }
        let total = self.total_weight();
        if total > self.budget * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::Infeasible(format!("total weight {total} exceeds budget {}", self.budget)));
        }
        Ok(())
    }
}

fn check_candidates(g: &Graph, candidates: &[(usize, usize)]) -> Result<()> {
    let mut seen: Vec<(usize, usize)> = Vec::with_capacity(candidates.len());
    for (index, &(i, j)) in candidates.iter().enumerate() {
        check_new_pair(g, i, j).map_err(|e| Error::Candidate { index, source: Box::new(e) })?;
        seen.push(pair(i, j));
    }
    seen.sort_unstable();
    if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Infeasible(format!("candidate ({}, {}) listed twice", w[0].0, w[0].1)));
    }
    Ok(())
}

fn check_mode(g: &Graph, mode: Mode<'_>) -> Result<()> {
    match mode {
        Mode::Opinion(s) if s.len() != g.node_count() => {
            Err(Error::LengthMismatch { expected: g.node_count(), found: s.len() })
        }
        Mode::Expected { sigma2 } if !(sigma2 >= 0.0 && sigma2.is_finite()) => {
            Err(Error::Config(format!("sigma2 must be finite and nonnegative, got {sigma2}")))
        }
        _ => Ok(()),
    }
}

fn diff(v: &DVector<f64>, (i, j): (usize, usize)) -> f64 {
    v[i] - v[j]
}

fn col_diff_dot(a: &DMatrix<f64>, b: &DMatrix<f64>, (i, j): (usize, usize)) -> f64 {
    let n = a.nrows();
    (0..n).map(|k| (a[(k, i)] - a[(k, j)]) * (b[(k, i)] - b[(k, j)])).sum()
}

/// Fixed data of one objective: the base graph's inverse and, in opinion
/// mode, its equilibrium.
struct Problem<'a> {
    graph: &'a Graph,
    mode: Mode<'a>,
    candidates: &'a [(usize, usize)],
    base_inv: DMatrix<f64>,
    base_z: Option<DVector<f64>>,
}

/// Inverse of `M_w` and derived quantities at one weight vector.
struct Point {
    inv: DMatrix<f64>,
    z: Option<DVector<f64>>,
}

impl<'a> Problem<'a> {
    fn new(graph: &'a Graph, mode: Mode<'a>, candidates: &'a [(usize, usize)]) -> Self {
        let base = FjSystem::new(graph);
        let base_z = match mode {
            Mode::Opinion(s) => Some(base.equilibrium(s)),
            Mode::Expected { .. } => None,
        };
        Self { graph, mode, candidates, base_inv: base.inverse().clone(), base_z }
    }

    fn point(&self, weights: &[f64]) -> Point {
        let terms: Vec<_> =
            self.candidates.iter().copied().zip(weights.iter().copied()).filter(|&(_, w)| w > 0.0).collect();
        if terms.is_empty() {
            return Point { inv: self.base_inv.clone(), z: self.base_z.clone() };
        }
        let sys = FjSystem::with_additions(self.graph, &terms);
        let z = match self.mode {
            Mode::Opinion(s) => Some(sys.equilibrium(s)),
            Mode::Expected { .. } => None,
        };
        let inv = sys.inverse().clone();
        Point { inv, z }
    }

    // Written as -sum_e w_e b_e^T M_w^{-1} (.) M^{-1} b_e so no difference of
    // two large quadratic forms is taken.
    fn objective(&self, p: &Point, weights: &[f64]) -> f64 {
        let terms = self.candidates.iter().copied().zip(weights.iter().copied()).filter(|&(_, w)| w > 0.0);
        match self.mode {
            Mode::Opinion(_) => {
                let (z0, z) = (self.base_z.as_ref().unwrap(), p.z.as_ref().unwrap());
                -terms.map(|(e, w)| w * diff(z0, e) * diff(z, e)).sum::<f64>()
            }
            Mode::Expected { sigma2 } => {
                -sigma2 * terms.map(|(e, w)| w * col_diff_dot(&p.inv, &self.base_inv, e)).sum::<f64>()
            }
        }
    }

    fn gradient(&self, p: &Point) -> Vec<f64> {
        match self.mode {
            Mode::Opinion(_) => {
                let z = p.z.as_ref().unwrap();
                self.candidates.iter().map(|&e| -diff(z, e).powi(2)).collect()
            }
            Mode::Expected { sigma2 } => {
                self.candidates.iter().map(|&e| -sigma2 * col_diff_dot(&p.inv, &p.inv, e)).collect()
            }
        }
    }
}

/// Opinion-mode effect of an addition.
pub fn objective(g: &Graph, s: &Opinions, addition: &BudgetedAddition) -> Result<f64> {
    evaluate(g, Mode::Opinion(s), addition)
}

/// Expectation-mode effect of an addition.
pub fn objective_expected(g: &Graph, sigma2: f64, addition: &BudgetedAddition) -> Result<f64> {
    evaluate(g, Mode::Expected { sigma2 }, addition)
}

pub fn evaluate(g: &Graph, mode: Mode<'_>, addition: &BudgetedAddition) -> Result<f64> {
    addition.check_feasible()?;
    check_candidates(g, &addition.candidates)?;
    check_mode(g, mode)?;
    let prob = Problem::new(g, mode, &addition.candidates);
    let p = prob.point(&addition.weights);
    Ok(prob.objective(&p, &addition.weights))
}

/// Partial derivatives with respect to each candidate weight:
/// `-(b_e^T M^{-1} s)^2` or `-sigma2 |M^{-1} b_e|^2`, `M = I + L + L_f`.
pub fn gradient(g: &Graph, mode: Mode<'_>, addition: &BudgetedAddition) -> Result<Vec<f64>> {
    addition.check_feasible()?;
    check_candidates(g, &addition.candidates)?;
    check_mode(g, mode)?;
    let prob = Problem::new(g, mode, &addition.candidates);
    let p = prob.point(&addition.weights);
    Ok(prob.gradient(&p))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the Frank-Wolfe gap is at most `tol * |objective|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverResult {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final Frank-Wolfe duality gap.
    pub gap: f64,
    /// Objective at the start of every iteration and at exit.
    pub history: Vec<f64>,
}

impl SolverResult {
    pub fn addition(&self, candidates: &[(usize, usize)], budget: f64) -> BudgetedAddition {
        BudgetedAddition { candidates: candidates.to_vec(), weights: self.weights.clone(), budget }
    }
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, k| if v[k] < v[best] { k } else { best })
}

/// Line search data for shifting mass `t` from candidate `a` onto `s`.
struct PairShift {
    y: [DVector<f64>; 2],
    k: Matrix2<f64>,
    p: Option<Vector2<f64>>,
    q: Matrix2<f64>,
}

impl PairShift {
    fn new(inv: &DMatrix<f64>, z: Option<&DVector<f64>>, es: (usize, usize), ea: (usize, usize)) -> Self {
        let col = |(i, j): (usize, usize)| inv.column(i) - inv.column(j);
        let y = [col(es), col(ea)];
        let k = Matrix2::new(diff(&y[0], es), diff(&y[1], es), diff(&y[0], ea), diff(&y[1], ea));
        // symmetrize rounding
        let k = (k + k.transpose()) * 0.5;
        let p = z.map(|z| Vector2::new(diff(z, es), diff(z, ea)));
        let q = Matrix2::new(y[0].dot(&y[0]), y[0].dot(&y[1]), y[1].dot(&y[0]), y[1].dot(&y[1]));
        Self { y, k, p, q }
    }

    fn c(t: f64) -> Matrix2<f64> {
        Matrix2::new(t, 0.0, 0.0, -t)
    }

    /// Directional derivative `g_s - g_a` after shifting `t`.
    fn slope(&self, mode: Mode<'_>, t: f64) -> f64 {
        let c = Self::c(t);
        match mode {
            Mode::Opinion(_) => {
                let q = (Matrix2::identity() + self.k * c).lu().solve(self.p.as_ref().unwrap()).unwrap();
                q[1] * q[1] - q[0] * q[0]
            }
            Mode::Expected { sigma2 } => {
                let r = (Matrix2::identity() + c * self.k).try_inverse().unwrap();
                let g2 = r.transpose() * self.q * r;
                sigma2 * (g2[(1, 1)] - g2[(0, 0)])
            }
        }
    }

    /// Applies the shift to the explicit inverse and equilibrium in place.
    fn apply(&self, t: f64, inv: &mut DMatrix<f64>, z: Option<&mut DVector<f64>>) {
        let c = Self::c(t);
        let core = (Matrix2::identity() + c * self.k).try_inverse().unwrap() * c;
        let n = inv.nrows();
        let mut y = DMatrix::zeros(n, 2);
        y.set_column(0, &self.y[0]);
        y.set_column(1, &self.y[1]);
        let left = &y * core;
        inv.gemm(-1.0, &left, &y.transpose(), 1.0);
        if let (Some(z), Some(p)) = (z, self.p.as_ref()) {
            *z -= left * p;
        }
    }
}

/// Minimizes the chosen objective over `{w >= 0, sum w = beta}` on the given
/// candidate pairs.
pub fn solve(
    g: &Graph,
    mode: Mode<'_>,
    candidates: &[(usize, usize)],
    beta: f64,
    opts: SolverOptions,
) -> Result<SolverResult> {
    if candidates.is_empty() {
        return Err(Error::Config("solver needs at least one candidate".into()));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Config(format!("budget must be positive, got {beta}")));
    }
    check_candidates(g, candidates)?;
    check_mode(g, mode)?;
    let prob = Problem::new(g, mode, candidates);
    let k = candidates.len();

    let start = argmin(&prob.gradient(&prob.point(&vec![0.0; k])));
    let mut w = vec![0.0; k];
    w[start] = beta;
    let mut pt = prob.point(&w);
    let mut history = Vec::new();
    let mut converged = false;
    let mut gap;
    let mut iterations = 0;

    loop {
        let obj = prob.objective(&pt, &w);
        history.push(obj);
        let grad = prob.gradient(&pt);
        let best = argmin(&grad);
        gap = w.iter().zip(&grad).map(|(wi, gi)| wi * gi).sum::<f64>() - beta * grad[best];
        if gap <= opts.tol * obj.abs() || gap <= f64::MIN_POSITIVE {
            converged = true;
            break;
        }
        if iterations == opts.max_iter {
            break;
        }
        let worst = (0..k).filter(|&e| w[e] > 0.0).fold(None, |acc: Option<usize>, e| match acc {
            Some(a) if grad[a] >= grad[e] => Some(a),
            _ => Some(e),
        });
        let worst = worst.expect("weights sum to beta");
        if worst == best {
            converged = true;
            break;
        }
        let shift = PairShift::new(&pt.inv, pt.z.as_ref(), candidates[best], candidates[worst]);
        let room = w[worst];
        let t = if shift.slope(mode, room) <= 0.0 {
            room
        } else {
            let (mut lo, mut hi) = (0.0, room);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if shift.slope(mode, mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * room {
                    break;
                }
            }
            lo
        };
        if t <= 0.0 {
            break;
        }
        iterations += 1;
        w[best] += t;
        w[worst] = if t == room { 0.0 } else { w[worst] - t };
        if iterations % REFRESH_EVERY == 0 {
            pt = prob.point(&w);
        } else {
            shift.apply(t, &mut pt.inv, pt.z.as_mut());
        }
    }

    // exit objective from a clean factorization
    let pt = prob.point(&w);
    let objective = prob.objective(&pt, &w);
    if history.last() != Some(&objective) {
        history.push(objective);
    }
    Ok(SolverResult { weights: w, objective, iterations, converged, gap, history })
}
