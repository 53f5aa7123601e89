mod common;

use common::*;
use fj_conflict::delta::DeltaScanner;
use fj_conflict::graph::karate_club;
use fj_conflict::harness::{
    conflict_awareness, effective_katz_alpha, realized_delta, recall, run_experiment, split, write_csv,
    ExperimentConfig, OpinionSource, Recommender, SplitSpec,
};
use fj_conflict::opt::{evaluate, solve, BudgetedAddition, Mode, SolverOptions, REFRESH_EVERY};
use fj_conflict::predictors::{adjacency_spectral_radius, Method};
use fj_conflict::{Graph, Opinions};
use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Objective change by dense recomputation, in either mode.
fn dense_objective(g: &Graph, s: Option<&[f64]>, sigma2: f64, cand: &[(usize, usize)], w: &[f64]) -> f64 {
    let extra: Vec<_> = cand.iter().copied().zip(w.iter().copied()).collect();
    let (m0, m1) = (dense_m(g, &[]), dense_m(g, &extra));
    match s {
        Some(s) => dense_conflict(&m1, s) - dense_conflict(&m0, s),
        None => sigma2 * (dense_trace_inv(&m1) - dense_trace_inv(&m0)),
    }
}

fn random_simplex(rng: &mut impl Rng, k: usize, beta: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| beta * x / total).collect()
}

/// Connected graph, centered opinions and `k` missing links.
fn instance(seed: u64, n: usize, k: usize) -> (Graph, Opinions, Vec<(usize, usize)>) {
    let mut r = rng(seed);
    let g = random_connected(&mut r, n, 0.3);
    let s = Opinions::centered(&gaussian(&mut r, n)).unwrap();
    let mut non = g.non_edges();
    non.shuffle(&mut r);
    non.truncate(k);
    non.sort_unstable();
    (g, s, non)
}

#[test]
fn expected_delta_matches_monte_carlo() {
    let mut r = rng(11);
    let g = random_connected(&mut r, 10, 0.3);
    let (i, j) = g.non_edges()[3];
    let sigma2 = 1.7;
    let exact = DeltaScanner::new(&g, None).unwrap().expected_delta(i, j, 1.0, sigma2).unwrap();
    let diff = dense_m(&g, &[((i, j), 1.0)]).try_inverse().unwrap() - dense_m(&g, &[]).try_inverse().unwrap();
    let samples: Vec<f64> = (0..100_000)
        .map(|_| {
            let x = DVector::<f64>::from_fn(10, |_, _| {
                let z: f64 = StandardNormal.sample(&mut r);
                sigma2.sqrt() * z
            });
            x.dot(&(&diff * &x))
        })
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!((mean - exact).abs() <= 3.0 * se, "mc {mean} exact {exact} se {se}");
}

#[test]
fn objective_is_convex_along_segments() {
    for seed in 0..100 {
        let (g, s, cand) = instance(seed, 10, 6);
        let mut r = rng(1000 + seed);
        let (a, b) = (random_simplex(&mut r, cand.len(), 2.0), random_simplex(&mut r, cand.len(), 2.0));
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        for mode in [Mode::Opinion(&s), Mode::Expected { sigma2: 1.0 }] {
            let f = |w: &[f64]| evaluate(&g, mode, &BudgetedAddition::new(cand.clone(), w.to_vec(), 2.0).unwrap()).unwrap();
            let (fa, fb, fm) = (f(&a), f(&b), f(&mid));
            assert!(fm <= 0.5 * (fa + fb) + 1e-12, "seed {seed}: {fm} > avg of {fa}, {fb}");
        }
    }
}

#[test]
fn solver_beats_uniform_vertices_and_single_links() {
    let opts = SolverOptions::default();
    for seed in 0..25 {
        let (g, s, cand) = instance(seed, 12, 8);
        let beta = 1.5;
        let scanner = DeltaScanner::new(&g, Some(&s)).unwrap();
        for mode in [Mode::Opinion(&s), Mode::Expected { sigma2: 1.0 }] {
            let res = solve(&g, mode, &cand, beta, opts).unwrap();
            let slack = 1e-9 * res.objective.abs();
            let uniform = evaluate(&g, mode, &BudgetedAddition::uniform(cand.clone(), beta).unwrap()).unwrap();
            assert!(res.objective <= uniform + slack);
            for k in 0..cand.len() {
                let v = evaluate(&g, mode, &BudgetedAddition::vertex(cand.clone(), k, beta).unwrap()).unwrap();
                assert!(res.objective <= v + slack);
                if let Mode::Opinion(_) = mode {
                    let single = scanner.delta(cand[k].0, cand[k].1, beta).unwrap();
                    assert!(res.objective <= single + slack);
                }
            }
            assert!(res.history.windows(2).all(|p| p[1] <= p[0] + 1e-12 * p[0].abs()));
            assert!((res.weights.iter().sum::<f64>() - beta).abs() < 1e-9);
            assert!(res.weights.iter().all(|&w| w >= 0.0));
        }
    }
}

#[test]
fn long_runs_stay_on_the_dense_objective() {
    let (g, s, cand) = instance(5, 40, 60);
    let opts = SolverOptions { tol: 1e-15, max_iter: 5 * REFRESH_EVERY };
    for (mode, vec) in [(Mode::Opinion(&s), Some(s.as_slice())), (Mode::Expected { sigma2: 0.8 }, None)] {
        let res = solve(&g, mode, &cand, 4.0, opts).unwrap();
        assert!(res.iterations > REFRESH_EVERY, "only {} iterations", res.iterations);
        let dense = dense_objective(&g, vec, 0.8, &cand, &res.weights);
        assert!((res.objective - dense).abs() <= 1e-9 * dense.abs(), "{} vs {dense}", res.objective);
    }
}

#[test]
fn realized_delta_counts_only_positives() {
    let g = Graph::unweighted(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
    let s = Opinions::centered(&[2.0, -1.0, 0.5, 1.5, -2.0, 0.0]).unwrap();
    let cand = [(0, 2), (0, 5), (1, 4), (2, 5)];
    let w = [0.4, 0.3, 0.2, 0.1];
    let positives = [(0, 5), (2, 5)];
    let got = realized_delta(&g, Mode::Opinion(&s), &positives, &cand, &w).unwrap();
    let want = dense_objective(&g, Some(s.as_slice()), 1.0, &[(0, 5), (2, 5)], &[0.3, 0.1]);
    assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    let got = realized_delta(&g, Mode::Expected { sigma2: 2.0 }, &positives, &cand, &w).unwrap();
    let want = dense_objective(&g, None, 2.0, &[(0, 5), (2, 5)], &[0.3, 0.1]);
    assert!((got - want).abs() < 1e-13);
}

#[test]
fn awareness_ratio_across_modules() {
    let (g, s, cand) = instance(3, 10, 5);
    let (positives, negatives) = (&cand[..2], &cand[2..]);
    let beta = 2.0;
    let opt = solve(&g, Mode::Opinion(&s), positives, beta, SolverOptions::default()).unwrap();
    let weights = [0.5, 0.25, 0.5, 0.5, 0.25];
    let all: Vec<_> = positives.iter().chain(negatives).copied().collect();
    let ca = conflict_awareness(realized_delta(&g, Mode::Opinion(&s), positives, &all, &weights).unwrap(), opt.objective)
        .unwrap();
    let num = dense_objective(&g, Some(s.as_slice()), 1.0, positives, &weights[..2]);
    let den = dense_objective(&g, Some(s.as_slice()), 1.0, positives, &opt.weights);
    assert!((ca.raw - num / den).abs() < 1e-9);
    assert!((0.0..=1.0).contains(&ca.value));
}

#[test]
fn random_ranking_recall_tracks_positive_share() {
    let g = karate_club();
    let sp = split(&g, SplitSpec { beta: 10, eta: 9.0, seed: 4 }).unwrap();
    let mut r = rng(8);
    let mut cand = sp.candidates();
    let trials = 2000;
    let total: f64 = (0..trials)
        .map(|_| {
            cand.shuffle(&mut r);
            recall(&cand, &sp.positives, 10)
        })
        .sum();
    let mean = total / trials as f64;
    assert!((mean - 0.1).abs() < 0.01, "mean recall {mean}");
}

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        dataset: "karate".into(),
        methods: vec![Recommender::Heuristic(Method::AdamicAdar)],
        beta: 8,
        etas: vec![3.0],
        seeds: vec![0, 1],
        ..ExperimentConfig::default()
    }
}

#[test]
fn experiment_shape_schema_and_determinism() {
    let g = karate_club();
    let cfg = small_config();
    let a = run_experiment(&g, &OpinionSource::Gaussian, &cfg).unwrap();
    assert!(a.failures.is_empty(), "{:?}", a.failures);
    assert_eq!(a.records.len(), 2);
    assert_eq!(a.records.iter().map(|r| r.seed).collect::<Vec<_>>(), [0, 1]);
    for r in &a.records {
        assert!((0.0..=1.0).contains(&r.ca) && (0.0..=1.0).contains(&r.cae));
        assert!(r.optimum_delta <= r.realized_delta.min(0.0) + 1e-9 * r.optimum_delta.abs());
    }
    let b = run_experiment(&g, &OpinionSource::Gaussian, &cfg).unwrap();
    assert_eq!(a, b);

    let mut buf = Vec::new();
    write_csv(&a.records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "dataset,method,beta,eta,seed,ca,cae,recall,precision_at_10,realized_delta,optimum_delta"
    );
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn katz_alpha_falls_back_when_series_diverges() {
    let g = karate_club();
    let radius = adjacency_spectral_radius(&g);
    assert!(radius > 2.0);
    assert_eq!(effective_katz_alpha(&g, 0.5), 0.5 / radius);
    assert_eq!(effective_katz_alpha(&g, 0.1), 0.1);
}
