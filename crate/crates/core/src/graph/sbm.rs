use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, Graph};
use crate::error::{Error, Result};

/// Stochastic block model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmConfig {
    pub sizes: Vec<usize>,
    /// Symmetric `k x k` matrix of link probabilities.
    pub probs: Vec<Vec<f64>>,
    pub seed: u64,
}

impl SbmConfig {
    /// The four-cluster barbell: two dense clusters A and B joined only
    /// through the small bridge clusters C and D.
    ///
    /// Block order is `[A, B, C, D]` with sizes `[100, 100, 10, 10]`.
    pub fn barbell(seed: u64) -> Self {
        let (hi, c, d) = (0.5, 0.1, 0.3);
        Self {
            sizes: vec![100, 100, 10, 10],
            probs: vec![
                vec![hi, 0.0, c, d],
                vec![0.0, hi, c, d],
                vec![c, c, c, 0.0],
                vec![d, d, 0.0, d],
            ],
            seed,
        }
    }

    /// Two equal communities with dense interiors and sparse cross links.
    pub fn two_communities(size: usize, p_in: f64, p_out: f64, seed: u64) -> Self {
        Self { sizes: vec![size, size], probs: vec![vec![p_in, p_out], vec![p_out, p_in]], seed }
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Block index of every node; blocks occupy consecutive id ranges.
    pub fn block_labels(&self) -> Vec<usize> {
        self.sizes.iter().enumerate().flat_map(|(b, &s)| std::iter::repeat_n(b, s)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.sizes.len();
        if k == 0 {
            return Err(Error::Config("SBM needs at least one block".into()));
        }
        if self.sizes.contains(&0) {
            return Err(Error::Config("SBM block sizes must be positive".into()));
        }
        if self.probs.len() != k || self.probs.iter().any(|row| row.len() != k) {
            return Err(Error::Config(format!("SBM block matrix must be {k}x{k}")));
        }
        for a in 0..k {
            for b in 0..k {
                let p = self.probs[a][b];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Config(format!("SBM probability {p} at ({a}, {b}) outside [0, 1]")));
                }
                if p != self.probs[b][a] {
                    return Err(Error::Config(format!("SBM block matrix not symmetric at ({a}, {b})")));
                }
            }
        }
        Ok(())
    }
}

/// Samples every pair independently with its block probability.
///
/// Pairs are visited in lexicographic order with one uniform draw each, so
/// the edge set is a pure function of the configuration.
pub fn sbm_generate(cfg: &SbmConfig) -> Result<Graph> {
    cfg.validate()?;
    let labels = cfg.block_labels();
    let n = labels.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = cfg.probs[labels[u]][labels[v]];
            if rng.random::<f64>() < p {
                edges.push(Edge { u, v, weight: 1.0 });
            }
        }
    }
    Ok(Graph::from_sorted(n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_one_is_complete() {
        let cfg = SbmConfig { sizes: vec![2, 2], probs: vec![vec![1.0; 2]; 2], seed: 3 };
        assert_eq!(sbm_generate(&cfg).unwrap(), Graph::complete(4));
    }

    #[test]
    fn probability_zero_is_empty() {
        let cfg = SbmConfig { sizes: vec![3], probs: vec![vec![0.0]], seed: 3 };
        assert_eq!(sbm_generate(&cfg).unwrap().edge_count(), 0);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SbmConfig { sizes: vec![3], probs: vec![vec![1.5]], seed: 0 };
        assert!(sbm_generate(&bad).is_err());
        let asym = SbmConfig { sizes: vec![1, 1], probs: vec![vec![0.1, 0.2], vec![0.3, 0.1]], seed: 0 };
        assert!(sbm_generate(&asym).is_err());
        let shape = SbmConfig { sizes: vec![1, 1], probs: vec![vec![0.1]], seed: 0 };
        assert!(sbm_generate(&shape).is_err());
    }

    #[test]
    fn reproducible() {
        let cfg = SbmConfig::barbell(11);
        assert_eq!(sbm_generate(&cfg).unwrap(), sbm_generate(&cfg).unwrap());
        assert_ne!(sbm_generate(&cfg).unwrap(), sbm_generate(&SbmConfig::barbell(12)).unwrap());
    }

    // Realized edge count per block pair against binomial mean +- 3 sigma.
    #[test]
    fn barbell_block_densities() {
        let cfg = SbmConfig::barbell(7);
        let g = sbm_generate(&cfg).unwrap();
        let labels = cfg.block_labels();
        let k = cfg.sizes.len();
        let mut counts = vec![vec![0usize; k]; k];
        for e in g.edges() {
            let (a, b) = (labels[e.u].min(labels[e.v]), labels[e.u].max(labels[e.v]));
            counts[a][b] += 1;
        }
        for a in 0..k {
            for b in a..k {
                let trials = if a == b {
                    cfg.sizes[a] * (cfg.sizes[a] - 1) / 2
                } else {
                    cfg.sizes[a] * cfg.sizes[b]
                } as f64;
                let p = cfg.probs[a][b];
                let mean = trials * p;
                let sd = (trials * p * (1.0 - p)).sqrt();
                let got = counts[a][b] as f64;
                assert!((got - mean).abs() <= 3.0 * sd, "block ({a},{b}): {got} vs {mean} +- {sd}");
            }
        }
    }
}
