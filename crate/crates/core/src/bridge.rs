//! Which missing links cut expected conflict the most on the four-cluster
//! barbell (dense A and B joined through the sparse bridges C and D).
//!
//! Three groups of candidate links are compared:
//!
//! 1. both endpoints in A;
//! 2. one endpoint in A and one in B, both linked to some node of C;
//! 3. the same with D in place of C.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::delta::DeltaScanner;
use crate::error::{Error, Result};
use crate::graph::{sbm_generate, Graph, SbmConfig};
use crate::{par, stats};

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;
const D: usize = 3;

pub const GROUPS: [&str; 3] = ["A-A", "A-B via C", "A-B via D"];

/// Eligible non-edges of each group, lexicographic.
pub fn group_pairs(g: &Graph, labels: &[usize]) -> [Vec<(usize, usize)>; 3] {
    let touches = |v: usize, block: usize| g.neighbors(v).iter().any(|&(u, _)| labels[u] == block);
    let mut out: [Vec<(usize, usize)>; 3] = Default::default();
    for (i, j) in g.non_edges() {
        match (labels[i], labels[j]) {
            (A, A) => out[0].push((i, j)),
            (A, B) | (B, A) => {
                if touches(i, C) && touches(j, C) {
                    out[1].push((i, j));
                }
                if touches(i, D) && touches(j, D) {
                    out[2].push((i, j));
                }
            }
            _ => {}
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    /// Expected conflict change of every sampled link, seed by seed.
    pub deltas: Vec<f64>,
    pub mean: f64,
    pub ci95: f64,
    /// Seeds whose graph had no eligible pair for this group.
    pub empty_seeds: Vec<u64>,
}

/// Samples up to `links` pairs per group on the barbell graph of each seed
/// and records their expected conflict change under covariance `sigma2 I`.
pub fn bridge_example(seeds: &[u64], links: usize, sigma2: f64) -> Result<Vec<GroupSummary>> {
    bridge_example_with(seeds, links, sigma2, SbmConfig::barbell)
}

/// [`bridge_example`] on graphs from `config(seed)`, which must keep the
/// `[A, B, C, D]` block order.
pub fn bridge_example_with<F>(seeds: &[u64], links: usize, sigma2: f64, config: F) -> Result<Vec<GroupSummary>>
where
    F: Fn(u64) -> SbmConfig + Sync + Send,
{
    if seeds.len() < 2 {
        return Err(Error::Config("need at least two graph seeds".into()));
    }
    if links == 0 {
        return Err(Error::Config("links per group must be at least 1".into()));
    }
    let per_seed = par::map(seeds, |&seed| -> Result<[Vec<f64>; 3]> {
        let cfg = config(seed);
        if cfg.sizes.len() != 4 {
            return Err(Error::Config("barbell config needs four blocks".into()));
        }
        let g = sbm_generate(&cfg)?;
        let groups = group_pairs(&g, &cfg.block_labels());
        let scanner = DeltaScanner::new(&g, None)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        let mut out: [Vec<f64>; 3] = Default::default();
        for (k, pairs) in groups.iter().enumerate() {
            let take = links.min(pairs.len());
            let mut picked: Vec<usize> = index::sample(&mut rng, pairs.len(), take).into_vec();
            picked.sort_unstable();
            for p in picked {
                let (i, j) = pairs[p];
                out[k].push(scanner.expected_delta(i, j, 1.0, sigma2)?);
            }
        }
        Ok(out)
    });
    let mut summaries: Vec<GroupSummary> = GROUPS
        .iter()
        .map(|name| GroupSummary { group: name.to_string(), deltas: Vec::new(), mean: f64::NAN, ci95: f64::NAN, empty_seeds: Vec::new() })
        .collect();
    for (&seed, res) in seeds.iter().zip(per_seed) {
        for (k, d) in res?.into_iter().enumerate() {
            if d.is_empty() {
                summaries[k].empty_seeds.push(seed);
            }
            summaries[k].deltas.extend(d);
        }
    }
    for s in &mut summaries {
        if !s.deltas.is_empty() {
            s.mean = stats::mean(&s.deltas);
            s.ci95 = stats::ci95_half_width(&s.deltas);
        }
    }
    Ok(summaries)
}
