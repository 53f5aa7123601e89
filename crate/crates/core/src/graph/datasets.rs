use super::{sbm_generate, Graph, SbmConfig};
use crate::error::{Error, Result};

pub const BUILTIN_DATASETS: [&str; 5] = ["karate", "er100", "path100", "grid10x10", "sbm200"];

/// Seed of the fixed G(100, 0.5) instance behind `er100`.
pub const ER100_SEED: u64 = 100;

/// Four blocks of 50 with graded internal densities behind `sbm200`, so
/// degrees vary between blocks.
pub fn sbm200_config() -> SbmConfig {
    let inner = [0.3, 0.15, 0.08, 0.04];
    let probs = (0..4).map(|a| (0..4).map(|b| if a == b { inner[a] } else { 0.01 }).collect()).collect();
    SbmConfig { sizes: vec![50; 4], probs, seed: 200 }
}

// Zachary's karate club, 0-based.
#[rustfmt::skip]
const KARATE: [(usize, usize); 78] = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10), (0, 11), (0, 12),
    (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2), (1, 3), (1, 7), (1, 13), (1, 17),
    (1, 19), (1, 21), (1, 30), (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27), (2, 28),
    (2, 32), (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16), (6, 16),
    (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33), (15, 32), (15, 33),
    (18, 32), (18, 33), (19, 33), (20, 32), (20, 33), (22, 32), (22, 33), (23, 25), (23, 27),
    (23, 29), (23, 32), (23, 33), (24, 25), (24, 27), (24, 31), (25, 31), (26, 29), (26, 33),
    (27, 33), (28, 31), (28, 33), (29, 32), (29, 33), (30, 32), (30, 33), (31, 32), (31, 33),
    (32, 33),
];

pub fn karate_club() -> Graph {
    Graph::unweighted(34, KARATE).expect("karate edge list is valid")
}

/// Named reference graphs. None of them ship opinions, so the second element
/// is always `None`; callers supply or synthesize `s`.
pub fn builtin_dataset(name: &str) -> Result<(Graph, Option<Vec<f64>>)> {
    let g = match name {
        "karate" => karate_club(),
        "er100" => sbm_generate(&SbmConfig { sizes: vec![100], probs: vec![vec![0.5]], seed: ER100_SEED })?,
        "path100" => Graph::path(100),
        "grid10x10" => Graph::grid(10, 10),
        "sbm200" => sbm_generate(&sbm200_config())?,
        other => return Err(Error::UnknownDataset(other.to_string())),
    };
    Ok((g, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let counts: Vec<(usize, usize)> = BUILTIN_DATASETS
            .iter()
            .map(|n| builtin_dataset(n).unwrap().0)
            .map(|g| (g.node_count(), g.edge_count()))
            .collect();
        assert_eq!(counts[0], (34, 78));
        assert_eq!(counts[2], (100, 99));
        assert_eq!(counts[3], (100, 180));
        assert_eq!(counts[1].0, 100);
        // binomial(4950, 0.5): mean 2475, sd ~35
        assert!((counts[1].1 as f64 - 2475.0).abs() < 3.0 * 35.2);
        assert_eq!(counts[4].0, 200);
    }

    #[test]
    fn karate_shape() {
        let g = karate_club();
        assert!(g.is_connected());
        assert_eq!(g.non_edge_count(), 483);
        assert_eq!(g.neighbor_count(33), 17);
        assert_eq!(g.neighbor_count(0), 16);
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(builtin_dataset("reddit"), Err(Error::UnknownDataset(_))));
    }
}
