//! Isolation forest.
//!
//! Each tree recursively splits a random subsample on a random feature at a
//! uniform random threshold until every point sits alone or the depth cap is
//! hit. Points that are isolated after few splits are anomalous.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

const EULER_GAMMA: f64 = 0.577_215_664_9;

/// Scores above this are flagged.
pub const AUTO_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsolationForestParams {
    pub n_trees: usize,
    /// Upper bound on the per-tree subsample; the actual size is `min(max_samples, n)`.
    pub max_samples: usize,
}

impl Default for IsolationForestParams {
    fn default() -> Self {
        IsolationForestParams {
            n_trees: 100,
            max_samples: 256,
        }
    }
}

/// Average unsuccessful-search path length in a binary search tree of `n`
/// points, with the harmonic number approximated as `ln(i) + γ`.
pub fn average_path_length(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let n = n as f64;
    2.0 * ((n - 1.0).ln() + EULER_GAMMA) - 2.0 * (n - 1.0) / n
}

/// `2^(-mean_path / c(subsample))`.
pub fn score_from_path_length(mean_path: f64, subsample: usize) -> f64 {
    let c = average_path_length(subsample);
    if c == 0.0 {
        return AUTO_THRESHOLD;
    }
    2f64.powf(-mean_path / c)
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        size: usize,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct IsolationTree {
    nodes: Vec<Node>,
}

impl IsolationTree {
    fn grow(x: &FeatureMatrix, sample: Vec<usize>, depth_cap: usize, rng: &mut ChaCha8Rng) -> Self {
        let mut tree = IsolationTree { nodes: Vec::new() };
        tree.build(x, sample, 0, depth_cap, rng);
        tree
    }

    fn build(
        &mut self,
        x: &FeatureMatrix,
        rows: Vec<usize>,
        depth: usize,
        depth_cap: usize,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { size: rows.len() });
        if rows.len() <= 1 || depth >= depth_cap {
            return id;
        }
        // Only features that vary inside this node can split it.
        let ranges: Vec<(usize, f64, f64)> = (0..x.cols())
            .filter_map(|f| {
                let (lo, hi) =
                    rows.iter()
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                            let v = x.row(r)[f];
                            (lo.min(v), hi.max(v))
                        });
                (lo < hi).then_some((f, lo, hi))
            })
            .collect();
        if ranges.is_empty() {
            return id;
        }
        let (feature, lo, hi) = ranges[rng.random_range(0..ranges.len())];
        let threshold = rng.random_range(lo..hi);
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| x.row(r)[feature] <= threshold);
        let left = self.build(x, left_rows, depth + 1, depth_cap, rng);
        let right = self.build(x, right_rows, depth + 1, depth_cap, rng);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    fn path_length(&self, point: &[f64]) -> f64 {
        let mut node = 0;
        let mut depth = 0.0;
        loop {
            match self.nodes[node] {
                Node::Leaf { size } => return depth + average_path_length(size),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if point[feature] <= threshold {
                        left
                    } else {
                        right
                    };
                    depth += 1.0;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationForest {
    trees: Vec<IsolationTree>,
    subsample: usize,
    dims: usize,
}

impl IsolationForest {
    /// Grows the forest. Tree `t` draws from its own ChaCha stream `t` of
    /// `seed`, so the result does not depend on thread scheduling.
    pub fn fit(x: &FeatureMatrix, params: &IsolationForestParams, seed: u64) -> Result<Self> {
        let n = x.rows();
        if n < 2 {
            return Err(Error::Usage(format!(
                "isolation forest needs at least 2 rows, got {n}"
            )));
        }
        if params.n_trees == 0 || params.max_samples == 0 {
            return Err(Error::Usage(
                "isolation forest needs positive n_trees and max_samples".into(),
            ));
        }
        if x.iter_rows().all(|r| r == x.row(0)) {
            log::debug!("isolation forest: all {n} rows are identical; every score will be equal");
        }
        let subsample = params.max_samples.min(n);
        let depth_cap = (subsample as f64).log2().ceil() as usize;
        let trees = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let sample = if subsample == n {
                    (0..n).collect()
                } else {
                    index::sample(&mut rng, n, subsample).into_vec()
                };
                IsolationTree::grow(x, sample, depth_cap, &mut rng)
            })
            .collect();
        Ok(IsolationForest {
            trees,
            subsample,
            dims: x.cols(),
        })
    }

    pub fn subsample(&self) -> usize {
        self.subsample
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    /// Path length averaged over trees.
    pub fn mean_path_length(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dims {
            return Err(Error::Usage(format!(
                "point has {} features, forest was fitted on {}",
                point.len(),
                self.dims
            )));
        }
        let total: f64 = self.trees.iter().map(|t| t.path_length(point)).sum();
        Ok(total / self.trees.len() as f64)
    }

    /// Anomaly score in (0, 1]; above 0.5 is flagged.
    pub fn score(&self, point: &[f64]) -> Result<f64> {
        Ok(score_from_path_length(
            self.mean_path_length(point)?,
            self.subsample,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn c_of_two() {
        // 2·(ln 1 + γ) − 2·1/2
        assert!((average_path_length(2) - 0.154_431_329_8).abs() < 1e-9);
        assert_eq!(average_path_length(1), 0.0);
    }

    #[test]
    fn score_fixed_points() {
        let c = average_path_length(256);
        assert_eq!(score_from_path_length(c, 256), 0.5);
        assert_eq!(score_from_path_length(2.0 * c, 256), 0.25);
        assert!(score_from_path_length(1e-12, 256) > 0.999_999);
        assert_eq!(score_from_path_length(0.0, 256), 1.0);
    }

    #[test]
    fn two_points_isolate_at_depth_one() {
        let x = FeatureMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let forest = IsolationForest::fit(&x, &IsolationForestParams::default(), 7).unwrap();
        for tree in &forest.trees {
            assert_eq!(tree.path_length(x.row(0)), 1.0);
            assert_eq!(tree.path_length(x.row(1)), 1.0);
        }
    }

    #[test]
    fn constant_matrix_scores_half() {
        let x = FeatureMatrix::from_rows(&vec![vec![3.0, 3.0]; 10]).unwrap();
        let forest = IsolationForest::fit(&x, &IsolationForestParams::default(), 1).unwrap();
        let first = forest.score(x.row(0)).unwrap();
        assert!((first - 0.5).abs() < 1e-12);
        for r in x.iter_rows() {
            assert_eq!(forest.score(r).unwrap(), first);
        }
    }

    #[test]
    fn planted_outlier_scores_highest() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut rows: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..2).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        rows.push(vec![10.0, 10.0]);
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let forest = IsolationForest::fit(&x, &IsolationForestParams::default(), 3).unwrap();
        let scores: Vec<f64> = x.iter_rows().map(|r| forest.score(r).unwrap()).collect();
        let top = scores
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(top, 200);
        assert!(scores.iter().all(|&s| s > 0.0 && s <= 1.0));
    }

    #[test]
    fn same_seed_same_forest() {
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|i| vec![(i * 37 % 101) as f64, (i % 7) as f64])
            .collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let a = IsolationForest::fit(&x, &IsolationForestParams::default(), 9).unwrap();
        let b = IsolationForest::fit(&x, &IsolationForestParams::default(), 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.subsample(), 256);
        assert!(a.score(&[1.0]).is_err());
    }
}
