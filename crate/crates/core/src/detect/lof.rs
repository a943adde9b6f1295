//! Local outlier factor over Euclidean distance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Scores above this are flagged.
pub const AUTO_THRESHOLD: f64 = 1.5;

/// Local reachability density assigned when every reachability distance is zero.
pub const LRD_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LofParams {
    pub k_neighbors: usize,
}

impl Default for LofParams {
    fn default() -> Self {
        LofParams { k_neighbors: 20 }
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The k nearest other rows of `i`, nearest first, ties by row index.
fn neighbors(dist_row: &[f64], i: usize, k: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..dist_row.len()).filter(|&j| j != i).collect();
    let by_distance = |a: &usize, b: &usize| dist_row[*a].total_cmp(&dist_row[*b]).then(a.cmp(b));
    if k < others.len() {
        others.select_nth_unstable_by(k - 1, by_distance);
        others.truncate(k);
    }
    others.sort_unstable_by(by_distance);
    others
}

/// LOF score of every row.
pub fn lof_scores(x: &FeatureMatrix, params: &LofParams) -> Result<Vec<f64>> {
    let n = x.rows();
    let k = params.k_neighbors;
    if k == 0 {
        return Err(Error::Usage("LOF needs k_neighbors ≥ 1".into()));
    }
    if n <= k {
        return Err(Error::Usage(format!(
            "LOF with k = {k} needs more than {k} rows, got {n}; reduce k (--k) below {n}"
        )));
    }

    let dist: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| (0..n).map(|j| euclidean(x.row(i), x.row(j))).collect())
        .collect();
    let knn: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| neighbors(&dist[i], i, k))
        .collect();
    let k_distance: Vec<f64> = (0..n).map(|i| dist[i][knn[i][k - 1]]).collect();

    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let total: f64 = knn[i].iter().map(|&j| k_distance[j].max(dist[i][j])).sum();
            let mean = total / k as f64;
            if mean == 0.0 {
                LRD_CAP
            } else {
                (1.0 / mean).min(LRD_CAP)
            }
        })
        .collect();

    Ok((0..n)
        .map(|i| knn[i].iter().map(|&j| lrd[j] / lrd[i]).sum::<f64>() / k as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lattice(n: usize) -> Vec<Vec<f64>> {
        (0..n).map(|i| vec![i as f64]).collect()
    }

    #[test]
    fn uniform_lattice_interior_is_one() {
        let x = FeatureMatrix::from_rows(&lattice(100)).unwrap();
        let scores = lof_scores(&x, &LofParams { k_neighbors: 4 }).unwrap();
        for s in &scores[10..90] {
            assert!((s - 1.0).abs() <= 0.05, "{s}");
        }
    }

    #[test]
    fn far_point_is_flagged() {
        let mut rows = lattice(60);
        rows.push(vec![59.0 + 100.0]);
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let scores = lof_scores(&x, &LofParams::default()).unwrap();
        assert!(scores[60] > 4.0 * AUTO_THRESHOLD, "{}", scores[60]);
    }

    #[test]
    fn identical_points_all_one() {
        let x = FeatureMatrix::from_rows(&vec![vec![1.0, 2.0]; 30]).unwrap();
        let scores = lof_scores(&x, &LofParams::default()).unwrap();
        assert!(scores.iter().all(|&s| s == 1.0));
    }

    #[test]
    fn too_few_rows() {
        let x = FeatureMatrix::from_rows(&lattice(5)).unwrap();
        match lof_scores(&x, &LofParams::default()) {
            Err(Error::Usage(msg)) => assert!(msg.contains("--k")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn neighbor_ties_by_index() {
        let row = [0.0, 1.0, 1.0, 1.0, 0.5];
        assert_eq!(neighbors(&row, 0, 3), [4, 1, 2]);
    }
}
