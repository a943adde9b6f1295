//! Unsupervised outlier detectors over feature matrices.
//!
//! Every detector is fitted and applied to the same matrix. Scores follow
//! one convention throughout: higher means more anomalous.
//!
//! | algorithm | score | flagged when |
//! |-----------|-------|--------------|
//! | iforest   | `2^(−E[h]/c(ψ))` | score > 0.5 |
//! | lof       | LOF | score > 1.5 |
//! | ocsvm     | `−f(x)` | score > 0 |

pub mod iforest;
pub mod lof;
pub mod ocsvm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub use iforest::{IsolationForest, IsolationForestParams};
pub use lof::{lof_scores, LofParams};
pub use ocsvm::{GammaMode, OcsvmParams, OneClassSvm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Iforest,
    Lof,
    Ocsvm,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Iforest, Algorithm::Lof, Algorithm::Ocsvm];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Iforest => "iforest",
            Algorithm::Lof => "lof",
            Algorithm::Ocsvm => "ocsvm",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown algorithm `{s}` (iforest|lof|ocsvm)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub algorithm: Algorithm,
    pub iforest: IsolationForestParams,
    pub lof: LofParams,
    pub ocsvm: OcsvmParams,
    pub seed: u64,
}

impl DetectorConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        DetectorConfig {
            algorithm,
            iforest: IsolationForestParams::default(),
            lof: LofParams::default(),
            ocsvm: OcsvmParams::default(),
            seed,
        }
    }

    /// Smallest matrix the configured algorithm accepts.
    pub fn min_rows(&self) -> usize {
        match self.algorithm {
            Algorithm::Iforest => 2,
            Algorithm::Lof => self.lof.k_neighbors + 1,
            Algorithm::Ocsvm => ((1.0 / self.ocsvm.nu).ceil() as usize).max(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnomalyResult {
    /// Row of the input matrix.
    pub index: usize,
    pub score: f64,
    pub is_anomaly: bool,
}

/// Fits the configured detector on `x` and scores every row of it.
pub fn run_detector(x: &FeatureMatrix, config: &DetectorConfig) -> Result<Vec<AnomalyResult>> {
    let scored: Vec<(f64, bool)> = match config.algorithm {
        Algorithm::Iforest => {
            let forest = IsolationForest::fit(x, &config.iforest, config.seed)?;
            x.iter_rows()
                .map(|r| forest.score(r).map(|s| (s, s > iforest::AUTO_THRESHOLD)))
                .collect::<Result<_>>()?
        }
        Algorithm::Lof => lof_scores(x, &config.lof)?
            .into_iter()
            .map(|s| (s, s > lof::AUTO_THRESHOLD))
            .collect(),
        Algorithm::Ocsvm => {
            let model = OneClassSvm::fit(x, &config.ocsvm)?;
            model
                .training_decisions()
                .iter()
                .map(|&f| (-f, f < 0.0))
                .collect()
        }
    };
    Ok(scored
        .into_iter()
        .enumerate()
        .map(|(index, (score, is_anomaly))| AnomalyResult {
            index,
            score,
            is_anomaly,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blob(n: usize) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                vec![
                    ((i * 7919) % 97) as f64 / 97.0,
                    ((i * 104_729) % 89) as f64 / 89.0,
                ]
            })
            .chain(std::iter::once(vec![25.0, -25.0]))
            .collect();
        FeatureMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn deterministic_flags() {
        let x = blob(120);
        for algorithm in Algorithm::ALL {
            let cfg = DetectorConfig::new(algorithm, 11);
            let a = run_detector(&x, &cfg).unwrap();
            let b = run_detector(&x, &cfg).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.len(), 121);
            assert!(a[120].is_anomaly, "{algorithm} missed the planted point");
            let top = a.iter().max_by(|p, q| p.score.total_cmp(&q.score)).unwrap();
            assert_eq!(top.index, 120, "{algorithm}");
        }
    }

    #[test]
    fn one_result_per_row() {
        let x = blob(305);
        let r = run_detector(&x, &DetectorConfig::new(Algorithm::Iforest, 0)).unwrap();
        assert_eq!(r.len(), 306);
        assert!(r.iter().enumerate().all(|(i, a)| a.index == i));
    }

    #[test]
    fn lof_precondition() {
        let x = FeatureMatrix::from_rows(&vec![vec![0.0]; 5]).unwrap();
        let err = run_detector(&x, &DetectorConfig::new(Algorithm::Lof, 0)).unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
        assert_eq!(DetectorConfig::new(Algorithm::Lof, 0).min_rows(), 21);
        assert_eq!(DetectorConfig::new(Algorithm::Ocsvm, 0).min_rows(), 20);
    }
}
