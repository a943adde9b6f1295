use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::Corpus;
use super::EvalMetrics;
use crate::detect::{Algorithm, DetectorConfig, IsolationForestParams, LofParams, OcsvmParams};
use crate::error::{Error, Result};
use crate::features::{enumerate_grid, FeatureConfig, Setup};
use crate::ingest::Wordlist;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub algorithms: Vec<Algorithm>,
    pub iforest: IsolationForestParams,
    pub lof: LofParams,
    pub ocsvm: OcsvmParams,
    pub seed: u64,
}

impl GridOptions {
    pub fn new(seed: u64) -> Self {
        GridOptions {
            algorithms: Algorithm::ALL.to_vec(),
            iforest: IsolationForestParams::default(),
            lof: LofParams::default(),
            ocsvm: OcsvmParams::default(),
            seed,
        }
    }

    pub fn detector(&self, algorithm: Algorithm) -> DetectorConfig {
        DetectorConfig {
            algorithm,
            iforest: self.iforest,
            lof: self.lof,
            ocsvm: self.ocsvm,
            seed: self.seed,
        }
    }
}

/// One cell of the grid: a feature configuration paired with a detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub config: FeatureConfig,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// Confusion counts pooled over every group; `None` when the cell failed.
    pub metrics: Option<EvalMetrics>,
    /// Per-group metrics, in group order.
    pub per_group: Vec<(String, EvalMetrics)>,
    pub failure: Option<String>,
}

impl GridResult {
    pub fn f1(&self) -> Option<f64> {
        self.metrics.map(|m| m.f1)
    }
}

/// Best first: F1, then recall, then precision, all descending; then by
/// configuration name and algorithm. Failed cells sort last.
pub fn compare_rows(a: &GridResult, b: &GridResult) -> Ordering {
    let key = |r: &GridResult| r.metrics.map(|m| (m.f1, m.recall, m.precision));
    let by_metrics = match (key(a), key(b)) {
        (Some(x), Some(y)) => {
            y.0.total_cmp(&x.0)
                .then(y.1.total_cmp(&x.1))
                .then(y.2.total_cmp(&x.2))
        }
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    };
    by_metrics
        .then_with(|| a.config.name().cmp(&b.config.name()))
        .then(a.algorithm.cmp(&b.algorithm))
}

fn evaluate_cell(
    corpus: &Corpus,
    gold: &[Option<bool>],
    config: FeatureConfig,
    options: &GridOptions,
    algorithm: Algorithm,
) -> GridResult {
    let mut result = GridResult {
        config,
        algorithm,
        seed: options.seed,
        metrics: None,
        per_group: Vec::new(),
        failure: None,
    };
    let scored = match corpus.detect(&config, &options.detector(algorithm)) {
        Ok(s) => s,
        Err(e) => {
            log::warn!("{} / {algorithm}: {e}", config.name());
            result.failure = Some(e.to_string());
            return result;
        }
    };
    for ((label, _), group) in corpus.groups().zip(&scored) {
        let (mut tp, mut fp, mut fn_, mut tn, mut unlabeled) = (0, 0, 0, 0, 0);
        for s in group {
            match (gold[s.entry], s.is_anomaly) {
                (None, _) => unlabeled += 1,
                (Some(true), true) => tp += 1,
                (Some(false), true) => fp += 1,
                (Some(true), false) => fn_ += 1,
                (Some(false), false) => tn += 1,
            }
        }
        let m = EvalMetrics {
            unlabeled,
            ..EvalMetrics::from_counts(tp, fp, fn_, tn)
        };
        result.per_group.push((label.to_string(), m));
    }
    result.metrics = Some(EvalMetrics::pooled(result.per_group.iter().map(|(_, m)| m)));
    result
}

/// Runs every configuration of `setup` against every requested detector and
/// returns the rows sorted best first. A cell that cannot run (e.g. LOF on a
/// group smaller than k) is kept as a failed row.
pub fn run_grid(
    wordlist: &Wordlist,
    corpus: &Corpus,
    setup: Setup,
    options: &GridOptions,
) -> Result<Vec<GridResult>> {
    let gold: Vec<Option<bool>> = wordlist.entries().iter().map(|e| e.gold_label).collect();
    if gold.iter().all(Option::is_none) {
        return Err(Error::Evaluation(
            "the grid needs gold labels, but the wordlist has no `gold` column values".into(),
        ));
    }
    let cells: Vec<(FeatureConfig, Algorithm)> = enumerate_grid(setup)
        .into_iter()
        .flat_map(|c| options.algorithms.iter().map(move |&a| (c, a)))
        .collect();
    let mut rows: Vec<GridResult> = cells
        .into_par_iter()
        .map(|(config, algorithm)| evaluate_cell(corpus, &gold, config, options, algorithm))
        .collect();
    rows.sort_by(compare_rows);
    Ok(rows)
}

/// The first `k` rows of an already sorted grid.
pub fn top_k(rows: &[GridResult], k: usize) -> &[GridResult] {
    &rows[..k.min(rows.len())]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Scope;
    use crate::features::FeatureOptions;
    use crate::ingest::{SymbolTable, WordlistEntry};
    use crate::syllabify::SonorityScale;

    fn labeled_wordlist() -> Wordlist {
        let syl = [
            "ta", "ka", "pa", "ma", "na", "ti", "ki", "pi", "mu", "nu", "su", "la",
        ];
        let mut entries = Vec::new();
        for variety in ["A", "B"] {
            for i in 0..40 {
                let form = format!("{}{}", syl[i % 12], syl[(i * 5 + 3) % 12]);
                entries.push(WordlistEntry::new(format!("c{i}"), variety, form).with_gold(false));
            }
            entries.push(WordlistEntry::new("c40", variety, "strgzb").with_gold(true));
            entries.push(WordlistEntry::new("c41", variety, "taka"));
        }
        Wordlist::from_entries(entries).unwrap()
    }

    fn corpus(wl: &Wordlist, setup: Setup) -> Corpus {
        Corpus::build(
            wl,
            &SymbolTable::default(),
            &SonorityScale::default(),
            &[setup],
            Scope::PerVariety,
            FeatureOptions::default(),
            false,
        )
        .unwrap()
    }

    #[test]
    fn character_grid_shape_and_order() {
        let wl = labeled_wordlist();
        let c = corpus(&wl, Setup::Character);
        let rows = run_grid(&wl, &c, Setup::Character, &GridOptions::new(5)).unwrap();
        assert_eq!(rows.len(), 90);
        assert!(rows
            .windows(2)
            .all(|w| compare_rows(&w[0], &w[1]) != Ordering::Greater));
        for r in rows.iter().filter(|r| r.failure.is_none()) {
            let m = r.metrics.unwrap();
            assert_eq!(m.labeled(), 82);
            assert_eq!(m.unlabeled, 2);
            let pooled = EvalMetrics::pooled(r.per_group.iter().map(|(_, g)| g));
            assert_eq!(pooled, m);
        }
        assert_eq!(top_k(&rows, 10).len(), 10);
    }

    #[test]
    fn failed_cells_are_kept() {
        let wl = labeled_wordlist();
        let c = corpus(&wl, Setup::Character);
        let mut opts = GridOptions::new(1);
        opts.algorithms = vec![Algorithm::Lof];
        opts.lof.k_neighbors = 100;
        let rows = run_grid(&wl, &c, Setup::Character, &opts).unwrap();
        assert_eq!(rows.len(), 30);
        assert!(rows
            .iter()
            .all(|r| r.metrics.is_none() && r.failure.is_some()));
    }

    #[test]
    fn gold_is_required() {
        let entries = (0..30)
            .map(|i| WordlistEntry::new(format!("c{i}"), "A", "taka"))
            .collect();
        let wl = Wordlist::from_entries(entries).unwrap();
        let c = corpus(&wl, Setup::Character);
        assert!(matches!(
            run_grid(&wl, &c, Setup::Character, &GridOptions::new(0)),
            Err(Error::Evaluation(_))
        ));
    }
}
