//! Precision/recall/F1 against gold labels, and the full configuration grid.

mod corpus;
mod grid;
mod report;

pub use corpus::{Corpus, Scope, ScoredEntry};
pub use grid::{compare_rows, run_grid, top_k, GridOptions, GridResult};
pub use report::{grid_tsv, pr_dump_csv, top_table, PR_DUMP_HEADER};

use serde::{Deserialize, Serialize};

use crate::detect::AnomalyResult;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub true_pos: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub true_neg: usize,
    /// Scored entries without a gold label; not part of the confusion counts.
    pub unlabeled: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalMetrics {
    pub fn from_counts(
        true_pos: usize,
        false_pos: usize,
        false_neg: usize,
        true_neg: usize,
    ) -> Self {
        let precision = ratio(true_pos, true_pos + false_pos);
        let recall = ratio(true_pos, true_pos + false_neg);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalMetrics {
            true_pos,
            false_pos,
            false_neg,
            true_neg,
            unlabeled: 0,
            precision,
            recall,
            f1,
        }
    }

    pub fn labeled(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// Sums the confusion counts and recomputes the ratios.
    pub fn pooled<'a>(parts: impl IntoIterator<Item = &'a EvalMetrics>) -> EvalMetrics {
        let (mut tp, mut fp, mut fn_, mut tn, mut unlabeled) = (0, 0, 0, 0, 0);
        for m in parts {
            tp += m.true_pos;
            fp += m.false_pos;
            fn_ += m.false_neg;
            tn += m.true_neg;
            unlabeled += m.unlabeled;
        }
        EvalMetrics {
            unlabeled,
            ..EvalMetrics::from_counts(tp, fp, fn_, tn)
        }
    }
}

/// Confusion counts of `results` against `gold`, indexed by
/// [`AnomalyResult::index`]. Anomaly is the positive class.
pub fn evaluate(results: &[AnomalyResult], gold: &[Option<bool>]) -> Result<EvalMetrics> {
    let (mut tp, mut fp, mut fn_, mut tn, mut unlabeled) = (0, 0, 0, 0, 0);
    for r in results {
        let label = *gold.get(r.index).ok_or_else(|| {
            Error::Evaluation(format!("result index {} has no gold slot", r.index))
        })?;
        match (label, r.is_anomaly) {
            (None, _) => unlabeled += 1,
            (Some(true), true) => tp += 1,
            (Some(false), true) => fp += 1,
            (Some(true), false) => fn_ += 1,
            (Some(false), false) => tn += 1,
        }
    }
    if tp + fp + fn_ + tn == 0 {
        return Err(Error::Evaluation(
            "no gold-labeled entries to evaluate".into(),
        ));
    }
    Ok(EvalMetrics {
        unlabeled,
        ..EvalMetrics::from_counts(tp, fp, fn_, tn)
    })
}
