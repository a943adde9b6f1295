use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detect::{run_detector, DetectorConfig};
use crate::error::{Error, Result};
use crate::features::{
    FeatureConfig, FeatureMatrix, FeatureOptions, ModelSet, NllTable, PreparedEntry, Setup,
};
use crate::ingest::{SymbolTable, Wordlist};
use crate::syllabify::SonorityScale;

/// Which entries share a language model and a detector run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    #[default]
    PerVariety,
    Pooled,
}

impl Scope {
    pub fn as_str(self) -> &'static str {
        match self {
            Scope::PerVariety => "per_variety",
            Scope::Pooled => "pooled",
        }
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_variety" => Ok(Scope::PerVariety),
            "pooled" => Ok(Scope::Pooled),
            _ => Err(Error::Usage(format!(
                "unknown scope `{s}` (per_variety|pooled)"
            ))),
        }
    }
}

const POOLED_LABEL: &str = "*";

#[derive(Debug, Clone)]
struct Group {
    label: String,
    /// Indices into the wordlist, in wordlist order.
    entries: Vec<usize>,
    nlls: NllTable,
}

/// One scored wordlist entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredEntry {
    /// Index into the wordlist.
    pub entry: usize,
    pub score: f64,
    pub is_anomaly: bool,
}

/// A wordlist with n-gram models fitted per group and every entry's NLL
/// lists cached, ready to be turned into feature matrices for any config.
#[derive(Debug, Clone)]
pub struct Corpus {
    groups: Vec<Group>,
    options: FeatureOptions,
    zscore: bool,
    syllable_fallbacks: usize,
}

impl Corpus {
    /// Normalizes, tokenizes and syllabifies every entry, then fits the
    /// models needed by `setups` inside each group.
    pub fn build(
        wordlist: &Wordlist,
        table: &SymbolTable,
        scale: &SonorityScale,
        setups: &[Setup],
        scope: Scope,
        options: FeatureOptions,
        zscore: bool,
    ) -> Result<Self> {
        let prepared: Vec<PreparedEntry> = wordlist
            .entries()
            .par_iter()
            .map(|e| PreparedEntry::prepare(&e.normalize(table)?, table, scale))
            .collect::<Result<_>>()?;
        let syllable_fallbacks = prepared.iter().filter(|p| p.syllable_fallback).count();

        let partition = match scope {
            Scope::PerVariety => wordlist.by_variety(),
            Scope::Pooled => vec![(POOLED_LABEL.to_string(), (0..wordlist.len()).collect())],
        };
        let groups = partition
            .into_par_iter()
            .map(|(label, entries)| {
                let members: Vec<PreparedEntry> =
                    entries.iter().map(|&i| prepared[i].clone()).collect();
                let mut models = ModelSet::default();
                for &setup in setups {
                    models.extend(ModelSet::fit_for_setup(&members, setup, options.ngram)?);
                }
                let nlls = NllTable::compute(&members, &models, options.leave_one_out)?;
                Ok(Group {
                    label,
                    entries,
                    nlls,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Corpus {
            groups,
            options,
            zscore,
            syllable_fallbacks,
        })
    }

    pub fn options(&self) -> &FeatureOptions {
        &self.options
    }

    /// Entries whose form has no vowel and was kept as a single syllable.
    pub fn syllable_fallbacks(&self) -> usize {
        self.syllable_fallbacks
    }

    /// Group labels with the wordlist indices they cover.
    pub fn groups(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.groups
            .iter()
            .map(|g| (g.label.as_str(), g.entries.as_slice()))
    }

    /// Feature matrix of group `group` under `config`, plus the number of
    /// rows that had a zero-filled block.
    pub fn matrix(&self, group: usize, config: &FeatureConfig) -> Result<(FeatureMatrix, usize)> {
        let g = &self.groups[group];
        let dim = config.dimension(self.options.per_order);
        let mut data = Vec::with_capacity(g.nlls.len() * dim);
        let mut zero_filled = 0;
        for row in 0..g.nlls.len() {
            let v = g.nlls.vector(row, config, self.options.per_order)?;
            zero_filled += usize::from(v.zero_filled);
            data.extend(v.values);
        }
        let m = FeatureMatrix::new(g.nlls.len(), dim, data)?;
        Ok((if self.zscore { m.zscored() } else { m }, zero_filled))
    }

    /// Scores every group under `config` with `detector`. Results are
    /// returned per group, in group order.
    pub fn detect(
        &self,
        config: &FeatureConfig,
        detector: &DetectorConfig,
    ) -> Result<Vec<Vec<ScoredEntry>>> {
        (0..self.groups.len())
            .map(|gi| {
                let g = &self.groups[gi];
                let (x, zero_filled) = self.matrix(gi, config)?;
                if zero_filled > 0 {
                    log::debug!(
                        "{} ({}): {zero_filled} rows with zero-filled blocks",
                        config.name(),
                        g.label
                    );
                }
                if x.rows() < detector.min_rows() {
                    return Err(Error::Usage(format!(
                        "group `{}` has {} entries; {} needs at least {}{}",
                        g.label,
                        x.rows(),
                        detector.algorithm,
                        detector.min_rows(),
                        if detector.algorithm == crate::detect::Algorithm::Lof {
                            "; lower --k or pool varieties with --pool"
                        } else {
                            ""
                        }
                    )));
                }
                let results = run_detector(&x, detector)?;
                Ok(results
                    .into_iter()
                    .map(|r| ScoredEntry {
                        entry: g.entries[r.index],
                        score: r.score,
                        is_anomaly: r.is_anomaly,
                    })
                    .collect())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{enumerate_grid, Aggregation, AnalysisSelector, NgramCombination};
    use crate::ingest::WordlistEntry;

    fn wordlist() -> Wordlist {
        let forms = [
            "taka", "pina", "muku", "sapa", "kuti", "nata", "lipa", "tamu", "kasi", "pulu",
        ];
        let mut entries = Vec::new();
        for variety in ["A", "B"] {
            for (i, f) in forms.iter().enumerate() {
                entries.push(WordlistEntry::new(format!("c{i}"), variety, *f));
            }
        }
        Wordlist::from_entries(entries).unwrap()
    }

    #[test]
    fn groups_follow_scope() {
        let wl = wordlist();
        let opts = FeatureOptions::default();
        let table = SymbolTable::default();
        let scale = SonorityScale::default();
        let per = Corpus::build(
            &wl,
            &table,
            &scale,
            &[Setup::Character],
            Scope::PerVariety,
            opts,
            false,
        )
        .unwrap();
        let labels: Vec<&str> = per.groups().map(|(l, _)| l).collect();
        assert_eq!(labels, ["A", "B"]);
        let pooled = Corpus::build(
            &wl,
            &table,
            &scale,
            &[Setup::Character],
            Scope::Pooled,
            opts,
            false,
        )
        .unwrap();
        assert_eq!(pooled.groups().count(), 1);
        assert_eq!(pooled.groups().next().unwrap().1.len(), 20);
    }

    #[test]
    fn matrices_have_config_shape() {
        let wl = wordlist();
        let corpus = Corpus::build(
            &wl,
            &SymbolTable::default(),
            &SonorityScale::default(),
            &[Setup::Character, Setup::Syllable],
            Scope::PerVariety,
            FeatureOptions::default(),
            true,
        )
        .unwrap();
        for setup in [Setup::Character, Setup::Syllable] {
            for cfg in enumerate_grid(setup) {
                let (x, _) = corpus.matrix(0, &cfg).unwrap();
                assert_eq!((x.rows(), x.cols()), (10, cfg.dimension(false)));
            }
        }
    }

    #[test]
    fn small_group_is_usage_error() {
        let wl = wordlist();
        let corpus = Corpus::build(
            &wl,
            &SymbolTable::default(),
            &SonorityScale::default(),
            &[Setup::Character],
            Scope::PerVariety,
            FeatureOptions::default(),
            false,
        )
        .unwrap();
        let cfg = FeatureConfig::new(
            AnalysisSelector::Character,
            NgramCombination::Bi,
            Aggregation::Mean,
        );
        let det = DetectorConfig::new(crate::detect::Algorithm::Lof, 0);
        match corpus.detect(&cfg, &det) {
            Err(Error::Usage(msg)) => assert!(msg.contains("--k")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
