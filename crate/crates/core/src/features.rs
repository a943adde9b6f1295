//! Feature vectors: per-word NLL lists reduced by sum/mean/min/max, one block
//! per analysis type, over every cell of the configuration grid.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{PhonemeSequence, SymbolTable, WordlistEntry};
use crate::ngram::{
    word_nlls, word_nlls_leave_one_out, ExtractionMode, NgramInput, NgramModel, NgramParams,
};
use crate::syllabify::{syllabify_or_single, SonorityScale, SyllabifiedForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setup {
    Character,
    Syllable,
}

impl Setup {
    pub fn as_str(self) -> &'static str {
        match self {
            Setup::Character => "character",
            Setup::Syllable => "syllable",
        }
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Setup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "character" => Ok(Setup::Character),
            "syllable" => Ok(Setup::Syllable),
            _ => Err(Error::Usage(format!(
                "unknown setup `{s}` (character|syllable)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyllableAnalysis {
    WithinSyllable,
    CrossBoundary,
    BoundaryPhoneme,
    All,
}

impl SyllableAnalysis {
    pub const GRID: [SyllableAnalysis; 4] = [
        SyllableAnalysis::WithinSyllable,
        SyllableAnalysis::CrossBoundary,
        SyllableAnalysis::BoundaryPhoneme,
        SyllableAnalysis::All,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SyllableAnalysis::WithinSyllable => "within_syllable",
            SyllableAnalysis::CrossBoundary => "cross_boundary",
            SyllableAnalysis::BoundaryPhoneme => "boundary_phoneme",
            SyllableAnalysis::All => "all",
        }
    }
}

impl FromStr for SyllableAnalysis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyllableAnalysis::GRID
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown analysis `{s}` (within_syllable|cross_boundary|boundary_phoneme|all)"
                ))
            })
    }
}

/// Which n-gram views feed the vector. The character setup always reads the
/// plain, unsyllabified sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "setup", content = "analysis")]
pub enum AnalysisSelector {
    Character,
    Syllable(SyllableAnalysis),
}

impl AnalysisSelector {
    pub fn setup(self) -> Setup {
        match self {
            AnalysisSelector::Character => Setup::Character,
            AnalysisSelector::Syllable(_) => Setup::Syllable,
        }
    }

    /// Extraction modes in block order.
    pub fn modes(self) -> &'static [ExtractionMode] {
        match self {
            AnalysisSelector::Character => &[ExtractionMode::Plain],
            AnalysisSelector::Syllable(SyllableAnalysis::WithinSyllable) => {
                &[ExtractionMode::WithinSyllable]
            }
            AnalysisSelector::Syllable(SyllableAnalysis::CrossBoundary) => {
                &[ExtractionMode::CrossBoundary]
            }
            AnalysisSelector::Syllable(SyllableAnalysis::BoundaryPhoneme) => {
                &[ExtractionMode::BoundaryPhoneme]
            }
            AnalysisSelector::Syllable(SyllableAnalysis::All) => &ExtractionMode::SYLLABIC,
        }
    }

    pub fn analysis_label(self) -> &'static str {
        match self {
            AnalysisSelector::Character => "plain",
            AnalysisSelector::Syllable(a) => a.as_str(),
        }
    }

    /// Combines the `--setup` and `--analysis` flags, rejecting a syllable
    /// analysis under the character setup.
    pub fn from_flags(setup: Setup, analysis: Option<&str>) -> Result<Self> {
        match (setup, analysis) {
            (Setup::Character, None) | (Setup::Character, Some("plain")) => Ok(AnalysisSelector::Character),
            (Setup::Character, Some(a)) => Err(Error::Usage(format!(
                "analysis `{a}` needs --setup syllable; the character setup has no syllable analyses"
            ))),
            (Setup::Syllable, None) => Ok(AnalysisSelector::Syllable(SyllableAnalysis::BoundaryPhoneme)),
            (Setup::Syllable, Some(a)) => Ok(AnalysisSelector::Syllable(a.parse()?)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NgramCombination {
    #[serde(rename = "1")]
    Uni,
    #[serde(rename = "2")]
    Bi,
    #[serde(rename = "3")]
    Tri,
    #[serde(rename = "1+2")]
    UniBi,
    #[serde(rename = "2+3")]
    BiTri,
    #[serde(rename = "1+2+3")]
    UniBiTri,
}

impl NgramCombination {
    pub const ALL: [NgramCombination; 6] = [
        NgramCombination::Uni,
        NgramCombination::Bi,
        NgramCombination::Tri,
        NgramCombination::UniBi,
        NgramCombination::BiTri,
        NgramCombination::UniBiTri,
    ];

    pub fn orders(self) -> &'static [usize] {
        match self {
            NgramCombination::Uni => &[1],
            NgramCombination::Bi => &[2],
            NgramCombination::Tri => &[3],
            NgramCombination::UniBi => &[1, 2],
            NgramCombination::BiTri => &[2, 3],
            NgramCombination::UniBiTri => &[1, 2, 3],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NgramCombination::Uni => "1",
            NgramCombination::Bi => "2",
            NgramCombination::Tri => "3",
            NgramCombination::UniBi => "1+2",
            NgramCombination::BiTri => "2+3",
            NgramCombination::UniBiTri => "1+2+3",
        }
    }
}

impl FromStr for NgramCombination {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        NgramCombination::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown n-gram combination `{s}` (1|2|3|1+2|2+3|1+2+3)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Sum,
    Mean,
    Min,
    Max,
    /// `[sum, mean, min, max]`.
    All,
}

impl Aggregation {
    pub const GRID: [Aggregation; 5] = [
        Aggregation::Sum,
        Aggregation::Mean,
        Aggregation::Min,
        Aggregation::Max,
        Aggregation::All,
    ];

    pub fn width(self) -> usize {
        if self == Aggregation::All {
            4
        } else {
            1
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Aggregation::Sum => "sum",
            Aggregation::Mean => "mean",
            Aggregation::Min => "min",
            Aggregation::Max => "max",
            Aggregation::All => "all",
        }
    }

    fn component_names(self) -> &'static [&'static str] {
        match self {
            Aggregation::Sum => &["sum"],
            Aggregation::Mean => &["mean"],
            Aggregation::Min => &["min"],
            Aggregation::Max => &["max"],
            Aggregation::All => &["sum", "mean", "min", "max"],
        }
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Aggregation::GRID
            .into_iter()
            .find(|a| a.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| {
                Error::Usage(format!("unknown aggregation `{s}` (sum|mean|min|max|all)"))
            })
    }
}

pub fn aggregate(nlls: &[f64], method: Aggregation) -> Result<Vec<f64>> {
    if nlls.is_empty() {
        return Err(Error::EmptyAggregation);
    }
    let sum: f64 = nlls.iter().sum();
    let mean = sum / nlls.len() as f64;
    let min = nlls.iter().copied().fold(f64::INFINITY, f64::min);
    let max = nlls.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(match method {
        Aggregation::Sum => vec![sum],
        Aggregation::Mean => vec![mean],
        Aggregation::Min => vec![min],
        Aggregation::Max => vec![max],
        Aggregation::All => vec![sum, mean, min, max],
    })
}

/// One grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub selector: AnalysisSelector,
    pub combination: NgramCombination,
    pub aggregation: Aggregation,
}

impl FeatureConfig {
    pub fn new(
        selector: AnalysisSelector,
        combination: NgramCombination,
        aggregation: Aggregation,
    ) -> Self {
        FeatureConfig {
            selector,
            combination,
            aggregation,
        }
    }

    pub fn setup(&self) -> Setup {
        self.selector.setup()
    }

    /// Vector length: blocks × scalars per block (× orders when each order
    /// is aggregated separately).
    pub fn dimension(&self, per_order: bool) -> usize {
        let orders = if per_order {
            self.combination.orders().len()
        } else {
            1
        };
        self.selector.modes().len() * orders * self.aggregation.width()
    }

    /// `setup/analysis/combination/aggregation`, e.g. `syllable/boundary_phoneme/2+3/all`.
    pub fn name(&self) -> String {
        format!(
            "{}/{}/{}/{}",
            self.setup(),
            self.selector.analysis_label(),
            self.combination.as_str(),
            self.aggregation.as_str()
        )
    }

    pub fn column_names(&self, per_order: bool) -> Vec<String> {
        let mut names = Vec::with_capacity(self.dimension(per_order));
        for mode in self.selector.modes() {
            if per_order {
                for n in self.combination.orders() {
                    for agg in self.aggregation.component_names() {
                        names.push(format!("{mode}.{n}.{agg}"));
                    }
                }
            } else {
                for agg in self.aggregation.component_names() {
                    names.push(format!("{mode}.{}.{agg}", self.combination.as_str()));
                }
            }
        }
        names
    }
}

impl fmt::Display for FeatureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Every configuration of one setup, in a fixed order: analysis, then
/// n-gram combination, then aggregation.
pub fn enumerate_grid(setup: Setup) -> Vec<FeatureConfig> {
    let selectors: Vec<AnalysisSelector> = match setup {
        Setup::Character => vec![AnalysisSelector::Character],
        Setup::Syllable => SyllableAnalysis::GRID
            .into_iter()
            .map(AnalysisSelector::Syllable)
            .collect(),
    };
    let mut grid = Vec::with_capacity(selectors.len() * 30);
    for selector in selectors {
        for combination in NgramCombination::ALL {
            for aggregation in Aggregation::GRID {
                grid.push(FeatureConfig::new(selector, combination, aggregation));
            }
        }
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureOptions {
    pub ngram: NgramParams,
    /// Aggregate each order separately and concatenate, instead of pooling.
    pub per_order: bool,
    /// Score each word against models that exclude its own n-grams.
    pub leave_one_out: bool,
}

/// A normalized entry ready for feature extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedEntry {
    pub sequence: PhonemeSequence,
    pub syllabified: SyllabifiedForm,
    /// The form had no vowel and is treated as one syllable.
    pub syllable_fallback: bool,
}

impl PreparedEntry {
    pub fn new(sequence: PhonemeSequence, scale: &SonorityScale) -> Self {
        let (syllabified, syllable_fallback) = syllabify_or_single(&sequence, scale);
        PreparedEntry {
            sequence,
            syllabified,
            syllable_fallback,
        }
    }

    /// Tokenizes `entry.form_norm` and syllabifies it.
    pub fn prepare(
        entry: &WordlistEntry,
        table: &SymbolTable,
        scale: &SonorityScale,
    ) -> Result<Self> {
        Ok(PreparedEntry::new(table.tokenize(&entry.form_norm)?, scale))
    }

    pub fn input(&self, mode: ExtractionMode) -> NgramInput<'_> {
        match mode {
            ExtractionMode::Plain => NgramInput::Sequence(&self.sequence),
            _ => NgramInput::Syllabified(&self.syllabified),
        }
    }
}

/// Fitted models for one corpus, keyed by (mode, order). A `None` slot means
/// the corpus yields no n-grams of that kind (e.g. unigrams across a
/// boundary); words then get an empty NLL list there.
#[derive(Debug, Clone, Default)]
pub struct ModelSet {
    models: HashMap<(ExtractionMode, usize), Option<NgramModel>>,
}

impl ModelSet {
    pub fn fit(
        corpus: &[PreparedEntry],
        modes: &[ExtractionMode],
        orders: &[usize],
        params: NgramParams,
    ) -> Result<Self> {
        let mut models = HashMap::new();
        for &mode in modes {
            for &n in orders {
                let model =
                    match NgramModel::fit(corpus.iter().map(|e| e.input(mode)), n, mode, params) {
                        Ok(m) => Some(m),
                        Err(Error::DegenerateModel { .. }) => None,
                        Err(e) => return Err(e),
                    };
                models.insert((mode, n), model);
            }
        }
        Ok(ModelSet { models })
    }

    /// Fits every mode needed by `setup` at orders 1 to 3.
    pub fn fit_for_setup(
        corpus: &[PreparedEntry],
        setup: Setup,
        params: NgramParams,
    ) -> Result<Self> {
        let modes: &[ExtractionMode] = match setup {
            Setup::Character => &[ExtractionMode::Plain],
            Setup::Syllable => &ExtractionMode::SYLLABIC,
        };
        ModelSet::fit(corpus, modes, &[1, 2, 3], params)
    }

    /// Adds the models of `other`, replacing any with the same key.
    pub fn extend(&mut self, other: ModelSet) {
        self.models.extend(other.models);
    }

    pub fn get(&self, mode: ExtractionMode, n: usize) -> Result<Option<&NgramModel>> {
        self.models
            .get(&(mode, n))
            .map(Option::as_ref)
            .ok_or_else(|| Error::Usage(format!("no {n}-gram model fitted for mode {mode}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    /// Some analysis block had no n-grams and was filled with zeros.
    pub zero_filled: bool,
}

impl FeatureVector {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

fn assemble<'a>(
    config: &FeatureConfig,
    per_order: bool,
    mut nlls: impl FnMut(ExtractionMode, usize) -> Result<Cow<'a, [f64]>>,
) -> Result<FeatureVector> {
    let width = config.aggregation.width();
    let mut values = Vec::with_capacity(config.dimension(per_order));
    let mut zero_filled = false;
    let mut push_block = |list: &[f64], values: &mut Vec<f64>| -> Result<()> {
        if list.is_empty() {
            zero_filled = true;
            values.extend(std::iter::repeat_n(0.0, width));
        } else {
            values.extend(aggregate(list, config.aggregation)?);
        }
        Ok(())
    };
    for &mode in config.selector.modes() {
        if per_order {
            for &n in config.combination.orders() {
                let list = nlls(mode, n)?;
                push_block(&list, &mut values)?;
            }
        } else {
            let mut pooled = Vec::new();
            for &n in config.combination.orders() {
                pooled.extend_from_slice(&nlls(mode, n)?);
            }
            push_block(&pooled, &mut values)?;
        }
    }
    Ok(FeatureVector {
        values,
        zero_filled,
    })
}

/// Builds one entry's vector for `config` from the models of its variety.
pub fn build_vector(
    entry: &PreparedEntry,
    config: &FeatureConfig,
    models: &ModelSet,
    options: &FeatureOptions,
) -> Result<FeatureVector> {
    assemble(config, options.per_order, |mode, n| {
        let Some(model) = models.get(mode, n)? else {
            return Ok(Cow::Owned(Vec::new()));
        };
        let list = if options.leave_one_out {
            word_nlls_leave_one_out(&[model], entry.input(mode))?
        } else {
            word_nlls(&[model], entry.input(mode))?
        };
        Ok(Cow::Owned(list))
    })
}

/// Per-entry NLL lists for every fitted (mode, order), computed once so the
/// whole grid can be assembled without rescoring.
#[derive(Debug, Clone, Default)]
pub struct NllTable {
    rows: Vec<HashMap<(ExtractionMode, usize), Vec<f64>>>,
}

impl NllTable {
    pub fn compute(
        entries: &[PreparedEntry],
        models: &ModelSet,
        leave_one_out: bool,
    ) -> Result<Self> {
        let mut rows = Vec::with_capacity(entries.len());
        for entry in entries {
            let mut row = HashMap::new();
            for (&(mode, n), model) in &models.models {
                let list = match model {
                    None => Vec::new(),
                    Some(m) if leave_one_out => word_nlls_leave_one_out(&[m], entry.input(mode))?,
                    Some(m) => word_nlls(&[m], entry.input(mode))?,
                };
                row.insert((mode, n), list);
            }
            rows.push(row);
        }
        Ok(NllTable { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn vector(
        &self,
        row: usize,
        config: &FeatureConfig,
        per_order: bool,
    ) -> Result<FeatureVector> {
        let cells = &self.rows[row];
        assemble(config, per_order, |mode, n| {
            cells
                .get(&(mode, n))
                .map(|v| Cow::Borrowed(v.as_slice()))
                .ok_or_else(|| Error::Usage(format!("no {n}-gram NLLs for mode {mode}")))
        })
    }
}

/// Dense row-major matrix of feature values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Usage(format!(
                "matrix data has {} values, expected {rows}×{cols}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Usage(format!("non-finite feature value {bad}")));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Usage("ragged feature rows".into()));
        }
        FeatureMatrix::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// Standardizes each column to mean 0, population s.d. 1. Constant
    /// columns become 0.
    pub fn zscored(&self) -> FeatureMatrix {
        let mut data = self.data.clone();
        if self.rows == 0 {
            return self.clone();
        }
        for c in 0..self.cols {
            let col = (0..self.rows).map(|r| self.data[r * self.cols + c]);
            let mean = col.clone().sum::<f64>() / self.rows as f64;
            let var = col.map(|v| (v - mean).powi(2)).sum::<f64>() / self.rows as f64;
            let sd = var.sqrt();
            for r in 0..self.rows {
                let v = &mut data[r * self.cols + c];
                *v = if sd > 0.0 { (*v - mean) / sd } else { 0.0 };
            }
        }
        FeatureMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// TSV with one labelled row per entry.
    pub fn to_tsv(&self, columns: &[String], labels: &[(&str, &str, &str)]) -> String {
        let mut out = format!("variety_id\tconcept_id\tform\t{}\n", columns.join("\t"));
        for (i, (variety, concept, form)) in labels.iter().enumerate().take(self.rows) {
            let values: Vec<String> = self.row(i).iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&format!(
                "{variety}\t{concept}\t{form}\t{}\n",
                values.join("\t")
            ));
        }
        out
    }
}
