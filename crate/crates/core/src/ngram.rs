//! Smoothed n-gram models over phoneme segments.
//!
//! Four extraction regimes decide which windows count as n-grams of a word:
//! plain windows over the unsegmented word, windows inside one syllable,
//! windows straddling a syllable boundary, and windows over the word with
//! `.` inserted between syllables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PhonemeSequence;
use crate::syllabify::SyllabifiedForm;

pub const PAD_START: &str = "<s>";
pub const PAD_END: &str = "</s>";

pub type Gram = Vec<String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMode {
    Plain,
    WithinSyllable,
    CrossBoundary,
    BoundaryPhoneme,
}

impl ExtractionMode {
    pub const ALL: [ExtractionMode; 4] = [
        ExtractionMode::Plain,
        ExtractionMode::WithinSyllable,
        ExtractionMode::CrossBoundary,
        ExtractionMode::BoundaryPhoneme,
    ];

    /// The three syllable-aware modes in feature-block order.
    pub const SYLLABIC: [ExtractionMode; 3] = [
        ExtractionMode::WithinSyllable,
        ExtractionMode::CrossBoundary,
        ExtractionMode::BoundaryPhoneme,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExtractionMode::Plain => "plain",
            ExtractionMode::WithinSyllable => "within_syllable",
            ExtractionMode::CrossBoundary => "cross_boundary",
            ExtractionMode::BoundaryPhoneme => "boundary_phoneme",
        }
    }
}

impl fmt::Display for ExtractionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExtractionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExtractionMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown extraction mode `{s}`")))
    }
}

/// What a word looks like to the extractor.
#[derive(Debug, Clone, Copy)]
pub enum NgramInput<'a> {
    Sequence(&'a PhonemeSequence),
    Syllabified(&'a SyllabifiedForm),
}

impl<'a> From<&'a PhonemeSequence> for NgramInput<'a> {
    fn from(s: &'a PhonemeSequence) -> Self {
        NgramInput::Sequence(s)
    }
}

impl<'a> From<&'a SyllabifiedForm> for NgramInput<'a> {
    fn from(s: &'a SyllabifiedForm) -> Self {
        NgramInput::Syllabified(s)
    }
}

fn windows(units: &[String], n: usize, out: &mut Vec<Gram>) {
    if n == 0 || n > units.len() {
        return;
    }
    out.extend(units.windows(n).map(<[String]>::to_vec));
}

fn padded(units: Vec<String>, n: usize) -> Vec<String> {
    if n < 2 {
        return units;
    }
    let mut out = vec![PAD_START.to_string(); n - 1];
    out.extend(units);
    out.push(PAD_END.to_string());
    out
}

/// Lists the n-grams of one word under `mode`.
///
/// Orders that do not fit the word give an empty list. Syllable-aware modes
/// need a [`NgramInput::Syllabified`] input. Padding only applies to the
/// plain and boundary-as-phoneme modes.
pub fn extract_ngrams(
    input: NgramInput<'_>,
    n: usize,
    mode: ExtractionMode,
    padding: bool,
) -> Result<Vec<Gram>> {
    let mut out = Vec::new();
    match (mode, input) {
        (ExtractionMode::Plain, NgramInput::Sequence(seq)) => {
            let units = seq.segments().to_vec();
            windows(&if padding { padded(units, n) } else { units }, n, &mut out);
        }
        (ExtractionMode::Plain, NgramInput::Syllabified(form)) => {
            let units = form.flatten().into_segments();
            windows(&if padding { padded(units, n) } else { units }, n, &mut out);
        }
        (_, NgramInput::Sequence(_)) => {
            return Err(Error::Usage(format!(
                "mode {mode} needs a syllabified form"
            )));
        }
        (ExtractionMode::WithinSyllable, NgramInput::Syllabified(form)) => {
            for syl in form.syllables() {
                windows(syl.segments(), n, &mut out);
            }
        }
        (ExtractionMode::CrossBoundary, NgramInput::Syllabified(form)) => {
            let flat = form.flatten().into_segments();
            let cuts = form.boundary_offsets();
            if n >= 2 && n <= flat.len() {
                for start in 0..=flat.len() - n {
                    // A boundary at offset b separates segments b-1 and b.
                    if cuts.iter().any(|&b| b > start && b < start + n) {
                        out.push(flat[start..start + n].to_vec());
                    }
                }
            }
        }
        (ExtractionMode::BoundaryPhoneme, NgramInput::Syllabified(form)) => {
            let units = form.with_boundaries().into_segments();
            windows(&if padding { padded(units, n) } else { units }, n, &mut out);
        }
    }
    Ok(out)
}

/// How n-gram probabilities are read off the counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// P(last symbol | preceding n-1 symbols).
    #[default]
    Conditional,
    /// Relative frequency of the whole n-gram among all n-grams.
    Joint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgramParams {
    pub smoothing_k: f64,
    pub padding: bool,
    pub estimator: Estimator,
}

impl Default for NgramParams {
    fn default() -> Self {
        NgramParams {
            smoothing_k: 1.0,
            padding: false,
            estimator: Estimator::Conditional,
        }
    }
}

/// Raw n-gram tallies: per gram, per (n-1)-gram context, and overall.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GramCounts {
    counts: HashMap<Gram, u64>,
    context_totals: HashMap<Gram, u64>,
    total: u64,
}

impl GramCounts {
    pub fn from_grams<'a>(grams: impl IntoIterator<Item = &'a Gram>) -> Self {
        let mut c = GramCounts::default();
        for g in grams {
            c.add(g);
        }
        c
    }

    fn add(&mut self, gram: &Gram) {
        *self.counts.entry(gram.clone()).or_default() += 1;
        *self
            .context_totals
            .entry(gram[..gram.len() - 1].to_vec())
            .or_default() += 1;
        self.total += 1;
    }

    pub fn count(&self, gram: &[String]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn context_total(&self, context: &[String]) -> u64 {
        self.context_totals.get(context).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Every observed (n-1)-gram context, sorted.
    pub fn contexts(&self) -> Vec<&Gram> {
        let mut out: Vec<&Gram> = self.context_totals.keys().collect();
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    n: usize,
    mode: ExtractionMode,
    counts: GramCounts,
    vocab: BTreeSet<String>,
    params: NgramParams,
}

impl NgramModel {
    /// Counts every n-gram the corpus yields under `mode`.
    pub fn fit<'a>(
        corpus: impl IntoIterator<Item = NgramInput<'a>>,
        n: usize,
        mode: ExtractionMode,
        params: NgramParams,
    ) -> Result<NgramModel> {
        if n == 0 {
            return Err(Error::Usage("n-gram order must be at least 1".into()));
        }
        let mut counts = GramCounts::default();
        let mut vocab = BTreeSet::new();
        let mut words = 0usize;
        for input in corpus {
            words += 1;
            for gram in extract_ngrams(input, n, mode, params.padding)? {
                vocab.extend(gram.iter().cloned());
                counts.add(&gram);
            }
        }
        if words == 0 {
            return Err(Error::Usage(
                "cannot fit an n-gram model on an empty corpus".into(),
            ));
        }
        if counts.total == 0 {
            return Err(Error::DegenerateModel {
                n,
                mode: mode.to_string(),
            });
        }
        Ok(NgramModel {
            n,
            mode,
            counts,
            vocab,
            params,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> ExtractionMode {
        self.mode
    }

    pub fn params(&self) -> &NgramParams {
        &self.params
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn counts(&self) -> &GramCounts {
        &self.counts
    }

    pub fn count(&self, gram: &[String]) -> u64 {
        self.counts.count(gram)
    }

    /// Smoothed probability of `gram`. With `held_out`, that word's own
    /// n-grams are subtracted from the counts first.
    fn probability_with(&self, gram: &[String], held_out: Option<&GramCounts>) -> f64 {
        let k = self.params.smoothing_k;
        let minus = |base: u64, own: u64| base.saturating_sub(own) as f64;
        let own_count = held_out.map_or(0, |h| h.count(gram));
        let count = minus(self.counts.count(gram), own_count);
        // One extra slot reserves probability mass for unseen symbols.
        let (denominator_count, slots) = match self.params.estimator {
            Estimator::Conditional if self.n > 1 => {
                let ctx = &gram[..gram.len() - 1];
                let own = held_out.map_or(0, |h| h.context_total(ctx));
                (
                    minus(self.counts.context_total(ctx), own),
                    self.vocab.len() as f64 + 1.0,
                )
            }
            Estimator::Conditional => {
                let own = held_out.map_or(0, GramCounts::total);
                (minus(self.counts.total, own), self.vocab.len() as f64 + 1.0)
            }
            Estimator::Joint => {
                let own = held_out.map_or(0, GramCounts::total);
                let cells = (self.vocab.len() as f64).powi(self.n as i32);
                (minus(self.counts.total, own), cells + 1.0)
            }
        };
        (count + k) / (denominator_count + k * slots)
    }

    pub fn probability(&self, gram: &[String]) -> Result<f64> {
        self.check_len(gram)?;
        Ok(self.probability_with(gram, None))
    }

    /// Negative natural-log probability of `gram`.
    pub fn nll(&self, gram: &[String]) -> Result<f64> {
        self.check_len(gram)?;
        Ok(-self.probability_with(gram, None).ln())
    }

    /// NLL with one word's contribution removed from the counts.
    pub fn nll_held_out(&self, gram: &[String], held_out: &GramCounts) -> Result<f64> {
        self.check_len(gram)?;
        Ok(-self.probability_with(gram, Some(held_out)).ln())
    }

    fn check_len(&self, gram: &[String]) -> Result<()> {
        if gram.len() != self.n {
            return Err(Error::Usage(format!(
                "gram of length {} scored by a {}-gram model",
                gram.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// Plain-text dump: `#` header lines, then `<gram>\t<count>` rows with
    /// gram symbols separated by single spaces, sorted.
    pub fn to_count_text(&self) -> String {
        let mut out = format!(
            "# n\t{}\n# mode\t{}\n# k\t{}\n# padding\t{}\n# estimator\t{}\n# vocab\t{}\n",
            self.n,
            self.mode,
            self.params.smoothing_k,
            self.params.padding,
            match self.params.estimator {
                Estimator::Conditional => "conditional",
                Estimator::Joint => "joint",
            },
            self.vocab.iter().cloned().collect::<Vec<_>>().join(" "),
        );
        let sorted: BTreeMap<String, u64> = self
            .counts
            .counts
            .iter()
            .map(|(g, c)| (g.join(" "), *c))
            .collect();
        for (g, c) in sorted {
            out.push_str(&format!("{g}\t{c}\n"));
        }
        out
    }

    pub fn from_count_text(text: &str) -> Result<NgramModel> {
        let mut n = None;
        let mut mode = None;
        let mut params = NgramParams::default();
        let mut vocab = None;
        let mut counts = GramCounts::default();
        let bad = |line: usize, message: String| Error::Config { line, message };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            if raw.is_empty() {
                continue;
            }
            if let Some(meta) = raw.strip_prefix("# ") {
                let (key, value) = meta.split_once('\t').unwrap_or((meta, ""));
                match key {
                    "n" => {
                        n = Some(
                            value
                                .parse::<usize>()
                                .map_err(|e| bad(line, e.to_string()))?,
                        )
                    }
                    "mode" => mode = Some(value.parse::<ExtractionMode>()?),
                    "k" => {
                        params.smoothing_k = value
                            .parse()
                            .map_err(|_| bad(line, format!("bad k `{value}`")))?
                    }
                    "padding" => params.padding = value == "true",
                    "estimator" => {
                        params.estimator = if value == "joint" {
                            Estimator::Joint
                        } else {
                            Estimator::Conditional
                        }
                    }
                    "vocab" => {
                        vocab = Some(
                            value
                                .split(' ')
                                .filter(|s| !s.is_empty())
                                .map(String::from)
                                .collect(),
                        )
                    }
                    _ => {}
                }
                continue;
            }
            let (gram, count) = raw
                .split_once('\t')
                .ok_or_else(|| bad(line, "expected `<gram>\\t<count>`".into()))?;
            let count: u64 = count
                .parse()
                .map_err(|_| bad(line, format!("bad count `{count}`")))?;
            let gram: Gram = gram.split(' ').map(String::from).collect();
            for _ in 0..count {
                counts.add(&gram);
            }
        }
        let n = n.ok_or_else(|| bad(0, "missing `# n` header".into()))?;
        let mode = mode.ok_or_else(|| bad(0, "missing `# mode` header".into()))?;
        let vocab = vocab.unwrap_or_else(|| counts.counts.keys().flatten().cloned().collect());
        Ok(NgramModel {
            n,
            mode,
            counts,
            vocab,
            params,
        })
    }
}

/// NLLs of every n-gram in a word, one model per order, concatenated in
/// model order. With `held_out`, each model discounts the word's own n-grams.
fn word_nlls_impl(
    models: &[&NgramModel],
    input: NgramInput<'_>,
    leave_one_out: bool,
) -> Result<Vec<f64>> {
    let Some(first) = models.first() else {
        return Ok(Vec::new());
    };
    if models.iter().any(|m| m.mode != first.mode) {
        return Err(Error::Usage(
            "word_nlls needs models of one extraction mode".into(),
        ));
    }
    let mut out = Vec::new();
    for model in models {
        let grams = extract_ngrams(input, model.n, model.mode, model.params.padding)?;
        if leave_one_out {
            let own = GramCounts::from_grams(&grams);
            for g in &grams {
                out.push(model.nll_held_out(g, &own)?);
            }
        } else {
            for g in &grams {
                out.push(model.nll(g)?);
            }
        }
    }
    Ok(out)
}

pub fn word_nlls(models: &[&NgramModel], input: NgramInput<'_>) -> Result<Vec<f64>> {
    word_nlls_impl(models, input, false)
}

/// Like [`word_nlls`] but scores the word against counts that exclude it.
pub fn word_nlls_leave_one_out(models: &[&NgramModel], input: NgramInput<'_>) -> Result<Vec<f64>> {
    word_nlls_impl(models, input, true)
}
