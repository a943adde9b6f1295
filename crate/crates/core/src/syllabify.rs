//! Sonority-driven syllabification.
//!
//! Nuclei are the vowel segments. Each consonant cluster between two nuclei
//! is split so that the following syllable gets the longest onset whose
//! sonority never falls on the way into the nucleus; whatever is left over
//! closes the previous syllable. Word-initial consonants are onset and
//! word-final consonants are coda.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::{PhonemeSequence, BOUNDARY};

pub const VOWEL: &str = "vowel";
pub const GLIDE: &str = "glide";
pub const LIQUID: &str = "liquid";
pub const NASAL: &str = "nasal";
pub const FRICATIVE: &str = "fricative";
pub const STOP: &str = "stop";

const VOWELS: &str = "aeiouyæɑɒɐəɘɛɜɞɪɨʉɯɵøœɶɔʊʌɤ";
const GLIDES: &str = "jwɥɰ";
const LIQUIDS: &str = "lrɾɹɻɭʎʟɫɽʀɺ";
const NASALS: &str = "mnŋɲɳɴɱ";
const FRICATIVES: &str = "fvszʃʒθðxɣhɦχʁçʝɸβʂʐɕʑħʕɬɮ";
const STOPS: &str = "pbtdkgqɢʔcɟʈɖɓɗʄʡ";

/// Ranks phoneme classes and assigns symbols to classes.
///
/// Symbols are looked up whole first, then by their first character (so
/// `aː` and `kʰ` classify like `a` and `k`), then fall back to the
/// lowest-sonority class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SonorityScale {
    ranks: BTreeMap<String, i32>,
    classifier: BTreeMap<String, String>,
    fallback: String,
}

impl Default for SonorityScale {
    fn default() -> Self {
        let ranks = [
            (VOWEL, 5),
            (GLIDE, 4),
            (LIQUID, 3),
            (NASAL, 2),
            (FRICATIVE, 1),
            (STOP, 0),
        ]
        .into_iter()
        .map(|(c, r)| (c.to_string(), r))
        .collect();
        let mut classifier = BTreeMap::new();
        for (chars, class) in [
            (VOWELS, VOWEL),
            (GLIDES, GLIDE),
            (LIQUIDS, LIQUID),
            (NASALS, NASAL),
            (FRICATIVES, FRICATIVE),
            (STOPS, STOP),
        ] {
            for c in chars.chars() {
                classifier.insert(c.to_string(), class.to_string());
            }
        }
        SonorityScale {
            ranks,
            classifier,
            fallback: STOP.to_string(),
        }
    }
}

impl SonorityScale {
    /// Applies `class <name> <rank>` and `assign <symbol> <class>` lines on
    /// top of the default scale.
    pub fn parse(text: &str) -> Result<Self> {
        let mut scale = SonorityScale::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            match parts.as_slice() {
                ["class", name, rank] => {
                    let rank = rank.parse::<i32>().map_err(|_| Error::Config {
                        line,
                        message: format!("rank `{rank}` is not an integer"),
                    })?;
                    scale.ranks.insert(name.to_string(), rank);
                }
                ["assign", symbol, class] => {
                    if !scale.ranks.contains_key(*class) {
                        return Err(Error::Config {
                            line,
                            message: format!("unknown class `{class}`"),
                        });
                    }
                    scale.classifier.insert(symbol.to_string(), class.to_string());
                }
                _ => {
                    return Err(Error::Config {
                        line,
                        message: format!("expected `class <name> <rank>` or `assign <symbol> <class>`, got `{trimmed}`"),
                    })
                }
            }
        }
        scale.check()?;
        Ok(scale)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SonorityScale::parse(&text)
    }

    /// The full scale in the format [`SonorityScale::parse`] reads.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for (name, rank) in &self.ranks {
            out.push_str(&format!("class {name} {rank}\n"));
        }
        for (symbol, class) in &self.classifier {
            out.push_str(&format!("assign {symbol} {class}\n"));
        }
        out
    }

    fn check(&self) -> Result<()> {
        let vowel = self.ranks.get(VOWEL).copied().ok_or(Error::Config {
            line: 0,
            message: "scale has no `vowel` class".into(),
        })?;
        if let Some((name, _)) = self
            .ranks
            .iter()
            .find(|(n, r)| n.as_str() != VOWEL && **r >= vowel)
        {
            return Err(Error::Config {
                line: 0,
                message: format!("class `{name}` ranks at or above `vowel`"),
            });
        }
        Ok(())
    }

    pub fn class_of(&self, segment: &str) -> &str {
        if let Some(class) = self.classifier.get(segment) {
            return class;
        }
        segment
            .chars()
            .next()
            .and_then(|c| self.classifier.get(c.encode_utf8(&mut [0; 4]) as &str))
            .map(String::as_str)
            .unwrap_or(&self.fallback)
    }

    pub fn sonority(&self, segment: &str) -> i32 {
        self.ranks[self.class_of(segment)]
    }

    pub fn is_vowel(&self, segment: &str) -> bool {
        self.class_of(segment) == VOWEL
    }
}

/// Free-function form of [`SonorityScale::sonority`].
pub fn sonority(segment: &str, scale: &SonorityScale) -> i32 {
    scale.sonority(segment)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyllabifiedForm {
    syllables: Vec<PhonemeSequence>,
}

impl SyllabifiedForm {
    /// Wraps pre-split syllables. Empty syllables are dropped.
    pub fn from_syllables(syllables: Vec<PhonemeSequence>) -> Self {
        SyllabifiedForm {
            syllables: syllables.into_iter().filter(|s| !s.is_empty()).collect(),
        }
    }

    /// Treats the whole sequence as a single syllable.
    pub fn single(seq: PhonemeSequence) -> Self {
        SyllabifiedForm::from_syllables(vec![seq])
    }

    pub fn syllables(&self) -> &[PhonemeSequence] {
        &self.syllables
    }

    pub fn boundary_symbol(&self) -> &'static str {
        BOUNDARY
    }

    pub fn flatten(&self) -> PhonemeSequence {
        self.syllables
            .iter()
            .flat_map(|s| s.segments().iter().cloned())
            .collect()
    }

    /// Offsets into the flattened sequence at which a new syllable starts
    /// (excluding 0).
    pub fn boundary_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.syllables.len().saturating_sub(1));
        let mut at = 0;
        for syl in &self.syllables[..self.syllables.len().saturating_sub(1)] {
            at += syl.len();
            offsets.push(at);
        }
        offsets
    }

    /// Segments interleaved with `.` between adjacent syllables.
    pub fn with_boundaries(&self) -> PhonemeSequence {
        let mut out = Vec::new();
        for (i, syl) in self.syllables.iter().enumerate() {
            if i > 0 {
                out.push(BOUNDARY.to_string());
            }
            out.extend(syl.segments().iter().cloned());
        }
        PhonemeSequence::new(out)
    }
}

impl std::fmt::Display for SyllabifiedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.syllables.iter().map(PhonemeSequence::joined).collect();
        f.write_str(&parts.join(BOUNDARY))
    }
}

/// Free-function form of [`SyllabifiedForm::with_boundaries`].
pub fn with_boundaries(form: &SyllabifiedForm) -> PhonemeSequence {
    form.with_boundaries()
}

pub fn syllabify(seq: &PhonemeSequence, scale: &SonorityScale) -> Result<SyllabifiedForm> {
    let segs = seq.segments();
    let nuclei: Vec<usize> = (0..segs.len())
        .filter(|&i| scale.is_vowel(&segs[i]))
        .collect();
    if nuclei.is_empty() {
        return Err(Error::NoNucleus { form: seq.joined() });
    }

    // Start offset of each syllable; the first always starts at 0.
    let mut starts = vec![0usize];
    for pair in nuclei.windows(2) {
        let (prev, next) = (pair[0], pair[1]);
        // Walk left from the nucleus while sonority keeps falling (or stays level).
        let mut onset_start = next;
        while onset_start > prev + 1
            && (onset_start == next
                || scale.sonority(&segs[onset_start - 1]) <= scale.sonority(&segs[onset_start]))
        {
            onset_start -= 1;
        }
        starts.push(onset_start);
    }

    let mut syllables = Vec::with_capacity(starts.len());
    for (i, &start) in starts.iter().enumerate() {
        let end = starts.get(i + 1).copied().unwrap_or(segs.len());
        syllables.push(PhonemeSequence::new(segs[start..end].to_vec()));
    }
    Ok(SyllabifiedForm { syllables })
}

/// Syllabifies, falling back to one whole-form syllable when the form has no
/// vowel. The flag is true when the fallback was taken.
pub fn syllabify_or_single(
    seq: &PhonemeSequence,
    scale: &SonorityScale,
) -> (SyllabifiedForm, bool) {
    match syllabify(seq, scale) {
        Ok(form) => (form, false),
        Err(_) => {
            log::warn!(
                "no vowel nucleus in `{}`; treating it as one syllable",
                seq.joined()
            );
            (SyllabifiedForm::single(seq.clone()), true)
        }
    }
}
