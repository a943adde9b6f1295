//! Symbol inventory: which character sequences count as one phoneme, which
//! characters attach to the preceding base, and which are deleted outright.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Syllable boundary marker. Reserved: it never appears inside a tokenized form.
pub const BOUNDARY: &str = ".";

const DEFAULT_MULTIGRAPHS: &[&str] = &["tʃ", "dʒ", "ts", "dz", "tɕ", "dʑ", "tʂ", "dʐ"];

const DEFAULT_MARKS: &[char] = &[
    'ʰ', 'ʷ', 'ʲ', 'ˠ', 'ˤ', 'ⁿ', 'ː', 'ˑ', // secondary articulation, length
    '˥', '˦', '˧', '˨', '˩', // tone letters
    '\u{0300}', '\u{0301}', '\u{0302}', '\u{0303}', '\u{0304}',
    '\u{030C}', // tone and nasality
    '\u{0324}', '\u{0325}', '\u{0329}', '\u{032A}', '\u{0330}', '\u{0339}', '\u{031C}',
];

// U+031A is the unreleased-stop diacritic.
const DEFAULT_STRIP: &[char] = &['\u{031A}', '.'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    multigraphs: Vec<String>,
    strip_set: BTreeSet<char>,
    combining_marks: BTreeSet<char>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        SymbolTable::new(
            DEFAULT_MULTIGRAPHS.iter().map(|s| s.to_string()),
            DEFAULT_STRIP.iter().copied(),
            DEFAULT_MARKS.iter().copied(),
        )
        .expect("default symbol table is consistent")
    }
}

impl SymbolTable {
    /// Builds a table, sorting multigraphs longest first and rejecting
    /// characters listed both as strip characters and as marks.
    pub fn new(
        multigraphs: impl IntoIterator<Item = String>,
        strip_set: impl IntoIterator<Item = char>,
        combining_marks: impl IntoIterator<Item = char>,
    ) -> Result<Self> {
        let strip_set: BTreeSet<char> = strip_set.into_iter().collect();
        let combining_marks: BTreeSet<char> = combining_marks.into_iter().collect();
        if let Some(c) = strip_set.intersection(&combining_marks).next() {
            return Err(Error::validation(
                None,
                format!("U+{:04X} is listed both as strip and mark", *c as u32),
            ));
        }
        let mut seen = BTreeSet::new();
        let mut multigraphs: Vec<String> = multigraphs
            .into_iter()
            .map(|m| m.nfc().collect::<String>())
            .filter(|m| !m.is_empty() && seen.insert(m.clone()))
            .collect();
        for m in &multigraphs {
            if m.contains(BOUNDARY) {
                return Err(Error::validation(
                    None,
                    format!("multigraph `{m}` contains the reserved boundary symbol"),
                ));
            }
        }
        // Stable sort keeps file order among equal-length symbols.
        multigraphs.sort_by_key(|m| std::cmp::Reverse(m.chars().count()));
        Ok(SymbolTable {
            multigraphs,
            strip_set,
            combining_marks,
        })
    }

    /// Parses the line-oriented config format:
    ///
    /// ```text
    /// multigraph tʃ
    /// strip U+031A
    /// mark ʰ
    /// ```
    ///
    /// Characters may be written literally or as `U+XXXX`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut multigraphs = Vec::new();
        let mut strip = Vec::new();
        let mut marks = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (directive, arg) =
                trimmed
                    .split_once(char::is_whitespace)
                    .ok_or(Error::Config {
                        line,
                        message: format!("expected `<directive> <value>`, got `{trimmed}`"),
                    })?;
            let arg = arg.trim();
            match directive {
                "multigraph" => multigraphs.push(decode_symbol(arg, line)?),
                "strip" => strip.push(decode_char(arg, line)?),
                "mark" => marks.push(decode_char(arg, line)?),
                other => {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown directive `{other}`"),
                    })
                }
            }
        }
        SymbolTable::new(multigraphs, strip, marks)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        SymbolTable::parse(&text)
    }

    pub fn multigraphs(&self) -> &[String] {
        &self.multigraphs
    }

    pub fn strip_set(&self) -> &BTreeSet<char> {
        &self.strip_set
    }

    pub fn combining_marks(&self) -> &BTreeSet<char> {
        &self.combining_marks
    }

    /// True for listed marks and for any Unicode combining character.
    pub fn attaches(&self, c: char) -> bool {
        self.combining_marks.contains(&c) || is_combining_mark(c)
    }

    /// Canonical config text; parsing it yields an equal table.
    pub fn to_config(&self) -> String {
        let mut out = String::new();
        for m in &self.multigraphs {
            out.push_str(&format!("multigraph {m}\n"));
        }
        for c in &self.strip_set {
            out.push_str(&format!("strip U+{:04X}\n", *c as u32));
        }
        for c in &self.combining_marks {
            out.push_str(&format!("mark U+{:04X}\n", *c as u32));
        }
        out
    }

    /// Deletes strip characters and recomposes to NFC.
    ///
    /// Stripping runs on the canonical decomposition so a precomposed
    /// character loses a listed diacritic too.
    pub fn normalize_form(&self, form: &str) -> String {
        let stripped: String = form.nfd().filter(|c| !self.strip_set.contains(c)).collect();
        stripped
            .nfc()
            .filter(|c| !self.strip_set.contains(c))
            .collect()
    }

    /// Greedy longest-match segmentation.
    pub fn tokenize(&self, form: &str) -> Result<PhonemeSequence> {
        let mut segments: Vec<String> = Vec::new();
        let mut rest = form;
        let mut offset = 0usize;
        while let Some(c) = rest.chars().next() {
            if c.to_string() == BOUNDARY {
                return Err(Error::Tokenize {
                    form: form.to_string(),
                    offset,
                    message: "reserved boundary symbol `.`".into(),
                });
            }
            if self.attaches(c) {
                match segments.last_mut() {
                    Some(last) => last.push(c),
                    None => {
                        return Err(Error::Tokenize {
                            form: form.to_string(),
                            offset,
                            message: format!("combining mark U+{:04X} has no base", c as u32),
                        })
                    }
                }
                rest = &rest[c.len_utf8()..];
                offset += 1;
                continue;
            }
            let symbol = self
                .multigraphs
                .iter()
                .find(|m| rest.starts_with(m.as_str()))
                .map(String::as_str)
                .unwrap_or(&rest[..c.len_utf8()]);
            segments.push(symbol.to_string());
            offset += symbol.chars().count();
            rest = &rest[symbol.len()..];
        }
        Ok(PhonemeSequence::new(segments))
    }
}

fn decode_char(arg: &str, line: usize) -> Result<char> {
    let s = decode_symbol(arg, line)?;
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Config {
            line,
            message: format!("expected a single character, got `{arg}`"),
        }),
    }
}

fn decode_symbol(arg: &str, line: usize) -> Result<String> {
    if arg.is_empty() {
        return Err(Error::Config {
            line,
            message: "missing value".into(),
        });
    }
    if let Some(hex) = arg.strip_prefix("U+").or_else(|| arg.strip_prefix("u+")) {
        return u32::from_str_radix(hex, 16)
            .ok()
            .and_then(char::from_u32)
            .map(String::from)
            .ok_or(Error::Config {
                line,
                message: format!("bad code point `{arg}`"),
            });
    }
    Ok(arg.to_string())
}

/// A tokenized form. Joining the segments gives back the normalized form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PhonemeSequence {
    segments: Vec<String>,
}

impl PhonemeSequence {
    pub fn new(segments: Vec<String>) -> Self {
        PhonemeSequence { segments }
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn joined(&self) -> String {
        self.segments.concat()
    }

    pub fn into_segments(self) -> Vec<String> {
        self.segments
    }
}

impl<S: Into<String>> FromIterator<S> for PhonemeSequence {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        PhonemeSequence::new(iter.into_iter().map(Into::into).collect())
    }
}

impl fmt::Display for PhonemeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(multi: &[&str], strip: &[char], marks: &[char]) -> SymbolTable {
        SymbolTable::new(
            multi.iter().map(|s| s.to_string()),
            strip.iter().copied(),
            marks.iter().copied(),
        )
        .unwrap()
    }

    fn segs(seq: &PhonemeSequence) -> Vec<&str> {
        seq.segments().iter().map(String::as_str).collect()
    }

    #[test]
    fn strips_unreleased_diacritic() {
        let t = table(&[], &['\u{031A}'], &[]);
        assert_eq!(t.normalize_form("tak\u{031A}"), "tak");
    }

    #[test]
    fn identity_with_empty_strip_set() {
        let t = table(&[], &[], &[]);
        assert_eq!(t.normalize_form("ba"), "ba");
    }

    #[test]
    fn ambiguous_aspirate_left_alone() {
        let t = SymbolTable::default();
        assert_eq!(t.normalize_form("tsʰaʔ"), "tsʰaʔ");
    }

    #[test]
    fn composes_to_nfc() {
        let t = table(&[], &[], &[]);
        assert_eq!(t.normalize_form("e\u{0301}"), "\u{00E9}");
    }

    #[test]
    fn strips_mark_inside_precomposed_char() {
        let t = table(&[], &['\u{0301}'], &[]);
        assert_eq!(t.normalize_form("\u{00E9}"), "e");
    }

    #[test]
    fn one_segment_per_char() {
        let t = table(&[], &[], &[]);
        assert_eq!(segs(&t.tokenize("ba").unwrap()), ["b", "a"]);
    }

    #[test]
    fn maximal_munch_multigraph() {
        let t = table(&["tsʰ"], &[], &[]);
        assert_eq!(segs(&t.tokenize("tsʰa").unwrap()), ["tsʰ", "a"]);
    }

    #[test]
    fn longer_multigraph_does_not_overmatch() {
        let t = table(&["tʃʰ", "tʃ"], &[], &[]);
        assert_eq!(segs(&t.tokenize("tʃa").unwrap()), ["tʃ", "a"]);
    }

    #[test]
    fn multigraphs_sorted_longest_first() {
        let t = table(&["ts", "tsʰ", "ts"], &[], &[]);
        assert_eq!(t.multigraphs(), ["tsʰ", "ts"]);
    }

    #[test]
    fn marks_attach_to_previous_segment() {
        let t = SymbolTable::default();
        assert_eq!(segs(&t.tokenize("tsʰaːʔ").unwrap()), ["tsʰ", "aː", "ʔ"]);
        assert_eq!(segs(&t.tokenize("kʰa").unwrap()), ["kʰ", "a"]);
    }

    #[test]
    fn leading_mark_is_an_error() {
        let t = SymbolTable::default();
        match t.tokenize("ʰa") {
            Err(Error::Tokenize { offset, .. }) => assert_eq!(offset, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn boundary_symbol_is_reserved() {
        let t = table(&[], &[], &[]);
        assert!(matches!(
            t.tokenize("ba.da"),
            Err(Error::Tokenize { offset: 2, .. })
        ));
    }

    #[test]
    fn strip_and_mark_must_be_disjoint() {
        assert!(SymbolTable::new(Vec::new(), ['ʰ'], ['ʰ']).is_err());
    }

    #[test]
    fn parses_config_text() {
        let t = SymbolTable::parse("# inventory\nmultigraph tʃ\nstrip U+031A\nmark ʰ\n\n").unwrap();
        assert_eq!(t.multigraphs(), ["tʃ"]);
        assert!(t.strip_set().contains(&'\u{031A}'));
        assert!(t.combining_marks().contains(&'ʰ'));
        assert_eq!(SymbolTable::parse(&t.to_config()).unwrap(), t);
    }

    #[test]
    fn rejects_unknown_directive() {
        assert!(matches!(
            SymbolTable::parse("multigraph tʃ\nvowel a\n"),
            Err(Error::Config { line: 2, .. })
        ));
    }
}
