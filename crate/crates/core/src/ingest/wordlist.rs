//! Tab-separated wordlist files.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ingest::symbols::SymbolTable;

pub const COL_CONCEPT: &str = "concept_id";
pub const COL_VARIETY: &str = "variety_id";
pub const COL_FORM: &str = "form";
pub const COL_GOLD: &str = "gold";
pub const COL_GOLD_KIND: &str = "gold_kind";

/// One elicited form: a cell of the concept × variety matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordlistEntry {
    pub concept_id: String,
    pub variety_id: String,
    pub form_raw: String,
    pub form_norm: String,
    /// `Some(true)` marks a known anomaly (transcription error or borrowing).
    pub gold_label: Option<bool>,
    pub gold_kind: Option<String>,
    /// 1-based line in the source file, 0 for entries built in memory.
    pub line: usize,
}

impl WordlistEntry {
    pub fn new(
        concept_id: impl Into<String>,
        variety_id: impl Into<String>,
        form: impl Into<String>,
    ) -> Self {
        let form_raw = form.into();
        WordlistEntry {
            concept_id: concept_id.into(),
            variety_id: variety_id.into(),
            form_norm: form_raw.clone(),
            form_raw,
            gold_label: None,
            gold_kind: None,
            line: 0,
        }
    }

    pub fn with_gold(mut self, gold: bool) -> Self {
        self.gold_label = Some(gold);
        self
    }

    /// Applies the table's cleaning rules to `form_raw`.
    ///
    /// Normalizing an already normalized entry is a no-op.
    pub fn normalize(&self, table: &SymbolTable) -> Result<WordlistEntry> {
        if self.form_raw.is_empty() {
            return Err(Error::validation(Some(self.line), "empty form"));
        }
        let form_norm = table.normalize_form(&self.form_raw);
        if form_norm.is_empty() {
            return Err(Error::validation(
                Some(self.line),
                format!("form `{}` is empty after stripping", self.form_raw),
            ));
        }
        Ok(WordlistEntry {
            form_norm,
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Wordlist {
    entries: Vec<WordlistEntry>,
    varieties: BTreeSet<String>,
    concepts: BTreeSet<String>,
}

impl Wordlist {
    /// Builds a wordlist, enforcing non-empty ids and unique
    /// (concept, variety, form) triples.
    pub fn from_entries(entries: Vec<WordlistEntry>) -> Result<Self> {
        let mut wl = Wordlist::default();
        let mut seen: HashMap<(String, String, String), usize> = HashMap::new();
        for entry in entries {
            let line = entry.line;
            if entry.concept_id.is_empty() {
                return Err(Error::validation(Some(line), "empty concept_id"));
            }
            if entry.variety_id.is_empty() {
                return Err(Error::validation(Some(line), "empty variety_id"));
            }
            if entry.form_raw.is_empty() {
                return Err(Error::validation(Some(line), "empty form"));
            }
            let key = (
                entry.concept_id.clone(),
                entry.variety_id.clone(),
                entry.form_raw.clone(),
            );
            if let Some(&first_line) = seen.get(&key) {
                return Err(Error::DuplicateRow {
                    line,
                    first_line,
                    concept: key.0,
                    variety: key.1,
                    form: key.2,
                });
            }
            seen.insert(key, line);
            wl.varieties.insert(entry.variety_id.clone());
            wl.concepts.insert(entry.concept_id.clone());
            wl.entries.push(entry);
        }
        Ok(wl)
    }

    pub fn entries(&self) -> &[WordlistEntry] {
        &self.entries
    }

    pub fn varieties(&self) -> &BTreeSet<String> {
        &self.varieties
    }

    pub fn concepts(&self) -> &BTreeSet<String> {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_gold(&self) -> bool {
        self.entries.iter().any(|e| e.gold_label.is_some())
    }

    /// Entry indices grouped by variety, varieties in sorted order.
    pub fn by_variety(&self) -> Vec<(String, Vec<usize>)> {
        let mut groups: Vec<(String, Vec<usize>)> = self
            .varieties
            .iter()
            .map(|v| (v.clone(), Vec::new()))
            .collect();
        for (i, e) in self.entries.iter().enumerate() {
            let slot = groups
                .binary_search_by(|(v, _)| v.as_str().cmp(&e.variety_id))
                .expect("variety registered on insert");
            groups[slot].1.push(i);
        }
        groups
    }

    /// Normalizes every entry, failing on the first entry that strips to nothing.
    pub fn normalized(&self, table: &SymbolTable) -> Result<Wordlist> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.normalize(table))
            .collect::<Result<Vec<_>>>()?;
        Ok(Wordlist {
            entries,
            varieties: self.varieties.clone(),
            concepts: self.concepts.clone(),
        })
    }

    /// Parses TSV text. `#`-prefixed lines and blank lines are skipped.
    pub fn parse_tsv(text: &str) -> Result<Wordlist> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
            .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(Error::MissingColumn {
            column: COL_CONCEPT.into(),
            line: 1,
        })?;
        let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
        let find = |name: &str| columns.iter().position(|c| *c == name);
        let require = |name: &str| {
            find(name).ok_or_else(|| Error::MissingColumn {
                column: name.into(),
                line: header_line,
            })
        };
        let concept_col = require(COL_CONCEPT)?;
        let variety_col = require(COL_VARIETY)?;
        let form_col = require(COL_FORM)?;
        let gold_col = find(COL_GOLD);
        let kind_col = find(COL_GOLD_KIND);

        let mut entries = Vec::new();
        for (line, row) in lines {
            let fields: Vec<&str> = row.split('\t').collect();
            let field = |idx: usize| fields.get(idx).map(|s| s.trim()).unwrap_or("");
            let form = field(form_col);
            if form.is_empty() {
                return Err(Error::validation(Some(line), "empty form"));
            }
            let gold_label = match gold_col.map(field) {
                None | Some("") => None,
                Some("1") | Some("true") | Some("TRUE") => Some(true),
                Some("0") | Some("false") | Some("FALSE") => Some(false),
                Some(other) => {
                    return Err(Error::validation(
                        Some(line),
                        format!("gold value `{other}` is not 0/1"),
                    ))
                }
            };
            let gold_kind = kind_col
                .map(field)
                .filter(|k| !k.is_empty())
                .map(String::from);
            entries.push(WordlistEntry {
                concept_id: field(concept_col).to_string(),
                variety_id: field(variety_col).to_string(),
                form_raw: form.to_string(),
                form_norm: form.to_string(),
                gold_label,
                gold_kind,
                line,
            });
        }
        Wordlist::from_entries(entries)
    }

    pub fn parse_file(path: &Path) -> Result<Wordlist> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Wordlist::parse_tsv(&text)
    }

    /// Serializes the raw forms back to TSV. The `gold` and `gold_kind`
    /// columns are emitted only when some entry carries them.
    pub fn to_tsv(&self) -> String {
        let with_gold = self.has_gold();
        let with_kind = self.entries.iter().any(|e| e.gold_kind.is_some());
        let mut out = format!("{COL_CONCEPT}\t{COL_VARIETY}\t{COL_FORM}");
        if with_gold {
            out.push('\t');
            out.push_str(COL_GOLD);
        }
        if with_kind {
            out.push('\t');
            out.push_str(COL_GOLD_KIND);
        }
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}",
                e.concept_id, e.variety_id, e.form_raw
            ));
            if with_gold {
                out.push('\t');
                match e.gold_label {
                    Some(true) => out.push('1'),
                    Some(false) => out.push('0'),
                    None => {}
                }
            }
            if with_kind {
                out.push('\t');
                out.push_str(e.gold_kind.as_deref().unwrap_or(""));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_three_rows_without_gold() {
        let wl =
            Wordlist::parse_tsv("concept_id\tvariety_id\tform\n1\tA\tba\n2\tA\tda\n3\tB\tka\n")
                .unwrap();
        assert_eq!(wl.len(), 3);
        assert!(wl.entries().iter().all(|e| e.gold_label.is_none()));
        assert_eq!(wl.entries()[1].form_norm, "da");
        assert_eq!(wl.varieties().len(), 2);
        assert_eq!(wl.entries()[2].line, 4);
    }

    #[test]
    fn parses_gold_column() {
        let wl = Wordlist::parse_tsv(
            "concept_id\tvariety_id\tform\tgold\n1\tA\tba\t1\n2\tA\tda\t0\n3\tA\tka\t1\n",
        )
        .unwrap();
        let gold: Vec<_> = wl.entries().iter().map(|e| e.gold_label).collect();
        assert_eq!(gold, [Some(true), Some(false), Some(true)]);
    }

    #[test]
    fn missing_form_column_names_it() {
        let err = Wordlist::parse_tsv("concept_id\tvariety_id\n1\tA\n").unwrap_err();
        match err {
            Error::MissingColumn { column, .. } => assert_eq!(column, "form"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_row_reports_line() {
        let err = Wordlist::parse_tsv("concept_id\tvariety_id\tform\n1\tA\tba\n# c\n1\tA\tba\n")
            .unwrap_err();
        assert!(matches!(
            err,
            Error::DuplicateRow {
                line: 4,
                first_line: 2,
                ..
            }
        ));
    }

    #[test]
    fn empty_form_reports_line() {
        let err =
            Wordlist::parse_tsv("concept_id\tvariety_id\tform\n1\tA\tba\n2\tA\t\n").unwrap_err();
        assert!(matches!(err, Error::Validation { line: Some(3), .. }));
    }

    #[test]
    fn comments_are_skipped_and_columns_can_move() {
        let wl = Wordlist::parse_tsv(
            "# exported\nform\tgold_kind\tvariety_id\tconcept_id\nba\tborrowing\tA\t1\n",
        )
        .unwrap();
        let e = &wl.entries()[0];
        assert_eq!(
            (
                e.concept_id.as_str(),
                e.variety_id.as_str(),
                e.form_raw.as_str()
            ),
            ("1", "A", "ba")
        );
        assert_eq!(e.gold_kind.as_deref(), Some("borrowing"));
    }

    #[test]
    fn diacritic_only_form_fails_normalization() {
        let table = SymbolTable::new(Vec::new(), ['\u{031A}'], []).unwrap();
        let e = WordlistEntry::new("1", "A", "\u{031A}");
        assert!(matches!(e.normalize(&table), Err(Error::Validation { .. })));
    }

    #[test]
    fn tsv_round_trip() {
        let text = "concept_id\tvariety_id\tform\tgold\n1\tA\tba\t1\n2\tA\tda\t0\n3\tB\tka\t\n";
        assert_eq!(Wordlist::parse_tsv(text).unwrap().to_tsv(), text);
    }

    #[test]
    fn groups_by_variety() {
        let wl =
            Wordlist::parse_tsv("concept_id\tvariety_id\tform\n1\tB\tba\n1\tA\tda\n2\tB\tka\n")
                .unwrap();
        assert_eq!(
            wl.by_variety(),
            vec![("A".to_string(), vec![1]), ("B".to_string(), vec![0, 2])]
        );
    }
}
