//! Wordlist parsing, form normalization and phoneme tokenization.

mod symbols;
mod wordlist;

pub use symbols::{PhonemeSequence, SymbolTable, BOUNDARY};
pub use wordlist::{
    Wordlist, WordlistEntry, COL_CONCEPT, COL_FORM, COL_GOLD, COL_GOLD_KIND, COL_VARIETY,
};

use crate::error::Result;

/// Normalizes an entry under `table`. See [`WordlistEntry::normalize`].
pub fn normalize(entry: &WordlistEntry, table: &SymbolTable) -> Result<WordlistEntry> {
    entry.normalize(table)
}

/// Tokenizes a normalized form. See [`SymbolTable::tokenize`].
pub fn tokenize(form: &str, table: &SymbolTable) -> Result<PhonemeSequence> {
    table.tokenize(form)
}
