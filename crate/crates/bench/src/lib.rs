//! Inputs shared by the benchmarks in `benches/`.

use phonolint_core::features::{FeatureMatrix, PreparedEntry};
use phonolint_core::fixture::{generate, FixtureParams};
use phonolint_core::{SonorityScale, SymbolTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One synthetic variety of `concepts` entries, tokenized and syllabified.
pub fn variety(concepts: usize) -> Vec<PreparedEntry> {
    let wl = generate(&FixtureParams {
        varieties: 1,
        concepts,
        ..FixtureParams::default()
    })
    .expect("fixture generates");
    let table = SymbolTable::default();
    let scale = SonorityScale::default();
    wl.entries()
        .iter()
        .map(|e| PreparedEntry::prepare(&e.normalize(&table).unwrap(), &table, &scale).unwrap())
        .collect()
}

/// Uniform random matrix in [0, 1).
pub fn matrix(rows: usize, cols: usize, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rows * cols).map(|_| rng.random::<f64>()).collect();
    FeatureMatrix::new(rows, cols, data).expect("finite values")
}
