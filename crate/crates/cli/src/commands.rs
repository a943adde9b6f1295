use std::io::Write;
use std::path::{Path, PathBuf};

use phonolint_core::detect::{Algorithm, DetectorConfig, LofParams};
use phonolint_core::eval::{
    grid_tsv, pr_dump_csv, run_grid, top_k, top_table, Corpus, GridOptions, Scope,
};
use phonolint_core::features::{
    Aggregation, AnalysisSelector, FeatureConfig, FeatureOptions, NgramCombination, Setup,
};
use phonolint_core::fixture::{generate, FixtureParams};
use phonolint_core::ngram::Estimator;
use phonolint_core::syllabify::syllabify;
use phonolint_core::{Error, NgramParams, Result, SonorityScale, SymbolTable, Wordlist};

use crate::args::{FixtureArgs, GridArgs, InputArgs, ModelArgs, ScoreArgs, ValidateArgs};
use crate::manifest::RunManifest;

struct Inputs {
    wordlist: Wordlist,
    bytes: Vec<u8>,
    table: SymbolTable,
    scale: SonorityScale,
}

fn load_config(args: &InputArgs) -> Result<(SymbolTable, SonorityScale)> {
    let table = match &args.symbols {
        Some(p) => SymbolTable::from_file(p)?,
        None => SymbolTable::default(),
    };
    let scale = match &args.sonority {
        Some(p) => SonorityScale::from_file(p)?,
        None => SonorityScale::default(),
    };
    Ok((table, scale))
}

fn read_wordlist(path: &Path) -> Result<(Vec<u8>, Result<Wordlist>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let parsed = std::str::from_utf8(&bytes)
        .map_err(|e| Error::Validation {
            line: None,
            message: format!("{} is not valid UTF-8: {e}", path.display()),
        })
        .and_then(Wordlist::parse_tsv);
    Ok((bytes, parsed))
}

fn load(args: &InputArgs) -> Result<Inputs> {
    let (table, scale) = load_config(args)?;
    let (bytes, wordlist) = read_wordlist(&args.wordlist)?;
    Ok(Inputs {
        wordlist: wordlist?,
        bytes,
        table,
        scale,
    })
}

fn feature_options(m: &ModelArgs) -> Result<FeatureOptions> {
    if !(m.smoothing > 0.0 && m.smoothing.is_finite()) {
        return Err(Error::Usage(format!(
            "--smoothing must be positive, got {}",
            m.smoothing
        )));
    }
    Ok(FeatureOptions {
        ngram: NgramParams {
            smoothing_k: m.smoothing,
            padding: m.padding,
            estimator: if m.joint {
                Estimator::Joint
            } else {
                Estimator::Conditional
            },
        },
        per_order: m.per_order_agg,
        leave_one_out: m.loo,
    })
}

fn scope(m: &ModelArgs) -> Scope {
    if m.pool {
        Scope::Pooled
    } else {
        Scope::PerVariety
    }
}

fn manifest(command: &str, input: &Inputs, path: &Path, m: &ModelArgs) -> RunManifest {
    let mut man = RunManifest::new(
        command,
        m.seed,
        path,
        &input.bytes,
        &input.table.to_config(),
        &input.scale.to_config(),
    );
    man.flag("k", m.k)
        .flag("scope", scope(m).as_str())
        .flag("loo", m.loo)
        .flag("zscore", m.zscore)
        .flag("per_order_agg", m.per_order_agg)
        .flag("smoothing", m.smoothing)
        .flag("estimator", if m.joint { "joint" } else { "conditional" })
        .flag("padding", m.padding);
    man
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(path, e))
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn plural(n: usize, word: &str) -> String {
    format!("{n} {word}{}", if n == 1 { "" } else { "s" })
}

/// Prints every problem found; returns whether the wordlist is free of errors.
pub fn validate(args: &ValidateArgs) -> Result<bool> {
    let (table, scale) = load_config(&args.input)?;
    let (_, parsed) = read_wordlist(&args.input.wordlist)?;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    match parsed {
        Err(e @ (Error::Io { .. } | Error::Usage(_))) => return Err(e),
        Err(e) => errors.push(e.to_string()),
        Ok(wordlist) => {
            for entry in wordlist.entries() {
                let line = entry.line;
                let seq = entry
                    .normalize(&table)
                    .and_then(|e| table.tokenize(&e.form_norm));
                match seq {
                    Err(e) => errors.push(format!("line {line}: {e}")),
                    Ok(seq) => {
                        if let Err(Error::NoNucleus { form }) = syllabify(&seq, &scale) {
                            warnings.push(format!(
                                "line {line}: `{form}` has no vowel nucleus; it is treated as one syllable"
                            ));
                        }
                    }
                }
            }
        }
    }
    let mut out = std::io::stdout().lock();
    for e in &errors {
        let _ = writeln!(out, "error: {e}");
    }
    for w in &warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let total = errors.len() + warnings.len();
    if total == 0 {
        let _ = writeln!(out, "0 issues");
    } else {
        let _ = writeln!(
            out,
            "{} ({}, {})",
            plural(total, "issue"),
            plural(errors.len(), "error"),
            plural(warnings.len(), "warning")
        );
    }
    Ok(errors.is_empty())
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    // Every flag is checked before any file is read.
    let setup: Setup = args.setup.parse()?;
    let selector = AnalysisSelector::from_flags(setup, args.analysis.as_deref())?;
    let combination: NgramCombination = args.ngrams.parse()?;
    let aggregation: Aggregation = args.agg.parse()?;
    let algorithm: Algorithm = args.algorithm.parse()?;
    let options = feature_options(&args.model)?;
    let config = FeatureConfig::new(selector, combination, aggregation);
    let detector = DetectorConfig {
        lof: LofParams {
            k_neighbors: args.model.k,
        },
        ..DetectorConfig::new(algorithm, args.model.seed)
    };

    let input = load(&args.input)?;
    let corpus = Corpus::build(
        &input.wordlist,
        &input.table,
        &input.scale,
        &[setup],
        scope(&args.model),
        options,
        args.model.zscore,
    )?;
    if corpus.syllable_fallbacks() > 0 {
        log::warn!(
            "{} forms have no vowel and were treated as one syllable",
            corpus.syllable_fallbacks()
        );
    }
    let mut scored: Vec<_> = corpus
        .detect(&config, &detector)?
        .into_iter()
        .flatten()
        .collect();
    let entries = input.wordlist.entries();
    scored.sort_by(|a, b| {
        entries[a.entry]
            .variety_id
            .cmp(&entries[b.entry].variety_id)
            .then(b.score.total_cmp(&a.score))
            .then(a.entry.cmp(&b.entry))
    });

    let mut report = String::from("variety\tconcept\tform\tscore\tflagged\n");
    for s in &scored {
        let e = &entries[s.entry];
        report.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\t{}\n",
            e.variety_id,
            e.concept_id,
            e.form_raw,
            s.score,
            u8::from(s.is_anomaly)
        ));
    }
    let flagged = scored.iter().filter(|s| s.is_anomaly).count();
    log::info!(
        "{config} / {algorithm}: flagged {flagged} of {} entries",
        scored.len()
    );

    match &args.model.out {
        None => {
            let _ = std::io::stdout().lock().write_all(report.as_bytes());
        }
        Some(dir) => {
            create_dir(dir)?;
            write_file(dir, "scores.tsv", &report)?;
            let mut man = manifest("score", &input, &args.input.wordlist, &args.model);
            man.flag("config", config.name())
                .flag("algorithm", algorithm);
            man.outputs = vec!["scores.tsv".into()];
            man.write(&dir.join("manifest.json"))?;
            eprintln!("wrote {}", dir.join("scores.tsv").display());
        }
    }
    Ok(())
}

pub fn grid(args: &GridArgs) -> Result<()> {
    let setup: Setup = args.setup.parse()?;
    let options = feature_options(&args.model)?;
    let input = load(&args.input)?;
    if !input.wordlist.has_gold() {
        return Err(Error::Usage(
            "the grid needs gold labels: add a `gold` column (1 = anomaly, 0 = normal) or use `phonolint score`".into(),
        ));
    }
    let corpus = Corpus::build(
        &input.wordlist,
        &input.table,
        &input.scale,
        &[setup],
        scope(&args.model),
        options,
        args.model.zscore,
    )?;
    let grid_options = GridOptions {
        lof: LofParams {
            k_neighbors: args.model.k,
        },
        ..GridOptions::new(args.model.seed)
    };
    let rows = run_grid(&input.wordlist, &corpus, setup, &grid_options)?;
    let failed = rows.iter().filter(|r| r.failure.is_some()).count();
    if failed > 0 {
        log::warn!(
            "{failed} of {} grid cells failed; see the status column",
            rows.len()
        );
    }
    let top = top_k(&rows, args.top);

    let dir: PathBuf = args.model.out.clone().unwrap_or_else(|| PathBuf::from("."));
    create_dir(&dir)?;
    let top_name = format!("top{}.tsv", args.top);
    write_file(&dir, "grid.tsv", &grid_tsv(&rows))?;
    write_file(&dir, &top_name, &grid_tsv(top))?;
    write_file(&dir, "pr_dump.csv", &pr_dump_csv(&rows))?;
    let mut man = manifest("grid", &input, &args.input.wordlist, &args.model);
    man.flag("setup", setup).flag("top", args.top);
    man.outputs = vec!["grid.tsv".into(), top_name, "pr_dump.csv".into()];
    man.write(&dir.join("manifest.json"))?;

    let _ = std::io::stdout()
        .lock()
        .write_all(top_table(top).as_bytes());
    Ok(())
}

pub fn fixture(args: &FixtureArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.rate) {
        return Err(Error::Usage(format!(
            "--rate must lie in [0, 1], got {}",
            args.rate
        )));
    }
    let wordlist = generate(&FixtureParams {
        varieties: args.varieties,
        concepts: args.concepts,
        anomaly_rate: args.rate,
        seed: args.seed,
    })?;
    let tsv = wordlist.to_tsv();
    match &args.out {
        None => {
            let _ = std::io::stdout().lock().write_all(tsv.as_bytes());
        }
        Some(path) => std::fs::write(path, tsv).map_err(|e| Error::io(path, e))?,
    }
    Ok(())
}
