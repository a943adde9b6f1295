use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use phonolint_bench::{matrix, variety};
use phonolint_core::detect::{
    lof_scores, IsolationForest, IsolationForestParams, LofParams, OcsvmParams, OneClassSvm,
};
use phonolint_core::features::{ModelSet, NllTable, Setup};
use phonolint_core::ngram::ExtractionMode;
use phonolint_core::{NgramModel, NgramParams};

fn ngram(c: &mut Criterion) {
    let entries = variety(306);
    let mut g = c.benchmark_group("ngram");
    for mode in [ExtractionMode::Plain, ExtractionMode::BoundaryPhoneme] {
        g.bench_function(BenchmarkId::new("fit_trigram", mode.as_str()), |b| {
            b.iter(|| {
                NgramModel::fit(
                    entries.iter().map(|e| e.input(mode)),
                    3,
                    mode,
                    NgramParams::default(),
                )
                .unwrap()
            })
        });
    }
    let models =
        ModelSet::fit_for_setup(&entries, Setup::Syllable, NgramParams::default()).unwrap();
    g.bench_function("nll_table_syllable", |b| {
        b.iter(|| NllTable::compute(black_box(&entries), &models, false).unwrap())
    });
    g.finish();
}

fn detectors(c: &mut Criterion) {
    let mut g = c.benchmark_group("detect");
    g.sample_size(20);
    for cols in [1, 12] {
        let x = matrix(306, cols, 7);
        g.bench_function(BenchmarkId::new("iforest", cols), |b| {
            b.iter(|| {
                let f = IsolationForest::fit(&x, &IsolationForestParams::default(), 1).unwrap();
                x.iter_rows().map(|r| f.score(r).unwrap()).sum::<f64>()
            })
        });
        g.bench_function(BenchmarkId::new("lof", cols), |b| {
            b.iter(|| lof_scores(&x, &LofParams::default()).unwrap())
        });
        g.bench_function(BenchmarkId::new("ocsvm", cols), |b| {
            b.iter(|| OneClassSvm::fit(&x, &OcsvmParams::default()).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, ngram, detectors);
criterion_main!(benches);
