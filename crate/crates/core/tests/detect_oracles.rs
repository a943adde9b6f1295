use phonolint_core::detect::iforest::{average_path_length, score_from_path_length};
use phonolint_core::detect::{
    lof_scores, run_detector, Algorithm, DetectorConfig, LofParams, OcsvmParams, OneClassSvm,
};
use phonolint_core::features::FeatureMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Textbook LOF: full sort of every row's distances, no shortcuts.
fn brute_force_lof(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    let n = rows.len();
    let d = |a: usize, b: usize| -> f64 {
        rows[a]
            .iter()
            .zip(&rows[b])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let knn: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| d(i, a).total_cmp(&d(i, b)).then(a.cmp(&b)));
            order.truncate(k);
            order
        })
        .collect();
    let kdist: Vec<f64> = (0..n).map(|i| d(i, knn[i][k - 1])).collect();
    let lrd: Vec<f64> = (0..n)
        .map(|i| {
            let mut reach = 0.0;
            for &j in &knn[i] {
                reach += f64::max(kdist[j], d(i, j));
            }
            let mean = reach / k as f64;
            if mean == 0.0 {
                1e12
            } else {
                (1.0 / mean).min(1e12)
            }
        })
        .collect();
    (0..n)
        .map(|i| {
            let mut s = 0.0;
            for &j in &knn[i] {
                s += lrd[j] / lrd[i];
            }
            s / k as f64
        })
        .collect()
}

#[test]
fn lof_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let n = rng.random_range(8..=50);
        let d = rng.random_range(1..=12);
        let k = rng.random_range(1..n);
        // Integer grid values make distance ties common.
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.random_range(0..4) as f64).collect())
            .collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let got = lof_scores(&x, &LofParams { k_neighbors: k }).unwrap();
        assert_eq!(got, brute_force_lof(&rows, k), "n={n} d={d} k={k}");
    }
}

#[test]
fn iforest_half_at_expected_path() {
    for psi in [2, 3, 10, 64, 256] {
        assert_eq!(score_from_path_length(average_path_length(psi), psi), 0.5);
    }
}

#[test]
fn iforest_ranks_ten_sigma_outlier_first() {
    let mut hits = 0;
    for run in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + run);
        let mut rows: Vec<Vec<f64>> = (0..200)
            .map(|_| (0..2).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        rows.push(vec![10.0, 0.0]);
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let res = run_detector(&x, &DetectorConfig::new(Algorithm::Iforest, run)).unwrap();
        let top = res
            .iter()
            .max_by(|a, b| a.score.total_cmp(&b.score))
            .unwrap();
        hits += usize::from(top.index == 200);
    }
    assert!(hits >= 19, "{hits}/20");
}

#[test]
fn ocsvm_nu_bounds_outlier_fraction() {
    let params = OcsvmParams::default();
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| (0..3).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let model = OneClassSvm::fit(&x, &params).unwrap();
        let outliers = model
            .training_decisions()
            .iter()
            .filter(|&&f| f < 0.0)
            .count();
        assert!(
            outliers as f64 / 100.0 <= params.nu + 0.02,
            "seed {seed}: {outliers}"
        );
        assert!(model.n_support() as f64 / 100.0 >= params.nu - 1e-9);
        assert!(model.kkt_residual() < 1e-4);
    }
}
