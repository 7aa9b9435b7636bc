//! End-to-end pipeline tests at reduced scale: train/save/load/score through
//! the file formats, the mirror-score property of swap-augmented training,
//! and cross-validation leakage/determinism checks.

use paircause_core::cv::{kfold_cv, stratified_folds};
use paircause_core::data::TernaryLabel;
use paircause_core::ensemble::{augment, train, EnsembleModel, TrainConfig};
use paircause_core::features::extract_batch;
use paircause_core::gbm::GbmConfig;
use paircause_core::io;
use paircause_core::metrics::{bidirectional_auc, join_by_id, Prediction};
use paircause_core::preprocess::QuantizerConfig;
use paircause_core::synth::{generate_synthetic, SynthConfig};

fn small_synth(n_pairs: usize, seed: u64) -> paircause_core::data::LabeledDataset {
    generate_synthetic(&SynthConfig {
        n_pairs,
        samples_min: 80,
        samples_max: 120,
        seed,
        ..SynthConfig::default()
    })
    .unwrap()
}

fn small_cfg() -> TrainConfig {
    TrainConfig {
        gbm: GbmConfig {
            n_stages: 40,
            max_depth: 4,
            ..GbmConfig::default()
        },
        ..TrainConfig::default()
    }
}

#[test]
fn train_predict_evaluate_through_files() {
    let dir = std::env::temp_dir().join("paircause-pipeline");
    std::fs::create_dir_all(&dir).unwrap();
    let ds = small_synth(60, 11);

    let pairs_path = dir.join("pairs.csv");
    let info_path = dir.join("publicinfo.csv");
    let target_path = dir.join("target.csv");
    io::write_pairs_file(&pairs_path, &ds.pairs).unwrap();
    io::write_publicinfo_file(&info_path, &ds.pairs).unwrap();
    io::write_target_file(&target_path, &ds.pairs, &ds.labels).unwrap();

    let loaded = io::load_labeled_dataset(&pairs_path, &info_path, &target_path).unwrap();
    assert_eq!(loaded.len(), 60);

    let model = train(&loaded, &small_cfg()).unwrap();
    let model_path = dir.join("model.json");
    model.save(&model_path).unwrap();
    let restored = EnsembleModel::load(&model_path).unwrap();

    let features = extract_batch(&loaded.pairs, &restored.quantizer).unwrap();
    let scores = restored.score_matrix(&features).unwrap();
    let preds: Vec<Prediction> = loaded
        .pairs
        .iter()
        .zip(&scores)
        .map(|(p, &score)| Prediction {
            id: p.id.clone(),
            score,
        })
        .collect();
    let preds_path = dir.join("preds.csv");
    io::write_predictions_file(&preds_path, &preds).unwrap();

    let read_back = io::read_predictions_file(&preds_path).unwrap();
    let targets = io::read_target_file(&target_path).unwrap();
    let (s, l) = join_by_id(&read_back, &targets).unwrap();
    let auc = bidirectional_auc(&s, &l).unwrap();
    // training-set AUC on an easy synthetic set: far above chance
    assert!(auc.mean > 0.8, "training AUC {}", auc.mean);
}

#[test]
fn mirror_scores_track_negated_originals() {
    let ds = small_synth(90, 23);
    let model = train(&ds, &small_cfg()).unwrap();
    let q = QuantizerConfig::default();

    let originals = extract_batch(&ds.pairs, &q).unwrap();
    let swapped_pairs: Vec<_> = ds.pairs.iter().map(|p| p.swapped()).collect();
    let swapped = extract_batch(&swapped_pairs, &q).unwrap();

    let s_orig = model.score_matrix(&originals).unwrap();
    let s_swap = model.score_matrix(&swapped).unwrap();
    let negated: Vec<f64> = s_swap.iter().map(|v| -v).collect();

    let rho = spearman(&s_orig, &negated);
    assert!(rho > 0.95, "rank correlation {rho}");
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut r = vec![0.0; n];
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && v[order[j + 1]] == v[order[i]] {
                j += 1;
            }
            let mid = (i + j) as f64 / 2.0 + 1.0;
            for &idx in &order[i..=j] {
                r[idx] = mid;
            }
            i = j + 1;
        }
        r
    }
    let ra = ranks(a);
    let rb = ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        num += (x - ma) * (y - mb);
        da += (x - ma) * (x - ma);
        db += (y - mb) * (y - mb);
    }
    num / (da.sqrt() * db.sqrt())
}

#[test]
fn cv_folds_partition_and_never_leak_swapped_twins() {
    let ds = small_synth(50, 31);
    let k = 5;
    let assignment = stratified_folds(&ds.labels, k, 1);

    // folds partition the dataset
    let mut seen = vec![false; ds.len()];
    for (i, &f) in assignment.iter().enumerate() {
        assert!(f < k);
        assert!(!seen[i]);
        seen[i] = true;
    }
    assert!(seen.iter().all(|&s| s));

    // augmentation only within training folds: for every test pair, its
    // swapped twin is absent from the augmented training set
    for fold in 0..k {
        let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] != fold).collect();
        let train_subset = paircause_core::data::LabeledDataset::new(
            train_idx.iter().map(|&i| ds.pairs[i].clone()).collect(),
            train_idx.iter().map(|&i| ds.labels[i]).collect(),
        )
        .unwrap();
        let augmented = augment(&train_subset);
        let train_ids: std::collections::HashSet<&str> =
            augmented.pairs.iter().map(|p| p.id.as_str()).collect();
        for (i, &f) in assignment.iter().enumerate() {
            if f == fold {
                let twin = ds.pairs[i].swapped();
                assert!(
                    !train_ids.contains(twin.id.as_str()),
                    "leaked twin of {}",
                    ds.pairs[i].id
                );
                assert!(!train_ids.contains(ds.pairs[i].id.as_str()));
            }
        }
    }
}

#[test]
fn cv_is_deterministic_and_reports_all_folds() {
    let ds = small_synth(40, 41);
    let cfg = TrainConfig {
        gbm: GbmConfig {
            n_stages: 10,
            max_depth: 3,
            ..GbmConfig::default()
        },
        ..TrainConfig::default()
    };
    let r1 = kfold_cv(&ds, 4, &cfg, 9, None).unwrap();
    let r2 = kfold_cv(&ds, 4, &cfg, 9, None).unwrap();
    assert_eq!(r1.folds.len(), 4);
    let total: usize = r1.folds.iter().map(|f| f.test_size).sum();
    assert_eq!(total, 40);
    for (a, b) in r1.folds.iter().zip(&r2.folds) {
        assert_eq!(a.combined.mean.to_bits(), b.combined.mean.to_bits());
    }
    assert!(r1.mean_combined.mean > 0.0 && r1.mean_combined.mean <= 1.0);
}

#[test]
fn cv_errors_when_a_class_is_missing() {
    let mut ds = small_synth(30, 51);
    // erase the independent/confounded class
    for l in ds.labels.iter_mut() {
        if *l == TernaryLabel::NONE {
            *l = TernaryLabel::FORWARD;
        }
    }
    let cfg = TrainConfig {
        gbm: GbmConfig {
            n_stages: 4,
            max_depth: 2,
            ..GbmConfig::default()
        },
        ..TrainConfig::default()
    };
    let err = kfold_cv(&ds, 3, &cfg, 1, None).unwrap_err();
    assert!(err.to_string().contains("missing class"));
}

#[test]
fn cv_with_column_subset_runs() {
    let ds = small_synth(36, 61);
    let cfg = TrainConfig {
        gbm: GbmConfig {
            n_stages: 8,
            max_depth: 3,
            ..GbmConfig::default()
        },
        ..TrainConfig::default()
    };
    let report = kfold_cv(
        &ds,
        3,
        &cfg,
        2,
        Some(&paircause_core::features::BASELINE_COLUMNS),
    )
    .unwrap();
    assert_eq!(report.folds.len(), 3);
}
