//! Stratified k-fold cross-validation with swap augmentation applied only
//! inside training folds: the swapped copy of a pair always lives in the same
//! fold as its original, so no test pair's twin can leak into training.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureMatrix, LabeledDataset, TernaryLabel};
use crate::ensemble::{self, TrainConfig};
use crate::error::{Error, Result};
use crate::features;
use crate::metrics::{bidirectional_auc, AucTriple};

#[derive(Debug, Clone)]
pub struct FoldReport {
    pub combined: AucTriple,
    /// AUC of each scheme's score alone, same folds and models.
    pub schemes: [AucTriple; 3],
    pub test_size: usize,
}

#[derive(Debug, Clone)]
pub struct CvReport {
    pub folds: Vec<FoldReport>,
    /// Mean over folds of the combined bidirectional AUC.
    pub mean_combined: AucTriple,
    pub mean_schemes: [AucTriple; 3],
}

fn mean_triple(triples: impl Iterator<Item = AucTriple> + Clone) -> AucTriple {
    let n = triples.clone().count() as f64;
    let mut fwd = 0.0;
    let mut bwd = 0.0;
    for t in triples {
        fwd += t.forward;
        bwd += t.backward;
    }
    AucTriple {
        forward: fwd / n,
        backward: bwd / n,
        mean: (fwd + bwd) / (2.0 * n),
    }
}

/// Deterministic stratified fold assignment: indices are grouped by label,
/// each group shuffled by a seeded ChaCha stream, then dealt round-robin with
/// a cursor carried across groups so total fold sizes differ by at most one.
pub fn stratified_folds(labels: &[TernaryLabel], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    let mut cursor = 0usize;
    for class in [
        TernaryLabel::BACKWARD,
        TernaryLabel::NONE,
        TernaryLabel::FORWARD,
    ] {
        let mut idxs: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idxs.shuffle(&mut rng);
        for i in idxs {
            assignment[i] = cursor % k;
            cursor += 1;
        }
    }
    assignment
}

/// Run stratified k-fold CV of the full ensemble. Features are extracted once
/// for the originals; training rows are the train-fold originals plus their
/// swap-permuted copies with negated labels; test rows are originals only.
/// `feature_columns` restricts the learner to a column subset (e.g. the
/// baseline block); scoring uses the same subset.
pub fn kfold_cv(
    ds: &LabeledDataset,
    k: usize,
    cfg: &TrainConfig,
    seed: u64,
    feature_columns: Option<&[usize]>,
) -> Result<CvReport> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    if ds.len() < k {
        return Err(Error::Config(format!(
            "{} pairs cannot fill {k} folds",
            ds.len()
        )));
    }
    let originals = features::extract_batch(&ds.pairs, &cfg.quantizer)?;
    let swapped = features::swap_permuted_matrix(&originals);
    let assignment = stratified_folds(&ds.labels, k, seed);

    let project = |m: &FeatureMatrix| -> FeatureMatrix {
        match feature_columns {
            Some(cols) => m.select_columns(cols),
            None => m.clone(),
        }
    };

    let mut folds = Vec::with_capacity(k);
    for fold in 0..k {
        let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] != fold).collect();
        let test_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] == fold).collect();

        // augmented training block: originals then swapped twins
        let mut x_train = originals.select_rows(&train_idx);
        let swapped_train = swapped.select_rows(&train_idx);
        for i in 0..swapped_train.n_rows() {
            x_train.push_row(swapped_train.row(i));
        }
        let mut y_train: Vec<TernaryLabel> = train_idx.iter().map(|&i| ds.labels[i]).collect();
        y_train.extend(train_idx.iter().map(|&i| ds.labels[i].negated()));

        let model = ensemble::train_on_matrix(&project(&x_train), &y_train, cfg)?;

        let x_test = project(&originals.select_rows(&test_idx));
        let y_test: Vec<TernaryLabel> = test_idx.iter().map(|&i| ds.labels[i]).collect();
        let combined_scores = model.score_matrix(&x_test)?;
        let scheme_rows = model.scheme_scores_matrix(&x_test)?;

        let combined = bidirectional_auc(&combined_scores, &y_test)?;
        let mut schemes = [AucTriple {
            forward: 0.0,
            backward: 0.0,
            mean: 0.0,
        }; 3];
        for s in 0..3 {
            let scores: Vec<f64> = scheme_rows.iter().map(|r| r[s]).collect();
            schemes[s] = bidirectional_auc(&scores, &y_test)?;
        }
        folds.push(FoldReport {
            combined,
            schemes,
            test_size: test_idx.len(),
        });
    }

    let mean_combined = mean_triple(folds.iter().map(|f| f.combined));
    let mean_schemes = [
        mean_triple(folds.iter().map(|f| f.schemes[0])),
        mean_triple(folds.iter().map(|f| f.schemes[1])),
        mean_triple(folds.iter().map(|f| f.schemes[2])),
    ];
    Ok(CvReport {
        folds,
        mean_combined,
        mean_schemes,
    })
}
