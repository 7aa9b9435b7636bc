//! Three ternary classification schemes over the shared feature set, swap
//! augmentation of the training set, and the equal-weight combination
//! producing the final signed causality score in [-1, 1].
//!
//! Scheme 1: one 3-class model, p1 = P(+1) - P(-1).
//! Scheme 2: a direction model (trained on the +-1 rows) times a dependence
//!           factor from an independence model, p2 = (Pd(+1) - Pd(-1)) * (1 - P(indep)).
//! Scheme 3: two one-vs-rest models, p3 = 0.5 Ppos(+1) - 0.5 Pneg(-1).

use serde::{Deserialize, Serialize};

use crate::data::{FeatureMatrix, FeatureVector, LabeledDataset, TernaryLabel};
use crate::error::{Error, Result};
use crate::features;
use crate::gbm::{self, GbmConfig, GbmModel, Loss};
use crate::preprocess::QuantizerConfig;

const MODEL_FORMAT_VERSION: u32 = 1;

/// Training configuration for the full ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub quantizer: QuantizerConfig,
    pub gbm: GbmConfig,
    /// Combination weights for schemes 1..3; must sum to 1.
    pub weights: [f64; 3],
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            quantizer: QuantizerConfig::default(),
            gbm: GbmConfig::default(),
            weights: [1.0 / 3.0; 3],
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        let s: f64 = self.weights.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "scheme weights must sum to 1, got {s}"
            )));
        }
        Ok(())
    }
}

/// The five fitted models plus combination weights and the feature contract
/// version they were trained under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleModel {
    pub format_version: u32,
    pub quantizer: QuantizerConfig,
    pub weights: [f64; 3],
    pub contract_version: u32,
    pub scheme1: GbmModel,
    pub scheme2_direction: GbmModel,
    pub scheme2_dependence: GbmModel,
    pub scheme3_pos: GbmModel,
    pub scheme3_neg: GbmModel,
}

/// Double a dataset by adding the swapped copy of every pair with the
/// negated label: class counts (n+, n0, n-) become (n+ + n-, 2 n0, n- + n+).
pub fn augment(ds: &LabeledDataset) -> LabeledDataset {
    let mut pairs = Vec::with_capacity(ds.pairs.len() * 2);
    let mut labels = Vec::with_capacity(ds.labels.len() * 2);
    pairs.extend(ds.pairs.iter().cloned());
    labels.extend(ds.labels.iter().copied());
    for (p, l) in ds.pairs.iter().zip(&ds.labels) {
        pairs.push(p.swapped());
        labels.push(l.negated());
    }
    LabeledDataset { pairs, labels }
}

/// Features of the augmented dataset: extracted rows for the originals
/// followed by their swap-permuted copies (exactly equal to re-extracting
/// the swapped pairs), with the negated labels appended.
pub fn augmented_features(
    ds: &LabeledDataset,
    quantizer: &QuantizerConfig,
) -> Result<(FeatureMatrix, Vec<TernaryLabel>)> {
    let originals = features::extract_batch(&ds.pairs, quantizer)?;
    let swapped = features::swap_permuted_matrix(&originals);
    let mut x = originals;
    for i in 0..swapped.n_rows() {
        x.push_row(swapped.row(i));
    }
    let mut labels: Vec<TernaryLabel> = ds.labels.clone();
    labels.extend(ds.labels.iter().map(|l| l.negated()));
    Ok((x, labels))
}

/// Train the five GBMs on the swap-augmented feature rows of `ds`.
pub fn train(ds: &LabeledDataset, cfg: &TrainConfig) -> Result<EnsembleModel> {
    let (x, labels) = augmented_features(ds, &cfg.quantizer)?;
    train_on_matrix(&x, &labels, cfg)
}

fn require_class(labels: &[TernaryLabel], class: TernaryLabel, name: &str) -> Result<()> {
    if labels.iter().any(|l| *l == class) {
        Ok(())
    } else {
        Err(Error::MissingClass {
            class: name.to_string(),
        })
    }
}

/// Train on an already-built (typically augmented) feature matrix. The rows
/// must contain all three classes.
pub fn train_on_matrix(
    x: &FeatureMatrix,
    labels: &[TernaryLabel],
    cfg: &TrainConfig,
) -> Result<EnsembleModel> {
    cfg.validate()?;
    if x.n_rows() != labels.len() {
        return Err(Error::Config(format!(
            "{} feature rows but {} labels",
            x.n_rows(),
            labels.len()
        )));
    }
    require_class(labels, TernaryLabel::FORWARD, "+1")?;
    require_class(labels, TernaryLabel::BACKWARD, "-1")?;
    require_class(labels, TernaryLabel::NONE, "0")?;

    let multinomial = GbmConfig {
        loss: Loss::MultinomialDeviance,
        ..cfg.gbm
    };
    let binomial = GbmConfig {
        loss: Loss::BinomialDeviance,
        ..cfg.gbm
    };

    // scheme 1: ternary, class index = label + 1
    let y1: Vec<usize> = labels.iter().map(|l| l.class_index()).collect();
    let scheme1 = gbm::fit(x, &y1, &multinomial)?;

    // scheme 2 direction: only +-1 rows, class 1 = forward
    let dir_rows: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] != TernaryLabel::NONE)
        .collect();
    let x_dir = x.select_rows(&dir_rows);
    let y_dir: Vec<usize> = dir_rows
        .iter()
        .map(|&i| usize::from(labels[i] == TernaryLabel::FORWARD))
        .collect();
    let scheme2_direction = gbm::fit(&x_dir, &y_dir, &binomial)?;

    // scheme 2 dependence: all rows, class 1 = independent (label 0)
    let y_dep: Vec<usize> = labels
        .iter()
        .map(|l| usize::from(*l == TernaryLabel::NONE))
        .collect();
    let scheme2_dependence = gbm::fit(x, &y_dep, &binomial)?;

    // scheme 3: one-vs-rest for +1 and for -1
    let y_pos: Vec<usize> = labels
        .iter()
        .map(|l| usize::from(*l == TernaryLabel::FORWARD))
        .collect();
    let scheme3_pos = gbm::fit(x, &y_pos, &binomial)?;
    let y_neg: Vec<usize> = labels
        .iter()
        .map(|l| usize::from(*l == TernaryLabel::BACKWARD))
        .collect();
    let scheme3_neg = gbm::fit(x, &y_neg, &binomial)?;

    Ok(EnsembleModel {
        format_version: MODEL_FORMAT_VERSION,
        quantizer: cfg.quantizer,
        weights: cfg.weights,
        contract_version: x.contract_version(),
        scheme1,
        scheme2_direction,
        scheme2_dependence,
        scheme3_pos,
        scheme3_neg,
    })
}

/// The three per-scheme signed scores from raw model probabilities.
/// `p_ternary` is (P(-1), P(0), P(+1)); `p_dir` is (Pd(-1), Pd(+1));
/// `p_indep` is the independence model's P(class 0); `p_pos1`/`p_neg1` are
/// the one-vs-rest positive-class probabilities.
pub fn scheme_scores(
    p_ternary: [f64; 3],
    p_dir: [f64; 2],
    p_indep: f64,
    p_pos1: f64,
    p_neg1: f64,
) -> [f64; 3] {
    let p1 = p_ternary[2] - p_ternary[0];
    let p2 = (p_dir[1] - p_dir[0]) * (1.0 - p_indep);
    let p3 = 0.5 * p_pos1 - 0.5 * p_neg1;
    [p1, p2, p3]
}

/// Weighted combination of the three scheme scores.
pub fn combine(scores: [f64; 3], weights: [f64; 3]) -> f64 {
    weights[0] * scores[0] + weights[1] * scores[1] + weights[2] * scores[2]
}

impl EnsembleModel {
    /// Per-scheme signed scores for one feature row.
    pub fn score_components(&self, row: &[f64]) -> Result<[f64; 3]> {
        let p1 = self.scheme1.predict_proba(row)?;
        let pd = self.scheme2_direction.predict_proba(row)?;
        let pi = self.scheme2_dependence.predict_proba(row)?;
        let pp = self.scheme3_pos.predict_proba(row)?;
        let pn = self.scheme3_neg.predict_proba(row)?;
        Ok(scheme_scores(
            [p1[0], p1[1], p1[2]],
            [pd[0], pd[1]],
            pi[1],
            pp[1],
            pn[1],
        ))
    }

    /// Final signed causality score in [-1, 1] for an extracted feature
    /// vector; errors when the model was trained under a different feature
    /// contract version.
    pub fn score(&self, fv: &FeatureVector) -> Result<f64> {
        if self.contract_version != fv.contract_version() {
            return Err(Error::ContractMismatch {
                model: self.contract_version,
                input: fv.contract_version(),
            });
        }
        Ok(combine(self.score_components(fv.as_slice())?, self.weights))
    }

    /// Combined scores for every row of a feature matrix.
    pub fn score_matrix(&self, x: &FeatureMatrix) -> Result<Vec<f64>> {
        if self.contract_version != x.contract_version() {
            return Err(Error::ContractMismatch {
                model: self.contract_version,
                input: x.contract_version(),
            });
        }
        (0..x.n_rows())
            .map(|i| Ok(combine(self.score_components(x.row(i))?, self.weights)))
            .collect()
    }

    /// Per-scheme scores for every row (column s holds scheme s+1).
    pub fn scheme_scores_matrix(&self, x: &FeatureMatrix) -> Result<Vec<[f64; 3]>> {
        if self.contract_version != x.contract_version() {
            return Err(Error::ContractMismatch {
                model: self.contract_version,
                input: x.contract_version(),
            });
        }
        (0..x.n_rows())
            .map(|i| self.score_components(x.row(i)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<EnsembleModel> {
        let m: EnsembleModel =
            serde_json::from_str(s).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported ensemble format version {}",
                m.format_version
            )));
        }
        Ok(m)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::Io {
            file: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: &std::path::Path) -> Result<EnsembleModel> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            file: path.display().to_string(),
            source: e,
        })?;
        EnsembleModel::from_json(&text)
    }
}
