//! From-scratch gradient-boosted regression trees with binomial and
//! multinomial deviance losses. Training is fully deterministic: no row or
//! feature subsampling, exhaustive split search, fixed tie-breaking. Leaf
//! values are one-step Newton updates clipped to |v| <= 10.

mod tree;

pub use tree::{fit_tree, SplitContext, Tree, TreeNode, TreeParams, TreeTargets};

use serde::{Deserialize, Serialize};

use crate::data::FeatureMatrix;
use crate::error::{Error, Result};

/// Clip bound on Newton leaf values, against saturation on pure leaves.
pub const LEAF_VALUE_CLIP: f64 = 10.0;

const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Loss {
    BinomialDeviance,
    MultinomialDeviance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmConfig {
    pub n_stages: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub loss: Loss,
}

impl Default for GbmConfig {
    fn default() -> Self {
        GbmConfig {
            n_stages: 500,
            max_depth: 9,
            learning_rate: 0.1,
            min_samples_leaf: 1,
            loss: Loss::MultinomialDeviance,
        }
    }
}

impl GbmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::Config("learning_rate must be positive".to_string()));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be positive".to_string()));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::Config(
                "min_samples_leaf must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Additive ensemble of regression trees with per-class score functions.
/// Scores map to probabilities through the logistic function (binomial) or
/// softmax (multinomial).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    pub format_version: u32,
    pub config: GbmConfig,
    pub n_classes: usize,
    pub n_features: usize,
    pub contract_version: u32,
    /// Log-odds of the positive class (binomial, length 1) or per-class log
    /// priors (multinomial, length K).
    pub initial_scores: Vec<f64>,
    /// `stages[s]` holds one tree per score dimension.
    pub stages: Vec<Vec<Tree>>,
}

fn class_stats(y: &[usize]) -> Result<(usize, Vec<usize>)> {
    let n_classes = y.iter().copied().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; n_classes];
    for &c in y {
        counts[c] += 1;
    }
    if let Some(missing) = counts.iter().position(|&c| c == 0) {
        return Err(Error::MissingClass {
            class: missing.to_string(),
        });
    }
    if n_classes < 2 {
        return Err(Error::SingleClass {
            class: y.first().copied().unwrap_or(0),
        });
    }
    Ok((n_classes, counts))
}

/// Standard gradient boosting fit: scores start at the class log-priors
/// (log-odds for binomial); each stage fits one depth-limited regression tree
/// per score dimension to the negative deviance gradient, sets leaf values by
/// the one-step Newton update, and adds them scaled by the learning rate.
pub fn fit(x: &FeatureMatrix, y: &[usize], cfg: &GbmConfig) -> Result<GbmModel> {
    cfg.validate()?;
    let n = x.n_rows();
    if n < 2 {
        return Err(Error::Config(format!(
            "need at least 2 training rows, got {n}"
        )));
    }
    if y.len() != n {
        return Err(Error::Config(format!("{n} rows but {} labels", y.len())));
    }
    for i in 0..n {
        for (j, &v) in x.row(i).iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteFeature { row: i, column: j });
            }
        }
    }
    let (n_classes, counts) = class_stats(y)?;
    if cfg.loss == Loss::BinomialDeviance && n_classes != 2 {
        return Err(Error::Config(format!(
            "binomial deviance needs exactly 2 classes, got {n_classes}"
        )));
    }

    let d = x.n_cols();
    let columns: Vec<Vec<f64>> = (0..d)
        .map(|j| (0..n).map(|i| x.row(i)[j]).collect())
        .collect();
    let ctx = SplitContext::new(columns);
    let params = TreeParams {
        max_depth: cfg.max_depth,
        min_samples_leaf: cfg.min_samples_leaf,
        leaf_clip: LEAF_VALUE_CLIP,
    };

    let k_dims = match cfg.loss {
        Loss::BinomialDeviance => 1,
        Loss::MultinomialDeviance => n_classes,
    };
    let initial_scores: Vec<f64> = match cfg.loss {
        Loss::BinomialDeviance => {
            let p = counts[1] as f64 / n as f64;
            vec![(p / (1.0 - p)).ln()]
        }
        Loss::MultinomialDeviance => counts.iter().map(|&c| (c as f64 / n as f64).ln()).collect(),
    };

    // scores[k][i]: raw score of dimension k for row i
    let mut scores: Vec<Vec<f64>> = initial_scores.iter().map(|&s| vec![s; n]).collect();
    let mut stages: Vec<Vec<Tree>> = Vec::with_capacity(cfg.n_stages);

    let mut residual = vec![0.0f64; n];
    let mut newton_num = vec![0.0f64; n];
    let mut newton_den = vec![0.0f64; n];

    for _ in 0..cfg.n_stages {
        let mut stage_trees = Vec::with_capacity(k_dims);
        match cfg.loss {
            Loss::BinomialDeviance => {
                for i in 0..n {
                    let p = sigmoid(scores[0][i]);
                    let r = y[i] as f64 - p;
                    residual[i] = r;
                    newton_num[i] = r;
                    newton_den[i] = p * (1.0 - p);
                }
                let targets = TreeTargets {
                    gradient: &residual,
                    newton_num: &newton_num,
                    newton_den: &newton_den,
                };
                let (t, row_values) = fit_tree(&ctx, &targets, &params);
                for i in 0..n {
                    scores[0][i] += cfg.learning_rate * row_values[i];
                }
                stage_trees.push(t);
            }
            Loss::MultinomialDeviance => {
                let probs = softmax_rows(&scores, n);
                let factor = (n_classes as f64 - 1.0) / n_classes as f64;
                for k in 0..n_classes {
                    for i in 0..n {
                        let p = probs[k][i];
                        let r = if y[i] == k { 1.0 } else { 0.0 } - p;
                        residual[i] = r;
                        newton_num[i] = factor * r;
                        newton_den[i] = p * (1.0 - p);
                    }
                    let targets = TreeTargets {
                        gradient: &residual,
                        newton_num: &newton_num,
                        newton_den: &newton_den,
                    };
                    let (t, row_values) = fit_tree(&ctx, &targets, &params);
                    for i in 0..n {
                        scores[k][i] += cfg.learning_rate * row_values[i];
                    }
                    stage_trees.push(t);
                }
            }
        }
        stages.push(stage_trees);
    }

    Ok(GbmModel {
        format_version: MODEL_FORMAT_VERSION,
        config: *cfg,
        n_classes,
        n_features: d,
        contract_version: x.contract_version(),
        initial_scores,
        stages,
    })
}

fn sigmoid(f: f64) -> f64 {
    1.0 / (1.0 + (-f).exp())
}

fn softmax_rows(scores: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let k = scores.len();
    let mut out = vec![vec![0.0f64; n]; k];
    for i in 0..n {
        let mut mx = f64::NEG_INFINITY;
        for s in scores {
            mx = mx.max(s[i]);
        }
        let mut z = 0.0;
        for s in scores {
            z += (s[i] - mx).exp();
        }
        for (kk, s) in scores.iter().enumerate() {
            out[kk][i] = (s[i] - mx).exp() / z;
        }
    }
    out
}

impl GbmModel {
    /// Raw additive scores for one row (length 1 for binomial, K otherwise).
    pub fn raw_scores(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        let mut f = self.initial_scores.clone();
        for stage in &self.stages {
            for (k, t) in stage.iter().enumerate() {
                f[k] += self.config.learning_rate * t.predict_row(row);
            }
        }
        Ok(f)
    }

    /// Class probabilities for one row: strictly positive, summing to 1.
    pub fn predict_proba(&self, row: &[f64]) -> Result<Vec<f64>> {
        let f = self.raw_scores(row)?;
        Ok(self.scores_to_proba(&f))
    }

    fn scores_to_proba(&self, f: &[f64]) -> Vec<f64> {
        match self.config.loss {
            Loss::BinomialDeviance => {
                let p = sigmoid(f[0]).clamp(1e-300, 1.0);
                vec![1.0 - p, p]
            }
            Loss::MultinomialDeviance => {
                let mx = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = f.iter().map(|&v| (v - mx).exp().max(1e-300)).collect();
                let z: f64 = exps.iter().sum();
                exps.iter().map(|e| e / z).collect()
            }
        }
    }

    /// Probabilities for every row of a matrix; the matrix must carry the
    /// same feature contract version the model was trained on.
    pub fn predict_proba_matrix(&self, x: &FeatureMatrix) -> Result<Vec<Vec<f64>>> {
        if x.contract_version() != self.contract_version {
            return Err(Error::ContractMismatch {
                model: self.contract_version,
                input: x.contract_version(),
            });
        }
        (0..x.n_rows())
            .map(|i| self.predict_proba(x.row(i)))
            .collect()
    }

    /// Mean deviance (negative log-likelihood) after each stage; length
    /// equals the number of stages.
    pub fn staged_deviance(&self, x: &FeatureMatrix, y: &[usize]) -> Result<Vec<f64>> {
        let n = x.n_rows();
        if y.len() != n {
            return Err(Error::Config(format!("{n} rows but {} labels", y.len())));
        }
        let mut scores: Vec<Vec<f64>> = self.initial_scores.iter().map(|&s| vec![s; n]).collect();
        let mut out = Vec::with_capacity(self.stages.len());
        for stage in &self.stages {
            for (k, t) in stage.iter().enumerate() {
                for i in 0..n {
                    scores[k][i] += self.config.learning_rate * t.predict_row(x.row(i));
                }
            }
            out.push(self.deviance_of_scores(&scores, y));
        }
        Ok(out)
    }

    /// Mean deviance of the fully trained model on a dataset.
    pub fn deviance(&self, x: &FeatureMatrix, y: &[usize]) -> Result<f64> {
        let n = x.n_rows();
        let mut scores: Vec<Vec<f64>> = self.initial_scores.iter().map(|&s| vec![s; n]).collect();
        for stage in &self.stages {
            for (k, t) in stage.iter().enumerate() {
                for i in 0..n {
                    scores[k][i] += self.config.learning_rate * t.predict_row(x.row(i));
                }
            }
        }
        Ok(self.deviance_of_scores(&scores, y))
    }

    fn deviance_of_scores(&self, scores: &[Vec<f64>], y: &[usize]) -> f64 {
        let n = y.len();
        let mut total = 0.0;
        match self.config.loss {
            Loss::BinomialDeviance => {
                for i in 0..n {
                    let f = scores[0][i];
                    // ln(1 + exp(f)) - y*f, computed stably
                    total += f.max(0.0) - y[i] as f64 * f + (-f.abs()).exp().ln_1p();
                }
            }
            Loss::MultinomialDeviance => {
                for i in 0..n {
                    let mut mx = f64::NEG_INFINITY;
                    for s in scores {
                        mx = mx.max(s[i]);
                    }
                    let mut z = 0.0;
                    for s in scores {
                        z += (s[i] - mx).exp();
                    }
                    total += mx + z.ln() - scores[y[i]][i];
                }
            }
        }
        total / n as f64
    }

    /// Versioned self-describing serialization; round-trips bitwise.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<GbmModel> {
        let m: GbmModel = serde_json::from_str(s).map_err(|e| Error::ModelFormat(e.to_string()))?;
        if m.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "unsupported model format version {}",
                m.format_version
            )));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
        FeatureMatrix::from_rows(&rows).unwrap()
    }

    fn separable_1d(n: usize) -> (FeatureMatrix, Vec<usize>) {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| vec![i as f64 - (n as f64 / 2.0) + 0.25])
            .collect();
        let y: Vec<usize> = rows.iter().map(|r| usize::from(r[0] >= 0.0)).collect();
        (matrix(rows), y)
    }

    #[test]
    fn separable_binary_data_fits_quickly() {
        let (x, y) = separable_1d(40);
        let cfg = GbmConfig {
            n_stages: 10,
            max_depth: 2,
            loss: Loss::BinomialDeviance,
            ..GbmConfig::default()
        };
        let m = fit(&x, &y, &cfg).unwrap();
        for i in 0..x.n_rows() {
            let p = m.predict_proba(x.row(i)).unwrap();
            let pred = usize::from(p[1] >= 0.5);
            assert_eq!(pred, y[i], "row {i}");
        }
    }

    #[test]
    fn single_class_is_an_error() {
        let x = matrix(vec![vec![0.0], vec![1.0]]);
        let err = fit(&x, &[1, 1], &GbmConfig::default()).unwrap_err();
        assert!(matches!(
            err,
            Error::MissingClass { .. } | Error::SingleClass { .. }
        ));
    }

    #[test]
    fn nan_feature_is_an_error() {
        let x = matrix(vec![vec![0.0], vec![f64::NAN]]);
        let err = fit(
            &x,
            &[0, 1],
            &GbmConfig {
                loss: Loss::BinomialDeviance,
                n_stages: 1,
                ..GbmConfig::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteFeature { .. }));
    }

    #[test]
    fn zero_stage_model_returns_priors() {
        let x = matrix(vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        let y = vec![0usize, 0, 0, 1];
        let cfg = GbmConfig {
            n_stages: 0,
            loss: Loss::BinomialDeviance,
            ..GbmConfig::default()
        };
        let m = fit(&x, &y, &cfg).unwrap();
        let p = m.predict_proba(&[100.0]).unwrap();
        assert!((p[1] - 0.25).abs() < 1e-12);
        assert!((p[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let (x, y3) = three_class_toy(60);
        let m = fit(
            &x,
            &y3,
            &GbmConfig {
                n_stages: 20,
                max_depth: 3,
                ..GbmConfig::default()
            },
        )
        .unwrap();
        for i in 0..x.n_rows() {
            let p = m.predict_proba(x.row(i)).unwrap();
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!(p.iter().all(|&v| v > 0.0));
        }
    }

    fn three_class_toy(n: usize) -> (FeatureMatrix, Vec<usize>) {
        let mut s = 9u64;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let c = i % 3;
            rows.push(vec![c as f64 + next() * 0.5, next()]);
            y.push(c);
        }
        (matrix(rows), y)
    }

    #[test]
    fn staged_deviance_non_increasing() {
        let (x, y) = three_class_toy(60);
        let cfg = GbmConfig {
            n_stages: 40,
            max_depth: 3,
            ..GbmConfig::default()
        };
        let m = fit(&x, &y, &cfg).unwrap();
        let dev = m.staged_deviance(&x, &y).unwrap();
        assert_eq!(dev.len(), 40);
        for w in dev.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12,
                "deviance increased: {} -> {}",
                w[0],
                w[1]
            );
        }
        // separable-ish data: large reduction from the first stage
        assert!(dev.last().unwrap() < &(dev[0] * 0.5));
    }

    #[test]
    fn refit_is_bitwise_deterministic() {
        let (x, y) = three_class_toy(45);
        let cfg = GbmConfig {
            n_stages: 15,
            max_depth: 4,
            ..GbmConfig::default()
        };
        let m1 = fit(&x, &y, &cfg).unwrap();
        let m2 = fit(&x, &y, &cfg).unwrap();
        assert_eq!(m1.to_json(), m2.to_json());
    }

    #[test]
    fn serialization_round_trip_is_bitwise_stable() {
        let (x, y) = separable_1d(30);
        let cfg = GbmConfig {
            n_stages: 8,
            max_depth: 3,
            loss: Loss::BinomialDeviance,
            ..GbmConfig::default()
        };
        let m = fit(&x, &y, &cfg).unwrap();
        let json1 = m.to_json();
        let restored = GbmModel::from_json(&json1).unwrap();
        assert_eq!(json1, restored.to_json());
        for i in 0..x.n_rows() {
            let p1 = m.predict_proba(x.row(i)).unwrap();
            let p2 = restored.predict_proba(x.row(i)).unwrap();
            assert_eq!(p1[1].to_bits(), p2[1].to_bits());
        }
    }

    #[test]
    fn contract_mismatch_rejected() {
        let (x, y) = separable_1d(20);
        let cfg = GbmConfig {
            n_stages: 2,
            max_depth: 2,
            loss: Loss::BinomialDeviance,
            ..GbmConfig::default()
        };
        let m = fit(&x, &y, &cfg).unwrap();
        let other = FeatureMatrix::from_feature_vectors(&[crate::data::FeatureVector::new(
            [0.0; crate::data::FEATURE_COUNT],
        )]);
        // feature-vector matrices carry contract version 1; model trained on 0
        let err = m.predict_proba_matrix(&other).unwrap_err();
        assert!(matches!(err, Error::ContractMismatch { .. }));
        let err2 = m.predict_proba(&[1.0, 2.0]).unwrap_err();
        assert!(matches!(err2, Error::DimensionMismatch { .. }));
    }
}
