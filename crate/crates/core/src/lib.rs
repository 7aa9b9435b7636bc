//! Cause-effect pair classification toolkit.
//!
//! Given two aligned observation vectors, the pipeline computes a fixed
//! 43-slot feature vector (information-theoretic measures, conditional
//! distribution variability measures, and assorted statistics, each evaluated
//! in both directions where asymmetric), trains a gradient-boosted-trees
//! ensemble over three ternary classification schemes with swap augmentation,
//! and scores causal direction with the bidirectional AUC metric.

pub mod cv;
pub mod data;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod gbm;
pub mod info;
pub mod io;
pub mod metrics;
pub mod misc;
pub mod preprocess;
pub mod synth;
pub mod variability;

pub use data::{
    FeatureMatrix, FeatureVector, LabeledDataset, Pair, TernaryLabel, Variable, VariableKind,
    CONTRACT_VERSION, FEATURE_COUNT,
};
pub use error::{Error, Result};
