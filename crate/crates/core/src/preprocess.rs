//! Normalization, fixed-grid quantization, probability-sorted relabeling of
//! categorical codes, and the per-x-group conditional distributions consumed
//! by the variability measures.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Fixed-grid quantizer: `2 * maxdev * sfactor + 1` segments of width
/// `sigma / sfactor`, truncating absolute values above `maxdev * sigma`.
/// Defaults (3, 3) give 19 bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuantizerConfig {
    /// Bins per standard deviation.
    pub sfactor: u32,
    /// Truncation radius in standard deviations.
    pub maxdev: u32,
}

impl Default for QuantizerConfig {
    fn default() -> Self {
        QuantizerConfig {
            sfactor: 3,
            maxdev: 3,
        }
    }
}

impl QuantizerConfig {
    pub fn new(sfactor: u32, maxdev: u32) -> Result<Self> {
        if sfactor == 0 || maxdev == 0 {
            return Err(Error::Config(
                "sfactor and maxdev must be positive".to_string(),
            ));
        }
        Ok(QuantizerConfig { sfactor, maxdev })
    }

    /// Total number of bins, `2 * maxdev * sfactor + 1`.
    pub fn bin_count(&self) -> usize {
        (2 * self.maxdev * self.sfactor + 1) as usize
    }
}

/// Zero-mean, unit-variance normalization using the population (1/N)
/// variance. Constant input maps to all zeros rather than erroring so the
/// pipeline always emits a full feature vector.
pub fn normalize(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    if !(sd > 0.0) || !sd.is_finite() {
        return vec![0.0; n];
    }
    values.iter().map(|v| (v - mean) / sd).collect()
}

/// Bin index for a single normalized value: nearest-integer rounding of
/// `x * sfactor` (half away from zero), clamped to `[-maxdev*sfactor,
/// +maxdev*sfactor]`, then shifted to a non-negative index.
pub fn quantize_value(x: f64, cfg: &QuantizerConfig) -> u32 {
    let lim = (cfg.maxdev * cfg.sfactor) as f64;
    let r = (x * cfg.sfactor as f64).round().clamp(-lim, lim);
    (r + lim) as u32
}

/// Quantize a normalized numerical variable to discrete bin indices in
/// `[0, 2 * maxdev * sfactor]`.
pub fn quantize(values: &[f64], cfg: &QuantizerConfig) -> Vec<u32> {
    values.iter().map(|&x| quantize_value(x, cfg)).collect()
}

/// Rename categories to `0..M-1` in order of non-increasing empirical
/// probability; ties are broken by the original code ascending. Input values
/// are exact category codes (compared bitwise after -0.0 normalization).
pub fn relabel(values: &[f64]) -> Vec<u32> {
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &v in values {
        *counts.entry(code_bits(v)).or_insert(0) += 1;
    }
    let mut order: Vec<(u64, u64)> = counts.into_iter().collect();
    order.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then_with(|| f64::from_bits(a.0).total_cmp(&f64::from_bits(b.0)))
    });
    let mapping: HashMap<u64, u32> = order
        .iter()
        .enumerate()
        .map(|(new, (bits, _))| (*bits, new as u32))
        .collect();
    values.iter().map(|&v| mapping[&code_bits(v)]).collect()
}

fn code_bits(v: f64) -> u64 {
    // fold -0.0 onto 0.0 so equal codes always share a key
    if v == 0.0 {
        0.0f64.to_bits()
    } else {
        v.to_bits()
    }
}

/// The y-side of a conditional table: raw numerical observations (already
/// globally normalized) or categorical codes.
#[derive(Debug, Clone, Copy)]
pub enum CondTarget<'a> {
    Numerical(&'a [f64]),
    Categorical(&'a [u32]),
}

/// One x-group of a [`ConditionalTable`].
#[derive(Debug, Clone)]
pub struct ConditionalGroup {
    pub key: u32,
    pub count: usize,
    /// Probability vector over y bins after per-group preprocessing
    /// (denominator `n_x`). Numerical y: fixed quantizer-bin length.
    /// Categorical y: sorted non-increasing, natural support length.
    pub probs: Vec<f64>,
}

/// Conditional distributions of y for each observed x value.
#[derive(Debug, Clone)]
pub struct ConditionalTable {
    /// Groups in ascending x-key order.
    pub groups: Vec<ConditionalGroup>,
    /// Common probability-vector length: the quantizer bin count for
    /// numerical y, the maximum group support for categorical y.
    pub bin_count: usize,
    pub n: usize,
}

/// Group y observations by discrete x value. For numerical y, each group is
/// shifted to zero mean and quantized with `cfg` against the global unit
/// sigma (y must be globally normalized). For categorical y, each group's
/// probability vector is sorted in non-increasing order.
pub fn conditional_table(x: &[u32], y: CondTarget<'_>, cfg: &QuantizerConfig) -> ConditionalTable {
    let n = x.len();
    let member_indices = group_indices(x);
    let mut groups = Vec::with_capacity(member_indices.len());
    let mut max_support = 0usize;

    for (key, idxs) in member_indices {
        let count = idxs.len();
        let probs = match y {
            CondTarget::Numerical(ys) => {
                let mean = idxs.iter().map(|&i| ys[i]).sum::<f64>() / count as f64;
                let mut bins = vec![0u64; cfg.bin_count()];
                for &i in &idxs {
                    bins[quantize_value(ys[i] - mean, cfg) as usize] += 1;
                }
                bins.iter()
                    .map(|&c| c as f64 / count as f64)
                    .collect::<Vec<f64>>()
            }
            CondTarget::Categorical(ys) => {
                let mut counts: HashMap<u32, u64> = HashMap::new();
                for &i in &idxs {
                    *counts.entry(ys[i]).or_insert(0) += 1;
                }
                let mut c: Vec<u64> = counts.into_values().collect();
                c.sort_unstable_by(|a, b| b.cmp(a));
                c.iter()
                    .map(|&c| c as f64 / count as f64)
                    .collect::<Vec<f64>>()
            }
        };
        max_support = max_support.max(probs.len());
        groups.push(ConditionalGroup { key, count, probs });
    }

    let bin_count = match y {
        CondTarget::Numerical(_) => cfg.bin_count(),
        CondTarget::Categorical(_) => max_support,
    };
    ConditionalTable {
        groups,
        bin_count,
        n,
    }
}

/// Indices of the samples in each x-group, keyed and sorted by x value.
pub(crate) fn group_indices(x: &[u32]) -> Vec<(u32, Vec<usize>)> {
    let mut map: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, &k) in x.iter().enumerate() {
        map.entry(k).or_default().push(i);
    }
    let mut out: Vec<(u32, Vec<usize>)> = map.into_iter().collect();
    out.sort_unstable_by_key(|(k, _)| *k);
    out
}
