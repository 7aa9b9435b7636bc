//! Spread measures of the conditional distributions p(Y|X=x) across x: the
//! conditional-distribution standard deviation (CDS), the spreads of the
//! per-group entropy / skewness / kurtosis, and the Bayesian error
//! probability.

use crate::info::discrete_entropy;
use crate::preprocess::{conditional_table, group_indices, CondTarget, QuantizerConfig};

/// Per-x-group statistics backing the moment-spread features. Entries are
/// `None` when the group is below the minimum size for that statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub n: usize,
    /// Miller-corrected discrete entropy of the group (needs n >= 2).
    pub entropy: Option<f64>,
    /// Standardized skewness, population inner moments (needs n >= 3).
    pub skewness: Option<f64>,
    /// Raw fourth standardized moment, not excess (needs n >= 4).
    pub kurtosis: Option<f64>,
}

/// Root-mean over y bins of the across-group variance of the preprocessed
/// conditional probabilities. Groups are equally weighted; the across-group
/// variance is the unbiased (G-1) sample variance. Categorical-y probability
/// vectors are zero-padded to the longest support after sorting. Returns 0
/// with fewer than 2 x-groups.
pub fn cds(x: &[u32], y: CondTarget<'_>, cfg: &QuantizerConfig) -> f64 {
    let table = conditional_table(x, y, cfg);
    let g = table.groups.len();
    if g < 2 || table.bin_count == 0 {
        return 0.0;
    }
    let m = table.bin_count;
    let mut total = 0.0;
    for b in 0..m {
        let mean = table
            .groups
            .iter()
            .map(|gr| prob_at(gr.probs.as_slice(), b))
            .sum::<f64>()
            / g as f64;
        let ss = table
            .groups
            .iter()
            .map(|gr| {
                let d = prob_at(gr.probs.as_slice(), b) - mean;
                d * d
            })
            .sum::<f64>();
        total += ss / (g - 1) as f64;
    }
    (total / m as f64).sqrt()
}

fn prob_at(probs: &[f64], b: usize) -> f64 {
    probs.get(b).copied().unwrap_or(0.0)
}

/// Per-group entropy/skewness/kurtosis for the groups of `y` keyed by `x`.
/// `y_discrete` feeds the entropy (quantized bins or raw categories);
/// `y_numeric` feeds skewness and kurtosis (normalized values or relabeled
/// codes for categorical y).
pub fn group_stats(x: &[u32], y_discrete: &[u32], y_numeric: &[f64]) -> Vec<GroupStats> {
    group_indices(x)
        .into_iter()
        .map(|(_, idxs)| {
            let n = idxs.len();
            let entropy = (n >= 2).then(|| {
                let codes: Vec<u32> = idxs.iter().map(|&i| y_discrete[i]).collect();
                discrete_entropy(&codes)
            });
            let vals: Vec<f64> = idxs.iter().map(|&i| y_numeric[i]).collect();
            let skewness = (n >= 3).then(|| standardized_moment(&vals, 3));
            let kurtosis = (n >= 4).then(|| standardized_moment(&vals, 4));
            GroupStats {
                n,
                entropy,
                skewness,
                kurtosis,
            }
        })
        .collect()
}

/// (HS, SS, KS): the unbiased standard deviation across qualifying x-groups
/// of the per-group entropy, skewness, and kurtosis. Each component is 0 when
/// fewer than 2 groups qualify.
pub fn conditional_moment_spreads(
    x: &[u32],
    y_discrete: &[u32],
    y_numeric: &[f64],
) -> (f64, f64, f64) {
    let stats = group_stats(x, y_discrete, y_numeric);
    let hs = spread(stats.iter().filter_map(|s| s.entropy));
    let ss = spread(stats.iter().filter_map(|s| s.skewness));
    let ks = spread(stats.iter().filter_map(|s| s.kurtosis));
    (hs, ss, ks)
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let vals: Vec<f64> = values.collect();
    if vals.len() < 2 {
        return 0.0;
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let ss = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (ss / (n - 1.0)).sqrt()
}

/// k-th standardized central moment with population (1/n) inner moments.
/// Zero-variance input contributes 0.
pub(crate) fn standardized_moment(values: &[f64], k: u32) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(m2 > 0.0) {
        return 0.0;
    }
    let mk = values
        .iter()
        .map(|v| (v - mean).powi(k as i32))
        .sum::<f64>()
        / n;
    mk / m2.powf(k as f64 / 2.0)
}

/// Expected probability of mispredicting y from x when guessing the modal
/// bin of each conditional: `E_x[1 - max_b p(b|x)]`, expectation weighted by
/// the empirical p(x) = n_x / N.
pub fn bayes_error_probability(x: &[u32], y: CondTarget<'_>, cfg: &QuantizerConfig) -> f64 {
    let table = conditional_table(x, y, cfg);
    if table.n == 0 {
        return 0.0;
    }
    let nf = table.n as f64;
    table
        .groups
        .iter()
        .map(|g| {
            let max_p = g.probs.iter().cloned().fold(0.0, f64::max);
            (g.count as f64 / nf) * (1.0 - max_p)
        })
        .sum()
}
