//! The 43-slot feature vector: preprocessing orchestration, the frozen
//! naming/ordering contract, the swap permutation, and batch extraction.
//!
//! Slot layout (0-based). Slots 0..21 are the baseline block; 21..35 the
//! statistics block; 35..43 the conditional-variability block.

use crate::data::{FeatureMatrix, FeatureVector, Pair, Variable, CONTRACT_VERSION, FEATURE_COUNT};
use crate::error::{Error, Result};
use crate::info;
use crate::misc;
use crate::preprocess::{self, CondTarget, QuantizerConfig};
use crate::variability;

/// Ordered names of the 43 feature slots.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "n_samples",
    "unique_count_a",
    "unique_count_b",
    "discrete_entropy_a",
    "discrete_entropy_b",
    "normalized_entropy_a",
    "normalized_entropy_b",
    "cond_entropy_b_given_a",
    "cond_entropy_a_given_b",
    "mutual_information",
    "mi_norm_joint",
    "mi_norm_min",
    "adjusted_mi",
    "gaussian_div_a",
    "gaussian_div_b",
    "uniform_div_a",
    "uniform_div_b",
    "igci_ab",
    "igci_ba",
    "hsic",
    "pearson_r",
    "skewness_a",
    "skewness_b",
    "kurtosis_a",
    "kurtosis_b",
    "moment21_ab",
    "moment21_ba",
    "moment31_ab",
    "moment31_ba",
    "error_prob_ab",
    "error_prob_ba",
    "poly_coef2_ab",
    "poly_coef2_ba",
    "poly_mse_ab",
    "poly_mse_ba",
    "cds_ab",
    "cds_ba",
    "entropy_spread_ab",
    "entropy_spread_ba",
    "skewness_spread_ab",
    "skewness_spread_ba",
    "kurtosis_spread_ab",
    "kurtosis_spread_ba",
];

/// Column indices of the 21-feature baseline block (counts, entropies, MI
/// family, divergences, IGCI, HSIC, Pearson).
pub const BASELINE_COLUMNS: [usize; 21] = [
    0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20,
];

/// `SWAP_PERMUTATION[i]` is the slot of the original vector that occupies
/// slot `i` after the pair's variables are exchanged. Symmetric slots map to
/// themselves; directional slot pairs exchange.
pub const SWAP_PERMUTATION: [usize; FEATURE_COUNT] = [
    0, // n_samples
    2, 1, // unique counts
    4, 3, // discrete entropy
    6, 5, // normalized entropy
    8, 7, // conditional entropy
    9, 10, 11, 12, // MI family + AMI (symmetric)
    14, 13, // gaussian divergence
    16, 15, // uniform divergence
    18, 17, // igci
    19, 20, // hsic, pearson (symmetric)
    22, 21, // skewness
    24, 23, // kurtosis
    26, 25, // moment21
    28, 27, // moment31
    30, 29, // error probability
    32, 31, // poly |c2|
    34, 33, // poly mse
    36, 35, // cds
    38, 37, // entropy spread
    40, 39, // skewness spread
    42, 41, // kurtosis spread
];

/// Versioned naming/ordering contract serialized alongside models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureContract {
    pub version: u32,
    pub names: &'static [&'static str; FEATURE_COUNT],
}

impl FeatureContract {
    pub fn current() -> Self {
        FeatureContract {
            version: CONTRACT_VERSION,
            names: &FEATURE_NAMES,
        }
    }
}

/// Apply the swap permutation to a feature vector: the result equals what
/// extraction on the swapped pair produces, exactly.
pub fn swap_permuted(fv: &FeatureVector) -> FeatureVector {
    let mut out = [0.0f64; FEATURE_COUNT];
    for (i, &src) in SWAP_PERMUTATION.iter().enumerate() {
        out[i] = fv.values[src];
    }
    FeatureVector::new(out)
}

/// Swap-permute every row of an extracted feature matrix.
pub fn swap_permuted_matrix(m: &FeatureMatrix) -> FeatureMatrix {
    assert_eq!(
        m.n_cols(),
        FEATURE_COUNT,
        "swap permutation applies to full contract rows"
    );
    let mut rows: Vec<FeatureVector> = Vec::with_capacity(m.n_rows());
    for i in 0..m.n_rows() {
        let mut vals = [0.0f64; FEATURE_COUNT];
        vals.copy_from_slice(m.row(i));
        rows.push(swap_permuted(&FeatureVector::new(vals)));
    }
    FeatureMatrix::from_feature_vectors(&rows)
}

/// Per-variable working representations shared by the feature computations.
struct VarRep {
    /// Normalized numeric values (relabeled codes for categoricals).
    numeric: Vec<f64>,
    /// Discrete codes: quantized bins for numericals, raw categories otherwise.
    disc: Vec<u32>,
    unique: usize,
    categorical: bool,
}

impl VarRep {
    fn build(v: &Variable, cfg: &QuantizerConfig) -> VarRep {
        let unique = misc::unique_count(&v.values);
        if v.kind.is_categorical() {
            let relabeled = preprocess::relabel(&v.values);
            let numeric =
                preprocess::normalize(&relabeled.iter().map(|&c| c as f64).collect::<Vec<f64>>());
            let disc = v
                .values
                .iter()
                .map(|&c| c.round().max(0.0) as u32)
                .collect();
            VarRep {
                numeric,
                disc,
                unique,
                categorical: true,
            }
        } else {
            let numeric = preprocess::normalize(&v.values);
            let disc = preprocess::quantize(&numeric, cfg);
            VarRep {
                numeric,
                disc,
                unique,
                categorical: false,
            }
        }
    }

    fn cond_target(&self) -> CondTarget<'_> {
        if self.categorical {
            CondTarget::Categorical(&self.disc)
        } else {
            CondTarget::Numerical(&self.numeric)
        }
    }
}

/// Features of a single direction x -> y.
struct Directional {
    error_prob: f64,
    cds: f64,
    entropy_spread: f64,
    skewness_spread: f64,
    kurtosis_spread: f64,
    poly_coef2: f64,
    poly_mse: f64,
    igci: f64,
}

fn directional(x: &VarRep, y: &VarRep, cfg: &QuantizerConfig) -> Directional {
    let (hs, ss, ks) = variability::conditional_moment_spreads(&x.disc, &y.disc, &y.numeric);
    let fit = misc::polyfit2(&x.numeric, &y.numeric);
    Directional {
        error_prob: variability::bayes_error_probability(&x.disc, y.cond_target(), cfg),
        cds: variability::cds(&x.disc, y.cond_target(), cfg),
        entropy_spread: hs,
        skewness_spread: ss,
        kurtosis_spread: ks,
        poly_coef2: fit.c2.abs(),
        poly_mse: fit.mse,
        igci: misc::igci_slope(&x.numeric, &y.numeric),
    }
}

/// Compute the 43 features for a pair. Directional measures are evaluated in
/// both orientations; symmetric measures once. Any non-finite intermediate is
/// replaced by 0 so the output is always fully finite.
pub fn extract(pair: &Pair, cfg: &QuantizerConfig) -> Result<FeatureVector> {
    let n = pair.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            id: pair.id.clone(),
            n,
        });
    }
    let a = VarRep::build(&pair.a, cfg);
    let b = VarRep::build(&pair.b, cfg);

    let mi = info::mutual_information(&a.disc, &b.disc);
    let h_a = info::discrete_entropy(&a.disc);
    let h_b = info::discrete_entropy(&b.disc);
    let h_ab = info::joint_entropy(&a.disc, &b.disc);
    let mom = misc::moments(&a.numeric, &b.numeric);
    let fwd = directional(&a, &b, cfg);
    let bwd = directional(&b, &a, cfg);
    let seed = misc::stable_id_hash(pair.base_id());

    let mut f = [0.0f64; FEATURE_COUNT];
    f[0] = n as f64;
    f[1] = a.unique as f64;
    f[2] = b.unique as f64;
    f[3] = h_a;
    f[4] = h_b;
    f[5] = info::normalized_entropy(&a.disc);
    f[6] = info::normalized_entropy(&b.disc);
    f[7] = h_ab - h_a;
    f[8] = h_ab - h_b;
    f[9] = mi.mi;
    f[10] = mi.joint_normalized;
    f[11] = mi.min_normalized;
    f[12] = info::adjusted_mutual_information(&a.disc, &b.disc);
    f[13] = info::gaussian_divergence(&a.numeric);
    f[14] = info::gaussian_divergence(&b.numeric);
    f[15] = info::uniform_divergence(&a.numeric);
    f[16] = info::uniform_divergence(&b.numeric);
    f[17] = fwd.igci;
    f[18] = bwd.igci;
    f[19] = misc::hsic(&a.numeric, &b.numeric, seed);
    f[20] = misc::pearson_r(&a.numeric, &b.numeric);
    f[21] = mom.skew_a;
    f[22] = mom.skew_b;
    f[23] = mom.kurt_a;
    f[24] = mom.kurt_b;
    f[25] = mom.m_ab2;
    f[26] = mom.m_a2b;
    f[27] = mom.m_ab3;
    f[28] = mom.m_a3b;
    f[29] = fwd.error_prob;
    f[30] = bwd.error_prob;
    f[31] = fwd.poly_coef2;
    f[32] = bwd.poly_coef2;
    f[33] = fwd.poly_mse;
    f[34] = bwd.poly_mse;
    f[35] = fwd.cds;
    f[36] = bwd.cds;
    f[37] = fwd.entropy_spread;
    f[38] = bwd.entropy_spread;
    f[39] = fwd.skewness_spread;
    f[40] = bwd.skewness_spread;
    f[41] = fwd.kurtosis_spread;
    f[42] = bwd.kurtosis_spread;

    for v in f.iter_mut() {
        if !v.is_finite() {
            *v = 0.0;
        }
    }
    Ok(FeatureVector::new(f))
}

/// Extract features for a batch of pairs, row i corresponding to pair i.
/// Deterministic and order-preserving; per-pair failures carry the pair id.
pub fn extract_batch(pairs: &[Pair], cfg: &QuantizerConfig) -> Result<FeatureMatrix> {
    let mut rows = Vec::with_capacity(pairs.len());
    for p in pairs {
        rows.push(extract(p, cfg)?);
    }
    Ok(FeatureMatrix::from_feature_vectors(&rows))
}
