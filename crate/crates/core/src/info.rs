//! Discrete entropy with the Miller bias correction, joint and conditional
//! entropies, mutual information with two normalizations, adjusted mutual
//! information under the hypergeometric permutation model, and m-spacing
//! differential entropy with the Gaussian/uniform divergences derived from it.
//!
//! All logarithms are natural. Entropy sums run over counts sorted in
//! descending order so that symmetric quantities (joint entropy, MI, AMI) are
//! bitwise identical when the arguments are exchanged.

use std::collections::HashMap;

const HALF_LN_TWO_PI_E: f64 = 1.4189385332046727;
const MIN_SPACING: f64 = 1e-12;

fn counts_desc(codes: &[u32]) -> Vec<u64> {
    let mut map: HashMap<u32, u64> = HashMap::new();
    for &c in codes {
        *map.entry(c).or_insert(0) += 1;
    }
    let mut counts: Vec<u64> = map.into_values().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts
}

fn joint_counts_desc(x: &[u32], y: &[u32]) -> Vec<u64> {
    debug_assert_eq!(x.len(), y.len());
    let mut map: HashMap<(u32, u32), u64> = HashMap::new();
    for (&a, &b) in x.iter().zip(y) {
        *map.entry((a, b)).or_insert(0) += 1;
    }
    let mut counts: Vec<u64> = map.into_values().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts
}

/// Plug-in entropy over pre-sorted counts; `n` is the sample size.
fn plugin_entropy(counts: &[u64], n: usize) -> f64 {
    let nf = n as f64;
    let mut h = 0.0;
    for &c in counts {
        let p = c as f64 / nf;
        h -= p * p.ln();
    }
    h
}

fn miller_entropy(counts: &[u64], n: usize) -> f64 {
    plugin_entropy(counts, n) + (counts.len() as f64 - 1.0) / (2.0 * n as f64)
}

/// A discrete entropy value together with the support and sample sizes that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    pub nats: f64,
    /// Number of distinct observed values (M).
    pub support_size: usize,
    pub sample_size: usize,
}

pub fn discrete_entropy_estimate(codes: &[u32]) -> EntropyEstimate {
    if codes.is_empty() {
        return EntropyEstimate {
            nats: 0.0,
            support_size: 0,
            sample_size: 0,
        };
    }
    let counts = counts_desc(codes);
    EntropyEstimate {
        nats: miller_entropy(&counts, codes.len()),
        support_size: counts.len(),
        sample_size: codes.len(),
    }
}

/// Miller-corrected discrete entropy: `-sum (n_x/N) ln(n_x/N) + (M-1)/(2N)`.
pub fn discrete_entropy(codes: &[u32]) -> f64 {
    discrete_entropy_estimate(codes).nats
}

/// Discrete entropy divided by `ln(N)`, the maximum entropy of a variable
/// with `N` distinct values. May exceed 1 when all values are distinct.
/// Returns 0 for `N < 2`.
pub fn normalized_entropy(codes: &[u32]) -> f64 {
    if codes.len() < 2 {
        return 0.0;
    }
    discrete_entropy(codes) / (codes.len() as f64).ln()
}

/// Miller-corrected entropy over joint `(x, y)` value pairs.
pub fn joint_entropy(x: &[u32], y: &[u32]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    miller_entropy(&joint_counts_desc(x, y), x.len())
}

/// `H(Y|X) = H(Y,X) - H(X)`. May be slightly negative because of the bias
/// corrections; returned as-is.
pub fn conditional_entropy(y: &[u32], x: &[u32]) -> f64 {
    joint_entropy(x, y) - discrete_entropy(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInformation {
    /// `H(X) + H(Y) - H(X,Y)` from Miller-corrected entropies. Can be
    /// slightly negative (correction artifact).
    pub mi: f64,
    /// Normalized by the joint entropy; 0 when the denominator is 0.
    pub joint_normalized: f64,
    /// Normalized by the minimum marginal entropy; 0 when the denominator is 0.
    pub min_normalized: f64,
}

pub fn mutual_information(x: &[u32], y: &[u32]) -> MutualInformation {
    let hx = discrete_entropy(x);
    let hy = discrete_entropy(y);
    let hxy = joint_entropy(x, y);
    let mi = (hx + hy) - hxy;
    let joint_normalized = if hxy == 0.0 { 0.0 } else { mi / hxy };
    let den = hx.min(hy);
    let min_normalized = if den == 0.0 { 0.0 } else { mi / den };
    MutualInformation {
        mi,
        joint_normalized,
        min_normalized,
    }
}

/// Adjusted mutual information:
/// `(I - E[I]) / (max(H(X), H(Y)) - E[I])`
/// with plug-in (uncorrected) entropies and the exact expected mutual
/// information of the contingency table under the hypergeometric permutation
/// model. Returns 0 when the denominator is 0.
pub fn adjusted_mutual_information(x: &[u32], y: &[u32]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n == 0 {
        return 0.0;
    }
    let cx = counts_desc(x);
    let cy = counts_desc(y);
    let hx = plugin_entropy(&cx, n);
    let hy = plugin_entropy(&cy, n);
    let hxy = plugin_entropy(&joint_counts_desc(x, y), n);
    let mi = (hx + hy) - hxy;
    let emi = expected_mutual_information(&cx, &cy, n);
    let den = hx.max(hy) - emi;
    if den == 0.0 {
        return 0.0;
    }
    (mi - emi) / den
}

/// Exact `E[I]` over all contingency tables with the given margins under the
/// hypergeometric model. Cell terms are accumulated in sorted order so the
/// result is bitwise symmetric in the two margin sets.
pub(crate) fn expected_mutual_information(row_counts: &[u64], col_counts: &[u64], n: usize) -> f64 {
    let nf = n as f64;
    // log-factorials 0..=n
    let mut lf = vec![0.0f64; n + 1];
    for k in 1..=n {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    let mut terms: Vec<f64> = Vec::with_capacity(row_counts.len() * col_counts.len());
    for &ai in row_counts {
        let ai = ai as usize;
        let s_a = lf[ai] + lf[n - ai];
        for &bj in col_counts {
            let bj = bj as usize;
            let s_b = lf[bj] + lf[n - bj];
            let lo = 1.max((ai + bj).saturating_sub(n));
            let hi = ai.min(bj);
            let mut cell = 0.0;
            for nij in lo..=hi {
                let rest = n + nij - ai - bj;
                let log_w =
                    ((s_a + s_b) - lf[n]) - ((lf[nij] + lf[rest]) + (lf[ai - nij] + lf[bj - nij]));
                let ratio = (nf * nij as f64) / ((ai as u64 * bj as u64) as f64);
                cell += (nij as f64 / nf) * ratio.ln() * log_w.exp();
            }
            terms.push(cell);
        }
    }
    terms.sort_unstable_by(|a, b| a.total_cmp(b));
    terms.iter().sum()
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// m-spacing differential entropy estimate with `m = round(sqrt(N))`:
/// `(1/(N-m)) * sum ln((N+1)/m * (x_(i+m) - x_(i)))`,
/// spacings floored at 1e-12. Returns 0 for `N < 4` and for constant input
/// (degenerate-zero policy).
pub fn differential_entropy(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 4 || is_constant(values) {
        return 0.0;
    }
    let m = (n as f64).sqrt().round() as usize;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let scale = (n as f64 + 1.0) / m as f64;
    let mut sum = 0.0;
    for i in 0..(n - m) {
        let spacing = (sorted[i + m] - sorted[i]).max(MIN_SPACING);
        sum += (scale * spacing).ln();
    }
    sum / (n - m) as f64
}

/// `H(X) - 0.5 ln(2*pi*e)`: the differential entropy minus the entropy of a
/// standard Gaussian. Expects an already normalized variable; constant input
/// returns 0.
pub fn gaussian_divergence(values: &[f64]) -> f64 {
    if is_constant(values) {
        return 0.0;
    }
    differential_entropy(values) - HALF_LN_TWO_PI_E
}

/// Differential entropy after normalizing the sample range to `[0, 1]`.
/// Constant input returns 0.
pub fn uniform_divergence(values: &[f64]) -> f64 {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !(max > min) {
        return 0.0;
    }
    let range = max - min;
    let scaled: Vec<f64> = values.iter().map(|&v| (v - min) / range).collect();
    differential_entropy(&scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn entropy_of_constant_is_zero() {
        assert_eq!(discrete_entropy(&[3, 3, 3]), 0.0);
        let est = discrete_entropy_estimate(&[3, 3, 3]);
        assert_eq!((est.support_size, est.sample_size), (1, 3));
    }

    #[test]
    fn entropy_balanced_pair() {
        let h = discrete_entropy(&[0, 0, 1, 1]);
        assert!((h - (LN2 + 0.125)).abs() < 1e-12);
        assert!((h - 0.8181471805599453).abs() < 1e-9);
    }

    #[test]
    fn entropy_all_distinct() {
        let h = discrete_entropy(&[0, 1, 2, 3]);
        assert!((h - (4.0f64.ln() + 0.375)).abs() < 1e-12);
        assert!((h - 1.7612943611198906).abs() < 1e-9);
    }

    #[test]
    fn normalized_entropy_examples() {
        assert_eq!(normalized_entropy(&[5, 5, 5]), 0.0);
        let hn = normalized_entropy(&[0, 0, 1, 1]);
        assert!((hn - (LN2 + 0.125) / 4.0f64.ln()).abs() < 1e-12);
        // M == N exceeds 1; documented, not an error
        assert!(normalized_entropy(&[0, 1, 2, 3]) > 1.0);
    }

    #[test]
    fn joint_entropy_degenerate_cases() {
        let x = [0u32, 0, 1, 1, 2];
        assert_eq!(joint_entropy(&x, &x), discrete_entropy(&x));
        let c = [7u32; 5];
        assert_eq!(joint_entropy(&c, &x), discrete_entropy(&x));
        // balanced independent bits, N=4
        let h = joint_entropy(&[0, 0, 1, 1], &[0, 1, 0, 1]);
        assert!((h - (4.0f64.ln() + 0.375)).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_examples() {
        let x = [0u32, 0, 1, 1];
        assert_eq!(conditional_entropy(&x, &x), 0.0);
        let c = [2u32; 4];
        assert_eq!(conditional_entropy(&x, &c), discrete_entropy(&x));
        // deterministic function of x with matching joint support: residue only
        let xs = [0u32, 0, 1, 1, 2, 2];
        let ys = [0u32, 0, 0, 0, 1, 1];
        let resid = conditional_entropy(&ys, &xs);
        assert!(resid.abs() < 1e-12);
    }

    #[test]
    fn mutual_information_examples() {
        let x = [0u32, 0, 1, 1];
        let mi = mutual_information(&x, &x);
        assert!((mi.mi - (LN2 + 0.125)).abs() < 1e-12);

        let ind = mutual_information(&[0, 0, 1, 1], &[0, 1, 0, 1]);
        assert!((ind.mi + 0.125).abs() < 1e-12);

        let c = [5u32; 4];
        let zero = mutual_information(&c, &x);
        assert_eq!(zero.mi, 0.0);
        assert_eq!(zero.joint_normalized, 0.0);
        assert_eq!(zero.min_normalized, 0.0);
    }

    #[test]
    fn mi_is_bitwise_symmetric() {
        let x = [0u32, 1, 2, 0, 1, 2, 2, 2, 0];
        let y = [4u32, 4, 1, 1, 0, 0, 4, 1, 0];
        let ab = mutual_information(&x, &y);
        let ba = mutual_information(&y, &x);
        assert_eq!(ab.mi.to_bits(), ba.mi.to_bits());
        assert_eq!(ab.joint_normalized.to_bits(), ba.joint_normalized.to_bits());
        assert_eq!(
            joint_entropy(&x, &y).to_bits(),
            joint_entropy(&y, &x).to_bits()
        );
    }

    #[test]
    fn ami_perfect_agreement_is_one() {
        let x = [0u32, 0, 1, 1, 2];
        assert_eq!(adjusted_mutual_information(&x, &x), 1.0);
        // bijective relabeling keeps it at 1
        let y = [5u32, 5, 3, 3, 9];
        assert_eq!(adjusted_mutual_information(&x, &y), 1.0);
    }

    #[test]
    fn ami_constant_marginal_is_zero() {
        let c = [1u32; 6];
        let y = [0u32, 1, 0, 1, 2, 2];
        assert_eq!(adjusted_mutual_information(&c, &y), 0.0);
    }

    /// Exhaustive permutation oracle: expected plug-in MI over all N!
    /// relabelings of y, compared against the hypergeometric closed form.
    fn permutation_emi_oracle(x: &[u32], y: &[u32]) -> f64 {
        fn permutations(v: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
            if k == v.len() {
                out.push(v.clone());
                return;
            }
            for i in k..v.len() {
                v.swap(k, i);
                permutations(v, k + 1, out);
                v.swap(k, i);
            }
        }
        let mut perms = Vec::new();
        permutations(&mut y.to_vec(), 0, &mut perms);
        let n = x.len();
        let total: f64 = perms
            .iter()
            .map(|p| {
                let hx = plugin_entropy(&counts_desc(x), n);
                let hy = plugin_entropy(&counts_desc(p), n);
                let hxy = plugin_entropy(&joint_counts_desc(x, p), n);
                hx + hy - hxy
            })
            .sum();
        total / perms.len() as f64
    }

    #[test]
    fn emi_matches_permutation_oracle_2x2() {
        let x = [0u32, 0, 1, 1];
        let y = [0u32, 1, 0, 1];
        let emi = expected_mutual_information(&counts_desc(&x), &counts_desc(&y), 4);
        let oracle = permutation_emi_oracle(&x, &y);
        assert!((emi - oracle).abs() < 1e-12, "{emi} vs {oracle}");
        // E[I] = ln(2)/3 for balanced 2x2 margins at N=4
        assert!((emi - LN2 / 3.0).abs() < 1e-12);
        // AMI = (0 - ln2/3) / (ln2 - ln2/3) = -1/2
        let ami = adjusted_mutual_information(&x, &y);
        assert!((ami + 0.5).abs() < 1e-12);
    }

    #[test]
    fn emi_matches_permutation_oracle_2x3() {
        let x = [0u32, 0, 0, 1, 1, 1];
        let y = [0u32, 1, 2, 2, 1, 1];
        let emi = expected_mutual_information(&counts_desc(&x), &counts_desc(&y), 6);
        let oracle = permutation_emi_oracle(&x, &y);
        assert!((emi - oracle).abs() < 1e-12, "{emi} vs {oracle}");
    }

    #[test]
    fn ami_bitwise_symmetric() {
        let x = [0u32, 0, 1, 2, 2, 1, 0, 1];
        let y = [1u32, 0, 0, 1, 1, 1, 0, 0];
        assert_eq!(
            adjusted_mutual_information(&x, &y).to_bits(),
            adjusted_mutual_information(&y, &x).to_bits()
        );
    }

    #[test]
    fn differential_entropy_small_n_is_zero() {
        assert_eq!(differential_entropy(&[1.0, 2.0, 3.0]), 0.0);
    }

    #[test]
    fn differential_entropy_scaling_law() {
        // H(s*X) = H(X) + ln(s)
        let mut rng = 123456789u64;
        let mut next = || {
            rng = rng
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (rng >> 11) as f64 / (1u64 << 53) as f64
        };
        let xs: Vec<f64> = (0..10_000).map(|_| next()).collect();
        let scaled: Vec<f64> = xs.iter().map(|v| v * 7.5).collect();
        let diff = differential_entropy(&scaled) - differential_entropy(&xs);
        assert!((diff - 7.5f64.ln()).abs() < 0.05, "diff {diff}");
    }

    #[test]
    fn uniform_divergence_constant_is_zero() {
        assert_eq!(uniform_divergence(&[2.0; 10]), 0.0);
    }

    #[test]
    fn gaussian_divergence_constant_is_zero() {
        assert_eq!(gaussian_divergence(&[0.0; 10]), 0.0);
    }

    fn lcg_uniforms(seed: u64, n: usize) -> Vec<f64> {
        let mut s = seed;
        (0..n)
            .map(|_| {
                s = s
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect()
    }

    #[test]
    fn gaussian_divergence_of_unit_variance_uniform() {
        // uniform with sd 1 has differential entropy ln(sqrt(12)), so the
        // divergence is ln(sqrt(12)) - 0.5 ln(2 pi e) ~ -0.1765
        let half_width = 3.0f64.sqrt();
        let v: Vec<f64> = lcg_uniforms(99, 10_000)
            .iter()
            .map(|u| (2.0 * u - 1.0) * half_width)
            .collect();
        let expected = 12.0f64.sqrt().ln() - HALF_LN_TWO_PI_E;
        let got = gaussian_divergence(&v);
        assert!((got - expected).abs() < 0.05, "{got} vs {expected}");
        assert!((expected + 0.1765).abs() < 1e-3);
    }

    #[test]
    fn uniform_divergence_of_uniform_is_near_zero() {
        let v = lcg_uniforms(7, 10_000);
        assert!(uniform_divergence(&v).abs() < 0.05);
    }

    #[test]
    fn uniform_divergence_of_triangular_is_negative() {
        // symmetric triangular on [0,1]: entropy 1/2 - ln 2 ~ -0.1931
        let u1 = lcg_uniforms(11, 10_000);
        let u2 = lcg_uniforms(13, 10_000);
        let v: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| (a + b) / 2.0).collect();
        let got = uniform_divergence(&v);
        assert!((got - (0.5 - LN2)).abs() < 0.05, "{got}");
        assert!(got < -0.1);
    }
}
