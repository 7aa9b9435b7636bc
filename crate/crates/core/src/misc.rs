//! Sample counts, HSIC dependence statistic, slope-based IGCI, moments and
//! mixed moments, Pearson correlation, and the order-2 polynomial fit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Points beyond which HSIC runs on a deterministic stratified subsample.
pub const HSIC_MAX_POINTS: usize = 500;

/// Number of distinct values in a sequence.
pub fn unique_count(values: &[f64]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    sorted.dedup_by(|a, b| a == b);
    sorted.len()
}

/// (n, unique_a, unique_b) for a pair of aligned sequences.
pub fn sample_counts(a: &[f64], b: &[f64]) -> (usize, usize, usize) {
    (a.len(), unique_count(a), unique_count(b))
}

/// FNV-1a hash of a string; stable across platforms and versions, used to
/// seed per-pair subsampling.
pub(crate) fn stable_id_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for byte in s.as_bytes() {
        h ^= *byte as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Biased HSIC statistic `(1/n^2) trace(K H L H)` with Gaussian kernels on
/// each variable. Bandwidth is the median of the nonzero pairwise distances
/// (fallback 1.0 when all distances are zero). Above [`HSIC_MAX_POINTS`]
/// samples the statistic is computed on a stratified subsample chosen by a
/// ChaCha stream seeded from `seed`, so results are reproducible and
/// identical for a pair and its swapped copy.
pub fn hsic(x: &[f64], y: &[f64], seed: u64) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = if n > HSIC_MAX_POINTS {
        let idx = stratified_subsample(n, HSIC_MAX_POINTS, seed);
        (
            idx.iter().map(|&i| x[i]).collect(),
            idx.iter().map(|&i| y[i]).collect(),
        )
    } else {
        (x.to_vec(), y.to_vec())
    };
    let k = centered_gaussian_gram(&xs);
    let l = centered_gaussian_gram(&ys);
    let m = xs.len();
    let mut acc = 0.0;
    for i in 0..m * m {
        acc += k[i] * l[i];
    }
    acc / (m * m) as f64
}

/// One index per contiguous stratum of the input range, drawn from a seeded
/// ChaCha stream; output sorted ascending by construction.
fn stratified_subsample(n: usize, take: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(take);
    for k in 0..take {
        let lo = k * n / take;
        let hi = (k + 1) * n / take;
        out.push(rng.gen_range(lo..hi));
    }
    out
}

fn centered_gaussian_gram(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut dists: Vec<f64> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (v[i] - v[j]).abs();
            if d > 0.0 {
                dists.push(d);
            }
        }
    }
    let bw = median(&mut dists).unwrap_or(1.0);
    let denom = 2.0 * bw * bw;
    let mut k = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            let d = v[i] - v[j];
            k[i * n + j] = (-(d * d) / denom).exp();
        }
    }
    // double centering: K <- H K H with H = I - (1/n) 1 1^T
    let nf = n as f64;
    let mut row_means = vec![0.0f64; n];
    for i in 0..n {
        row_means[i] = k[i * n..(i + 1) * n].iter().sum::<f64>() / nf;
    }
    let grand = row_means.iter().sum::<f64>() / nf;
    for i in 0..n {
        for j in 0..n {
            k[i * n + j] = k[i * n + j] - row_means[i] - row_means[j] + grand;
        }
    }
    k
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_unstable_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

/// Slope-based IGCI score: both variables are range-normalized to `[0, 1]`,
/// the points sorted by (x, y), and the mean log-slope accumulated over
/// consecutive points with distinct x and `|dy| > 1e-12`. The divisor is
/// `N - 1` regardless of skipped terms; 0 when no term is valid.
pub fn igci_slope(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let xs = match range_normalize(x) {
        Some(v) => v,
        None => return 0.0,
    };
    let ys = match range_normalize(y) {
        Some(v) => v,
        None => return 0.0,
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]).then(ys[i].total_cmp(&ys[j])));
    let mut sum = 0.0;
    let mut any = false;
    for w in order.windows(2) {
        let dx = xs[w[1]] - xs[w[0]];
        let dy = (ys[w[1]] - ys[w[0]]).abs();
        if dx > 0.0 && dy > 1e-12 {
            sum += (dy / dx).ln();
            any = true;
        }
    }
    if !any {
        return 0.0;
    }
    sum / (n - 1) as f64
}

fn range_normalize(values: &[f64]) -> Option<Vec<f64>> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    if !(max > min) {
        return None;
    }
    let range = max - min;
    Some(values.iter().map(|&v| (v - min) / range).collect())
}

/// Per-variable standardized moments and the four mixed moments of a pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub skew_a: f64,
    pub skew_b: f64,
    pub kurt_a: f64,
    pub kurt_b: f64,
    /// E[a * b^2]
    pub m_ab2: f64,
    /// E[a^2 * b]
    pub m_a2b: f64,
    /// E[a * b^3]
    pub m_ab3: f64,
    /// E[a^3 * b]
    pub m_a3b: f64,
}

/// Standardized skewness/kurtosis per variable plus empirical mixed moments.
/// Inputs are expected normalized (categoricals relabeled then normalized).
pub fn moments(a: &[f64], b: &[f64]) -> Moments {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let mean = |v: &[f64], f: &dyn Fn(f64, f64) -> f64, w: &[f64]| -> f64 {
        v.iter().zip(w).map(|(&p, &q)| f(p, q)).sum::<f64>() / n
    };
    Moments {
        skew_a: crate::variability::standardized_moment(a, 3),
        skew_b: crate::variability::standardized_moment(b, 3),
        kurt_a: crate::variability::standardized_moment(a, 4),
        kurt_b: crate::variability::standardized_moment(b, 4),
        m_ab2: mean(a, &|p, q| p * (q * q), b),
        m_a2b: mean(b, &|q, p| (p * p) * q, a),
        m_ab3: mean(a, &|p, q| p * (q * q * q), b),
        m_a3b: mean(b, &|q, p| (p * p * p) * q, a),
    }
}

/// Sample Pearson correlation; 0 when either variable is constant. Clamped
/// to `[-1, 1]` against floating-point overshoot.
pub fn pearson_r(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    if x.is_empty() {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Least-squares quadratic fit `y ~ c0 + c1 x + c2 x^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyFit2 {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Mean squared residual.
    pub mse: f64,
}

/// Exact least squares via the 3x3 normal equations solved with partial
/// pivoting. Fewer than 3 distinct x values (or a singular system) falls back
/// to the degenerate fit (c0 = mean(y), c1 = c2 = 0, mse = var(y)).
pub fn polyfit2(x: &[f64], y: &[f64]) -> PolyFit2 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mean_y = y.iter().sum::<f64>() / n;
    let var_y = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum::<f64>() / n;
    let degenerate = PolyFit2 {
        c0: mean_y,
        c1: 0.0,
        c2: 0.0,
        mse: var_y,
    };
    if unique_count(x) < 3 {
        return degenerate;
    }
    let (mut s1, mut s2, mut s3, mut s4) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut sy, mut sxy, mut sx2y) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in x.iter().zip(y) {
        let a2 = a * a;
        s1 += a;
        s2 += a2;
        s3 += a2 * a;
        s4 += a2 * a2;
        sy += b;
        sxy += a * b;
        sx2y += a2 * b;
    }
    let mut m = [[n, s1, s2, sy], [s1, s2, s3, sxy], [s2, s3, s4, sx2y]];
    match solve3(&mut m) {
        Some([c0, c1, c2]) => {
            let mse = x
                .iter()
                .zip(y)
                .map(|(&a, &b)| {
                    let r = b - (c0 + c1 * a + c2 * a * a);
                    r * r
                })
                .sum::<f64>()
                / n;
            PolyFit2 { c0, c1, c2, mse }
        }
        None => degenerate,
    }
}

/// Gaussian elimination with partial pivoting on an augmented 3x4 system.
fn solve3(m: &mut [[f64; 4]; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, pivot);
        for row in (col + 1)..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut out = [0.0f64; 3];
    for col in (0..3).rev() {
        let mut v = m[col][3];
        for k in (col + 1)..3 {
            v -= m[col][k] * out[k];
        }
        out[col] = v / m[col][col];
    }
    Some(out)
}
