//! Property tests for the pipeline's invariants: quantization bounds,
//! relabeling invariance, information-measure symmetries, the Miller
//! correction identity, metric agreement with the pairwise oracle, and the
//! swap permutation of extracted features.

use proptest::prelude::*;

use paircause_core::data::{Pair, TernaryLabel, Variable, FEATURE_COUNT};
use paircause_core::ensemble::{combine, scheme_scores};
use paircause_core::features::{extract, swap_permuted, FEATURE_NAMES};
use paircause_core::info;
use paircause_core::metrics::{bidirectional_auc, pairwise_auc_oracle};
use paircause_core::misc;
use paircause_core::preprocess::{quantize, relabel, QuantizerConfig};

fn codes(max_support: u32, len: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..max_support, len..=len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quantize_stays_in_range(values in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let cfg = QuantizerConfig::default();
        let max_bin = 2 * cfg.maxdev * cfg.sfactor;
        for b in quantize(&values, &cfg) {
            prop_assert!(b <= max_bin);
        }
    }

    #[test]
    fn relabel_is_invariant_under_bijective_renaming(
        raw in prop::collection::vec(0u32..5, 4..60),
        offset in 1u32..50,
    ) {
        // make counts tie-free by disambiguating with index-weighted codes
        let mut counts = std::collections::HashMap::new();
        for &c in &raw { *counts.entry(c).or_insert(0u32) += 1; }
        let mut freqs: Vec<u32> = counts.values().copied().collect();
        freqs.sort_unstable();
        freqs.dedup();
        prop_assume!(freqs.len() == counts.len()); // tie-free only

        let original: Vec<f64> = raw.iter().map(|&c| c as f64).collect();
        // order-scrambling bijection: c -> (c * 7 + offset) mod large
        let renamed: Vec<f64> = raw.iter().map(|&c| ((c * 7 + offset) % 97) as f64).collect();
        prop_assert_eq!(relabel(&original), relabel(&renamed));
    }

    #[test]
    fn mutual_information_is_symmetric_bitwise(
        x in codes(5, 40),
        y in codes(4, 40),
    ) {
        let ab = info::mutual_information(&x, &y);
        let ba = info::mutual_information(&y, &x);
        prop_assert_eq!(ab.mi.to_bits(), ba.mi.to_bits());
        prop_assert_eq!(ab.joint_normalized.to_bits(), ba.joint_normalized.to_bits());
        prop_assert_eq!(ab.min_normalized.to_bits(), ba.min_normalized.to_bits());
        prop_assert_eq!(
            info::joint_entropy(&x, &y).to_bits(),
            info::joint_entropy(&y, &x).to_bits()
        );
    }

    #[test]
    fn miller_correction_identity(
        x in codes(6, 50),
        y in codes(6, 50),
    ) {
        let n = x.len() as f64;
        // independent plug-in computation from raw maps
        let count = |v: &[u32]| -> (f64, f64) {
            let mut m = std::collections::BTreeMap::new();
            for &c in v { *m.entry(c).or_insert(0u64) += 1; }
            let h: f64 = m.values().map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            }).sum();
            (h, m.len() as f64)
        };
        let joint: Vec<u64> = x.iter().zip(&y).map(|(&a, &b)| (a as u64) << 32 | b as u64).collect();
        let count64 = |v: &[u64]| -> (f64, f64) {
            let mut m = std::collections::BTreeMap::new();
            for &c in v { *m.entry(c).or_insert(0u64) += 1; }
            let h: f64 = m.values().map(|&c| {
                let p = c as f64 / n;
                -p * p.ln()
            }).sum();
            (h, m.len() as f64)
        };
        let (hx, mx) = count(&x);
        let (hy, my) = count(&y);
        let (hxy, mxy) = count64(&joint);
        let plugin_mi = hx + hy - hxy;
        prop_assert!(plugin_mi >= -1e-12);
        let corrected = info::mutual_information(&x, &y).mi;
        let correction = (mx + my - mxy - 1.0) / (2.0 * n);
        prop_assert!((corrected - plugin_mi - correction).abs() <= 1e-12);
    }

    #[test]
    fn ami_invariant_under_relabeling(
        x in codes(4, 30),
        y in codes(4, 30),
        mult in 1u32..7,
        offset in 0u32..13,
    ) {
        let y2: Vec<u32> = y.iter().map(|&c| c * 29 * mult + offset).collect();
        let a1 = info::adjusted_mutual_information(&x, &y);
        let a2 = info::adjusted_mutual_information(&x, &y2);
        prop_assert!((a1 - a2).abs() <= 1e-12, "{} vs {}", a1, a2);
    }

    #[test]
    fn auc_matches_pairwise_oracle(
        raw in prop::collection::vec((0i8..3, 0u8..6), 4..120),
    ) {
        let labels: Vec<TernaryLabel> =
            raw.iter().map(|&(l, _)| TernaryLabel::new(l - 1).unwrap()).collect();
        // heavy quantization forces ties
        let scores: Vec<f64> = raw.iter().map(|&(_, s)| s as f64 / 5.0 - 0.5).collect();
        let has = |c: i8| labels.iter().any(|l| l.value() == c);
        prop_assume!(has(1) && has(-1) && labels.len() >= 3);

        let auc = bidirectional_auc(&scores, &labels).unwrap();
        let pos_fwd: Vec<bool> = labels.iter().map(|l| l.value() == 1).collect();
        let oracle_fwd = pairwise_auc_oracle(&scores, &pos_fwd).unwrap();
        prop_assert_eq!(auc.forward.to_bits(), oracle_fwd.to_bits());

        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let pos_bwd: Vec<bool> = labels.iter().map(|l| l.value() == -1).collect();
        let oracle_bwd = pairwise_auc_oracle(&neg, &pos_bwd).unwrap();
        prop_assert_eq!(auc.backward.to_bits(), oracle_bwd.to_bits());
    }

    #[test]
    fn igci_invariant_under_increasing_affine_maps(
        seed in 0u64..1000,
        scale in 0.01f64..100.0,
        shift in -50.0f64..50.0,
    ) {
        let mut s = seed.wrapping_mul(2654435761).wrapping_add(1);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let x: Vec<f64> = (0..80).map(|_| next()).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v + 0.1 * next()).collect();
        let base = misc::igci_slope(&x, &y);
        let mapped: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
        let transformed = misc::igci_slope(&mapped, &y);
        prop_assert!((base - transformed).abs() <= 1e-9, "{} vs {}", base, transformed);
    }

    #[test]
    fn combined_score_bounded(
        pa in 0.0f64..1.0,
        pb in 0.0f64..1.0,
        pd in 0.0f64..1.0,
        pi in 0.0f64..1.0,
        pp in 0.0f64..1.0,
        pn in 0.0f64..1.0,
    ) {
        // project (pa, pb) onto the 3-simplex
        let rest = (1.0 - pa).max(0.0);
        let p0 = rest * pb;
        let p1 = rest - p0;
        let s = scheme_scores([p0, p1, pa], [1.0 - pd, pd], pi, pp, pn);
        let v = combine(s, [1.0 / 3.0; 3]);
        prop_assert!((-1.0..=1.0).contains(&v), "{}", v);
    }
}

fn arbitrary_variable(seed: u64, len: usize, kind: u8) -> Variable {
    let mut s = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut next = || {
        s = s
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    match kind {
        0 => Variable::numerical((0..len).map(|_| next() * 4.0 - 2.0).collect()),
        1 => Variable::categorical((0..len).map(|_| (next() * 5.0).floor()).collect()),
        // near-degenerate numerical: few distinct values
        _ => Variable::numerical((0..len).map(|_| (next() * 3.0).floor() * 0.5).collect()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swap_permutation_is_exact(
        seed in 0u64..100_000,
        len in 20usize..120,
        kind_a in 0u8..3,
        kind_b in 0u8..3,
    ) {
        let cfg = QuantizerConfig::default();
        let pair = Pair::new(
            format!("prop{seed}"),
            arbitrary_variable(seed, len, kind_a),
            arbitrary_variable(seed.wrapping_add(17), len, kind_b),
        ).unwrap();
        let original = extract(&pair, &cfg).unwrap();
        let swapped = extract(&pair.swapped(), &cfg).unwrap();
        let permuted = swap_permuted(&original);
        for i in 0..FEATURE_COUNT {
            prop_assert_eq!(
                swapped.values[i].to_bits(),
                permuted.values[i].to_bits(),
                "slot {} ({})", i, FEATURE_NAMES[i]
            );
        }
        prop_assert!(original.values.iter().all(|v| v.is_finite()));
    }
}
