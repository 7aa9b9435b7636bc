//! The challenge's bidirectional AUC: the mean of AUC(+1 vs rest) on the
//! score and AUC(-1 vs rest) on the negated score, computed by the rank
//! statistic with ties contributing one half.

use std::collections::HashMap;

use crate::data::TernaryLabel;
use crate::error::{Error, Result};

/// One scored pair: sign encodes direction, magnitude confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub id: String,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AucTriple {
    /// AUC of the score for class +1 vs {0, -1}.
    pub forward: f64,
    /// AUC of the negated score for class -1 vs {0, +1}.
    pub backward: f64,
    /// Mean of the two.
    pub mean: f64,
}

/// Rank-statistic AUC with midranks for ties. `positive[i]` marks the
/// positive instances.
fn rank_auc(scores: &[f64], positive: &[bool], subproblem: &str) -> Result<f64> {
    let n = scores.len();
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateAuc {
            subproblem: subproblem.to_string(),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));
    let mut rank_sum_pos = 0.0f64;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // midrank of the tie block [i, j], 1-based ranks
        let midrank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if positive[idx] {
                rank_sum_pos += midrank;
            }
        }
        i = j + 1;
    }
    let n_pos_f = n_pos as f64;
    Ok((rank_sum_pos - n_pos_f * (n_pos_f + 1.0) / 2.0) / (n_pos_f * n_neg as f64))
}

/// Bidirectional AUC over aligned scores and labels.
pub fn bidirectional_auc(scores: &[f64], labels: &[TernaryLabel]) -> Result<AucTriple> {
    if scores.len() != labels.len() {
        return Err(Error::Config(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let pos_fwd: Vec<bool> = labels.iter().map(|&l| l == TernaryLabel::FORWARD).collect();
    let forward = rank_auc(scores, &pos_fwd, "forward (+1 vs rest)")?;
    let neg_scores: Vec<f64> = scores.iter().map(|s| -s).collect();
    let pos_bwd: Vec<bool> = labels
        .iter()
        .map(|&l| l == TernaryLabel::BACKWARD)
        .collect();
    let backward = rank_auc(&neg_scores, &pos_bwd, "backward (-1 vs rest)")?;
    Ok(AucTriple {
        forward,
        backward,
        mean: (forward + backward) / 2.0,
    })
}

/// Join predictions to ground truth by id; both sides must cover exactly the
/// same ids. Output order follows the predictions.
pub fn join_by_id(
    preds: &[Prediction],
    targets: &HashMap<String, TernaryLabel>,
) -> Result<(Vec<f64>, Vec<TernaryLabel>)> {
    let mut scores = Vec::with_capacity(preds.len());
    let mut labels = Vec::with_capacity(preds.len());
    let mut seen = std::collections::HashSet::new();
    for p in preds {
        if !seen.insert(p.id.clone()) {
            return Err(Error::DuplicateId { id: p.id.clone() });
        }
        let label = targets
            .get(&p.id)
            .copied()
            .ok_or_else(|| Error::UnmatchedId {
                id: p.id.clone(),
                present: "predictions".to_string(),
                missing: "target".to_string(),
            })?;
        scores.push(p.score);
        labels.push(label);
    }
    if let Some(extra) = targets.keys().find(|id| !seen.contains(*id)) {
        return Err(Error::UnmatchedId {
            id: extra.clone(),
            present: "target".to_string(),
            missing: "predictions".to_string(),
        });
    }
    Ok((scores, labels))
}

/// Brute-force pairwise AUC oracle: wins plus half-ties over all
/// positive x negative pairs. Kept alongside the rank implementation for
/// tests; both must agree exactly, ties included.
pub fn pairwise_auc_oracle(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let pos: Vec<f64> = scores
        .iter()
        .zip(positive)
        .filter(|(_, &p)| p)
        .map(|(&s, _)| s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(positive)
        .filter(|(_, &p)| !p)
        .map(|(&s, _)| s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return None;
    }
    let mut num = 0.0f64;
    for &p in &pos {
        for &q in &neg {
            if p > q {
                num += 1.0;
            } else if p == q {
                num += 0.5;
            }
        }
    }
    Some(num / (pos.len() as f64 * neg.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(vals: &[i8]) -> Vec<TernaryLabel> {
        vals.iter()
            .map(|&v| TernaryLabel::new(v).unwrap())
            .collect()
    }

    #[test]
    fn perfect_scores_give_ones() {
        let l = labels(&[1, 0, -1, 1, -1, 0]);
        let s: Vec<f64> = l.iter().map(|v| v.value() as f64).collect();
        let auc = bidirectional_auc(&s, &l).unwrap();
        assert_eq!(auc.forward, 1.0);
        assert_eq!(auc.backward, 1.0);
        assert_eq!(auc.mean, 1.0);
    }

    #[test]
    fn negated_scores_give_zeros() {
        let l = labels(&[1, 0, -1, 1, -1, 0]);
        let s: Vec<f64> = l.iter().map(|v| -(v.value() as f64)).collect();
        let auc = bidirectional_auc(&s, &l).unwrap();
        assert_eq!(auc.forward, 0.0);
        assert_eq!(auc.backward, 0.0);
    }

    #[test]
    fn constant_scores_give_half() {
        let l = labels(&[1, 0, -1, 1]);
        let s = vec![0.25; 4];
        let auc = bidirectional_auc(&s, &l).unwrap();
        assert_eq!(auc.forward, 0.5);
        assert_eq!(auc.backward, 0.5);
        assert_eq!(auc.mean, 0.5);
    }

    #[test]
    fn degenerate_composition_names_subproblem() {
        let l = labels(&[0, 0, -1]);
        let err = bidirectional_auc(&[0.1, 0.2, 0.3], &l).unwrap_err();
        assert!(err.to_string().contains("forward"));
    }

    #[test]
    fn matches_pairwise_oracle_with_ties() {
        let mut s = 7u64;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let n = 3 + (next() * 40.0) as usize;
            // quantized scores force plenty of ties
            let scores: Vec<f64> = (0..n).map(|_| (next() * 5.0).floor() / 5.0).collect();
            let positive: Vec<bool> = (0..n).map(|_| next() < 0.4).collect();
            if !positive.iter().any(|&p| p) || positive.iter().all(|&p| p) {
                continue;
            }
            let fast = rank_auc(&scores, &positive, "t").unwrap();
            let oracle = pairwise_auc_oracle(&scores, &positive).unwrap();
            assert_eq!(
                fast.to_bits(),
                oracle.to_bits(),
                "fast {fast} oracle {oracle}"
            );
        }
    }

    #[test]
    fn join_requires_exact_id_cover() {
        let preds = vec![
            Prediction {
                id: "a".to_string(),
                score: 0.5,
            },
            Prediction {
                id: "b".to_string(),
                score: -0.5,
            },
        ];
        let mut targets = HashMap::new();
        targets.insert("a".to_string(), TernaryLabel::FORWARD);
        targets.insert("b".to_string(), TernaryLabel::BACKWARD);
        let (s, l) = join_by_id(&preds, &targets).unwrap();
        assert_eq!(s, vec![0.5, -0.5]);
        assert_eq!(l, labels(&[1, -1]));

        targets.insert("c".to_string(), TernaryLabel::NONE);
        assert!(join_by_id(&preds, &targets).is_err());
    }
}
