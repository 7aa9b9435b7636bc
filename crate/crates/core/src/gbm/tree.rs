//! Depth-limited regression trees with exhaustive, deterministic split
//! search: every feature is scanned over candidate thresholds at the
//! midpoints of consecutive sorted distinct values; the best split maximizes
//! the squared-error reduction with ties broken by (lowest feature index,
//! lowest threshold). Feature columns are pre-sorted once per boosting fit
//! and partitioned down the tree, so each node costs O(features * n).

use serde::{Deserialize, Serialize};

const LEAF: u32 = u32::MAX;

/// A trained tree stored as flattened parallel arrays. `feature[i] == u32::MAX`
/// marks node `i` as a leaf whose prediction is `value[i]`; otherwise the node
/// routes `row[feature] <= threshold` to `left[i]`, else `right[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub feature: Vec<u32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    pub value: Vec<f64>,
}

/// Structured view of one node, for inspection and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

impl Tree {
    pub fn len(&self) -> usize {
        self.feature.len()
    }

    pub fn is_empty(&self) -> bool {
        self.feature.is_empty()
    }

    pub fn node(&self, i: usize) -> TreeNode {
        if self.feature[i] == LEAF {
            TreeNode::Leaf {
                value: self.value[i],
            }
        } else {
            TreeNode::Split {
                feature: self.feature[i] as usize,
                threshold: self.threshold[i],
                left: self.left[i] as usize,
                right: self.right[i] as usize,
            }
        }
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let mut i = 0usize;
        loop {
            let f = self.feature[i];
            if f == LEAF {
                return self.value[i];
            }
            i = if row[f as usize] <= self.threshold[i] {
                self.left[i] as usize
            } else {
                self.right[i] as usize
            };
        }
    }

    /// Maximum leaf depth (root at depth 0).
    pub fn depth(&self) -> usize {
        fn walk(t: &Tree, i: usize, d: usize) -> usize {
            match t.node(i) {
                TreeNode::Leaf { .. } => d,
                TreeNode::Split { left, right, .. } => {
                    walk(t, left, d + 1).max(walk(t, right, d + 1))
                }
            }
        }
        walk(self, 0, 0)
    }

    /// (feature, threshold) of the root split, if the root is not a leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self.node(0) {
            TreeNode::Split {
                feature, threshold, ..
            } => Some((feature, threshold)),
            TreeNode::Leaf { .. } => None,
        }
    }
}

/// Shared per-fit data: column-major features plus, per feature, the sample
/// indices sorted by (value, index). Built once per boosting fit and reused by
/// every tree.
pub struct SplitContext {
    pub columns: Vec<Vec<f64>>,
    sorted: Vec<Vec<u32>>,
    n_rows: usize,
}

impl SplitContext {
    pub fn new(columns: Vec<Vec<f64>>) -> SplitContext {
        let n_rows = columns.first().map_or(0, |c| c.len());
        let sorted = columns
            .iter()
            .map(|col| {
                let mut idx: Vec<u32> = (0..n_rows as u32).collect();
                idx.sort_unstable_by(|&i, &j| {
                    col[i as usize].total_cmp(&col[j as usize]).then(i.cmp(&j))
                });
                idx
            })
            .collect();
        SplitContext {
            columns,
            sorted,
            n_rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }
}

/// Per-sample inputs to a single tree fit: split-search targets (the negative
/// gradients) and the numerator/denominator terms of the Newton leaf update.
pub struct TreeTargets<'a> {
    pub gradient: &'a [f64],
    pub newton_num: &'a [f64],
    pub newton_den: &'a [f64],
}

pub struct TreeParams {
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub leaf_clip: f64,
}

struct Builder<'a> {
    ctx: &'a SplitContext,
    t: &'a TreeTargets<'a>,
    params: &'a TreeParams,
    tree: Tree,
    /// Per-row fitted leaf value, filled as leaves are created.
    row_values: Vec<f64>,
}

/// Fit one regression tree; returns the tree and the leaf value assigned to
/// each training row (used by the boosting loop to update scores without a
/// second traversal).
pub fn fit_tree(ctx: &SplitContext, t: &TreeTargets<'_>, params: &TreeParams) -> (Tree, Vec<f64>) {
    let n = ctx.n_rows();
    let mut b = Builder {
        ctx,
        t,
        params,
        tree: Tree {
            feature: Vec::new(),
            threshold: Vec::new(),
            left: Vec::new(),
            right: Vec::new(),
            value: Vec::new(),
        },
        row_values: vec![0.0; n],
    };
    let root_lists: Vec<Vec<u32>> = ctx.sorted.clone();
    b.build(root_lists, 0);
    let values = std::mem::take(&mut b.row_values);
    (b.tree, values)
}

#[derive(Clone, Copy)]
struct BestSplit {
    improvement: f64,
    feature: usize,
    threshold: f64,
    /// How many of the feature's sorted entries go left.
    left_len: usize,
}

impl<'a> Builder<'a> {
    fn build(&mut self, lists: Vec<Vec<u32>>, depth: usize) -> u32 {
        let n = lists[0].len();
        let can_split = depth < self.params.max_depth && n >= 2 * self.params.min_samples_leaf;
        let best = if can_split {
            self.find_best_split(&lists)
        } else {
            None
        };
        match best {
            None => self.push_leaf(&lists[0]),
            Some(s) => {
                let idx = self.push_internal(s.feature, s.threshold);
                let (left_lists, right_lists) = self.partition(&lists, s);
                let left = self.build(left_lists, depth + 1);
                let right = self.build(right_lists, depth + 1);
                self.tree.left[idx as usize] = left;
                self.tree.right[idx as usize] = right;
                idx
            }
        }
    }

    fn push_leaf(&mut self, rows: &[u32]) -> u32 {
        let mut num = 0.0;
        let mut den = 0.0;
        for &r in rows {
            num += self.t.newton_num[r as usize];
            den += self.t.newton_den[r as usize];
        }
        let clip = self.params.leaf_clip;
        let v = if den.abs() < 1e-150 {
            0.0
        } else {
            (num / den).clamp(-clip, clip)
        };
        for &r in rows {
            self.row_values[r as usize] = v;
        }
        let i = self.tree.feature.len() as u32;
        self.tree.feature.push(LEAF);
        self.tree.threshold.push(0.0);
        self.tree.left.push(0);
        self.tree.right.push(0);
        self.tree.value.push(v);
        i
    }

    fn push_internal(&mut self, feature: usize, threshold: f64) -> u32 {
        let i = self.tree.feature.len() as u32;
        self.tree.feature.push(feature as u32);
        self.tree.threshold.push(threshold);
        self.tree.left.push(0);
        self.tree.right.push(0);
        self.tree.value.push(0.0);
        i
    }

    fn find_best_split(&self, lists: &[Vec<u32>]) -> Option<BestSplit> {
        let n = lists[0].len();
        let min_leaf = self.params.min_samples_leaf;
        let g = self.t.gradient;
        let total: f64 = lists[0].iter().map(|&r| g[r as usize]).sum();
        let parent_term = total * total / n as f64;

        let mut best: Option<BestSplit> = None;
        for (f, list) in lists.iter().enumerate() {
            let col = &self.ctx.columns[f];
            let mut left_sum = 0.0;
            for k in 0..(n - 1) {
                left_sum += g[list[k] as usize];
                let left_n = k + 1;
                let right_n = n - left_n;
                if left_n < min_leaf || right_n < min_leaf {
                    continue;
                }
                let v = col[list[k] as usize];
                let v_next = col[list[k + 1] as usize];
                if !(v_next > v) {
                    continue;
                }
                let right_sum = total - left_sum;
                let improvement = left_sum * left_sum / left_n as f64
                    + right_sum * right_sum / right_n as f64
                    - parent_term;
                if improvement > 0.0 && best.map_or(true, |b| improvement > b.improvement) {
                    let mut threshold = (v + v_next) / 2.0;
                    // guard against the midpoint rounding up onto v_next,
                    // which would shift the boundary
                    if threshold >= v_next {
                        threshold = v;
                    }
                    best = Some(BestSplit {
                        improvement,
                        feature: f,
                        threshold,
                        left_len: left_n,
                    });
                }
            }
        }
        best
    }

    fn partition(&self, lists: &[Vec<u32>], s: BestSplit) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
        let col = &self.ctx.columns[s.feature];
        let n = lists[0].len();
        let mut left_lists = Vec::with_capacity(lists.len());
        let mut right_lists = Vec::with_capacity(lists.len());
        for list in lists {
            let mut l = Vec::with_capacity(s.left_len);
            let mut r = Vec::with_capacity(n - s.left_len);
            for &row in list {
                if col[row as usize] <= s.threshold {
                    l.push(row);
                } else {
                    r.push(row);
                }
            }
            left_lists.push(l);
            right_lists.push(r);
        }
        (left_lists, right_lists)
    }
}
