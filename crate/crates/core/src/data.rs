//! Core value types shared by the whole pipeline: variables, pairs, labels,
//! datasets, and feature vectors. All types are immutable value objects after
//! construction and safe to share across threads.

use crate::error::{Error, Result};

/// Number of feature slots produced per pair.
pub const FEATURE_COUNT: usize = 43;

/// Version of the feature naming/ordering contract. Bumped whenever the slot
/// layout in [`crate::features`] changes; models refuse to score vectors from
/// a different version.
pub const CONTRACT_VERSION: u32 = 1;

/// Suffix toggled by [`Pair::swapped`] so that a pair and its swapped copy
/// have distinct ids while `swapped` stays an involution.
pub const SWAP_SUFFIX: &str = "__swap";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableKind {
    Numerical,
    Categorical,
    /// Treated as categorical by every feature; kept separate only because
    /// the dataset metadata distinguishes it.
    Binary,
}

impl VariableKind {
    pub fn is_categorical(self) -> bool {
        matches!(self, VariableKind::Categorical | VariableKind::Binary)
    }
}

/// One observed variable: a finite sequence of real-encoded observations.
/// Categorical values are label-encoded non-negative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub values: Vec<f64>,
    pub kind: VariableKind,
}

impl Variable {
    pub fn numerical(values: Vec<f64>) -> Self {
        Variable {
            values,
            kind: VariableKind::Numerical,
        }
    }

    pub fn categorical(values: Vec<f64>) -> Self {
        Variable {
            values,
            kind: VariableKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A cause-effect candidate pair: two aligned observation vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub id: String,
    pub a: Variable,
    pub b: Variable,
}

impl Pair {
    pub fn new(id: impl Into<String>, a: Variable, b: Variable) -> Result<Self> {
        let id = id.into();
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptyVariable { id });
        }
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                id,
                a_len: a.len(),
                b_len: b.len(),
            });
        }
        Ok(Pair { id, a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// The pair with `a` and `b` exchanged. The id gets the swap suffix
    /// appended, or stripped if already present, so the operation is an
    /// involution and both ids stay unique within a dataset.
    pub fn swapped(&self) -> Pair {
        let id = match self.id.strip_suffix(SWAP_SUFFIX) {
            Some(base) => base.to_string(),
            None => format!("{}{}", self.id, SWAP_SUFFIX),
        };
        Pair {
            id,
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    /// Pair id with any swap suffix removed; used wherever a value must be
    /// identical for a pair and its swapped copy (e.g. subsampling seeds).
    pub fn base_id(&self) -> &str {
        self.id.strip_suffix(SWAP_SUFFIX).unwrap_or(&self.id)
    }
}

/// Ternary ground truth: +1 means A causes B, -1 means B causes A, 0 neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TernaryLabel(i8);

impl TernaryLabel {
    pub const FORWARD: TernaryLabel = TernaryLabel(1);
    pub const NONE: TernaryLabel = TernaryLabel(0);
    pub const BACKWARD: TernaryLabel = TernaryLabel(-1);

    pub fn new(value: i8) -> Result<Self> {
        match value {
            -1 | 0 | 1 => Ok(TernaryLabel(value)),
            other => Err(Error::Config(format!(
                "ternary label must be -1, 0 or 1, got {other}"
            ))),
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn negated(self) -> TernaryLabel {
        TernaryLabel(-self.0)
    }

    /// Class index used by the ternary classifier: -1 -> 0, 0 -> 1, +1 -> 2.
    pub fn class_index(self) -> usize {
        (self.0 + 1) as usize
    }
}

/// Pairs plus their aligned ternary labels.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub pairs: Vec<Pair>,
    pub labels: Vec<TernaryLabel>,
}

impl LabeledDataset {
    pub fn new(pairs: Vec<Pair>, labels: Vec<TernaryLabel>) -> Result<Self> {
        if pairs.len() != labels.len() {
            return Err(Error::Config(format!(
                "dataset has {} pairs but {} labels",
                pairs.len(),
                labels.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for p in &pairs {
            if !seen.insert(p.id.clone()) {
                return Err(Error::DuplicateId { id: p.id.clone() });
            }
        }
        Ok(LabeledDataset { pairs, labels })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Fixed 43-slot feature vector. Every entry is finite; non-finite
/// intermediates are replaced by 0 at extraction time.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: [f64; FEATURE_COUNT],
}

impl FeatureVector {
    pub fn new(values: [f64; FEATURE_COUNT]) -> Self {
        FeatureVector { values }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub const fn contract_version(&self) -> u32 {
        CONTRACT_VERSION
    }
}

/// Dense row-major matrix of feature rows fed to the learners.
/// `contract_version` is 0 for raw matrices built directly in tests or
/// benchmarks; extracted features carry [`CONTRACT_VERSION`].
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    n_cols: usize,
    contract_version: u32,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(Error::Config("ragged feature rows".to_string()));
            }
            data.extend_from_slice(r);
        }
        Ok(FeatureMatrix {
            n_cols,
            contract_version: 0,
            data,
        })
    }

    pub fn from_feature_vectors(rows: &[FeatureVector]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * FEATURE_COUNT);
        for r in rows {
            data.extend_from_slice(&r.values);
        }
        FeatureMatrix {
            n_cols: FEATURE_COUNT,
            contract_version: CONTRACT_VERSION,
            data,
        }
    }

    pub fn n_rows(&self) -> usize {
        if self.n_cols == 0 {
            0
        } else {
            self.data.len() / self.n_cols
        }
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn contract_version(&self) -> u32 {
        self.contract_version
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.n_cols);
        self.data.extend_from_slice(row);
    }

    /// New matrix keeping only the given columns, in the given order.
    /// Column-filtered matrices drop the contract version (they no longer
    /// follow the 43-slot layout).
    pub fn select_columns(&self, columns: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(self.n_rows() * columns.len());
        for i in 0..self.n_rows() {
            let row = self.row(i);
            for &c in columns {
                data.push(row[c]);
            }
        }
        FeatureMatrix {
            n_cols: columns.len(),
            contract_version: 0,
            data,
        }
    }

    /// New matrix containing the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut out = FeatureMatrix {
            n_cols: self.n_cols,
            contract_version: self.contract_version,
            data: Vec::with_capacity(rows.len() * self.n_cols),
        };
        for &r in rows {
            out.data.extend_from_slice(self.row(r));
        }
        out
    }
}
