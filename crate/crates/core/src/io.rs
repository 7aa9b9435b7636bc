//! Challenge-format dataset files.
//!
//! pairs CSV:      header `SampleID,A,B`; value fields double-quoted,
//!                 space-separated decimals.
//! publicinfo CSV: header `SampleID,A type,B type`; types in
//!                 {Numerical, Categorical, Binary}.
//! target CSV:     header `SampleID,Target`; Target in {-1, 0, 1}.
//! predictions:    header `SampleID,Target`; Target is a real score.
//!
//! Categorical raw codes are mapped to dense integers 0..M-1 at load time in
//! first-appearance order; the probability-sorted relabeling happens later in
//! the feature pipeline. Missing values are rejected, not imputed.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::data::{FeatureMatrix, LabeledDataset, Pair, TernaryLabel, Variable, VariableKind};
use crate::error::{Error, Result};
use crate::features::FEATURE_NAMES;
use crate::metrics::Prediction;

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        file: path.display().to_string(),
        source: e,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        file: path.display().to_string(),
        source: e,
    })
}

/// Split one CSV line into fields, honoring double quotes ("" escapes a
/// literal quote inside a quoted field).
fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes => {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    field.push('"');
                } else {
                    in_quotes = false;
                }
            }
            '"' => in_quotes = true,
            ',' if !in_quotes => fields.push(std::mem::take(&mut field)),
            _ => field.push(c),
        }
    }
    fields.push(field);
    fields
}

fn check_header(path: &Path, line: Option<&str>, expected: &[&str]) -> Result<()> {
    let line = line.ok_or_else(|| Error::Format {
        file: path.display().to_string(),
        message: "empty file".to_string(),
    })?;
    let got: Vec<String> = split_csv_line(line.trim_end_matches(['\r', '\n']))
        .iter()
        .map(|f| f.trim().to_string())
        .collect();
    if got != expected {
        return Err(Error::Format {
            file: path.display().to_string(),
            message: format!(
                "expected header {:?}, got {:?}",
                expected.join(","),
                got.join(",")
            ),
        });
    }
    Ok(())
}

fn parse_values(path: &Path, row: usize, id: &str, field: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for tok in field.split_ascii_whitespace() {
        let v: f64 = tok.parse().map_err(|_| Error::Parse {
            file: path.display().to_string(),
            row,
            message: format!("pair {id}: cannot parse value {tok:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                message: format!("pair {id}: non-finite value {tok:?}"),
            });
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Parse {
            file: path.display().to_string(),
            row,
            message: format!("pair {id}: empty value list"),
        });
    }
    Ok(out)
}

/// Raw rows of a pairs file, before kinds are attached.
pub fn read_pairs_file(path: &Path) -> Result<Vec<(String, Vec<f64>, Vec<f64>)>> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    check_header(path, lines.next(), &["SampleID", "A", "B"])?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(line);
        if fields.len() != 3 {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let id = fields[0].trim().to_string();
        let a = parse_values(path, row, &id, &fields[1])?;
        let b = parse_values(path, row, &id, &fields[2])?;
        if a.len() != b.len() {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                message: format!("pair {id}: A has {} values but B has {}", a.len(), b.len()),
            });
        }
        out.push((id, a, b));
    }
    Ok(out)
}

fn parse_kind(path: &Path, row: usize, s: &str) -> Result<VariableKind> {
    match s.trim() {
        "Numerical" => Ok(VariableKind::Numerical),
        "Categorical" => Ok(VariableKind::Categorical),
        "Binary" => Ok(VariableKind::Binary),
        other => Err(Error::Parse {
            file: path.display().to_string(),
            row,
            message: format!("unknown type string {other:?}"),
        }),
    }
}

/// id -> (kind of A, kind of B)
pub fn read_publicinfo_file(path: &Path) -> Result<HashMap<String, (VariableKind, VariableKind)>> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    check_header(path, lines.next(), &["SampleID", "A type", "B type"])?;
    let mut out = HashMap::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(line);
        if fields.len() != 3 {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let id = fields[0].trim().to_string();
        let ka = parse_kind(path, row, &fields[1])?;
        let kb = parse_kind(path, row, &fields[2])?;
        out.insert(id, (ka, kb));
    }
    Ok(out)
}

/// id -> ternary label
pub fn read_target_file(path: &Path) -> Result<HashMap<String, TernaryLabel>> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    check_header(path, lines.next(), &["SampleID", "Target"])?;
    let mut out = HashMap::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(line);
        if fields.len() != 2 {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                message: format!("expected 2 fields, got {}", fields.len()),
            });
        }
        let id = fields[0].trim().to_string();
        let raw: i8 = fields[1].trim().parse().map_err(|_| Error::Parse {
            file: path.display().to_string(),
            row,
            message: format!(
                "pair {id}: target must be -1, 0 or 1, got {:?}",
                fields[1].trim()
            ),
        })?;
        let label = TernaryLabel::new(raw).map_err(|_| Error::Parse {
            file: path.display().to_string(),
            row,
            message: format!("pair {id}: target must be -1, 0 or 1, got {raw}"),
        })?;
        out.insert(id, label);
    }
    Ok(out)
}

/// First-appearance dense coding of categorical raw values.
fn dense_code(values: &[f64]) -> Vec<f64> {
    let mut mapping: HashMap<u64, u32> = HashMap::new();
    let mut next = 0u32;
    values
        .iter()
        .map(|&v| {
            let bits = if v == 0.0 {
                0.0f64.to_bits()
            } else {
                v.to_bits()
            };
            let code = *mapping.entry(bits).or_insert_with(|| {
                let c = next;
                next += 1;
                c
            });
            code as f64
        })
        .collect()
}

/// Load pairs with kinds attached, plus labels when a target file is given.
/// Every pair id must appear in the publicinfo file (and the target file when
/// present); ids must be unique.
pub fn load_dataset(
    pairs_path: &Path,
    publicinfo_path: &Path,
    target_path: Option<&Path>,
) -> Result<(Vec<Pair>, Option<Vec<TernaryLabel>>)> {
    let rows = read_pairs_file(pairs_path)?;
    let kinds = read_publicinfo_file(publicinfo_path)?;
    let targets = target_path.map(read_target_file).transpose()?;

    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(rows.len());
    let mut labels = targets.as_ref().map(|_| Vec::with_capacity(rows.len()));
    for (id, a_vals, b_vals) in rows {
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId { id });
        }
        let (ka, kb) = kinds.get(&id).copied().ok_or_else(|| Error::UnmatchedId {
            id: id.clone(),
            present: pairs_path.display().to_string(),
            missing: publicinfo_path.display().to_string(),
        })?;
        let make = |vals: Vec<f64>, kind: VariableKind| -> Variable {
            match kind {
                VariableKind::Numerical => Variable { values: vals, kind },
                VariableKind::Categorical | VariableKind::Binary => Variable {
                    values: dense_code(&vals),
                    kind,
                },
            }
        };
        if let (Some(t), Some(labels)) = (&targets, labels.as_mut()) {
            let label = t.get(&id).copied().ok_or_else(|| Error::UnmatchedId {
                id: id.clone(),
                present: pairs_path.display().to_string(),
                missing: target_path.unwrap().display().to_string(),
            })?;
            labels.push(label);
        }
        pairs.push(Pair::new(id, make(a_vals, ka), make(b_vals, kb))?);
    }
    Ok((pairs, labels))
}

/// Convenience wrapper returning a [`LabeledDataset`].
pub fn load_labeled_dataset(
    pairs_path: &Path,
    publicinfo_path: &Path,
    target_path: &Path,
) -> Result<LabeledDataset> {
    let (pairs, labels) = load_dataset(pairs_path, publicinfo_path, Some(target_path))?;
    LabeledDataset::new(pairs, labels.expect("labels requested"))
}

fn join_values(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{v}");
    }
    s
}

pub fn write_pairs_file(path: &Path, pairs: &[Pair]) -> Result<()> {
    let mut out = String::from("SampleID,A,B\n");
    for p in pairs {
        let _ = writeln!(
            out,
            "{},\"{}\",\"{}\"",
            p.id,
            join_values(&p.a.values),
            join_values(&p.b.values)
        );
    }
    write_file(path, &out)
}

fn kind_name(kind: VariableKind) -> &'static str {
    match kind {
        VariableKind::Numerical => "Numerical",
        VariableKind::Categorical => "Categorical",
        VariableKind::Binary => "Binary",
    }
}

pub fn write_publicinfo_file(path: &Path, pairs: &[Pair]) -> Result<()> {
    let mut out = String::from("SampleID,A type,B type\n");
    for p in pairs {
        let _ = writeln!(
            out,
            "{},{},{}",
            p.id,
            kind_name(p.a.kind),
            kind_name(p.b.kind)
        );
    }
    write_file(path, &out)
}

pub fn write_target_file(path: &Path, pairs: &[Pair], labels: &[TernaryLabel]) -> Result<()> {
    let mut out = String::from("SampleID,Target\n");
    for (p, l) in pairs.iter().zip(labels) {
        let _ = writeln!(out, "{},{}", p.id, l.value());
    }
    write_file(path, &out)
}

pub fn write_predictions_file(path: &Path, preds: &[Prediction]) -> Result<()> {
    let mut out = String::from("SampleID,Target\n");
    for p in preds {
        let _ = writeln!(out, "{},{}", p.id, p.score);
    }
    write_file(path, &out)
}

pub fn read_predictions_file(path: &Path) -> Result<Vec<Prediction>> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    check_header(path, lines.next(), &["SampleID", "Target"])?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(line);
        if fields.len() != 2 {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                message: format!("expected 2 fields, got {}", fields.len()),
            });
        }
        let id = fields[0].trim().to_string();
        let score: f64 = fields[1].trim().parse().map_err(|_| Error::Parse {
            file: path.display().to_string(),
            row,
            message: format!("pair {id}: cannot parse score {:?}", fields[1].trim()),
        })?;
        if !score.is_finite() {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                message: format!("pair {id}: non-finite score"),
            });
        }
        out.push(Prediction { id, score });
    }
    Ok(out)
}

/// Feature export: a header row of the 43 contract names, then one row per
/// pair at full decimal precision.
pub fn write_features_file(path: &Path, features: &FeatureMatrix) -> Result<()> {
    let mut out = String::new();
    out.push_str(&FEATURE_NAMES.join(","));
    out.push('\n');
    for i in 0..features.n_rows() {
        let row = features.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    write_file(path, &out)
}
