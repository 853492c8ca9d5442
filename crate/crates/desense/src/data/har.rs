use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use super::{Dataset, Label, SplitDataset};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

fn open(path: &Path) -> Result<BufReader<File>> {
    if !path.exists() {
        return Err(Error::MissingFile {
            path: path.to_path_buf(),
        });
    }
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Whitespace-delimited real matrix, one sample per line.
fn read_matrix(path: &Path) -> Result<Matrix> {
    let reader = open(path)?;
    let mut data = Vec::new();
    let mut rows = 0usize;
    let mut cols = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let start = data.len();
        for field in line.split_whitespace() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(path, lineno + 1, format!("unparseable number {field:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(path, lineno + 1, format!("non-finite value {field:?}")));
            }
            data.push(v);
        }
        let width = data.len() - start;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(parse_err(
                    path,
                    lineno + 1,
                    format!("row has {width} fields, expected {c}"),
                ));
            }
            _ => {}
        }
        rows += 1;
    }
    Matrix::from_vec(rows, cols.unwrap_or(0), data)
}

/// One integer per line.
fn read_ints(path: &Path) -> Result<Vec<i64>> {
    let reader = open(path)?;
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: i64 = trimmed
            .parse()
            .map_err(|_| parse_err(path, lineno + 1, format!("unparseable integer {trimmed:?}")))?;
        out.push(v);
    }
    Ok(out)
}

/// Optional "index name" pairs, e.g. `1 WALKING`.
fn read_name_table(path: &Path) -> Result<BTreeMap<i64, String>> {
    let mut out = BTreeMap::new();
    if !path.exists() {
        return Ok(out);
    }
    let reader = open(path)?;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut it = line.split_whitespace();
        match (it.next(), it.next()) {
            (Some(idx), Some(name)) => {
                let idx: i64 = idx.parse().map_err(|_| {
                    parse_err(path, lineno + 1, format!("unparseable index {idx:?}"))
                })?;
                out.insert(idx, name.to_string());
            }
            (None, _) => continue,
            _ => return Err(parse_err(path, lineno + 1, "expected `index name`")),
        }
    }
    Ok(out)
}

struct HarSide {
    x: Matrix,
    activity: Vec<i64>,
    subject: Vec<i64>,
    ids: Vec<String>,
}

fn load_side(dir: &Path, tag: &str) -> Result<HarSide> {
    let x = read_matrix(&dir.join(format!("X_{tag}.txt")))?;
    let activity = read_ints(&dir.join(format!("y_{tag}.txt")))?;
    let subject = read_ints(&dir.join(format!("subject_{tag}.txt")))?;
    let n = x.rows();
    for (name, len) in [("activity", activity.len()), ("subject", subject.len())] {
        if len != n {
            return Err(Error::BadLabel(format!(
                "{tag}: {name} file has {len} entries for {n} feature rows"
            )));
        }
    }
    let ids = (0..n).map(|i| format!("{tag}:{i}")).collect();
    Ok(HarSide {
        x,
        activity,
        subject,
        ids,
    })
}

fn class_index(values: &[i64]) -> (Vec<i64>, BTreeMap<i64, usize>) {
    let mut distinct: Vec<i64> = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let map = distinct
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    (distinct, map)
}

/// Load the published HAR layout: `train/` and `test/` directories with
/// whitespace-delimited feature files plus activity and subject id files.
///
/// Activity names come from `activity_labels.txt` when present. Class tables
/// are built from the union of both sides, so train and test share them. The
/// published 70/30 split is honored as given; realized sample and class
/// counts are whatever the files contain.
pub fn load_har(dir: &Path) -> Result<SplitDataset> {
    let dir: PathBuf = dir.to_path_buf();
    let train = load_side(&dir.join("train"), "train")?;
    let test = load_side(&dir.join("test"), "test")?;
    if train.x.cols() != test.x.cols() {
        return Err(Error::BadLabel(format!(
            "train has {} features but test has {}",
            train.x.cols(),
            test.x.cols()
        )));
    }

    let all_activities: Vec<i64> = train
        .activity
        .iter()
        .chain(&test.activity)
        .copied()
        .collect();
    let (activity_values, activity_map) = class_index(&all_activities);
    let all_subjects: Vec<i64> = train.subject.iter().chain(&test.subject).copied().collect();
    let (subject_values, subject_map) = class_index(&all_subjects);

    let names = read_name_table(&dir.join("activity_labels.txt"))?;
    let activity_names: Vec<String> = activity_values
        .iter()
        .map(|v| names.get(v).cloned().unwrap_or_else(|| format!("activity_{v}")))
        .collect();
    let subject_names: Vec<String> = subject_values.iter().map(|v| format!("subject_{v}")).collect();

    let build = |side: HarSide| -> Result<Dataset> {
        let activity = Label::new(
            "activity",
            side.activity.iter().map(|v| activity_map[v]).collect(),
            activity_names.clone(),
        )?;
        let subject = Label::new(
            "subject",
            side.subject.iter().map(|v| subject_map[v]).collect(),
            subject_names.clone(),
        )?;
        Dataset::new(side.x, vec![activity, subject], Some(side.ids))
    };

    Ok(SplitDataset {
        train: build(train)?,
        test: build(test)?,
    })
}
