use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{Dataset, Label};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

const FEATURES: usize = 256;
const DIGITS: usize = 10;
const FIELDS: usize = FEATURES + DIGITS;

/// Load the Semeion handwritten digit file: one sample per line, 256 binary
/// pixel values followed by a 10-entry one-hot digit indicator.
pub fn load_semeion(file: &Path) -> Result<Dataset> {
    if !file.exists() {
        return Err(Error::MissingFile {
            path: file.to_path_buf(),
        });
    }
    let reader = BufReader::new(File::open(file).map_err(|source| Error::Io {
        path: file.to_path_buf(),
        source,
    })?);

    let parse_err = |line: usize, message: String| Error::Parse {
        path: file.to_path_buf(),
        line,
        message,
    };

    let mut data = Vec::new();
    let mut digits = Vec::new();
    let mut ids = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| Error::Io {
            path: file.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != FIELDS {
            return Err(parse_err(
                lineno + 1,
                format!("expected {FIELDS} fields, got {}", fields.len()),
            ));
        }
        for field in &fields[..FEATURES] {
            let v: f64 = field.parse().map_err(|_| {
                parse_err(lineno + 1, format!("unparseable feature {field:?}"))
            })?;
            if !v.is_finite() {
                return Err(parse_err(lineno + 1, format!("non-finite feature {field:?}")));
            }
            data.push(v);
        }
        let mut digit = None;
        let mut hot = 0usize;
        for (k, field) in fields[FEATURES..].iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                parse_err(lineno + 1, format!("unparseable indicator {field:?}"))
            })?;
            if v == 1.0 {
                hot += 1;
                digit = Some(k);
            } else if v != 0.0 {
                return Err(parse_err(
                    lineno + 1,
                    format!("one-hot indicator must be 0 or 1, got {field:?}"),
                ));
            }
        }
        if hot != 1 {
            return Err(parse_err(
                lineno + 1,
                format!("one-hot digit block sums to {hot}, expected 1"),
            ));
        }
        digits.push(digit.unwrap());
        ids.push(format!("line:{}", lineno + 1));
    }

    let n = digits.len();
    let features = Matrix::from_vec(n, FEATURES, data)?;
    let label = Label::new(
        "digit",
        digits,
        (0..DIGITS).map(|d| d.to_string()).collect(),
    )?;
    Dataset::new(features, vec![label], Some(ids))
}
