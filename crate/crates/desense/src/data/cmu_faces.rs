use std::fs;
use std::path::{Path, PathBuf};

use super::{Dataset, Label};
use crate::error::{Error, Result};
use crate::numerics::Matrix;

const WIDTH: usize = 32;
const HEIGHT: usize = 30;
const PIXELS: usize = WIDTH * HEIGHT;

const POSES: [&str; 4] = ["straight", "left", "right", "up"];
const EXPRESSIONS: [&str; 4] = ["neutral", "happy", "sad", "angry"];
const GLASSES: [&str; 2] = ["open", "sunglasses"];

/// A loaded CMU Faces directory plus the number of files that had to be
/// skipped (corrupt body, wrong resolution, or a filename outside the
/// `<person>_<pose>_<expression>_<open|sunglasses>_4.pgm` grammar).
#[derive(Debug)]
pub struct CmuFaces {
    pub dataset: Dataset,
    pub skipped: usize,
}

struct FaceMeta {
    person: String,
    pose: usize,
    expression: usize,
    sunglasses: usize,
}

fn parse_filename(stem: &str) -> Option<FaceMeta> {
    // `<person>_<pose>_<expression>_<open|sunglasses>_4`
    let parts: Vec<&str> = stem.split('_').collect();
    if parts.len() != 5 || parts[4] != "4" {
        return None;
    }
    let pose = POSES.iter().position(|&p| p == parts[1])?;
    let expression = EXPRESSIONS.iter().position(|&e| e == parts[2])?;
    let sunglasses = GLASSES.iter().position(|&g| g == parts[3])?;
    Some(FaceMeta {
        person: parts[0].to_string(),
        pose,
        expression,
        sunglasses,
    })
}

struct PgmHeader {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    data_offset: usize,
}

/// Header tokens, honoring `#` comments. Returns the header and the offset
/// of the first data byte.
fn parse_pgm_header(path: &Path, bytes: &[u8]) -> Result<PgmHeader> {
    let bad = |msg: &str| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        message: format!("malformed PGM header: {msg}"),
    };

    let mut pos = 0usize;
    let mut tokens = Vec::new();
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if pos == start {
            return Err(bad("truncated header"));
        }
        tokens.push(
            std::str::from_utf8(&bytes[start..pos])
                .map_err(|_| bad("non-ascii header token"))?
                .to_string(),
        );
    }
    // single whitespace byte separates maxval from binary data
    if pos < bytes.len() {
        pos += 1;
    }

    let binary = match tokens[0].as_str() {
        "P5" => true,
        "P2" => false,
        other => return Err(bad(&format!("unsupported magic {other:?}"))),
    };
    let width: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let height: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
    let maxval: u32 = tokens[3].parse().map_err(|_| bad("bad maxval"))?;
    if maxval == 0 || maxval > 255 {
        return Err(bad(&format!("maxval {maxval} outside 1..=255")));
    }
    Ok(PgmHeader {
        binary,
        width,
        height,
        maxval,
        data_offset: pos,
    })
}

/// Raw gray levels, row-major. `None` means the body is corrupt (truncated
/// or not the quarter-scale resolution) and the file should be skipped.
fn read_pgm_pixels(path: &Path) -> Result<Option<Vec<f64>>> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let header = parse_pgm_header(path, &bytes)?;
    if header.width != WIDTH || header.height != HEIGHT {
        return Ok(None);
    }
    let mut pixels = Vec::with_capacity(PIXELS);
    if header.binary {
        let body = &bytes[header.data_offset.min(bytes.len())..];
        if body.len() < PIXELS {
            return Ok(None);
        }
        pixels.extend(body[..PIXELS].iter().map(|&b| b as f64));
    } else {
        let body = std::str::from_utf8(&bytes[header.data_offset.min(bytes.len())..]);
        let Ok(body) = body else { return Ok(None) };
        for token in body.split_whitespace().take(PIXELS) {
            match token.parse::<u32>() {
                Ok(v) if v <= header.maxval => pixels.push(v as f64),
                _ => return Ok(None),
            }
        }
        if pixels.len() < PIXELS {
            return Ok(None);
        }
    }
    Ok(Some(pixels))
}

fn collect_pgms(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut children: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        children.push(entry.path());
    }
    children.sort();
    for child in children {
        if child.is_dir() {
            collect_pgms(&child, out)?;
        } else if child.extension().is_some_and(|e| e == "pgm") {
            out.push(child);
        }
    }
    Ok(())
}

/// Load the quarter-scale (`_4` suffix, 32x30) CMU Faces images from a
/// directory tree of PGM files.
///
/// Produces 960 raw-gray-level features per image and the labels `person`,
/// `pose`, `expression` and `sunglasses`. Files at other scales are ignored;
/// corrupt quarter-scale files are skipped and counted.
pub fn load_cmu_faces(dir: &Path) -> Result<CmuFaces> {
    let mut paths = Vec::new();
    collect_pgms(dir, &mut paths)?;
    if paths.is_empty() {
        return Err(Error::NoPgmFiles {
            dir: dir.to_path_buf(),
        });
    }

    let mut rows: Vec<(FaceMeta, Vec<f64>, String)> = Vec::new();
    let mut skipped = 0usize;
    for path in &paths {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if !stem.ends_with("_4") {
            continue; // full- and half-scale variants
        }
        let Some(meta) = parse_filename(stem) else {
            skipped += 1;
            continue;
        };
        match read_pgm_pixels(path)? {
            Some(pixels) => rows.push((meta, pixels, stem.to_string())),
            None => skipped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::NoPgmFiles {
            dir: dir.to_path_buf(),
        });
    }

    let mut persons: Vec<String> = rows.iter().map(|(m, _, _)| m.person.clone()).collect();
    persons.sort();
    persons.dedup();

    let n = rows.len();
    let mut data = Vec::with_capacity(n * PIXELS);
    let mut pose = Vec::with_capacity(n);
    let mut expression = Vec::with_capacity(n);
    let mut sunglasses = Vec::with_capacity(n);
    let mut person = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    for (meta, pixels, id) in rows {
        data.extend_from_slice(&pixels);
        pose.push(meta.pose);
        expression.push(meta.expression);
        sunglasses.push(meta.sunglasses);
        person.push(persons.iter().position(|p| *p == meta.person).unwrap());
        ids.push(id);
    }

    let features = Matrix::from_vec(n, PIXELS, data)?;
    let to_names = |list: &[&str]| list.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let labels = vec![
        Label::new("pose", pose, to_names(&POSES))?,
        Label::new("expression", expression, to_names(&EXPRESSIONS))?,
        Label::new("sunglasses", sunglasses, to_names(&GLASSES))?,
        Label::new("person", person, persons)?,
    ];
    let dataset = Dataset::new(features, labels, Some(ids))?;
    Ok(CmuFaces { dataset, skipped })
}
