//! Line-oriented versioned text container shared by the model formats.
//!
//! Reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite f64 bit-exactly.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn write_reals(w: &mut impl Write, key: &str, vals: &[f64]) -> std::io::Result<()> {
    write!(w, "{key}")?;
    for v in vals {
        write!(w, " {}", fmt_real(*v))?;
    }
    writeln!(w)
}

pub(crate) struct LineReader<R> {
    inner: R,
    pub line: usize,
}

impl<R: BufRead> LineReader<R> {
    pub fn new(inner: R) -> Self {
        LineReader { inner, line: 0 }
    }

    fn bad(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            path: "<model>".into(),
            line: self.line,
            message: message.into(),
        }
    }

    pub fn next_line(&mut self) -> Result<String> {
        let mut buf = String::new();
        let n = self
            .inner
            .read_line(&mut buf)
            .map_err(|source| Error::Io {
                path: "<model>".into(),
                source,
            })?;
        self.line += 1;
        if n == 0 {
            return Err(self.bad("unexpected end of model data"));
        }
        while buf.ends_with('\n') || buf.ends_with('\r') {
            buf.pop();
        }
        Ok(buf)
    }

    /// Line of the form `<key> <payload>`; checks the key and returns the
    /// payload.
    pub fn keyed(&mut self, key: &str) -> Result<String> {
        let line = self.next_line()?;
        match line.strip_prefix(key) {
            Some("") => Ok(String::new()),
            Some(rest) if rest.starts_with(' ') => Ok(rest[1..].to_string()),
            _ => Err(self.bad(format!("expected {key:?}, got {line:?}"))),
        }
    }

    pub fn keyed_usize(&mut self, key: &str) -> Result<usize> {
        let payload = self.keyed(key)?;
        payload
            .parse()
            .map_err(|_| self.bad(format!("{key}: unparseable count {payload:?}")))
    }

    pub fn keyed_real(&mut self, key: &str) -> Result<f64> {
        let payload = self.keyed(key)?;
        parse_real(&payload).map_err(|m| self.bad(format!("{key}: {m}")))
    }

    pub fn keyed_reals(&mut self, key: &str, expected: usize) -> Result<Vec<f64>> {
        let payload = self.keyed(key)?;
        let vals = parse_real_row(&payload).map_err(|m| self.bad(format!("{key}: {m}")))?;
        if vals.len() != expected {
            return Err(self.bad(format!(
                "{key}: expected {expected} values, got {}",
                vals.len()
            )));
        }
        Ok(vals)
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = self.next_line()?;
            let vals = parse_real_row(&line).map_err(|m| self.bad(m))?;
            if vals.len() != cols {
                return Err(self.bad(format!("expected {cols} values, got {}", vals.len())));
            }
            data.extend(vals);
        }
        Matrix::from_vec(rows, cols, data)
    }

    pub fn expect(&mut self, exact: &str) -> Result<()> {
        let line = self.next_line()?;
        if line != exact {
            return Err(self.bad(format!("expected {exact:?}, got {line:?}")));
        }
        Ok(())
    }
}

fn parse_real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|_| format!("unparseable real {s:?}"))?;
    if !v.is_finite() {
        return Err(format!("non-finite real {s:?}"));
    }
    Ok(v)
}

fn parse_real_row(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split_whitespace().map(parse_real).collect()
}
