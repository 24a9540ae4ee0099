//! Text frame files.
//!
//! ```text
//! # optional comments
//! m N real|complex
//! <m lines of N entries>
//! ```
//!
//! Complex entries are written `a+bi` / `a-bi`. Values are written with 17
//! significant digits so a write/read cycle reproduces every bit. A second
//! "vector list" layout (`m N` header, then N lines of m coordinates, one
//! column vector per line) is accepted for importing packing catalogs.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{Field, MeasurementMatrix};

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_entry(z: Complex64, field: Field) -> String {
    match field {
        Field::Real => fmt_f64(z.re),
        Field::Complex => {
            let sign = if z.im.is_sign_negative() { '-' } else { '+' };
            format!("{}{}{}i", fmt_f64(z.re), sign, fmt_f64(z.im.abs()))
        }
    }
}

/// Serializes a matrix in the frame file format.
pub fn write_frame_string(c: &MeasurementMatrix) -> String {
    let field = c.field();
    let mut out = String::new();
    let tag = match field {
        Field::Real => "real",
        Field::Complex => "complex",
    };
    writeln!(out, "{} {} {}", c.rows(), c.cols(), tag).unwrap();
    for r in 0..c.rows() {
        let line: Vec<String> = (0..c.cols()).map(|j| fmt_entry(c.get(r, j), field)).collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    out
}

pub fn write_frame(path: &Path, c: &MeasurementMatrix) -> Result<()> {
    std::fs::write(path, write_frame_string(c))?;
    Ok(())
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`.
fn parse_entry(tok: &str, line: usize) -> Result<Complex64> {
    let err = || Error::Parse {
        line,
        msg: format!("invalid number `{tok}`"),
    };
    let Some(body) = tok.strip_suffix('i') else {
        return tok.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| err());
    };
    let bytes = body.as_bytes();
    // last sign that is neither leading nor part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => {
            let re = body[..p].parse::<f64>().map_err(|_| err())?;
            let im = body[p..].trim_start_matches('+').parse::<f64>().map_err(|_| err())?;
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = body.trim_start_matches('+').parse::<f64>().map_err(|_| err())?;
            Ok(Complex64::new(0.0, im))
        }
    }
}

/// Tokens of each non-empty line after stripping `#` comments, with 1-based line numbers.
fn tokenize(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let content = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = content.split_whitespace().collect();
            (!toks.is_empty()).then_some((i + 1, toks))
        })
        .collect()
}

fn parse_dim(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid dimension `{tok}`"),
    })
}

/// A parsed file and which layout it used.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameFile {
    Matrix(MeasurementMatrix),
    VectorList(MeasurementMatrix),
}

impl FrameFile {
    pub fn into_matrix(self) -> MeasurementMatrix {
        match self {
            FrameFile::Matrix(m) | FrameFile::VectorList(m) => m,
        }
    }
}

/// Parses either layout. The header decides: three tokens mean the matrix
/// layout, two tokens mean the vector-list layout.
pub fn parse_frame_file(text: &str) -> Result<FrameFile> {
    let lines = tokenize(text);
    let Some((hline, header)) = lines.first() else {
        return Err(Error::Parse {
            line: 1,
            msg: "empty frame file".into(),
        });
    };
    let hline = *hline;
    let (m, n, vector_list) = match header.as_slice() {
        [m, n, field] => {
            if !matches!(*field, "real" | "complex") {
                return Err(Error::Parse {
                    line: hline,
                    msg: format!("unknown field `{field}`"),
                });
            }
            (parse_dim(m, hline)?, parse_dim(n, hline)?, false)
        }
        [m, n] => (parse_dim(m, hline)?, parse_dim(n, hline)?, true),
        _ => {
            return Err(Error::Parse {
                line: hline,
                msg: "header must be `m N field` or `m N`".into(),
            })
        }
    };
    if m == 0 || n < m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("need 1 <= m <= N, got m={m}, N={n}"),
        });
    }
    let body = &lines[1..];
    let (outer, inner) = if vector_list { (n, m) } else { (m, n) };
    if body.len() != outer {
        let line = body.get(outer).map(|l| l.0).unwrap_or_else(|| {
            body.last().map(|l| l.0 + 1).unwrap_or(hline + 1)
        });
        return Err(Error::Parse {
            line,
            msg: format!("expected {outer} data lines, found {}", body.len()),
        });
    }
    let mut data = vec![Complex64::new(0.0, 0.0); m * n];
    for (o, (line, toks)) in body.iter().enumerate() {
        if toks.len() != inner {
            return Err(Error::Parse {
                line: *line,
                msg: format!("expected {inner} entries, found {}", toks.len()),
            });
        }
        for (i, tok) in toks.iter().enumerate() {
            let v = parse_entry(tok, *line)?;
            let (r, c) = if vector_list { (i, o) } else { (o, i) };
            data[r * n + c] = v;
        }
    }
    let matrix = MeasurementMatrix::new(m, n, data)?;
    Ok(if vector_list {
        FrameFile::VectorList(matrix)
    } else {
        FrameFile::Matrix(matrix)
    })
}

pub fn read_frame(path: &Path) -> Result<FrameFile> {
    parse_frame_file(&std::fs::read_to_string(path)?)
}
