//! Plain-text matrix encoding.
//!
//! A matrix is written as its dimension on one line followed by `n` lines of
//! `n` whitespace-separated entries. An entry is `re`, `re+imi` or `re-imi`
//! with decimal reals printed at round-trip precision.

use std::fmt::Write as _;

use super::{AlgebraElement, ComplexScalar};

/// A text decoding failure, positioned by 1-based line within the block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for TextError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for TextError {}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_real(v: f64) -> String {
    format!("{v:?}")
}

pub fn format_complex(z: ComplexScalar) -> String {
    if z.im == 0.0 {
        format_real(z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", format_real(z.re), format_real(-z.im))
    } else {
        format!("{}+{}i", format_real(z.re), format_real(z.im))
    }
}

pub fn parse_real(token: &str) -> Result<f64, String> {
    let v: f64 = token
        .parse()
        .map_err(|_| format!("malformed number `{token}`"))?;
    if !v.is_finite() {
        return Err(format!("non-finite number `{token}`"));
    }
    Ok(v)
}

pub fn parse_complex(token: &str) -> Result<ComplexScalar, String> {
    let Some(body) = token.strip_suffix('i') else {
        return Ok(ComplexScalar::new(parse_real(token)?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re = parse_real(&body[..k]).map_err(|e| format!("{e} in `{token}`"))?;
            let im = parse_real(&body[k..]).map_err(|e| format!("{e} in `{token}`"))?;
            Ok(ComplexScalar::new(re, im))
        }
        None => Err(format!("malformed complex entry `{token}`")),
    }
}

pub fn format_matrix(m: &AlgebraElement) -> String {
    let n = m.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format_complex(m.get(i, j))).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses a matrix block. Blank lines and `#` comments are ignored.
pub fn parse_matrix(text: &str) -> Result<AlgebraElement, TextError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty());
    let (dim_line, header) = lines.next().ok_or(TextError {
        line: 1,
        message: "missing matrix dimension".into(),
    })?;
    let n = parse_dim(header).map_err(|message| TextError { line: dim_line, message })?;
    let rows: Vec<(usize, &str)> = lines.collect();
    if rows.len() != n {
        return Err(TextError {
            line: rows.last().map_or(dim_line, |r| r.0),
            message: format!("expected {n} matrix rows, found {}", rows.len()),
        });
    }
    parse_rows(n, &rows)
}

pub(crate) fn parse_dim(token: &str) -> Result<usize, String> {
    match token.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("matrix dimension must be a positive integer, got `{token}`")),
    }
}

pub(crate) fn parse_rows(n: usize, rows: &[(usize, &str)]) -> Result<AlgebraElement, TextError> {
    let mut entries = Vec::with_capacity(n * n);
    for &(line, row) in rows {
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != n {
            return Err(TextError {
                line,
                message: format!("expected {n} entries, found {}", tokens.len()),
            });
        }
        for t in tokens {
            entries.push(parse_complex(t).map_err(|message| TextError { line, message })?);
        }
    }
    AlgebraElement::from_entries(n, entries).map_err(|e| TextError {
        line: rows.first().map_or(1, |r| r.0),
        message: e.to_string(),
    })
}

/// Single-line form used in reports: `n|row;row;...` with entries separated
/// by spaces.
pub fn format_inline(m: &AlgebraElement) -> String {
    let n = m.dim();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| format_complex(m.get(i, j)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    format!("{n}|{}", rows.join(";"))
}

pub fn parse_inline(s: &str) -> Result<AlgebraElement, String> {
    let (head, body) = s.split_once('|').ok_or_else(|| format!("malformed inline matrix `{s}`"))?;
    let n = parse_dim(head.trim())?;
    let rows: Vec<(usize, &str)> = body.split(';').map(|r| (1, r)).collect();
    if rows.len() != n {
        return Err(format!("expected {n} rows in inline matrix, found {}", rows.len()));
    }
    parse_rows(n, &rows).map_err(|e| e.message)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(before, _)| before)
}
