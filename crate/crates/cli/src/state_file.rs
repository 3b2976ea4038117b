//! Plain-text matrix files.
//!
//! ```text
//! # comment
//! dims: 2 2          (or `dim: 4`)
//! 0.5+0j 0+0j 0+0j 0.5+0j
//! ...
//! ```
//!
//! Each row holds whitespace-separated complex tokens `a+bj`; a bare real
//! `a` or imaginary `bj` is also accepted.

use std::path::Path;

use num_complex::Complex64;
use skewlqu::{BipartiteState, ComplexMatrix, DensityMatrix, Error, Result};

/// A state read from disk, bipartite when the header says `dims:`.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Single(DensityMatrix),
    Bipartite(BipartiteState),
}

impl LoadedState {
    pub fn density(&self) -> &DensityMatrix {
        match self {
            LoadedState::Single(s) => s,
            LoadedState::Bipartite(b) => b.state(),
        }
    }
}

/// Parses one complex token.
pub fn parse_complex(token: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad complex token {token:?}"));
    let Some(body) = token.strip_suffix('j') else {
        return token.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].parse::<f64>().map_err(|_| bad())?;
            let im_text = &body[i..];
            let im = match im_text {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_text.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(Complex64::new(0.0, im))
        }
    }
}

/// Header dimensions and the matrix body.
pub fn parse_matrix(text: &str) -> Result<(Vec<usize>, ComplexMatrix)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    let (key, rest) = header.split_once(':').ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
    let dims: Vec<usize> = rest
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad dimension {t:?}"))))
        .collect::<Result<_>>()?;
    match (key.trim(), dims.len()) {
        ("dim", 1) | ("dims", 2) => {}
        _ => return Err(Error::Parse(format!("header must be `dim: n` or `dims: n_a n_b`, got {header:?}"))),
    }
    let n: usize = dims.iter().product();
    if n == 0 {
        return Err(Error::Parse("dimension must be positive".into()));
    }
    let mut entries = Vec::with_capacity(n * n);
    let mut rows = 0;
    for line in lines {
        let row: Vec<Complex64> = line.split_whitespace().map(parse_complex).collect::<Result<_>>()?;
        if row.len() != n {
            return Err(Error::Parse(format!("row {} has {} entries, expected {n}", rows + 1, row.len())));
        }
        entries.extend(row);
        rows += 1;
    }
    if rows != n {
        return Err(Error::Parse(format!("found {rows} rows, expected {n}")));
    }
    Ok((dims, ComplexMatrix::from_row_slice(n, n, &entries)))
}

pub fn parse_state(text: &str) -> Result<LoadedState> {
    let (dims, matrix) = parse_matrix(text)?;
    let state = DensityMatrix::new(matrix)?;
    match dims[..] {
        [_] => Ok(LoadedState::Single(state)),
        [n_a, n_b] => Ok(LoadedState::Bipartite(BipartiteState::new(state, n_a, n_b)?)),
        _ => unreachable!("header arity checked"),
    }
}

pub fn load_state(path: &Path) -> Result<LoadedState> {
    parse_state(&std::fs::read_to_string(path)?)
}

/// Renders a matrix in the same format, with a `dim:` or `dims:` header.
pub fn format_matrix(dims: &[usize], m: &ComplexMatrix) -> String {
    let header = match dims {
        [n] => format!("dim: {n}"),
        _ => format!("dims: {}", dims.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")),
    };
    let mut out = header;
    out.push('\n');
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| {
                let z = m[(i, j)];
                format!("{:e}{}{:e}j", z.re, if z.im.is_sign_negative() { "" } else { "+" }, z.im)
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
