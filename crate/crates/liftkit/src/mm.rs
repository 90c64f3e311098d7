//! Matrix Market reading and writing for dense complex matrices.
//!
//! Both the `array` (dense, column-major) and `coordinate` (sparse triplet)
//! formats are supported with `real` and `complex` fields and `general`
//! symmetry. Coordinate files are densified on read; real files are promoted
//! to complex with zero imaginary parts. Values are written in shortest
//! round-trip decimal form, so `read(write(m)) == m` bit for bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Matrix Market layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmFormat {
    Array,
    Coordinate,
}

/// Matrix Market value field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmField {
    Real,
    Complex,
}

/// A Matrix Market file description.
#[derive(Debug, Clone)]
pub struct MatrixFile {
    pub path: PathBuf,
    pub format: MmFormat,
    pub field: MmField,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

struct Header {
    format: MmFormat,
    field: MmField,
}

fn parse_header(line: &str) -> Result<Header> {
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("%%MatrixMarket") {
        return Err(parse_err(1, "file must start with %%MatrixMarket"));
    }
    if tokens.next() != Some("matrix") {
        return Err(parse_err(1, "only the matrix object is supported"));
    }
    let format = match tokens.next() {
        Some("array") => MmFormat::Array,
        Some("coordinate") => MmFormat::Coordinate,
        other => {
            return Err(parse_err(
                1,
                format!("unsupported format {:?}", other.unwrap_or("<missing>")),
            ))
        }
    };
    let field = match tokens.next() {
        Some("real") => MmField::Real,
        Some("complex") => MmField::Complex,
        other => {
            return Err(parse_err(
                1,
                format!("unsupported field {:?}", other.unwrap_or("<missing>")),
            ))
        }
    };
    match tokens.next() {
        Some("general") | None => {}
        Some(sym) => return Err(parse_err(1, format!("unsupported symmetry {sym:?}"))),
    }
    Ok(Header { format, field })
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("cannot parse number {token:?}")))
}

fn parse_index(token: &str, line: usize) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("cannot parse index {token:?}")))
}

/// Reads a Matrix Market file into a dense complex matrix. The header is
/// self-describing, so format and field come from the file itself.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<CMatrix> {
    let text = fs::read_to_string(path.as_ref())?;
    read_matrix_str(&text)
}

/// Parses Matrix Market text; see [`read_matrix`].
pub fn read_matrix_str(text: &str) -> Result<CMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(i, l)| *i == 1 || (!l.trim().is_empty() && !l.trim_start().starts_with('%')));

    let (_, header_line) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = parse_header(header_line)?;

    let (size_ln, size_line) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing size line"))?;
    let mut size_tokens = size_line.split_whitespace();
    let n_rows = parse_index(
        size_tokens.next().ok_or_else(|| parse_err(size_ln, "missing row count"))?,
        size_ln,
    )?;
    let n_cols = parse_index(
        size_tokens.next().ok_or_else(|| parse_err(size_ln, "missing column count"))?,
        size_ln,
    )?;

    match header.format {
        MmFormat::Array => {
            if size_tokens.next().is_some() {
                return Err(parse_err(size_ln, "array size line must be `rows cols`"));
            }
            let per_entry = match header.field {
                MmField::Real => 1,
                MmField::Complex => 2,
            };
            // column-major value stream; tokens may be split across lines
            let mut numbers = Vec::with_capacity(n_rows * n_cols * per_entry);
            let mut last_line = size_ln;
            for (ln, line) in lines {
                last_line = ln;
                for token in line.split_whitespace() {
                    numbers.push(parse_number(token, ln)?);
                }
            }
            let expected = n_rows * n_cols * per_entry;
            if numbers.len() != expected {
                return Err(parse_err(
                    last_line,
                    format!(
                        "expected {expected} values for a {n_rows}x{n_cols} array, found {}",
                        numbers.len()
                    ),
                ));
            }
            let mut m = CMatrix::zeros(n_rows, n_cols);
            let mut it = numbers.into_iter();
            for j in 0..n_cols {
                for i in 0..n_rows {
                    let re = it.next().unwrap();
                    let im = if per_entry == 2 { it.next().unwrap() } else { 0.0 };
                    m[(i, j)] = Complex64::new(re, im);
                }
            }
            Ok(m)
        }
        MmFormat::Coordinate => {
            let nnz = parse_index(
                size_tokens
                    .next()
                    .ok_or_else(|| parse_err(size_ln, "missing nonzero count"))?,
                size_ln,
            )?;
            let mut m = CMatrix::zeros(n_rows, n_cols);
            let mut seen = 0usize;
            let mut last_line = size_ln;
            for (ln, line) in lines {
                last_line = ln;
                let mut tokens = line.split_whitespace();
                let i = parse_index(
                    tokens.next().ok_or_else(|| parse_err(ln, "missing row index"))?,
                    ln,
                )?;
                let j = parse_index(
                    tokens.next().ok_or_else(|| parse_err(ln, "missing column index"))?,
                    ln,
                )?;
                if i < 1 || i > n_rows || j < 1 || j > n_cols {
                    return Err(parse_err(ln, format!("index ({i}, {j}) out of bounds")));
                }
                let re = parse_number(
                    tokens.next().ok_or_else(|| parse_err(ln, "missing value"))?,
                    ln,
                )?;
                let im = match header.field {
                    MmField::Real => 0.0,
                    MmField::Complex => parse_number(
                        tokens
                            .next()
                            .ok_or_else(|| parse_err(ln, "missing imaginary part"))?,
                        ln,
                    )?,
                };
                // repeated entries accumulate, matching triplet conventions
                m[(i - 1, j - 1)] += Complex64::new(re, im);
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    last_line,
                    format!("header promised {nnz} entries, found {seen}"),
                ));
            }
            Ok(m)
        }
    }
}

/// Serializes a matrix as Matrix Market text.
pub fn write_matrix_str(m: &CMatrix, format: MmFormat, field: MmField) -> String {
    let mut out = String::new();
    let format_name = match format {
        MmFormat::Array => "array",
        MmFormat::Coordinate => "coordinate",
    };
    let field_name = match field {
        MmField::Real => "real",
        MmField::Complex => "complex",
    };
    out.push_str(&format!(
        "%%MatrixMarket matrix {format_name} {field_name} general\n"
    ));
    match format {
        MmFormat::Array => {
            out.push_str(&format!("{} {}\n", m.nrows(), m.ncols()));
            for j in 0..m.ncols() {
                for i in 0..m.nrows() {
                    let z = m[(i, j)];
                    match field {
                        MmField::Real => out.push_str(&format!("{}\n", z.re)),
                        MmField::Complex => out.push_str(&format!("{} {}\n", z.re, z.im)),
                    }
                }
            }
        }
        MmFormat::Coordinate => {
            let nonzeros: Vec<(usize, usize, Complex64)> = (0..m.ncols())
                .flat_map(|j| (0..m.nrows()).map(move |i| (i, j)))
                .filter_map(|(i, j)| {
                    let z = m[(i, j)];
                    (z.re != 0.0 || z.im != 0.0).then_some((i, j, z))
                })
                .collect();
            out.push_str(&format!("{} {} {}\n", m.nrows(), m.ncols(), nonzeros.len()));
            for (i, j, z) in nonzeros {
                match field {
                    MmField::Real => out.push_str(&format!("{} {} {}\n", i + 1, j + 1, z.re)),
                    MmField::Complex => {
                        out.push_str(&format!("{} {} {} {}\n", i + 1, j + 1, z.re, z.im))
                    }
                }
            }
        }
    }
    out
}

/// Writes a matrix to disk; see [`write_matrix_str`]. Writing a matrix with
/// nonzero imaginary parts as `real` loses them, so the complex field should
/// be used unless the matrix is known real.
pub fn write_matrix(m: &CMatrix, file: &MatrixFile) -> Result<()> {
    let mut f = fs::File::create(&file.path)?;
    f.write_all(write_matrix_str(m, file.format, file.field).as_bytes())?;
    Ok(())
}

/// Field that preserves `m` exactly: `real` when every imaginary part is
/// zero, `complex` otherwise.
pub fn natural_field(m: &CMatrix) -> MmField {
    if m.iter().all(|z| z.im == 0.0) {
        MmField::Real
    } else {
        MmField::Complex
    }
}

/// Reads an `n x 1` Matrix Market array as a vector.
pub fn read_vector(path: impl AsRef<Path>) -> Result<CVector> {
    let m = read_matrix(path)?;
    if m.ncols() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: m.ncols(),
        });
    }
    Ok(m.column(0).into_owned())
}

/// Writes a vector as an `n x 1` Matrix Market array.
pub fn write_vector(v: &CVector, path: impl AsRef<Path>, field: MmField) -> Result<()> {
    let m = CMatrix::from_fn(v.len(), 1, |i, _| v[i]);
    write_matrix(
        &m,
        &MatrixFile {
            path: path.as_ref().to_path_buf(),
            format: MmFormat::Array,
            field,
        },
    )
}
