//! Plain-text matrix/vector files and CSV traces.
//!
//! A file is a sequence of blocks. Each block starts with a header line
//! `rows cols`, followed by exactly `rows` data lines of `cols` whitespace-
//! separated numbers. `#` starts a comment (whole-line or trailing); blank
//! lines are skipped. Vectors are single-column blocks. Numbers are written
//! back with 17 significant digits, so every value re-parses bit-identically.

use lae::lalg::{Matrix, Vector};
use std::path::Path;

/// Parse failure with file/line context.
#[derive(Debug)]
pub struct ParseError {
    pub path: String,
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.path, self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(path: &Path, line: usize, message: String) -> ParseError {
    ParseError {
        path: path.display().to_string(),
        line,
        message,
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(idx) => &line[..idx],
        None => line,
    }
}

/// Reads every block in the file, in order.
pub fn read_blocks(path: &Path) -> Result<Vec<Matrix>, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err(path, 0, format!("cannot read file: {e}")))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut blocks = Vec::new();
    while let Some((header_no, header)) = lines.next() {
        let dims: Vec<&str> = header.split_whitespace().collect();
        if dims.len() != 2 {
            return Err(err(
                path,
                header_no,
                format!("expected block header 'rows cols', got '{header}'"),
            ));
        }
        let rows: usize = dims[0]
            .parse()
            .map_err(|_| err(path, header_no, format!("invalid row count '{}'", dims[0])))?;
        let cols: usize = dims[1].parse().map_err(|_| {
            err(
                path,
                header_no,
                format!("invalid column count '{}'", dims[1]),
            )
        })?;
        if rows == 0 || cols == 0 {
            return Err(err(path, header_no, "dimensions must be positive".into()));
        }

        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let Some((line_no, line)) = lines.next() else {
                return Err(err(
                    path,
                    header_no,
                    format!("block ends after {r} of {rows} rows"),
                ));
            };
            let mut count = 0usize;
            for (c, token) in line.split_whitespace().enumerate() {
                let value: f64 = token.parse().map_err(|_| {
                    err(
                        path,
                        line_no,
                        format!("column {}: '{token}' is not a number", c + 1),
                    )
                })?;
                if !value.is_finite() {
                    return Err(err(
                        path,
                        line_no,
                        format!("column {}: '{token}' is not finite", c + 1),
                    ));
                }
                data.push(value);
                count += 1;
            }
            if count != cols {
                return Err(err(
                    path,
                    line_no,
                    format!("row has {count} values, expected {cols}"),
                ));
            }
        }
        let matrix = Matrix::new(rows, cols, data)
            .map_err(|e| err(path, header_no, format!("invalid block: {e}")))?;
        blocks.push(matrix);
    }
    if blocks.is_empty() {
        return Err(err(path, 0, "file contains no blocks".into()));
    }
    Ok(blocks)
}

/// Reads a file expected to contain exactly one matrix block.
pub fn read_matrix(path: &Path) -> Result<Matrix, ParseError> {
    let blocks = read_blocks(path)?;
    if blocks.len() != 1 {
        return Err(err(
            path,
            0,
            format!("expected exactly one block, found {}", blocks.len()),
        ));
    }
    Ok(blocks.into_iter().next().unwrap())
}

/// Reads a file expected to contain one single-column block.
pub fn read_vector(path: &Path) -> Result<Vector, ParseError> {
    let m = read_matrix(path)?;
    column_vector(path, &m)
}

/// Reinterprets a single-column block as a vector.
pub fn column_vector(path: &Path, m: &Matrix) -> Result<Vector, ParseError> {
    if m.cols() != 1 {
        return Err(err(
            path,
            0,
            format!(
                "expected a single-column block, got {}x{}",
                m.rows(),
                m.cols()
            ),
        ));
    }
    Ok(m.column(0))
}

/// Splits an `n × d` block into `n` row vectors of dimension `d`.
pub fn matrix_rows(m: &Matrix) -> Vec<Vector> {
    (0..m.rows())
        .map(|i| {
            Vector::new((0..m.cols()).map(|j| m.get(i, j)).collect()).expect("finite by parse")
        })
        .collect()
}

/// 17-significant-digit formatting: parses back to the identical `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
