//! Matrix and vector files: Matrix Market (array and coordinate) and a plain
//! dense text layout (`rows cols` header, then one row per line).

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hullsolve::DenseMatrixF64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

impl IoError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse { line, message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    /// Pick by the `%%MatrixMarket` banner.
    #[default]
    Auto,
    MatrixMarket,
    DenseText,
}

impl FromStr for MatrixFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "mm" | "mtx" | "matrix-market" | "matrixmarket" => Ok(Self::MatrixMarket),
            "dense" | "text" | "dense-text" => Ok(Self::DenseText),
            other => Err(format!("unknown matrix format `{other}` (auto, mm, dense)")),
        }
    }
}

fn read(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_path_buf(), source })
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<DenseMatrixF64, IoError> {
    parse_matrix(&read(path)?, format)
}

pub fn parse_matrix(text: &str, format: MatrixFormat) -> Result<DenseMatrixF64, IoError> {
    let format = match format {
        MatrixFormat::Auto if is_matrix_market(text) => MatrixFormat::MatrixMarket,
        MatrixFormat::Auto => MatrixFormat::DenseText,
        f => f,
    };
    let (rows, cols, data) = match format {
        MatrixFormat::MatrixMarket => parse_matrix_market(text)?,
        _ => parse_dense_text(text)?,
    };
    DenseMatrixF64::from_col_major(rows, cols, data).map_err(|e| IoError::parse(1, e.to_string()))
}

/// A vector is an `n × 1` (or `1 × n`) matrix in either format, or a bare
/// whitespace-separated list of numbers.
pub fn load_vector(path: &Path, format: MatrixFormat) -> Result<Vec<f64>, IoError> {
    parse_vector(&read(path)?, format)
}

pub fn parse_vector(text: &str, format: MatrixFormat) -> Result<Vec<f64>, IoError> {
    if format == MatrixFormat::MatrixMarket || (format == MatrixFormat::Auto && is_matrix_market(text)) {
        let (r, c, data) = parse_matrix_market(text)?;
        return as_vector(r, c, data);
    }
    let lines = content_lines(text, '#');
    let Some(&(first_no, first)) = lines.first() else {
        return Err(IoError::parse(1, "empty input"));
    };
    if format == MatrixFormat::DenseText || looks_like_header(first, &lines) {
        let (r, c, data) = parse_dense_text(text)?;
        return as_vector(r, c, data);
    }
    let mut out = Vec::new();
    for &(no, line) in &lines {
        for tok in line.split_whitespace() {
            out.push(number(tok, no)?);
        }
    }
    if out.is_empty() {
        return Err(IoError::parse(first_no, "no values"));
    }
    Ok(out)
}

fn as_vector(rows: usize, cols: usize, data: Vec<f64>) -> Result<Vec<f64>, IoError> {
    if rows != 1 && cols != 1 {
        return Err(IoError::DimensionMismatch { expected: 1, found: cols });
    }
    Ok(data)
}

/// `rows cols` with both integral and a body that fills exactly that many values.
fn looks_like_header(first: &str, lines: &[(usize, &str)]) -> bool {
    let toks: Vec<&str> = first.split_whitespace().collect();
    if toks.len() != 2 {
        return false;
    }
    let (Ok(r), Ok(c)) = (toks[0].parse::<usize>(), toks[1].parse::<usize>()) else {
        return false;
    };
    let body: usize = lines[1..].iter().map(|(_, l)| l.split_whitespace().count()).sum();
    body == r * c
}

fn is_matrix_market(text: &str) -> bool {
    text.trim_start().starts_with("%%MatrixMarket")
}

/// Non-blank lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str, comment: char) -> Vec<(usize, &str)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split(comment).next().unwrap_or("").trim();
            (!l.is_empty()).then_some((i + 1, l))
        })
        .collect()
}

fn number(tok: &str, line: usize) -> Result<f64, IoError> {
    let v: f64 = tok.parse().map_err(|_| IoError::parse(line, format!("not a number: `{tok}`")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(IoError::parse(line, format!("non-finite value `{tok}`")))
    }
}

fn dims(tok: &[&str], want: usize, line: usize) -> Result<Vec<usize>, IoError> {
    if tok.len() != want {
        return Err(IoError::parse(line, format!("expected {want} integers, found {}", tok.len())));
    }
    tok.iter().map(|t| t.parse().map_err(|_| IoError::parse(line, format!("not a size: `{t}`")))).collect()
}

/// Column-major data.
fn parse_dense_text(text: &str) -> Result<(usize, usize, Vec<f64>), IoError> {
    let lines = content_lines(text, '#');
    let Some(&(hline, header)) = lines.first() else {
        return Err(IoError::parse(1, "empty input, expected `rows cols`"));
    };
    let d = dims(&header.split_whitespace().collect::<Vec<_>>(), 2, hline)?;
    let (rows, cols) = (d[0], d[1]);
    if rows == 0 || cols == 0 {
        return Err(IoError::parse(hline, "matrix must be non-empty"));
    }
    let body = &lines[1..];
    if body.len() != rows {
        let line = body.last().map_or(hline, |l| l.0);
        return Err(IoError::parse(line, format!("expected {rows} rows, found {}", body.len())));
    }
    let mut data = vec![0.0; rows * cols];
    for (i, &(no, line)) in body.iter().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != cols {
            return Err(IoError::parse(no, format!("expected {cols} values, found {}", toks.len())));
        }
        for (j, t) in toks.iter().enumerate() {
            data[j * rows + i] = number(t, no)?;
        }
    }
    Ok((rows, cols, data))
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Skew,
}

fn parse_matrix_market(text: &str) -> Result<(usize, usize, Vec<f64>), IoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (bno, banner) = lines.find(|(_, l)| !l.is_empty()).ok_or_else(|| IoError::parse(1, "empty input"))?;
    let fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(IoError::parse(bno, "expected `%%MatrixMarket matrix <layout> <field> <symmetry>`"));
    }
    let coordinate = match fields[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(IoError::parse(bno, format!("unsupported layout `{other}`"))),
    };
    match fields[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(IoError::parse(bno, format!("unsupported field `{other}`"))),
    }
    let sym = match fields[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(IoError::parse(bno, format!("unsupported symmetry `{other}`"))),
    };

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (sno, size) = body.next().ok_or_else(|| IoError::parse(bno + 1, "missing size line"))?;
    let size: Vec<&str> = size.split_whitespace().collect();
    let d = dims(&size, if coordinate { 3 } else { 2 }, sno)?;
    let (rows, cols) = (d[0], d[1]);
    if rows == 0 || cols == 0 {
        return Err(IoError::parse(sno, "matrix must be non-empty"));
    }
    if sym != Symmetry::General && rows != cols {
        return Err(IoError::parse(sno, "symmetric storage requires a square matrix"));
    }
    let mut data = vec![0.0; rows * cols];
    let mut place = |i: usize, j: usize, v: f64| {
        data[j * rows + i] = v;
        if i != j {
            match sym {
                Symmetry::General => {}
                Symmetry::Symmetric => data[i * rows + j] = v,
                Symmetry::Skew => data[i * rows + j] = -v,
            }
        }
    };

    let mut last = sno;
    if coordinate {
        let nnz = d[2];
        let mut seen = 0;
        for (no, line) in body {
            last = no;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(IoError::parse(no, format!("expected `row col value`, found {} fields", t.len())));
            }
            let ij = dims(&t[..2], 2, no)?;
            let (i, j) = (ij[0], ij[1]);
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(IoError::parse(no, format!("index ({i}, {j}) outside {rows}×{cols}")));
            }
            place(i - 1, j - 1, number(t[2], no)?);
            seen += 1;
        }
        if seen != nnz {
            return Err(IoError::parse(last, format!("expected {nnz} entries, found {seen}")));
        }
    } else {
        // Column-major; symmetric variants list the lower triangle only.
        let slots: Vec<(usize, usize)> = (0..cols)
            .flat_map(|j| {
                let start = match sym {
                    Symmetry::General => 0,
                    Symmetry::Symmetric => j,
                    Symmetry::Skew => j + 1,
                };
                (start..rows).map(move |i| (i, j))
            })
            .collect();
        let mut k = 0;
        for (no, line) in body {
            last = no;
            for tok in line.split_whitespace() {
                let Some(&(i, j)) = slots.get(k) else {
                    return Err(IoError::parse(no, format!("more than {} values", slots.len())));
                };
                place(i, j, number(tok, no)?);
                k += 1;
            }
        }
        if k != slots.len() {
            return Err(IoError::parse(last, format!("expected {} values, found {k}", slots.len())));
        }
    }
    Ok((rows, cols, data))
}

/// Rows of a dense matrix, used for point sets where each row is a point.
pub fn rows_of(m: &DenseMatrixF64) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

pub fn write_matrix_market_array(m: &DenseMatrixF64) -> String {
    let mut s = format!("%%MatrixMarket matrix array real general\n{} {}\n", m.rows(), m.cols());
    for c in m.columns() {
        for v in c {
            s.push_str(&format!("{v}\n"));
        }
    }
    s
}
