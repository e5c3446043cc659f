//! Dense matrix files: MatrixMarket array format and headerless CSV.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DeimError, Result};
use crate::matrix::Matrix;

const MM_HEADER: &str = "%%MatrixMarket matrix array real general";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    MatrixMarket,
    Csv,
}

impl MatrixFormat {
    /// `.csv` means CSV; everything else is written as MatrixMarket.
    pub fn from_path(path: &Path) -> MatrixFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ => MatrixFormat::MatrixMarket,
        }
    }
}

/// Reads a matrix, detecting the format from the header line.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix(&text)
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(text)
    } else {
        parse_csv(text)
    }
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let v: f64 = token.trim().parse().map_err(|_| DeimError::Parse {
        line,
        message: format!("not a number: {token:?}"),
    })?;
    if !v.is_finite() {
        return Err(DeimError::Parse {
            line,
            message: format!("non-finite value {token:?}"),
        });
    }
    Ok(v)
}

fn parse_matrix_market(text: &str) -> Result<Matrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().expect("caller checked the header");
    let fields: Vec<String> = header
        .split_whitespace()
        .map(|s| s.to_ascii_lowercase())
        .collect();
    if fields.len() < 5
        || fields[1] != "matrix"
        || fields[2] != "array"
        || fields[3] != "real"
        || fields[4] != "general"
    {
        return Err(DeimError::Parse {
            line: 1,
            message: format!("unsupported MatrixMarket header {header:?}"),
        });
    }
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body.next().ok_or(DeimError::Parse {
        line: 2,
        message: "missing size line".into(),
    })?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| DeimError::Parse {
            line: size_line + 1,
            message: format!("bad size line {size:?}"),
        })?;
    if dims.len() != 2 || dims[0] == 0 || dims[1] == 0 {
        return Err(DeimError::Parse {
            line: size_line + 1,
            message: format!("bad size line {size:?}"),
        });
    }
    let (rows, cols) = (dims[0], dims[1]);
    let mut data = Vec::with_capacity(rows * cols);
    for (idx, line) in body {
        for tok in line.split_whitespace() {
            data.push(parse_value(tok, idx + 1)?);
        }
    }
    if data.len() != rows * cols {
        return Err(DeimError::Parse {
            line: 0,
            message: format!("expected {} values, found {}", rows * cols, data.len()),
        });
    }
    Matrix::from_col_major(rows, cols, data)
}

fn parse_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| parse_value(t, idx + 1))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(DeimError::Parse {
                    line: idx + 1,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(DeimError::Parse {
            line: 1,
            message: "empty matrix".into(),
        });
    }
    Ok(Matrix::from_rows(&rows))
}

/// Writes in the format implied by the extension, with 17 significant digits.
pub fn write_matrix(path: impl AsRef<Path>, a: &Matrix) -> Result<()> {
    let path = path.as_ref();
    let mut out = BufWriter::new(fs::File::create(path)?);
    match MatrixFormat::from_path(path) {
        MatrixFormat::MatrixMarket => {
            writeln!(out, "{MM_HEADER}")?;
            writeln!(out, "{} {}", a.rows(), a.cols())?;
            for v in a.as_slice() {
                writeln!(out, "{v:.16e}")?;
            }
        }
        MatrixFormat::Csv => {
            for i in 0..a.rows() {
                let line: Vec<String> = (0..a.cols())
                    .map(|j| format!("{:.16e}", a[(i, j)]))
                    .collect();
                writeln!(out, "{}", line.join(","))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Sample coordinates (times or parameter values) for the columns of a snapshot file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSidecar {
    pub coordinates: Vec<f64>,
}

/// `foo.mtx` → `foo.mtx.json`.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}

pub fn write_sidecar(path: impl AsRef<Path>, coordinates: &[f64]) -> Result<()> {
    let side = SnapshotSidecar {
        coordinates: coordinates.to_vec(),
    };
    fs::write(
        sidecar_path(path.as_ref()),
        serde_json::to_string_pretty(&side)?,
    )?;
    Ok(())
}

/// Coordinates from the sidecar next to `path`, if one exists.
pub fn read_sidecar(path: impl AsRef<Path>) -> Result<Option<Vec<f64>>> {
    let side = sidecar_path(path.as_ref());
    if !side.exists() {
        return Ok(None);
    }
    let parsed: SnapshotSidecar = serde_json::from_str(&fs::read_to_string(side)?)?;
    Ok(Some(parsed.coordinates))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_market_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let a = Matrix::from_fn(3, 2, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0) * 1e-7);
        let p = dir.path().join("a.mtx");
        write_matrix(&p, &a).unwrap();
        assert_eq!(read_matrix(&p).unwrap(), a);
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with(MM_HEADER));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let a = Matrix::from_fn(2, 4, |i, j| std::f64::consts::PI * (i * 4 + j) as f64 - 2.0);
        let p = dir.path().join("a.csv");
        write_matrix(&p, &a).unwrap();
        assert_eq!(read_matrix(&p).unwrap(), a);
    }

    #[test]
    fn rejects_nan_and_ragged_rows() {
        assert!(parse_matrix("1,2\n3,NaN\n").is_err());
        assert!(parse_matrix("1,2\n3\n").is_err());
        assert!(parse_matrix("%%MatrixMarket matrix array real general\n2 1\n1\ninf\n").is_err());
        assert!(parse_matrix("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n").is_err());
    }

    #[test]
    fn matrix_market_is_column_major_with_comments() {
        let a = parse_matrix("%%MatrixMarket matrix array real general\n% note\n2 2\n1\n2\n3\n4\n")
            .unwrap();
        assert_eq!(a, Matrix::from_rows(&[[1.0, 3.0], [2.0, 4.0]]));
    }

    #[test]
    fn sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.mtx");
        assert_eq!(read_sidecar(&p).unwrap(), None);
        write_sidecar(&p, &[0.0, 0.5]).unwrap();
        assert_eq!(read_sidecar(&p).unwrap(), Some(vec![0.0, 0.5]));
    }
}
