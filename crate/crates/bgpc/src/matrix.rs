//! Dense complex matrices and their on-disk text formats.
//!
//! The `cmatrix` format is a plain-text container used by the CLI:
//!
//! ```text
//! # cmatrix <rows> <cols>
//! re im re im ...      (2*cols whitespace-separated floats per row)
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! write/parse cycles are bit-exact. The CSV form used by `convert` has no
//! header; each line holds `2*cols` comma-separated floats in the same
//! `re,im` order.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::{Error, Result, C64};

/// Dense complex matrix with explicit row/column counts, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: Array2<C64>,
}

impl ComplexMatrix {
    /// Build from row-major entries, checking length and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter {
                field: "rows/cols",
                reason: "matrix dimensions must be positive".into(),
            });
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                field: "entries",
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if !entries.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("entries"));
        }
        let data = Array2::from_shape_vec((rows, cols), entries).expect("shape checked above");
        Ok(Self { data })
    }

    /// Wrap an existing array, checking finiteness.
    pub fn from_array(data: Array2<C64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidParameter {
                field: "rows/cols",
                reason: "matrix dimensions must be positive".into(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite("entries"));
        }
        Ok(Self { data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[(r, c)]
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<C64> {
        self.data
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Serialize in the `cmatrix` text format.
    pub fn to_cmatrix_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# cmatrix {} {}", self.rows(), self.cols());
        for r in 0..self.rows() {
            let mut first = true;
            for c in 0..self.cols() {
                let z = self.data[(r, c)];
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{} {}", z.re, z.im);
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Parse the `cmatrix` text format, rejecting any dimension mismatch.
    pub fn parse_cmatrix_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            reason: "empty input".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "#" || fields[1] != "cmatrix" {
            return Err(Error::Parse {
                line: 1,
                reason: "expected header `# cmatrix <rows> <cols>`".into(),
            });
        }
        let rows: usize = fields[2].parse().map_err(|_| Error::Parse {
            line: 1,
            reason: format!("bad row count `{}`", fields[2]),
        })?;
        let cols: usize = fields[3].parse().map_err(|_| Error::Parse {
            line: 1,
            reason: format!("bad column count `{}`", fields[3]),
        })?;
        let mut entries = Vec::with_capacity(rows * cols);
        let mut seen_rows = 0usize;
        for (idx, line) in lines {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != 2 * cols {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected {} floats, got {}", 2 * cols, vals.len()),
                });
            }
            for pair in vals.chunks(2) {
                let re: f64 = pair[0].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("bad float `{}`", pair[0]),
                })?;
                let im: f64 = pair[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("bad float `{}`", pair[1]),
                })?;
                entries.push(C64::new(re, im));
            }
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(Error::Parse {
                line: seen_rows + 1,
                reason: format!("expected {} data rows, got {}", rows, seen_rows),
            });
        }
        Self::new(rows, cols, entries)
    }

    /// Serialize as header-less CSV of `re,im` pairs.
    pub fn to_pair_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rows() {
            let mut first = true;
            for c in 0..self.cols() {
                let z = self.data[(r, c)];
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{},{}", z.re, z.im);
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Parse the header-less CSV of `re,im` pairs; dimensions come from the data.
    pub fn parse_pair_csv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut cols = None;
        let mut rows = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<&str> = line.split(',').collect();
            if vals.len() % 2 != 0 {
                return Err(Error::Parse {
                    line: line_no,
                    reason: "odd number of fields (need re,im pairs)".into(),
                });
            }
            let c = vals.len() / 2;
            match cols {
                None => cols = Some(c),
                Some(expect) if expect != c => {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("expected {} pairs, got {}", expect, c),
                    })
                }
                _ => {}
            }
            for pair in vals.chunks(2) {
                let re: f64 = pair[0].trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("bad float `{}`", pair[0]),
                })?;
                let im: f64 = pair[1].trim().parse().map_err(|_| Error::Parse {
                    line: line_no,
                    reason: format!("bad float `{}`", pair[1]),
                })?;
                entries.push(C64::new(re, im));
            }
            rows += 1;
        }
        let cols = cols.ok_or(Error::Parse {
            line: 1,
            reason: "empty input".into(),
        })?;
        Self::new(rows, cols, entries)
    }

    pub fn write_cmatrix_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_cmatrix_text())?;
        Ok(())
    }

    pub fn read_cmatrix_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_cmatrix_text(&text)
    }
}
