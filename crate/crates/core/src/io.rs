//! Plain-text matrix files and the ground-truth sidecar.
//!
//! Matrix format: a header line `rows cols`, then one line per row of
//! whitespace-separated decimals written with 17 significant digits, which
//! round-trips every `f64` exactly.
//!
//! Sidecar format: a header `n p r`, then three lines holding the pair moduli,
//! the pair angles and the real eigenvalues (an empty line when a list is
//! empty), then the Schur vectors in matrix format.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dense::{BlockSchur, DenseMatrix};
use crate::error::{Error, Result};

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_row(out: &mut String, row: &[f64]) {
    for (k, &x) in row.iter().enumerate() {
        if k > 0 {
            out.push(' ');
        }
        out.push_str(&fmt_f64(x));
    }
    out.push('\n');
}

pub fn matrix_to_string(a: &DenseMatrix) -> String {
    let mut out = String::with_capacity(a.rows() * a.cols() * 25 + 16);
    let _ = writeln!(out, "{} {}", a.rows(), a.cols());
    for i in 0..a.rows() {
        write_row(&mut out, a.row(i));
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(s: &'a str) -> Self {
        Self {
            inner: s.lines().enumerate(),
        }
    }

    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unexpected end of input, expected {what}"),
            })
    }

    fn floats(&mut self, what: &str, expect: usize) -> Result<Vec<f64>> {
        let (line, text) = self.next_line(what)?;
        let vals = parse_floats(line, text)?;
        if vals.len() != expect {
            return Err(Error::Parse {
                line,
                msg: format!("{what}: expected {expect} values, found {}", vals.len()),
            });
        }
        Ok(vals)
    }

    fn header(&mut self, what: &str, count: usize) -> Result<Vec<usize>> {
        let (line, text) = self.next_line(what)?;
        let dims: Vec<usize> = text
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line,
                msg: format!("{what}: {e}"),
            })?;
        if dims.len() != count {
            return Err(Error::Parse {
                line,
                msg: format!("{what}: expected {count} integers, found {}", dims.len()),
            });
        }
        Ok(dims)
    }

    fn matrix(&mut self) -> Result<DenseMatrix> {
        let dims = self.header("matrix header 'rows cols'", 2)?;
        let (rows, cols) = (dims[0], dims[1]);
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            data.extend(self.floats(&format!("row {}", i + 1), cols)?);
        }
        DenseMatrix::new(rows, cols, data)
    }
}

fn parse_floats(line: usize, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("'{t}': {e}"),
            })
        })
        .collect()
}

pub fn matrix_from_str(s: &str) -> Result<DenseMatrix> {
    Lines::new(s).matrix()
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    matrix_from_str(&fs::read_to_string(path)?)
}

pub fn write_matrix(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    fs::write(path, matrix_to_string(a))?;
    Ok(())
}

pub fn schur_to_string(bs: &BlockSchur) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", bs.n(), bs.p(), bs.r());
    write_row(&mut out, &bs.lambda);
    write_row(&mut out, &bs.theta);
    write_row(&mut out, &bs.lambda_real);
    out.push_str(&matrix_to_string(&bs.q));
    out
}

pub fn schur_from_str(s: &str) -> Result<BlockSchur> {
    let mut lines = Lines::new(s);
    let dims = lines.header("sidecar header 'n p r'", 3)?;
    let (n, p, r) = (dims[0], dims[1], dims[2]);
    if n != 2 * p + r {
        return Err(Error::Parse {
            line: 1,
            msg: format!("n = {n} differs from 2p + r = {}", 2 * p + r),
        });
    }
    let lambda = lines.floats("pair moduli", p)?;
    let theta = lines.floats("pair angles", p)?;
    let lambda_real = lines.floats("real eigenvalues", r)?;
    let q = lines.matrix()?;
    BlockSchur::new(q, lambda, theta, lambda_real)
}

pub fn read_schur(path: impl AsRef<Path>) -> Result<BlockSchur> {
    schur_from_str(&fs::read_to_string(path)?)
}

pub fn write_schur(path: impl AsRef<Path>, bs: &BlockSchur) -> Result<()> {
    fs::write(path, schur_to_string(bs))?;
    Ok(())
}
