//! Dense row-major storage, strided views, norms and structural predicates.
//!
//! Every matrix in the crate is stored row-major: entry `(i, j)` of an
//! `r x c` matrix lives at `data[i * c + j]`. Kernels consume this layout
//! directly; column access is done through strided [`MatRef`] views rather
//! than transposed copies.

mod schur_form;

pub use schur_form::{assemble_schur_matrix, schur_to_eigen, BlockSchur, ComplexMatrix, EigenDecomposition};

use std::fmt;
use std::ops::{Index, IndexMut, Range};

use crate::error::{Error, Result};

/// Machine epsilon of `f64`.
pub const EPS: f64 = f64::EPSILON;

/// Default relative residual tolerance for `||AQ - QS||_F / ||A||_F`.
pub const TOL_RES: f64 = 1e-12;

/// Default orthogonality tolerance `32 eps sqrt(n)` for `||Q^T Q - I||_F / sqrt(n)`.
pub fn tol_orth(n: usize) -> f64 {
    32.0 * EPS * (n.max(1) as f64).sqrt()
}

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_vec_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().copied()).collect())
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[f64]) {
        assert_eq!(values.len(), self.rows);
        for (i, &v) in values.iter().enumerate() {
            self.data[i * self.cols + j] = v;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn view(&self) -> MatRef<'_> {
        MatRef {
            data: &self.data,
            offset: 0,
            rows: self.rows,
            cols: self.cols,
            rs: self.cols as isize,
            cs: 1,
        }
    }

    /// View of the transpose without copying.
    pub fn t(&self) -> MatRef<'_> {
        self.view().t()
    }

    /// View of a contiguous column range.
    pub fn columns(&self, range: Range<usize>) -> MatRef<'_> {
        self.view().columns(range)
    }

    pub fn transpose(&self) -> DenseMatrix {
        self.t().to_owned()
    }

    /// Copies the listed columns, in order, into a new matrix.
    pub fn select_columns(&self, idx: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            let src = self.row(i);
            let dst = out.row_mut(i);
            for (d, &j) in dst.iter_mut().zip(idx) {
                *d = src[j];
            }
        }
        out
    }

    /// Writes the columns of `src` into the listed columns of `self`.
    pub fn scatter_columns(&mut self, idx: &[usize], src: &DenseMatrix) {
        assert_eq!(src.rows, self.rows);
        assert_eq!(src.cols, idx.len());
        for i in 0..self.rows {
            let s = src.row(i);
            let base = i * self.cols;
            for (k, &j) in idx.iter().enumerate() {
                self.data[base + j] = s[k];
            }
        }
    }

    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> DenseMatrix {
        self.view().rows(rows).columns(cols).to_owned()
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        matmul(self.view(), rhs.view())
    }

    pub fn scale(&self, alpha: f64) -> DenseMatrix {
        DenseMatrix::from_vec_unchecked(self.rows, self.cols, self.data.iter().map(|x| alpha * x).collect())
    }

    pub fn add(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), rhs.shape());
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        DenseMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.shape(), rhs.shape());
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        DenseMatrix::from_vec_unchecked(self.rows, self.cols, data)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(12) {
                write!(f, "{:>12.5e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Borrowed strided view into a matrix buffer.
#[derive(Clone, Copy)]
pub struct MatRef<'a> {
    data: &'a [f64],
    offset: usize,
    rows: usize,
    cols: usize,
    rs: isize,
    cs: isize,
}

impl<'a> MatRef<'a> {
    pub fn rows(self, range: Range<usize>) -> MatRef<'a> {
        assert!(range.end <= self.rows);
        MatRef {
            offset: (self.offset as isize + range.start as isize * self.rs) as usize,
            rows: range.len(),
            ..self
        }
    }

    pub fn columns(self, range: Range<usize>) -> MatRef<'a> {
        assert!(range.end <= self.cols);
        MatRef {
            offset: (self.offset as isize + range.start as isize * self.cs) as usize,
            cols: range.len(),
            ..self
        }
    }

    /// Every `step`-th column starting at `start`.
    pub fn strided_columns(self, start: usize, step: usize) -> MatRef<'a> {
        let cols = if start >= self.cols {
            0
        } else {
            (self.cols - start).div_ceil(step)
        };
        MatRef {
            offset: (self.offset as isize + start as isize * self.cs) as usize,
            cols,
            cs: self.cs * step as isize,
            ..self
        }
    }

    pub fn t(self) -> MatRef<'a> {
        MatRef {
            rows: self.cols,
            cols: self.rows,
            rs: self.cs,
            cs: self.rs,
            ..self
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[(self.offset as isize + i as isize * self.rs + j as isize * self.cs) as usize]
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn to_owned(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }
}

/// `C = A B` for strided views.
pub fn matmul(a: MatRef<'_>, b: MatRef<'_>) -> DenseMatrix {
    let mut c = DenseMatrix::zeros(a.rows, b.cols);
    gemm_into(1.0, a, b, 0.0, &mut c);
    c
}

/// `C <- alpha A B + beta C`.
pub fn gemm_into(alpha: f64, a: MatRef<'_>, b: MatRef<'_>, beta: f64, c: &mut DenseMatrix) {
    assert_eq!((a.rows, b.cols), c.shape(), "output shape differs");
    gemm_block(alpha, a, b, beta, c, 0, 0);
}

/// `C[r0.., c0..] <- alpha A B + beta C[r0.., c0..]` on the block of `c` whose
/// top-left corner is `(r0, c0)` and whose shape is that of `A B`.
pub fn gemm_block(alpha: f64, a: MatRef<'_>, b: MatRef<'_>, beta: f64, c: &mut DenseMatrix, r0: usize, c0: usize) {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    let (m, k, n) = (a.rows, a.cols, b.cols);
    assert!(r0 + m <= c.rows && c0 + n <= c.cols, "output block out of range");
    if m == 0 || n == 0 {
        return;
    }
    let ldc = c.cols;
    if k == 0 {
        for i in r0..r0 + m {
            for x in &mut c.data[i * ldc + c0..i * ldc + c0 + n] {
                *x *= beta;
            }
        }
        return;
    }
    // SAFETY: view constructors keep every addressed element of `a` and `b`
    // inside their buffers, and the output block was bounds-checked above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr().add(a.offset),
            a.rs,
            a.cs,
            b.data.as_ptr().add(b.offset),
            b.rs,
            b.cs,
            beta,
            c.data.as_mut_ptr().add(r0 * ldc + c0),
            ldc as isize,
            1,
        );
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Four accumulators let the compiler vectorize without reassociation flags.
    let mut acc = [0.0_f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

/// `y += alpha x`.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let s: f64 = x.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    norm2(&a.data)
}

fn require_square(a: &DenseMatrix) -> Result<usize> {
    if a.is_square() {
        Ok(a.rows)
    } else {
        Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        })
    }
}

/// `(A + A^T) / 2`.
pub fn sym_part(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = require_square(a)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)])))
}

/// `(A - A^T) / 2`. The result is exactly skew-symmetric.
pub fn skew_part(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = require_square(a)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] - a[(j, i)])))
}

/// `||A A^T - A^T A||_F / ||A||_F^2`, zero for the zero matrix.
pub fn normality_defect(a: &DenseMatrix) -> Result<f64> {
    require_square(a)?;
    let na = frobenius_norm(a);
    if na == 0.0 {
        return Ok(0.0);
    }
    let aat = matmul(a.view(), a.t());
    let ata = matmul(a.t(), a.view());
    Ok(frobenius_norm(&aat.sub(&ata)) / (na * na))
}

/// `||Q^T Q - I||_F / sqrt(n)` where `n` is the column count.
pub fn orthogonality_defect(q: &DenseMatrix) -> f64 {
    let n = q.cols;
    if n == 0 {
        return 0.0;
    }
    let mut g = matmul(q.t(), q.view());
    for i in 0..n {
        g[(i, i)] -= 1.0;
    }
    frobenius_norm(&g) / (n as f64).sqrt()
}

/// `||A + A^T||_F / ||A||_F` (zero for the zero matrix).
pub fn skew_defect(a: &DenseMatrix) -> Result<f64> {
    let n = require_square(a)?;
    let na = frobenius_norm(a);
    if na == 0.0 {
        return Ok(0.0);
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)] + a[(j, i)];
            s += v * v;
        }
    }
    Ok(s.sqrt() / na)
}

/// `||A - A^T||_F / ||A||_F` (zero for the zero matrix).
pub fn symmetry_defect(a: &DenseMatrix) -> Result<f64> {
    let n = require_square(a)?;
    let na = frobenius_norm(a);
    if na == 0.0 {
        return Ok(0.0);
    }
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = a[(i, j)] - a[(j, i)];
            s += v * v;
        }
    }
    Ok(s.sqrt() / na)
}

/// Determinant by partial-pivot LU; used only for special-orthogonality checks.
pub fn determinant(a: &DenseMatrix) -> Result<f64> {
    let n = require_square(a)?;
    let mut m = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&x, &y| m[(x, k)].abs().total_cmp(&m[(y, k)].abs()))
            .unwrap_or(k);
        if m[(piv, k)] == 0.0 {
            return Ok(0.0);
        }
        if piv != k {
            for j in 0..n {
                m.data.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = m[(k, k)];
        det *= pivot;
        for i in k + 1..n {
            let f = m[(i, k)] / pivot;
            if f != 0.0 {
                for j in k..n {
                    m.data[i * n + j] -= f * m.data[k * n + j];
                }
            }
        }
    }
    Ok(det)
}

/// `||A Q - Q S||_F / ||A||_F`.
pub fn schur_residual(a: &DenseMatrix, q: &DenseMatrix, s: &DenseMatrix) -> f64 {
    let aq = a.matmul(q);
    let qs = q.matmul(s);
    let na = frobenius_norm(a);
    let r = frobenius_norm(&aq.sub(&qs));
    if na == 0.0 {
        r
    } else {
        r / na
    }
}
