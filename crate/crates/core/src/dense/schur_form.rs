use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Permuted real Schur form `A = Q S Q^T` of a normal matrix.
///
/// With `n = 2p + r`, the columns of `q` are laid out as `[first p | middle r | last p]`.
/// Pair `j` occupies columns `j` and `p + r + j` and carries the block
/// `lambda_j [[cos, -sin], [sin, cos]](theta_j)`; the middle columns carry the
/// real eigenvalues `lambda_real`.
#[derive(Debug, Clone)]
pub struct BlockSchur {
    pub q: DenseMatrix,
    pub lambda: Vec<f64>,
    pub theta: Vec<f64>,
    pub lambda_real: Vec<f64>,
}

impl BlockSchur {
    /// Validates shapes and the `lambda > 0`, `theta in (0, pi)` ranges.
    pub fn new(q: DenseMatrix, lambda: Vec<f64>, theta: Vec<f64>, lambda_real: Vec<f64>) -> Result<Self> {
        let p = lambda.len();
        if theta.len() != p {
            return Err(Error::DimensionMismatch(format!(
                "{} moduli but {} angles",
                p,
                theta.len()
            )));
        }
        let n = 2 * p + lambda_real.len();
        if q.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "Schur vectors are {}x{}, expected {n}x{n}",
                q.rows(),
                q.cols()
            )));
        }
        if let Some(&l) = lambda.iter().find(|&&l| l <= 0.0 || !l.is_finite()) {
            return Err(Error::InvalidParameter(format!("pair modulus {l} must be positive")));
        }
        if let Some(&t) = theta.iter().find(|&&t| !(t > 0.0 && t < std::f64::consts::PI)) {
            return Err(Error::InvalidParameter(format!("pair angle {t} outside (0, pi)")));
        }
        if lambda_real.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite real eigenvalue".into()));
        }
        Ok(Self {
            q,
            lambda,
            theta,
            lambda_real,
        })
    }

    pub fn n(&self) -> usize {
        self.q.rows()
    }

    pub fn p(&self) -> usize {
        self.lambda.len()
    }

    pub fn r(&self) -> usize {
        self.lambda_real.len()
    }

    /// `lambda_j cos theta_j` for every pair.
    pub fn real_parts(&self) -> Vec<f64> {
        self.lambda.iter().zip(&self.theta).map(|(l, t)| l * t.cos()).collect()
    }

    /// `lambda_j sin theta_j` for every pair.
    pub fn imag_parts(&self) -> Vec<f64> {
        self.lambda.iter().zip(&self.theta).map(|(l, t)| l * t.sin()).collect()
    }

    pub fn schur_matrix(&self) -> DenseMatrix {
        assemble_schur_matrix(self)
    }

    /// All `n` eigenvalues in the order used by [`schur_to_eigen`].
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n());
        for (&l, &t) in self.lambda.iter().zip(&self.theta) {
            out.push(Complex64::from_polar(l, t));
            out.push(Complex64::from_polar(l, -t));
        }
        out.extend(self.lambda_real.iter().map(|&x| Complex64::new(x, 0.0)));
        out
    }

    /// Rebuilds `Q S Q^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let qs = self.q.matmul(&self.schur_matrix());
        super::matmul(qs.view(), self.q.t())
    }
}

/// Expands a [`BlockSchur`] into its dense quasi-diagonal `S`.
pub fn assemble_schur_matrix(bs: &BlockSchur) -> DenseMatrix {
    let (n, p, r) = (bs.n(), bs.p(), bs.r());
    let mut s = DenseMatrix::zeros(n, n);
    for j in 0..p {
        let (sn, cs) = bs.theta[j].sin_cos();
        let (c, si) = (bs.lambda[j] * cs, bs.lambda[j] * sn);
        let k = p + r + j;
        s[(j, j)] = c;
        s[(k, k)] = c;
        s[(j, k)] = -si;
        s[(k, j)] = si;
    }
    for (i, &x) in bs.lambda_real.iter().enumerate() {
        s[(p + i, p + i)] = x;
    }
    s
}

/// Row-major complex matrix, used only for eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `||A V - V diag(values)||_F / ||A||_F`.
    pub fn residual(&self, a: &DenseMatrix) -> f64 {
        let n = a.rows();
        let mut sum = 0.0;
        for j in 0..self.vectors.cols() {
            let v = self.vectors.column(j);
            for i in 0..n {
                let av: Complex64 = a.row(i).iter().zip(&v).map(|(&x, &y)| y * x).sum();
                sum += (av - self.values[j] * v[i]).norm_sqr();
            }
        }
        let na = super::frobenius_norm(a);
        if na == 0.0 {
            sum.sqrt()
        } else {
            sum.sqrt() / na
        }
    }
}

/// Complex eigendecomposition from the real Schur form.
///
/// Pair `j` yields `lambda e^{+i theta}` with vector `(q1 - i q2) / sqrt 2` followed by
/// `lambda e^{-i theta}` with vector `(q1 + i q2) / sqrt 2`, where `q1`, `q2` are
/// the pair's two Schur columns; real eigenvalues follow in middle-block order.
pub fn schur_to_eigen(bs: &BlockSchur) -> EigenDecomposition {
    let (n, p, r) = (bs.n(), bs.p(), bs.r());
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut vectors = ComplexMatrix::zeros(n, n);
    for j in 0..p {
        let k = p + r + j;
        for i in 0..n {
            let (a, b) = (h * bs.q[(i, j)], h * bs.q[(i, k)]);
            vectors.set(i, 2 * j, Complex64::new(a, -b));
            vectors.set(i, 2 * j + 1, Complex64::new(a, b));
        }
    }
    for m in 0..r {
        for i in 0..n {
            vectors.set(i, 2 * p + m, Complex64::new(bs.q[(i, p + m)], 0.0));
        }
    }
    EigenDecomposition {
        values: bs.eigenvalues(),
        vectors,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn assemble_quarter_turn() {
        let bs = BlockSchur::new(DenseMatrix::identity(2), vec![1.0], vec![PI / 2.0], vec![]).unwrap();
        let s = assemble_schur_matrix(&bs);
        let expect = [0.0, -1.0, 1.0, 0.0];
        for (a, b) in s.as_slice().iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-16);
        }
    }

    #[test]
    fn assemble_real_only() {
        let bs = BlockSchur::new(DenseMatrix::identity(2), vec![], vec![], vec![2.0, -3.0]).unwrap();
        assert_eq!(assemble_schur_matrix(&bs), DenseMatrix::from_diag(&[2.0, -3.0]));
    }

    #[test]
    fn assemble_mixed_layout() {
        let bs = BlockSchur::new(DenseMatrix::identity(3), vec![2.0], vec![PI / 3.0], vec![5.0]).unwrap();
        let s = assemble_schur_matrix(&bs);
        let r3 = 3f64.sqrt();
        let expect = [1.0, 0.0, -r3, 0.0, 5.0, 0.0, r3, 0.0, 1.0];
        for (a, b) in s.as_slice().iter().zip(expect) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn new_rejects_out_of_range() {
        let q = DenseMatrix::identity(2);
        assert!(BlockSchur::new(q.clone(), vec![1.0], vec![0.0], vec![]).is_err());
        assert!(BlockSchur::new(q.clone(), vec![-1.0], vec![1.0], vec![]).is_err());
        assert!(BlockSchur::new(q, vec![1.0], vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn eigen_of_real_diagonal() {
        let bs = BlockSchur::new(DenseMatrix::identity(2), vec![], vec![], vec![1.0, -1.0]).unwrap();
        let e = schur_to_eigen(&bs);
        assert_eq!(e.values, vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]);
        assert_eq!(e.vectors.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(e.vectors.get(1, 1), Complex64::new(1.0, 0.0));
        assert_eq!(e.vectors.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn eigen_of_quarter_turn() {
        let bs = BlockSchur::new(DenseMatrix::identity(2), vec![1.0], vec![PI / 2.0], vec![]).unwrap();
        let e = schur_to_eigen(&bs);
        assert_abs_diff_eq!(e.values[0].im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1].im, -1.0, epsilon = 1e-15);
        // Direct check of S v = i v for v = (e1 - i e2) / sqrt 2.
        assert_eq!(e.vectors.get(0, 0), Complex64::new(FRAC_1_SQRT_2, 0.0));
        assert_eq!(e.vectors.get(1, 0), Complex64::new(0.0, -FRAC_1_SQRT_2));
        assert_eq!(e.vectors.get(1, 1), Complex64::new(0.0, FRAC_1_SQRT_2));
        let a = assemble_schur_matrix(&bs);
        assert!(e.residual(&a) < 1e-15);
    }
}
