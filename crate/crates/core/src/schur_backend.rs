//! Interchangeable routes to the block Schur form of a normal matrix.
//!
//! `nrmschur` goes through the skew-symmetric part; `gees` runs the general
//! real Schur algorithm and reads the blocks off its quasi-triangular factor.

use std::fmt::Debug;
use std::sync::Arc;

use crate::dense::{BlockSchur, DenseMatrix};
use crate::error::{Error, Result};
use crate::kernels::{KernelProvider, RealSchur};
use crate::normal_schur::{normal_schur, NormalSchurOptions};
use crate::skew_schur::{skew_schur_decompose, SkewSchur};

pub trait SchurBackend: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    /// Block Schur form of a normal matrix.
    fn normal(&self, a: &DenseMatrix) -> Result<BlockSchur>;

    /// Block Schur form of a skew-symmetric matrix. Real parts of the result
    /// are meaningless and ignored by callers.
    fn skew(&self, a: &DenseMatrix) -> Result<BlockSchur> {
        self.normal(a)
    }
}

#[derive(Debug, Clone)]
pub struct NormalSchurBackend {
    kp: Arc<dyn KernelProvider>,
    opts: NormalSchurOptions,
}

impl NormalSchurBackend {
    pub fn new(kp: Arc<dyn KernelProvider>, opts: NormalSchurOptions) -> Self {
        Self { kp, opts }
    }
}

impl SchurBackend for NormalSchurBackend {
    fn name(&self) -> &'static str {
        "nrmschur"
    }

    fn normal(&self, a: &DenseMatrix) -> Result<BlockSchur> {
        normal_schur(a, self.kp.as_ref(), &self.opts)
    }

    fn skew(&self, a: &DenseMatrix) -> Result<BlockSchur> {
        skew_to_block(skew_schur_decompose(a, self.kp.as_ref(), self.opts.eps1)?)
    }
}

/// Baseline through the provider's general real Schur routine.
#[derive(Debug, Clone)]
pub struct GeneralSchurBackend {
    kp: Arc<dyn KernelProvider>,
}

impl GeneralSchurBackend {
    pub fn new(kp: Arc<dyn KernelProvider>) -> Self {
        Self { kp }
    }
}

impl SchurBackend for GeneralSchurBackend {
    fn name(&self) -> &'static str {
        "gees"
    }

    fn normal(&self, a: &DenseMatrix) -> Result<BlockSchur> {
        block_schur_from_real_schur(&self.kp.general_real_schur(a)?)
    }
}

/// Views a skew Schur form as a block Schur form with purely imaginary pairs.
pub fn skew_to_block(s: SkewSchur) -> Result<BlockSchur> {
    let p = s.p();
    BlockSchur::new(s.q_hat, s.sigma, vec![std::f64::consts::FRAC_PI_2; p], vec![0.0; s.r])
}

/// Reads pairs and real eigenvalues off a standardized real Schur form,
/// dropping everything above the block diagonal. Only meaningful when the
/// input was normal. Pairs are ordered by descending imaginary part, real
/// eigenvalues descending.
pub fn block_schur_from_real_schur(rs: &RealSchur) -> Result<BlockSchur> {
    let t = &rs.t;
    let n = t.rows();
    // (imaginary part, real part, first column, second column, sign of second)
    let mut pairs: Vec<(f64, f64, usize, usize, f64)> = Vec::new();
    let mut reals: Vec<(f64, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (b, c) = (t[(i, i + 1)], t[(i + 1, i)]);
            if b * c >= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "2x2 block at {i} has real eigenvalues; Schur form is not standardized"
                )));
            }
            let re = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            let sign = if c > 0.0 { 1.0 } else { -1.0 };
            pairs.push(((-(b * c)).sqrt(), re, i, i + 1, sign));
            i += 2;
        } else {
            reals.push((t[(i, i)], i));
            i += 1;
        }
    }
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    reals.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (p, r) = (pairs.len(), reals.len());
    let mut q = DenseMatrix::zeros(n, n);
    for row in 0..n {
        let src = rs.q.row(row);
        let dst = q.row_mut(row);
        for (j, &(_, _, c1, c2, sign)) in pairs.iter().enumerate() {
            dst[j] = src[c1];
            dst[p + r + j] = sign * src[c2];
        }
        for (k, &(_, c)) in reals.iter().enumerate() {
            dst[p + k] = src[c];
        }
    }
    let lambda = pairs.iter().map(|x| x.1.hypot(x.0)).collect();
    let theta = pairs.iter().map(|x| x.0.atan2(x.1)).collect();
    BlockSchur::new(q, lambda, theta, reals.into_iter().map(|x| x.0).collect())
}

pub const BACKEND_NAMES: &str = "nrmschur, gees";

/// Builds a backend by name on top of a kernel provider.
pub fn schur_backend(name: &str, kp: Arc<dyn KernelProvider>, opts: NormalSchurOptions) -> Result<Arc<dyn SchurBackend>> {
    match name.to_ascii_lowercase().as_str() {
        "nrmschur" => Ok(Arc::new(NormalSchurBackend::new(kp, opts))),
        "gees" => Ok(Arc::new(GeneralSchurBackend::new(kp))),
        _ => Err(Error::UnknownStrategy {
            kind: "Schur backend",
            name: name.to_string(),
            available: BACKEND_NAMES.into(),
        }),
    }
}
