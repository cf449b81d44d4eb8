//! Pluggable dense kernels: bidiagonal SVD, symmetric EVD and general real Schur.
//!
//! Two providers are built in:
//!
//! * `reference`: implicit-shift QR everywhere (Golub–Kahan for the bidiagonal
//!   SVD, Wilkinson-shifted QR for the symmetric tridiagonal problem, Francis
//!   double-shift QR for the real Schur form).
//! * `dc` (alias `native`): divide-and-conquer tridiagonal solvers whose
//!   eigenvector work is dominated by matrix products. It shares the Francis
//!   Schur kernel with `reference`.
//!
//! Providers are looked up by name in a [`KernelRegistry`]; [`default_provider`]
//! honours the `NRMSCHUR_KERNELS` environment variable.

mod bidiag_qr;
mod dc;
mod francis;
pub mod householder;
mod symmetric;

use std::fmt::Debug;
use std::sync::Arc;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

pub use francis::{quasi_triangular_eigenvalues, real_schur_of_hessenberg};
pub use householder::hessenberg_with_assembly;
pub use symmetric::symmetric_tridiagonalize;

/// Environment variable naming the default kernel provider.
pub const KERNELS_ENV: &str = "NRMSCHUR_KERNELS";

/// Square upper-bidiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Bidiagonal {
    pub diag: Vec<f64>,
    pub superdiag: Vec<f64>,
}

impl Bidiagonal {
    pub fn new(diag: Vec<f64>, superdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || superdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch(format!(
                "bidiagonal with {} diagonal and {} superdiagonal entries",
                diag.len(),
                superdiag.len()
            )));
        }
        Ok(Self { diag, superdiag })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let p = self.size();
        let mut b = DenseMatrix::zeros(p, p);
        for i in 0..p {
            b[(i, i)] = self.diag[i];
            if i + 1 < p {
                b[(i, i + 1)] = self.superdiag[i];
            }
        }
        b
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::dense::norm2(&[crate::dense::norm2(&self.diag), crate::dense::norm2(&self.superdiag)])
    }
}

/// `B = U diag(sigma) V^T`, `sigma` descending and nonnegative.
#[derive(Debug, Clone)]
pub struct BidiagonalSvd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

/// `H = R diag(lam) R^T`, `lam` descending.
#[derive(Debug, Clone)]
pub struct SymmetricEvd {
    pub r: DenseMatrix,
    pub lam: Vec<f64>,
}

/// `A = Q T Q^T` with `T` quasi-upper-triangular in standardized form.
#[derive(Debug, Clone)]
pub struct RealSchur {
    pub q: DenseMatrix,
    pub t: DenseMatrix,
}

pub trait KernelProvider: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    fn bidiagonal_svd(&self, b: &Bidiagonal) -> Result<BidiagonalSvd>;

    fn symmetric_evd(&self, h: &DenseMatrix) -> Result<SymmetricEvd>;

    fn general_real_schur(&self, a: &DenseMatrix) -> Result<RealSchur>;
}

/// Relative asymmetry accepted by `symmetric_evd` implementations.
pub(crate) fn check_symmetric(h: &DenseMatrix) -> Result<usize> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let defect = crate::dense::symmetry_defect(h)?;
    if defect > 8.0 * crate::dense::EPS {
        return Err(Error::NotSymmetric { defect });
    }
    Ok(h.rows())
}

/// Stable descending sort; returns the permutation (ties keep ascending index).
pub(crate) fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

fn francis_schur(a: &DenseMatrix) -> Result<RealSchur> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let (q, h) = hessenberg_with_assembly(a);
    real_schur_of_hessenberg(h, q)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ReferenceKernels;

impl KernelProvider for ReferenceKernels {
    fn name(&self) -> &'static str {
        "reference"
    }

    fn bidiagonal_svd(&self, b: &Bidiagonal) -> Result<BidiagonalSvd> {
        bidiag_qr::bidiagonal_svd_qr(b)
    }

    fn symmetric_evd(&self, h: &DenseMatrix) -> Result<SymmetricEvd> {
        check_symmetric(h)?;
        symmetric::symmetric_evd_with(h, symmetric::tridiagonal_qr)
    }

    fn general_real_schur(&self, a: &DenseMatrix) -> Result<RealSchur> {
        francis_schur(a)
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct DivideConquerKernels;

impl KernelProvider for DivideConquerKernels {
    fn name(&self) -> &'static str {
        "dc"
    }

    fn bidiagonal_svd(&self, b: &Bidiagonal) -> Result<BidiagonalSvd> {
        dc::bidiagonal_svd_dc(b)
    }

    fn symmetric_evd(&self, h: &DenseMatrix) -> Result<SymmetricEvd> {
        check_symmetric(h)?;
        symmetric::symmetric_evd_with(h, dc::tridiagonal_dc)
    }

    fn general_real_schur(&self, a: &DenseMatrix) -> Result<RealSchur> {
        francis_schur(a)
    }
}

/// Name-indexed set of kernel providers.
#[derive(Debug, Clone)]
pub struct KernelRegistry {
    entries: Vec<(String, Arc<dyn KernelProvider>)>,
}

impl KernelRegistry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        let dc: Arc<dyn KernelProvider> = Arc::new(DivideConquerKernels);
        reg.register("reference", Arc::new(ReferenceKernels));
        reg.register("dc", dc.clone());
        reg.register("native", dc);
        reg
    }

    /// Adds or replaces a provider under `name`.
    pub fn register(&mut self, name: &str, provider: Arc<dyn KernelProvider>) {
        if let Some(slot) = self.entries.iter_mut().find(|(n, _)| n == name) {
            slot.1 = provider;
        } else {
            self.entries.push((name.to_string(), provider));
        }
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn KernelProvider>> {
        self.entries
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, p)| p.clone())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "kernel provider",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Looks up a built-in provider by name.
pub fn provider(name: &str) -> Result<Arc<dyn KernelProvider>> {
    KernelRegistry::with_builtins().get(name)
}

/// The provider named by `NRMSCHUR_KERNELS`, or `native` when unset.
pub fn default_provider() -> Result<Arc<dyn KernelProvider>> {
    match std::env::var(KERNELS_ENV) {
        Ok(name) if !name.trim().is_empty() => provider(name.trim()),
        _ => provider("native"),
    }
}
