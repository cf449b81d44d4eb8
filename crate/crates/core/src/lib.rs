pub mod dense;
pub mod error;
pub mod io;
pub mod karcher;
pub mod kernels;
pub mod normal_schur;
pub mod sampling;
pub mod schur_backend;
pub mod skew_schur;
pub mod spectral;
pub mod symplectic_lanczos;

pub use dense::DenseMatrix;
pub use error::{Error, Result};
