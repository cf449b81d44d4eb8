//! Error of recovering `cos(theta)` from a perturbed `sin(theta)` through
//! `sqrt(1 - s^2)`.

use crate::output::{fmt_float, CsvRow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaRow {
    pub theta: f64,
    pub eps: f64,
    pub cos_formula: f64,
    pub error: f64,
}

impl CsvRow for FormulaRow {
    fn header() -> &'static [&'static str] {
        &["theta", "eps", "cos_exact", "cos_formula", "error"]
    }

    fn fields(&self) -> Vec<String> {
        vec![
            fmt_float(self.theta),
            fmt_float(self.eps),
            fmt_float(self.theta.cos()),
            fmt_float(self.cos_formula),
            fmt_float(self.error),
        ]
    }
}

/// `c = sqrt(1 - (sin(theta) - eps)^2)`. The square is formed as
/// `(1 - s)(1 + s)` so that only the perturbation, not cancellation in
/// `1 - s^2`, shows up in the error.
pub fn cos_from_perturbed_sin(theta: f64, eps: f64) -> f64 {
    let s = theta.sin() - eps;
    ((1.0 - s) * (1.0 + s)).max(0.0).sqrt()
}

pub fn cmd_fundamental_formula(thetas: &[f64], eps: f64) -> Vec<FormulaRow> {
    thetas
        .iter()
        .map(|&theta| {
            let c = cos_from_perturbed_sin(theta, eps);
            FormulaRow {
                theta,
                eps,
                cos_formula: c,
                error: (c - theta.cos()).abs(),
            }
        })
        .collect()
}
