//! Shared report primitives: normalized residuals and inequality margins.
//!
//! Every inequality in this crate is certified through a [`Margin`] and every
//! equality through a normalized residual, so that pass/fail decisions use one
//! convention throughout: quantities are scaled by `1 + |reference|`, which
//! keeps checks stable across input magnitudes.

use nalgebra::{DMatrix, Scalar};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `|value - reference| / (1 + |reference|)`.
pub fn rel_residual(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / (1.0 + reference.abs())
}

/// Largest absolute entry of a real matrix.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Largest modulus of a complex matrix.
pub fn max_abs_c(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Max-abs difference between `test` and `reference`, normalized by
/// `1 + max-abs(reference)`.
pub fn mat_residual(test: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    assert_shape(test, reference);
    let diff = test - reference;
    max_abs(&diff) / (1.0 + max_abs(reference))
}

/// Complex counterpart of [`mat_residual`].
pub fn mat_residual_c(test: &DMatrix<Complex64>, reference: &DMatrix<Complex64>) -> f64 {
    assert_shape(test, reference);
    let diff = test - reference;
    max_abs_c(&diff) / (1.0 + max_abs_c(reference))
}

fn assert_shape<T: Scalar>(a: &DMatrix<T>, b: &DMatrix<T>) {
    assert_eq!(a.shape(), b.shape(), "residual of mismatched shapes");
}

/// A certified inequality `lhs <= rhs`.
///
/// `margin` is `(rhs - lhs) / (1 + |rhs|)`; the inequality is accepted when
/// `margin >= -slack`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Margin {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Margin {
    /// Certify `lhs <= rhs`.
    pub fn leq(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Margin {
            label: label.into(),
            lhs,
            rhs,
            margin: (rhs - lhs) / (1.0 + rhs.abs()),
        }
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.margin >= -slack
    }
}

/// Smallest margin among a set of checks, `+inf` when empty.
pub fn worst_margin(margins: &[Margin]) -> f64 {
    margins
        .iter()
        .map(|m| m.margin)
        .fold(f64::INFINITY, f64::min)
}
