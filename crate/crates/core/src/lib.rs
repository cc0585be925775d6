//! Matrix analysis for nonsymmetric Monge-Ampère operators.
//!
//! The library studies the function `F(R) = log det R` on matrices
//! `R = ω + β` (`ω` symmetric positive definite, `β` skew-symmetric) inside
//! the admissible cone `D_{δ,μ}`, together with the machinery that makes its
//! behaviour checkable at desk scale:
//!
//! - [`matrix`] — dense real/complex kernel: norms, SPD square roots, and the
//!   unitary spectral decomposition of skew-symmetric matrices;
//! - [`compound`] — 2nd compound matrices and their algebraic identities;
//! - [`cone`] — the cone `D_{δ,μ}`, determinant/trace sandwiches, closed-form
//!   inverse parts, and exact first/second derivatives of `F`;
//! - [`forms`] — the second-differential quadratic forms ℱ, 𝒢, ℋ, ℒ, their
//!   spectral representations, upper bounds, and the d-concavity defect;
//! - [`comparison`] — grid-based verification of the comparison principle for
//!   `log det[D²u - A - B] = log f` with skew part `B`;
//! - [`campaign`] — seeded, reproducible verification campaigns over all of
//!   the above.
//!
//! Every identity is cross-checked against an independent route (brute-force
//! minors, LU determinants, finite differences, power iteration), and every
//! inequality is certified with a normalized margin; see [`report`].

pub mod campaign;
pub mod comparison;
pub mod compound;
pub mod cone;
pub mod error;
pub mod forms;
pub mod matrix;
pub mod report;

pub use error::{Error, Result};
pub use matrix::{
    norms, skew_spectrum, spd_roots, ComplexMatrix, Norms, RealMatrix, SkewMatrix, SkewSpectrum,
    SpdMatrix, Tolerances,
};
