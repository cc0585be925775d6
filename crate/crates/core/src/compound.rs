//! 2nd compound matrices and verification of their algebraic identities.
//!
//! The 2nd compound `M⁽²⁾` of an n×n matrix is the C(n,2)×C(n,2) matrix of
//! all 2×2 minors, rows and columns indexed by the lexically ordered pairs
//! `(i,k)`, `i < k`. The identities checked here are the multiplicativity
//! `(MN)⁽²⁾ = M⁽²⁾N⁽²⁾` (Binet–Cauchy), the transpose/inverse/scalar/diagonal
//! rules, symmetry of the compound of a symmetric or skew matrix, and the
//! symmetric/skew split
//! `M⁽²⁾ + (Mᵀ)⁽²⁾ = ½(M+Mᵀ)⁽²⁾ + ½(M−Mᵀ)⁽²⁾`.

use nalgebra::{ComplexField, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::report::{max_abs, mat_residual};

/// The 2nd compound of a matrix, with its row/column index pairs kept
/// explicit so entries can be addressed as `((i,k),(j,ℓ))` without relying on
/// an implicit ordering convention.
#[derive(Debug, Clone)]
pub struct Compound2<T: ComplexField> {
    source_dim: usize,
    entries: DMatrix<T>,
    pairs: Vec<(usize, usize)>,
}

impl<T: ComplexField> Compound2<T> {
    /// Dimension C(n,2) of the compound.
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Dimension n of the source matrix.
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    /// Lexically ordered strict pairs `(i,k)`, `i < k`.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Entry at row pair `(i,k)` and column pair `(j,l)`, zero-based.
    pub fn entry(&self, row: (usize, usize), col: (usize, usize)) -> T {
        let n = self.source_dim;
        self.entries[(pair_index(n, row), pair_index(n, col))].clone()
    }
}

/// Lexically ordered strict pairs for dimension n.
pub fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for k in (i + 1)..n {
            pairs.push((i, k));
        }
    }
    pairs
}

fn pair_index(n: usize, (i, k): (usize, usize)) -> usize {
    debug_assert!(i < k && k < n);
    i * n - i * (i + 1) / 2 + (k - i - 1)
}

/// Computes the 2nd compound: entry `((i,k),(j,ℓ)) = M_ij M_kℓ − M_iℓ M_kj`.
pub fn compound2<T: ComplexField>(m: &DMatrix<T>) -> Result<Compound2<T>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "compound of non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let pairs = index_pairs(n);
    let dim = pairs.len();
    let entries = DMatrix::from_fn(dim, dim, |r, c| {
        let (i, k) = pairs[r];
        let (j, l) = pairs[c];
        m[(i, j)].clone() * m[(k, l)].clone() - m[(i, l)].clone() * m[(k, j)].clone()
    });
    Ok(Compound2 {
        source_dim: n,
        entries,
        pairs,
    })
}

/// Outcome of a single identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CheckOutcome {
    /// Max-abs residual normalized by `1 + max-abs(reference)`.
    Residual(f64),
    Skipped(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub outcome: CheckOutcome,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    /// Largest residual over the non-skipped checks.
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| match c.outcome {
                CheckOutcome::Residual(r) => Some(r),
                CheckOutcome::Skipped(_) => None,
            })
            .fold(0.0f64, f64::max)
    }

    pub fn all_pass(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }

    pub fn find(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn push_check(report: &mut IdentityReport, name: &str, test: &RealMatrix, reference: &RealMatrix) {
    report.checks.push(IdentityCheck {
        name: name.to_string(),
        outcome: CheckOutcome::Residual(mat_residual(test, reference)),
    });
}

/// Runs the full battery of compound identities on a pair of real matrices
/// of the same dimension. Singular inputs skip the inverse rule instead of
/// failing.
pub fn check_compound_identities(m: &RealMatrix, n_mat: &RealMatrix) -> Result<IdentityReport> {
    if m.shape() != n_mat.shape() {
        return Err(Error::DimensionMismatch(format!(
            "identity check on {}x{} vs {}x{}",
            m.nrows(),
            m.ncols(),
            n_mat.nrows(),
            n_mat.ncols()
        )));
    }
    let n = m.nrows();
    let cm = compound2(m)?;
    let cn = compound2(n_mat)?;
    let mut report = IdentityReport { checks: Vec::new() };

    // multiplicativity (Binet-Cauchy)
    let prod = compound2(&(m * n_mat))?;
    push_check(
        &mut report,
        "binet_cauchy",
        prod.entries(),
        &(cm.entries() * cn.entries()),
    );

    // transpose rule
    let ct = compound2(&m.transpose())?;
    push_check(
        &mut report,
        "transpose",
        ct.entries(),
        &cm.entries().transpose(),
    );

    // inverse rule, skipped for singular m
    let scale = 1.0 + max_abs(m).powi(n as i32);
    let det = m.clone().lu().determinant();
    match (det.abs() > 1e-12 * scale)
        .then(|| m.clone().try_inverse())
        .flatten()
    {
        Some(inv) => {
            let c_inv = compound2(&inv)?;
            match cm.entries().clone().try_inverse() {
                Some(cm_inv) => push_check(&mut report, "inverse", c_inv.entries(), &cm_inv),
                None => report.checks.push(IdentityCheck {
                    name: "inverse".into(),
                    outcome: CheckOutcome::Skipped("compound singular".into()),
                }),
            }
        }
        None => report.checks.push(IdentityCheck {
            name: "inverse".into(),
            outcome: CheckOutcome::Skipped("singular".into()),
        }),
    }

    // symmetry: compounds of the symmetric and skew parts are symmetric
    let sym_part = (m + m.transpose()) * 0.5;
    let skew_part = (m - m.transpose()) * 0.5;
    let c_sym = compound2(&sym_part)?;
    push_check(
        &mut report,
        "symmetric_part_symmetry",
        c_sym.entries(),
        &c_sym.entries().transpose(),
    );
    let c_skew = compound2(&skew_part)?;
    push_check(
        &mut report,
        "skew_part_symmetry",
        c_skew.entries(),
        &c_skew.entries().transpose(),
    );

    // scalar rule (kM)⁽²⁾ = k²M⁽²⁾
    let k = 1.5;
    let c_scaled = compound2(&(m * k))?;
    push_check(
        &mut report,
        "scalar",
        c_scaled.entries(),
        &(cm.entries() * (k * k)),
    );

    // diagonal rule on diag(M)
    let diag = RealMatrix::from_diagonal(&m.diagonal());
    let c_diag = compound2(&diag)?;
    let expected = RealMatrix::from_fn(cm.dim(), cm.dim(), |r, c| {
        if r == c {
            let (j, k) = cm.pairs()[r];
            m[(j, j)] * m[(k, k)]
        } else {
            0.0
        }
    });
    push_check(&mut report, "diagonal", c_diag.entries(), &expected);

    // symmetric/skew split of M⁽²⁾ + (Mᵀ)⁽²⁾
    let lhs = cm.entries() + ct.entries();
    let rhs = c_sym.entries() * 2.0 + c_skew.entries() * 2.0;
    // ½(M+Mᵀ)⁽²⁾ = ½(2·sym)⁽²⁾ = 2·sym⁽²⁾ by the scalar rule
    push_check(&mut report, "sym_skew_split", &lhs, &rhs);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> RealMatrix {
        RealMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
    }

    type Minor = ((usize, usize), (usize, usize), f64);

    /// Independent brute-force oracle: enumerate row/column pairs and compute
    /// each 2x2 determinant directly.
    fn brute_force_minors(m: &RealMatrix) -> Vec<Minor> {
        let n = m.nrows();
        let mut out = Vec::new();
        for i in 0..n {
            for k in (i + 1)..n {
                for j in 0..n {
                    for l in (j + 1)..n {
                        let det = m[(i, j)] * m[(k, l)] - m[(i, l)] * m[(k, j)];
                        out.push(((i, k), (j, l), det));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn compound_of_2x2_is_determinant() {
        let m = RealMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let c = compound2(&m).unwrap();
        assert_eq!(c.dim(), 1);
        assert_relative_eq!(c.entries()[(0, 0)], -2.0, epsilon = 1e-14);
    }

    #[test]
    fn compound_of_diagonal() {
        let m = RealMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let c = compound2(&m).unwrap();
        let expected = RealMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0, 6.0]));
        assert_relative_eq!(c.entries(), &expected, epsilon = 1e-14);
        assert_eq!(c.pairs(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn compound_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let m = random_matrix(4, &mut rng);
        let c = compound2(&m).unwrap();
        for (row, col, det) in brute_force_minors(&m) {
            assert_relative_eq!(c.entry(row, col), det, epsilon = 1e-13);
        }
    }

    #[test]
    fn rejects_too_small() {
        let m = RealMatrix::from_row_slice(1, 1, &[3.0]);
        assert!(matches!(
            compound2(&m),
            Err(Error::DimensionTooSmall(1))
        ));
    }

    #[test]
    fn identities_on_identity_are_exact() {
        let id = RealMatrix::identity(3, 3);
        let report = check_compound_identities(&id, &id).unwrap();
        assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn identities_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=8 {
            let m = random_matrix(n, &mut rng);
            let nn = random_matrix(n, &mut rng);
            let report = check_compound_identities(&m, &nn).unwrap();
            assert!(
                report.all_pass(1e-10),
                "n={n}: max residual {:.3e}",
                report.max_residual()
            );
            assert!(report.find("inverse").is_some());
        }
    }

    #[test]
    fn singular_input_skips_inverse() {
        // rank-1 matrix
        let m = RealMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 3.0, 6.0, 9.0]);
        let n = RealMatrix::identity(3, 3);
        let report = check_compound_identities(&m, &n).unwrap();
        match &report.find("inverse").unwrap().outcome {
            CheckOutcome::Skipped(reason) => assert!(reason.contains("singular")),
            other => panic!("expected skip, got {other:?}"),
        }
        assert!(report.all_pass(1e-10));
    }

    #[test]
    fn complex_compound_respects_adjoint_and_conjugate() {
        use num_complex::Complex64;
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = nalgebra::DMatrix::<Complex64>::from_fn(4, 4, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let c = compound2(&m).unwrap();
        let c_adj = compound2(&m.adjoint()).unwrap();
        let diff = (c_adj.entries() - c.entries().adjoint())
            .map(|z| z.norm())
            .max();
        assert!(diff < 1e-12);
        let c_conj = compound2(&m.map(|z| z.conj())).unwrap();
        let diff = (c_conj.entries() - c.entries().map(|z| z.conj()))
            .map(|z| z.norm())
            .max();
        assert!(diff < 1e-12);
    }

    #[test]
    fn skew_compound_is_symmetric_to_rounding() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 2..=8 {
            let g = random_matrix(n, &mut rng);
            let skew = (&g - g.transpose()) * 0.5;
            let c = compound2(&skew).unwrap();
            let defect = max_abs(&(c.entries() - c.entries().transpose()));
            assert!(defect <= 1e-12, "n={n}: symmetry defect {defect:e}");
        }
    }
}
