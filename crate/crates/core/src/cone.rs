//! The admissible cone `D_{δ,μ}`, decomposed matrices `R = ω + β`, the
//! determinant and trace sandwiches, closed-form inverse parts, and the exact
//! first and second derivatives of `F(R) = log det R`.
//!
//! Membership in the cone requires `λ_min(ω) > 0`, `δ·λ_min(ω) ≥ μ` and
//! `‖β‖ ≤ μ` (operator norm). For members, the rescaled skew part
//! `σ = ω^{-1/2} β ω^{-1/2}` satisfies `‖σ‖ ≤ δ < 1`, which drives every
//! bound in this module and in [`crate::forms`].

use nalgebra::DVector;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{
    matrix_from_rows, matrix_to_rows, norms, skew_spectrum, spd_roots, RealMatrix, SkewMatrix,
    SkewSpectrum, SpdMatrix, Tolerances,
};
use crate::report::{rel_residual, mat_residual, Margin};

/// The pair `(δ, μ)` defining the admissible set: `0 ≤ δ < 1`, `μ ≥ 0`, with
/// the convention that `δ = 0` forces `μ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConeParamsRaw", into = "ConeParamsRaw")]
pub struct ConeParams {
    delta: f64,
    mu: f64,
}

#[derive(Serialize, Deserialize)]
struct ConeParamsRaw {
    delta: f64,
    mu: f64,
}

impl TryFrom<ConeParamsRaw> for ConeParams {
    type Error = Error;
    fn try_from(raw: ConeParamsRaw) -> Result<Self> {
        ConeParams::new(raw.delta, raw.mu)
    }
}

impl From<ConeParams> for ConeParamsRaw {
    fn from(p: ConeParams) -> Self {
        ConeParamsRaw {
            delta: p.delta,
            mu: p.mu,
        }
    }
}

impl ConeParams {
    pub fn new(delta: f64, mu: f64) -> Result<Self> {
        if !delta.is_finite() || !(0.0..1.0).contains(&delta) {
            return Err(Error::BadParams(format!(
                "delta must lie in [0, 1), got {delta}"
            )));
        }
        if !mu.is_finite() || mu < 0.0 {
            return Err(Error::BadParams(format!("mu must be >= 0, got {mu}")));
        }
        if delta == 0.0 && mu != 0.0 {
            return Err(Error::BadParams(format!(
                "delta = 0 forces mu = 0, got mu = {mu}"
            )));
        }
        Ok(ConeParams { delta, mu })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// A matrix `R = ω + β` with its spectral scaffolding cached: the roots
/// `ω^{±1/2}`, the rescaled skew part `σ = ω^{-1/2} β ω^{-1/2}` with its
/// ±-paired spectrum, the assembled matrix and its inverse.
#[derive(Debug, Clone)]
pub struct DecomposedR {
    omega: SpdMatrix,
    beta: SkewMatrix,
    sqrt_omega: SpdMatrix,
    inv_sqrt_omega: SpdMatrix,
    sigma: SkewMatrix,
    spectrum: SkewSpectrum,
    matrix: RealMatrix,
    inverse: RealMatrix,
    beta_op_norm: f64,
}

impl DecomposedR {
    /// Assembles `R = ω + β` and populates the cached σ-spectrum.
    pub fn new(omega: SpdMatrix, beta: SkewMatrix) -> Result<Self> {
        let n = omega.dim();
        if beta.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "omega is {n}x{n} but beta is {}x{}",
                beta.dim(),
                beta.dim()
            )));
        }
        let (sqrt_omega, inv_sqrt_omega) = spd_roots(&omega);
        let beta_mat = beta.to_matrix();
        let sigma_raw = inv_sqrt_omega.matrix() * &beta_mat * inv_sqrt_omega.matrix();
        // mathematically skew; antisymmetrize assembly rounding away
        let sigma = SkewMatrix::try_new(&sigma_raw)?;
        let spectrum = skew_spectrum(&sigma)?;
        let matrix = omega.matrix() + &beta_mat;
        let inverse = matrix.clone().try_inverse().ok_or_else(|| {
            Error::Inconsistent("R = omega + beta is numerically singular".into())
        })?;
        let beta_op_norm = norms(&beta_mat).operator;
        Ok(DecomposedR {
            omega,
            beta,
            sqrt_omega,
            inv_sqrt_omega,
            sigma,
            spectrum,
            matrix,
            inverse,
            beta_op_norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.omega.dim()
    }

    pub fn omega(&self) -> &SpdMatrix {
        &self.omega
    }

    pub fn beta(&self) -> &SkewMatrix {
        &self.beta
    }

    pub fn sqrt_omega(&self) -> &SpdMatrix {
        &self.sqrt_omega
    }

    pub fn inv_sqrt_omega(&self) -> &SpdMatrix {
        &self.inv_sqrt_omega
    }

    /// `σ = ω^{-1/2} β ω^{-1/2}`.
    pub fn sigma(&self) -> &SkewMatrix {
        &self.sigma
    }

    /// ±-paired spectrum of σ with its diagonalizing unitary `C₁`.
    pub fn spectrum(&self) -> &SkewSpectrum {
        &self.spectrum
    }

    /// The assembled matrix `R = ω + β`.
    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    /// `R^{-1}` (LU route), cached at construction.
    pub fn inverse(&self) -> &RealMatrix {
        &self.inverse
    }

    /// Operator norm of β.
    pub fn beta_norm(&self) -> f64 {
        self.beta_op_norm
    }

    pub fn from_parts(omega_rows: &[Vec<f64>], beta_rows: &[Vec<f64>]) -> Result<Self> {
        let omega = SpdMatrix::new(matrix_from_rows(omega_rows)?)?;
        let beta = SkewMatrix::try_new(&matrix_from_rows(beta_rows)?)?;
        DecomposedR::new(omega, beta)
    }
}

impl Serialize for DecomposedR {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Parts {
            omega: Vec<Vec<f64>>,
            beta: Vec<Vec<f64>>,
        }
        Parts {
            omega: matrix_to_rows(self.omega.matrix()),
            beta: matrix_to_rows(&self.beta.to_matrix()),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DecomposedR {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Parts {
            omega: Vec<Vec<f64>>,
            beta: Vec<Vec<f64>>,
        }
        let parts = Parts::deserialize(de)?;
        DecomposedR::from_parts(&parts.omega, &parts.beta).map_err(D::Error::custom)
    }
}

/// Cone membership with the three defining margins (raw, not normalized).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `λ_min(ω)`, must be positive.
    pub lambda_min: f64,
    /// `δ·λ_min(ω) - μ`, must be nonnegative.
    pub cone_margin: f64,
    /// `μ - ‖β‖`, must be nonnegative.
    pub beta_margin: f64,
    pub beta_norm: f64,
}

/// Evaluates the three cone conditions exactly (non-strict comparisons, as
/// stated; boundary members come out with zero margins).
pub fn membership(r: &DecomposedR, params: &ConeParams) -> Membership {
    let lambda_min = r.omega().lambda_min();
    let cone_margin = params.delta() * lambda_min - params.mu();
    let beta_margin = params.mu() - r.beta_norm();
    Membership {
        member: lambda_min > 0.0 && cone_margin >= 0.0 && beta_margin >= 0.0,
        lambda_min,
        cone_margin,
        beta_margin,
        beta_norm: r.beta_norm(),
    }
}

/// Default spread of the sampled `λ_i(ω)` above the cone floor `μ/δ`.
pub const DEFAULT_SPREAD: f64 = 4.0;

/// Draws a member of `D_{δ,μ}` by construction: `ω = Qᵀ diag(λ) Q` with a
/// random orthogonal `Q` and `λ_i` uniform in `[μ/δ, μ/δ + spread]`
/// (`[1, 1 + spread]` when δ = 0), and `β` a random skew matrix rescaled so
/// `‖β‖ = u·μ` with `u` uniform in `[0, 1)`.
///
/// Identical `(n, params, seed, spread)` give bit-identical output.
pub fn sample_cone(n: usize, params: &ConeParams, seed: u64) -> Result<DecomposedR> {
    sample_cone_with(n, params, seed, DEFAULT_SPREAD)
}

pub fn sample_cone_with(
    n: usize,
    params: &ConeParams,
    seed: u64,
    spread: f64,
) -> Result<DecomposedR> {
    if n == 0 {
        return Err(Error::BadParams("dimension must be at least 1".into()));
    }
    if n < 2 && params.mu() > 0.0 {
        return Err(Error::BadParams(
            "dimension 1 admits no nonzero skew part; need mu = 0".into(),
        ));
    }
    if !spread.is_finite() || spread <= 0.0 {
        return Err(Error::BadParams(format!(
            "spread must be positive, got {spread}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let gauss = RealMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let q = gauss.qr().q();
    let floor = if params.delta() > 0.0 {
        params.mu() / params.delta()
    } else {
        1.0
    };
    let lambdas = DVector::from_fn(n, |_, _| floor + spread * rng.random::<f64>());
    let raw = q.transpose() * RealMatrix::from_diagonal(&lambdas) * &q;
    let omega = SpdMatrix::new((&raw + raw.transpose()) * 0.5)?;

    let beta = if params.mu() == 0.0 || n < 2 {
        SkewMatrix::zero(n)
    } else {
        let g = RealMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let skew = SkewMatrix::try_new(&((&g - g.transpose()) * 0.5))?;
        let u: f64 = rng.random();
        let current = skew.norms().operator;
        if current == 0.0 {
            SkewMatrix::zero(n)
        } else {
            skew.scale(u * params.mu() / current)
        }
    };
    DecomposedR::new(omega, beta)
}

/// `F(R) = log det R`, with two internal consistency checks: the determinant
/// product identity `det R = det ω · Π(1 + σ_j²)` over the ± pairs, and the
/// chain `det R ≥ det ω + det β ≥ det ω > 0`.
pub fn log_det(r: &DecomposedR) -> Result<f64> {
    let tol = Tolerances::default();
    let det_r = r.matrix().determinant();
    let product = r.omega().det() * r.spectrum().det_product_factor();
    if rel_residual(det_r, product) > tol.rec {
        return Err(Error::Inconsistent(format!(
            "det R = {det_r:.12e} but the sigma-pair product gives {product:.12e}"
        )));
    }
    let det_omega = r.omega().det();
    let det_beta = r.beta().to_matrix().determinant();
    let slack = 1e-10 * det_r.abs();
    if det_beta < -slack
        || det_r - det_omega - det_beta < -slack
        || det_omega <= 0.0
    {
        return Err(Error::Inconsistent(format!(
            "determinant chain violated: det R = {det_r:.6e}, det omega = {det_omega:.6e}, \
             det beta = {det_beta:.6e}"
        )));
    }
    Ok(det_r.ln())
}

/// Report of the spectral and sandwich bounds satisfied by a cone member.
#[derive(Debug, Clone, Serialize)]
pub struct ConeReport {
    pub sigma_op_norm: f64,
    pub det_r: f64,
    pub det_omega: f64,
    pub det_beta: f64,
    pub trace_r_inv: f64,
    pub trace_omega_inv: f64,
    /// `‖σ‖ ≤ δ` and `max |σ_j| ≤ δ`.
    pub sigma_norm: Margin,
    pub sigma_eig: Margin,
    /// `‖β‖ⁿ/δⁿ + (2^⌊n/2⌋-1)·det β  ≤  det ω + (2^⌊n/2⌋-1)·det β  ≤  det R
    /// ≤ (1+δ²)^⌊n/2⌋·det ω`, with `0/0 = 0` at δ = 0.
    pub det_lower: Margin,
    pub det_middle: Margin,
    pub det_upper: Margin,
    /// `Tr ω^{-1}/(1+δ²) ≤ Tr R^{-1} ≤ Tr ω^{-1}`.
    pub trace_lower: Margin,
    pub trace_upper: Margin,
}

impl ConeReport {
    pub fn margins(&self) -> [&Margin; 7] {
        [
            &self.sigma_norm,
            &self.sigma_eig,
            &self.det_lower,
            &self.det_middle,
            &self.det_upper,
            &self.trace_lower,
            &self.trace_upper,
        ]
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins()
            .iter()
            .map(|m| m.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_hold(&self, slack: f64) -> bool {
        self.worst_margin() >= -slack
    }
}

pub fn cone_report(r: &DecomposedR, params: &ConeParams) -> Result<ConeReport> {
    let m = membership(r, params);
    if !m.member {
        return Err(Error::NotMember(format!(
            "lambda_min = {:.6e}, cone margin = {:.6e}, beta margin = {:.6e}",
            m.lambda_min, m.cone_margin, m.beta_margin
        )));
    }
    let n = r.dim();
    let delta = params.delta();
    let half = (n / 2) as i32;

    let sigma_op_norm = r.sigma().norms().operator;
    let sigma_norm = Margin::leq("sigma_op_norm <= delta", sigma_op_norm, delta);
    let sigma_eig = Margin::leq(
        "max |sigma_j| <= delta",
        r.spectrum().max_abs_sigma(),
        delta,
    );

    let det_r = r.matrix().determinant();
    let det_omega = r.omega().det();
    let det_beta = r.beta().to_matrix().determinant();
    let beta_term = if delta == 0.0 {
        0.0
    } else {
        (r.beta_norm() / delta).powi(n as i32)
    };
    let pair_coeff = (2f64.powi(half) - 1.0) * det_beta;
    let det_lower = Margin::leq(
        "beta_norm^n/delta^n + (2^[n/2]-1) det beta <= det omega + (2^[n/2]-1) det beta",
        beta_term + pair_coeff,
        det_omega + pair_coeff,
    );
    let det_middle = Margin::leq(
        "det omega + (2^[n/2]-1) det beta <= det R",
        det_omega + pair_coeff,
        det_r,
    );
    let det_upper = Margin::leq(
        "det R <= (1+delta^2)^[n/2] det omega",
        det_r,
        (1.0 + delta * delta).powi(half) * det_omega,
    );

    let trace_r_inv = r.inverse().trace();
    let trace_omega_inv = r.omega().trace_inverse();
    let trace_lower = Margin::leq(
        "tr omega^-1 / (1+delta^2) <= tr R^-1",
        trace_omega_inv / (1.0 + delta * delta),
        trace_r_inv,
    );
    let trace_upper = Margin::leq("tr R^-1 <= tr omega^-1", trace_r_inv, trace_omega_inv);

    Ok(ConeReport {
        sigma_op_norm,
        det_r,
        det_omega,
        det_beta,
        trace_r_inv,
        trace_omega_inv,
        sigma_norm,
        sigma_eig,
        det_lower,
        det_middle,
        det_upper,
        trace_lower,
        trace_upper,
    })
}

/// Symmetric and skew parts of `R^{-1}` via the closed forms
/// `sym = ω^{-1/2}(E-σ²)^{-1}ω^{-1/2}` and
/// `skew = ω^{-1/2}(-σ)(E-σ²)^{-1}ω^{-1/2}`, with the diagonal weights of the
/// unitary-basis representation: `1/(1+σ_j²)` and `-iσ_j/(1+σ_j²)`.
#[derive(Debug, Clone)]
pub struct InvParts {
    pub sym: RealMatrix,
    pub skew: RealMatrix,
    pub d2_diag: Vec<f64>,
    pub d3_diag: Vec<Complex64>,
}

pub fn inv_parts(r: &DecomposedR) -> Result<InvParts> {
    let tol = Tolerances::default();
    let n = r.dim();
    let sigma = r.sigma().to_matrix();
    let resolvent = (RealMatrix::identity(n, n) - &sigma * &sigma)
        .try_inverse()
        .ok_or_else(|| Error::Inconsistent("E - sigma^2 is numerically singular".into()))?;
    let inv_sqrt = r.inv_sqrt_omega().matrix();

    let sym_raw = inv_sqrt * &resolvent * inv_sqrt;
    let sym = (&sym_raw + sym_raw.transpose()) * 0.5;
    let skew_raw = inv_sqrt * (-&sigma * &resolvent) * inv_sqrt;
    let skew = (&skew_raw - skew_raw.transpose()) * 0.5;

    let recombined = &sym + &skew;
    let residual = mat_residual(&recombined, r.inverse());
    if residual > tol.rec {
        return Err(Error::Inconsistent(format!(
            "closed-form inverse parts disagree with direct inversion: residual {residual:.3e}"
        )));
    }

    let d2_diag = r
        .spectrum()
        .sigmas()
        .iter()
        .map(|&s| 1.0 / (1.0 + s * s))
        .collect();
    let d3_diag = r
        .spectrum()
        .sigmas()
        .iter()
        .map(|&s| Complex64::new(0.0, -s / (1.0 + s * s)))
        .collect();
    Ok(InvParts {
        sym,
        skew,
        d2_diag,
        d3_diag,
    })
}

/// Gradient of `F`: `F^{ij} = R^{ji}`, i.e. the transpose of `R^{-1}`.
pub fn grad_f(r: &DecomposedR) -> RealMatrix {
    r.inverse().transpose()
}

/// Dense second derivative `F^{ij,kℓ} = -R^{ℓi} R^{jk}`, stored as a flat
/// 4-index tensor.
#[derive(Debug, Clone)]
pub struct HessF {
    n: usize,
    data: Vec<f64>,
}

impl HessF {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + l]
    }

    /// Full contraction `Σ F^{ij,kℓ} a_{ij} b_{kℓ}`.
    pub fn contract(&self, a: &RealMatrix, b: &RealMatrix) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let aij = a[(i, j)];
                if aij == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        acc += self.get(i, j, k, l) * aij * b[(k, l)];
                    }
                }
            }
        }
        acc
    }
}

pub fn hess_f(r: &DecomposedR) -> HessF {
    let n = r.dim();
    let inv = r.inverse();
    let mut data = vec![0.0; n * n * n * n];
    let mut idx = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let rjk = inv[(j, k)];
                for l in 0..n {
                    data[idx] = -inv[(l, i)] * rjk;
                    idx += 1;
                }
            }
        }
    }
    HessF { n, data }
}
