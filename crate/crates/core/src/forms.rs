//! Second-differential quadratic forms of `F(R) = log det R` and their
//! bounds.
//!
//! For a direction `M = P + Q` (symmetric + skew) the form
//! `ℱ(R,M) = -Σ R^{ℓi}R^{jk} M_{ij} M_{kℓ}` splits as
//! `ℱ(R,M) = ℱ(R,P) + ℱ(R,Q) + 2ℒ(R,P,Q)`, admits the trace representation
//! `ℱ = -𝒢² + ℋ` with `𝒢 = Tr(R^{-1}·)` and `ℋ = 2Tr[(R^{-1})⁽²⁾ (·)⁽²⁾]`,
//! and collapses in the σ-eigenbasis to weighted sums of `|M̃̃_{jk}|²` with
//! weights `(1-σ_jσ_k)/((1+σ_j²)(1+σ_k²))`. On the cone those weights are
//! pinched between `(1-δ²)/(1+δ²)²` and `1`, which yields the upper bounds
//! certified by [`bounds_report`] and the concavity defect
//! `d = 2nδ²(1 + 4n²δ²/(1-δ²))` certified by [`concavity_gap`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::compound::compound2;
use crate::cone::{log_det, membership, ConeParams, DecomposedR};
use crate::error::{Error, Result};
use crate::matrix::{norms, ComplexMatrix, RealMatrix, SkewMatrix};
use crate::report::Margin;

/// A direction matrix conjugated into the two natural frames:
/// `M̃ = ω^{-1/2} M ω^{-1/2}` and `M̃̃ = C₁* M̃ C₁`.
#[derive(Debug, Clone)]
pub struct TildePair {
    pub tilde: RealMatrix,
    pub tilde2: ComplexMatrix,
}

pub fn tilde_transform(m: &RealMatrix, r: &DecomposedR) -> TildePair {
    let inv_sqrt = r.inv_sqrt_omega().matrix();
    let tilde = inv_sqrt * m * inv_sqrt;
    let c1 = r.spectrum().unitary();
    let tilde_c: DMatrix<Complex64> = tilde.map(|x| Complex64::new(x, 0.0));
    let tilde2 = c1.adjoint() * tilde_c * c1;
    TildePair { tilde, tilde2 }
}

/// `ℱ(R,M) = -Σ_{ijkℓ} R^{ℓi} R^{jk} M_{ij} M_{kℓ}` by direct contraction.
pub fn quad_form_direct(r: &DecomposedR, m: &RealMatrix) -> f64 {
    let n = r.dim();
    let inv = r.inverse();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mij = m[(i, j)];
            if mij == 0.0 {
                continue;
            }
            for k in 0..n {
                let rjk = inv[(j, k)];
                for l in 0..n {
                    acc -= inv[(l, i)] * rjk * mij * m[(k, l)];
                }
            }
        }
    }
    acc
}

/// `ℱ` evaluated on a direction and on its symmetric/skew split, with the
/// residual of `ℱ(M) = ℱ(P) + ℱ(Q) + 2ℒ(P,Q)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitForms {
    pub f_m: f64,
    pub f_p: f64,
    pub f_q: f64,
    pub l_pq: f64,
    /// `|f_m - (f_p + f_q + 2 l_pq)| / (1 + |f_m|)`.
    pub split_residual: f64,
}

pub fn split_form(r: &DecomposedR, m: &RealMatrix) -> Result<SplitForms> {
    let p = (m + m.transpose()) * 0.5;
    let q = SkewMatrix::try_new(&((m - m.transpose()) * 0.5))?;
    let f_m = quad_form_direct(r, m);
    let f_p = quad_form_direct(r, &p);
    let f_q = quad_form_direct(r, &q.to_matrix());
    let l_pq = l_form(r, &p, &q);
    let split_residual = (f_m - (f_p + f_q + 2.0 * l_pq)).abs() / (1.0 + f_m.abs());
    Ok(SplitForms {
        f_m,
        f_p,
        f_q,
        l_pq,
        split_residual,
    })
}

/// The trace-representation values `𝒢`, `ℋ` and `ℱ = -𝒢² + ℋ` on a
/// symmetric direction `P` and a skew direction `Q`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GhForms {
    pub g_p: f64,
    pub h_p: f64,
    pub f_p: f64,
    pub g_q: f64,
    pub h_q: f64,
    pub f_q: f64,
}

pub fn gh_forms(r: &DecomposedR, p: &RealMatrix, q: &SkewMatrix) -> Result<GhForms> {
    let inv = r.inverse();
    let q_mat = q.to_matrix();
    let g_p = (inv * p).trace();
    let g_q = (inv * &q_mat).trace();
    let (h_p, h_q) = if r.dim() < 2 {
        (0.0, 0.0)
    } else {
        let c_inv = compound2(inv)?;
        let c_p = compound2(p)?;
        let c_q = compound2(&q_mat)?;
        (
            2.0 * (c_inv.entries() * c_p.entries()).trace(),
            2.0 * (c_inv.entries() * c_q.entries()).trace(),
        )
    };
    Ok(GhForms {
        g_p,
        h_p,
        f_p: -g_p * g_p + h_p,
        g_q,
        h_q,
        f_q: -g_q * g_q + h_q,
    })
}

/// Mixed form
/// `ℒ(R,P,Q) = -½ Tr[(R^{-1} - (R^{-1})ᵀ) P (R^{-1} + (R^{-1})ᵀ) Q]`.
pub fn l_form(r: &DecomposedR, p: &RealMatrix, q: &SkewMatrix) -> f64 {
    let inv = r.inverse();
    let inv_t = inv.transpose();
    let skew2 = inv - &inv_t;
    let sym2 = inv + &inv_t;
    -0.5 * (skew2 * p * sym2 * q.to_matrix()).trace()
}

/// σ-eigenbasis representations:
/// `ℱ(R,P) = -Σ w_{jk} |P̃̃_{jk}|²` and `ℱ(R,Q) = +Σ w_{jk} |Q̃̃_{jk}|²`
/// with weights `w_{jk} = (1-σ_jσ_k)/((1+σ_j²)(1+σ_k²))`.
pub fn spectral_forms(r: &DecomposedR, p: &RealMatrix, q: &SkewMatrix) -> (f64, f64) {
    let sigmas = r.spectrum().sigmas();
    let n = r.dim();
    let tp = tilde_transform(p, r).tilde2;
    let tq = tilde_transform(&q.to_matrix(), r).tilde2;
    let mut f_p = 0.0;
    let mut f_q = 0.0;
    for j in 0..n {
        for k in 0..n {
            let w = (1.0 - sigmas[j] * sigmas[k])
                / ((1.0 + sigmas[j] * sigmas[j]) * (1.0 + sigmas[k] * sigmas[k]));
            f_p -= w * tp[(j, k)].norm_sqr();
            f_q += w * tq[(j, k)].norm_sqr();
        }
    }
    (f_p, f_q)
}

/// Evaluated forms together with the certified upper bounds.
#[derive(Debug, Clone, Serialize)]
pub struct FormReport {
    pub f_m: f64,
    pub f_p: f64,
    pub f_q: f64,
    pub g_p: f64,
    pub h_p: f64,
    pub g_q: f64,
    pub h_q: f64,
    pub l_pq: f64,
    pub eta: f64,
    pub tilde_p_frob: f64,
    pub tilde_q_frob: f64,
    /// `ℱ(R,P) ≤ -c|P̃|²` with `c = (1-δ²)/(1+δ²)²`.
    pub sym_bound: Margin,
    /// `-c|P̃|² ≤ -c·λ_max(ω)^{-2}|P|²`.
    pub sym_frame_bound: Margin,
    /// `ℱ(R,Q) ≤ |Q̃|²`.
    pub skew_bound: Margin,
    /// `|ℒ| ≤ 2nδ/(1+δ²)·|P̃||Q̃|`.
    pub mixed_bound: Margin,
    /// `ℱ(R,P+Q) ≤ -(1-η)c|P̃|² + (1 + 4n²δ²/(η(1-δ²)))|Q̃|²`.
    pub master_bound: Margin,
}

impl FormReport {
    pub fn margins(&self) -> [&Margin; 5] {
        [
            &self.sym_bound,
            &self.sym_frame_bound,
            &self.skew_bound,
            &self.mixed_bound,
            &self.master_bound,
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

/// Evaluates every form on `(P, Q)` and certifies the four upper bounds.
/// `params` supplies the cone's `(δ, μ)`; the caller is responsible for
/// `R ∈ D_{δ,μ}`.
pub fn bounds_report(
    r: &DecomposedR,
    p: &RealMatrix,
    q: &SkewMatrix,
    eta: f64,
    params: &ConeParams,
) -> Result<FormReport> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::BadEta(eta));
    }
    let n = r.dim() as f64;
    let delta = params.delta();
    let c = (1.0 - delta * delta) / (1.0 + delta * delta).powi(2);

    let gh = gh_forms(r, p, q)?;
    let f_p = quad_form_direct(r, p);
    let f_q = quad_form_direct(r, &q.to_matrix());
    let f_m = quad_form_direct(r, &(p + q.to_matrix()));
    let l_pq = l_form(r, p, q);

    let tilde_p_frob = norms(&tilde_transform(p, r).tilde).frobenius;
    let tilde_q_frob = norms(&tilde_transform(&q.to_matrix(), r).tilde).frobenius;
    let p_frob = norms(p).frobenius;

    let sym_bound = Margin::leq(
        "F(R,P) <= -c |tilde P|^2",
        f_p,
        -c * tilde_p_frob * tilde_p_frob,
    );
    let sym_frame_bound = Margin::leq(
        "-c |tilde P|^2 <= -c lambda_max(omega)^-2 |P|^2",
        -c * tilde_p_frob * tilde_p_frob,
        -c * r.omega().lambda_max().powi(-2) * p_frob * p_frob,
    );
    let skew_bound = Margin::leq(
        "F(R,Q) <= |tilde Q|^2",
        f_q,
        tilde_q_frob * tilde_q_frob,
    );
    let mixed_bound = Margin::leq(
        "|L(R,P,Q)| <= 2 n delta/(1+delta^2) |tilde P| |tilde Q|",
        l_pq.abs(),
        2.0 * n * delta / (1.0 + delta * delta) * tilde_p_frob * tilde_q_frob,
    );
    let master_bound = Margin::leq(
        "F(R,P+Q) <= -(1-eta) c |tilde P|^2 + (1 + 4 n^2 delta^2/(eta (1-delta^2))) |tilde Q|^2",
        f_m,
        -(1.0 - eta) * c * tilde_p_frob * tilde_p_frob
            + (1.0 + 4.0 * n * n * delta * delta / (eta * (1.0 - delta * delta)))
                * tilde_q_frob
                * tilde_q_frob,
    );

    Ok(FormReport {
        f_m,
        f_p,
        f_q,
        g_p: gh.g_p,
        h_p: gh.h_p,
        g_q: gh.g_q,
        h_q: gh.h_q,
        l_pq,
        eta,
        tilde_p_frob,
        tilde_q_frob,
        sym_bound,
        sym_frame_bound,
        skew_bound,
        mixed_bound,
        master_bound,
    })
}

/// Concavity defect `d(n, δ) = 2nδ²(1 + 4n²δ²/(1-δ²))`; zero at δ = 0.
pub fn d_bound(n: usize, delta: f64) -> f64 {
    let n = n as f64;
    2.0 * n * delta * delta * (1.0 + 4.0 * n * n * delta * delta / (1.0 - delta * delta))
}

/// First-order Taylor overshoot of `F` between two cone members, with the two
/// closed-form bounds it must respect.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConcavityResult {
    /// `F(R¹) - F(R⁰) - ⟨∇F(R⁰), R¹-R⁰⟩`.
    pub gap: f64,
    /// Dimension-and-δ-only defect `2nδ²(1 + 4n²δ²/(1-δ²))`.
    pub d_bound: f64,
    /// Segment-uniform mean-value bound
    /// `½(1 + 4n²δ²/(1-δ²))·min(λ_min(ω⁰), λ_min(ω¹))^{-2}·|β¹-β⁰|²`.
    pub segment_bound: f64,
}

pub fn concavity_gap(
    r0: &DecomposedR,
    r1: &DecomposedR,
    params: &ConeParams,
) -> Result<ConcavityResult> {
    for (name, r) in [("R0", r0), ("R1", r1)] {
        let m = membership(r, params);
        if !m.member {
            return Err(Error::NotMember(format!(
                "{name}: lambda_min = {:.6e}, cone margin = {:.6e}, beta margin = {:.6e}",
                m.lambda_min, m.cone_margin, m.beta_margin
            )));
        }
    }
    if r0.dim() != r1.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            r0.dim(),
            r1.dim()
        )));
    }
    let n = r0.dim();
    let delta = params.delta();
    let f0 = log_det(r0)?;
    let f1 = log_det(r1)?;
    let diff = r1.matrix() - r0.matrix();
    let first_order = (r0.inverse() * &diff).trace();
    let gap = f1 - f0 - first_order;

    let lambda_min_min = r0.omega().lambda_min().min(r1.omega().lambda_min());
    let beta_diff = r1.beta().to_matrix() - r0.beta().to_matrix();
    let beta_diff_frob = norms(&beta_diff).frobenius;
    let nf = n as f64;
    let segment_bound = 0.5
        * (1.0 + 4.0 * nf * nf * delta * delta / (1.0 - delta * delta))
        * lambda_min_min.powi(-2)
        * beta_diff_frob
        * beta_diff_frob;

    Ok(ConcavityResult {
        gap,
        d_bound: d_bound(n, delta),
        segment_bound,
    })
}
