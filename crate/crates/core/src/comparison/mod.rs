//! Grid-based verification of the comparison principle for equations
//! `log det[D²u - A(x,u,Du) - B(x,u,Du)] = log f(x,u,Du)` with a skew
//! perturbation `B`.
//!
//! For a scenario `(Ω, u, v, A, B, f, δ, α₁, β₁)` this module evaluates, on
//! an explicit grid, the five structural hypotheses of the comparison
//! theorem, the uniform ellipticity / boundedness / sign properties of the
//! linearized operator `L = aᵢⱼDᵢⱼ + bᵏDₖ + c` (quantified over an explicit
//! `(s,τ)` lattice standing in for the existential mean-value constants), and
//! the resulting ordering conclusion: `u > v` in the interior, or `u ≡ v`.

pub mod fields;
pub mod grid;
pub mod scenario;

pub use fields::{Estimate, ForcingField, MatrixField, Profile, SamplingBox, ScalarField,
    ScalarTerm, SymmetryClass};
pub use grid::{BoundaryNode, Domain, Grid, DEFAULT_BOUNDARY_NODES};
pub use scenario::Scenario;

use nalgebra::DVector;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::report::Margin;

/// Which of the two compared functions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichFn {
    U,
    V,
}

impl Scenario {
    fn field(&self, which: WhichFn) -> &ScalarField {
        match which {
            WhichFn::U => &self.u,
            WhichFn::V => &self.v,
        }
    }
}

/// The matrix `ω(x, w) = D²w(x) - A(x, w, Dw)` together with its smallest
/// eigenvalue. Indefiniteness is data (it feeds the ellipticity hypothesis),
/// not an error.
#[derive(Debug, Clone)]
pub struct OmegaEval {
    pub matrix: RealMatrix,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl OmegaEval {
    pub fn is_positive_definite(&self) -> bool {
        self.lambda_min > 0.0
    }
}

pub fn omega_field(scenario: &Scenario, which: WhichFn, x: &DVector<f64>) -> OmegaEval {
    let w = scenario.field(which);
    let z = w.value(x);
    let p = w.gradient(x);
    let hess = w.hessian(x);
    let a = scenario.a.value(scenario.dim(), x, z, &p);
    let m = hess - a;
    let matrix = (&m + m.transpose()) * 0.5;
    let eig = matrix.clone().symmetric_eigen().eigenvalues;
    let (lambda_min, lambda_max) = eig
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
            (lo.min(l), hi.max(l))
        });
    OmegaEval {
        matrix,
        lambda_min,
        lambda_max,
    }
}

/// `G[w](x) = log det[D²w - A - B] - log f`, defined where `ω(x,w)` is
/// positive definite (which forces `det[ω - B] > 0`).
pub fn operator_g(scenario: &Scenario, which: WhichFn, x: &DVector<f64>) -> Result<f64> {
    let w = scenario.field(which);
    let z = w.value(x);
    let p = w.gradient(x);
    let omega = omega_field(scenario, which, x);
    if !omega.is_positive_definite() {
        return Err(Error::NonElliptic(format!(
            "lambda_min(omega) = {:.6e} at x = {:?}",
            omega.lambda_min,
            x.as_slice()
        )));
    }
    let b = scenario.b.value(scenario.dim(), x, z, &p);
    let r = &omega.matrix - b;
    let det = r.determinant();
    let f_val = scenario.f.value(x, z, &p);
    if f_val.is_nan() || f_val <= 0.0 {
        return Err(Error::BadInput(format!(
            "f must be positive, got {f_val} at x = {:?}",
            x.as_slice()
        )));
    }
    Ok(det.ln() - f_val.ln())
}

/// The two suprema `μ(B) = sup ‖B‖` and `μ(D_z B) = sup ‖D_z B‖`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MuBounds {
    pub mu_b: Estimate,
    pub mu_dzb: Estimate,
}

pub fn mu_bounds(scenario: &Scenario) -> MuBounds {
    MuBounds {
        mu_b: scenario.b.sup_norm(scenario.dim(), &scenario.sampling),
        mu_dzb: scenario.b.sup_dz_norm(scenario.dim(), &scenario.sampling),
    }
}

/// One structural hypothesis, stated as `lhs >= rhs` (strict for the
/// ellipticity hypothesis), with `margin = (lhs - rhs)/(1 + |rhs|)`.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Whether a lattice estimate (rather than a closed form) entered.
    pub estimated: bool,
    pub pass: bool,
}

impl HypothesisCheck {
    fn geq(name: &str, lhs: f64, rhs: f64, estimated: bool, strict: bool) -> Self {
        HypothesisCheck {
            name: name.to_string(),
            lhs,
            rhs,
            margin: (lhs - rhs) / (1.0 + rhs.abs()),
            estimated,
            pass: if strict { lhs > rhs } else { lhs >= rhs },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesesReport {
    pub min_lambda_u: f64,
    pub min_lambda_v: f64,
    pub mu_b: Estimate,
    pub mu_dzb: Estimate,
    pub conditions: Vec<HypothesisCheck>,
    pub all_pass: bool,
}

impl HypothesesReport {
    /// Smallest eigenvalue of either ω field over the grid.
    pub fn min_lambda(&self) -> f64 {
        self.min_lambda_u.min(self.min_lambda_v)
    }
}

/// Evaluates the five structural hypotheses over all grid nodes (interior
/// and boundary) and the scenario's sampling lattice where suprema have no
/// closed form.
pub fn hypotheses_check(scenario: &Scenario, grid: &Grid) -> HypothesesReport {
    let nodes: Vec<&DVector<f64>> = grid.all_points().collect();
    let lambda = |which: WhichFn| {
        nodes
            .par_iter()
            .map(|x| omega_field(scenario, which, x).lambda_min)
            .collect::<Vec<f64>>()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    };
    let min_lambda_u = lambda(WhichFn::U);
    let min_lambda_v = lambda(WhichFn::V);
    let min_lambda = min_lambda_u.min(min_lambda_v);

    let mu = mu_bounds(scenario);
    let dim = scenario.dim() as f64;
    let delta = scenario.delta;

    let ellipticity = HypothesisCheck::geq("ellipticity: min lambda_min(omega) > 0",
        min_lambda, 0.0, false, true);
    let cone = HypothesisCheck::geq(
        "delta-admissibility: delta * min lambda >= mu(B)",
        delta * min_lambda,
        mu.mu_b.value,
        !mu.mu_b.exact,
        false,
    );
    let dza = scenario
        .a
        .inf_dz_lambda_min(scenario.dim(), &scenario.sampling);
    let monotone_a = HypothesisCheck::geq(
        "inf lambda_min(D_z A) >= -alpha1 * min lambda",
        dza.value,
        -scenario.alpha1 * min_lambda,
        !dza.exact,
        false,
    );
    let dzb_growth = HypothesisCheck::geq(
        "beta1 * min lambda >= mu(D_z B)",
        scenario.beta1 * min_lambda,
        mu.mu_dzb.value,
        !mu.mu_dzb.exact,
        false,
    );
    let f_growth_inf = scenario.f.inf_dz_over_f(&scenario.sampling);
    let f_growth = HypothesisCheck::geq(
        "inf D_z f / f >= n (alpha1 + delta beta1 / (1 + delta^2))",
        f_growth_inf.value,
        dim * (scenario.alpha1 + delta / (1.0 + delta * delta) * scenario.beta1),
        !f_growth_inf.exact,
        false,
    );

    let conditions = vec![ellipticity, cone, monotone_a, dzb_growth, f_growth];
    let all_pass = conditions.iter().all(|c| c.pass);
    HypothesesReport {
        min_lambda_u,
        min_lambda_v,
        mu_b: mu.mu_b,
        mu_dzb: mu.mu_dzb,
        conditions,
        all_pass,
    }
}

/// Mean-value parameters `(s, τ) ∈ [0,1]²` at which the linearization is
/// evaluated.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearizationPoint {
    pub s: f64,
    pub tau: f64,
}

impl LinearizationPoint {
    pub fn new(s: f64, tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&tau) {
            return Err(Error::BadInput(format!(
                "linearization point must lie in [0,1]^2, got ({s}, {tau})"
            )));
        }
        Ok(LinearizationPoint { s, tau })
    }
}

/// Coefficients of the linearized operator at one `(x, s, τ)`:
/// `a = sym((R⁽ˢ⁾)^{-1})`, first-order `b`, zero-order `c`.
#[derive(Debug, Clone)]
pub struct PointCoeffs {
    pub a: RealMatrix,
    pub b: DVector<f64>,
    pub c: f64,
    /// `-Tr[(R⁽ˢ⁾)^{-1} D_z A]`, the symmetric contribution to `c`.
    pub dza_term: f64,
    /// `-Tr[(R⁽ˢ⁾)^{-1} D_z B]`, the skew contribution to `c`.
    pub dzb_term: f64,
}

/// Everything about a node that the `(s,τ)` sweep reuses.
struct NodeData {
    z_u: f64,
    p_u: DVector<f64>,
    z_v: f64,
    p_v: DVector<f64>,
    r0: RealMatrix,
    r1: RealMatrix,
    omega_u: OmegaEval,
    omega_v: OmegaEval,
}

fn node_data(scenario: &Scenario, x: &DVector<f64>) -> NodeData {
    let dim = scenario.dim();
    let z_u = scenario.u.value(x);
    let p_u = scenario.u.gradient(x);
    let z_v = scenario.v.value(x);
    let p_v = scenario.v.gradient(x);
    let omega_u = omega_field(scenario, WhichFn::U, x);
    let omega_v = omega_field(scenario, WhichFn::V, x);
    let r0 = &omega_u.matrix - scenario.b.value(dim, x, z_u, &p_u);
    let r1 = &omega_v.matrix - scenario.b.value(dim, x, z_v, &p_v);
    NodeData {
        z_u,
        p_u,
        z_v,
        p_v,
        r0,
        r1,
        omega_u,
        omega_v,
    }
}

fn coeffs_at(
    scenario: &Scenario,
    x: &DVector<f64>,
    node: &NodeData,
    pt: LinearizationPoint,
) -> Result<PointCoeffs> {
    let dim = scenario.dim();
    let s = pt.s;
    let tau = pt.tau;
    // omega^{(s)} stays positive definite along the segment
    let omega_s_min =
        (1.0 - s) * node.omega_u.lambda_min + s * node.omega_v.lambda_min;
    if !node.omega_u.is_positive_definite()
        || !node.omega_v.is_positive_definite()
        || omega_s_min <= 0.0
    {
        return Err(Error::NonElliptic(format!(
            "omega fields are not positive definite at x = {:?}",
            x.as_slice()
        )));
    }
    let r_s = &node.r0 * (1.0 - s) + &node.r1 * s;
    let inv = r_s.try_inverse().ok_or_else(|| {
        Error::NonElliptic(format!(
            "R(s) is numerically singular at x = {:?}, s = {s}",
            x.as_slice()
        ))
    })?;
    let a = (&inv + inv.transpose()) * 0.5;

    let z_tau = (1.0 - tau) * node.z_u + tau * node.z_v;
    let p_tau = &node.p_u * (1.0 - tau) + &node.p_v * tau;
    let f_val = scenario.f.value(x, z_tau, &p_tau);
    let dz_a = scenario.a.d_z(dim, x, z_tau, &p_tau);
    let dz_b = scenario.b.d_z(dim, x, z_tau, &p_tau);
    let dza_term = -(&inv * &dz_a).trace();
    let dzb_term = -(&inv * &dz_b).trace();
    let c = dza_term + dzb_term - scenario.f.d_z(x, z_tau, &p_tau) / f_val;

    let b = DVector::from_fn(dim, |k, _| {
        let dp_a = scenario.a.d_p(dim, x, z_tau, &p_tau, k);
        let dp_b = scenario.b.d_p(dim, x, z_tau, &p_tau, k);
        -(&inv * (dp_a + dp_b)).trace() - scenario.f.d_p(x, z_tau, &p_tau, k) / f_val
    });
    Ok(PointCoeffs {
        a,
        b,
        c,
        dza_term,
        dzb_term,
    })
}

/// Coefficients of the linearization of `G[v] - G[u]` at a single point.
pub fn linearized_coeffs(
    scenario: &Scenario,
    x: &DVector<f64>,
    pt: LinearizationPoint,
) -> Result<PointCoeffs> {
    coeffs_at(scenario, x, &node_data(scenario, x), pt)
}

/// Min over the `(s,τ)` lattice of the defect
/// `|G[v](x) - G[u](x) - (aᵢⱼDᵢⱼw + bᵏDₖw + c·w)(x)|`, `w = v - u`.
/// The mean-value parameters exist but are not constructible, so the defect
/// is driven to zero only as the lattice refines.
pub fn mean_value_residual(
    scenario: &Scenario,
    x: &DVector<f64>,
    lattice: &StauLattice,
) -> Result<f64> {
    let g_gap = operator_g(scenario, WhichFn::V, x)? - operator_g(scenario, WhichFn::U, x)?;
    let w_val = scenario.v.value(x) - scenario.u.value(x);
    let w_grad = scenario.v.gradient(x) - scenario.u.gradient(x);
    let w_hess = scenario.v.hessian(x) - scenario.u.hessian(x);
    let node = node_data(scenario, x);
    let mut best = f64::INFINITY;
    for &s in &lattice.s {
        for &tau in &lattice.tau {
            let coeffs = coeffs_at(scenario, x, &node, LinearizationPoint { s, tau })?;
            let lw = coeffs.a.component_mul(&w_hess).sum()
                + coeffs.b.dot(&w_grad)
                + coeffs.c * w_val;
            best = best.min((g_gap - lw).abs());
        }
    }
    Ok(best)
}

/// Explicit lattice over the mean-value parameters `(s, τ)`.
#[derive(Debug, Clone, Serialize)]
pub struct StauLattice {
    pub s: Vec<f64>,
    pub tau: Vec<f64>,
}

impl StauLattice {
    /// Uniform lattice on `[0,1]²` including the endpoints.
    pub fn uniform(n_s: usize, n_tau: usize) -> Self {
        let axis = |m: usize| -> Vec<f64> {
            if m == 1 {
                vec![0.5]
            } else {
                (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
            }
        };
        StauLattice {
            s: axis(n_s),
            tau: axis(n_tau),
        }
    }
}

impl Default for StauLattice {
    fn default() -> Self {
        StauLattice::uniform(5, 5)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimsConfig {
    pub lattice: StauLattice,
    /// Random unit directions per node for the ellipticity sandwich.
    pub xi_samples: usize,
    pub seed: u64,
}

impl Default for ClaimsConfig {
    fn default() -> Self {
        ClaimsConfig {
            lattice: StauLattice::default(),
            xi_samples: 1000,
            seed: 0x5eed,
        }
    }
}

/// Uniform-ellipticity, boundedness and sign properties of the linearized
/// operator over the full `(x, s, τ)` lattice.
#[derive(Debug, Clone, Serialize)]
pub struct ClaimsReport {
    /// Eigenvalue sandwich constants for the ω fields over the grid.
    pub lambda0: f64,
    pub big_lambda0: f64,
    /// Derived operator ellipticity constants `λ = 1/((1+δ²)Λ₀)`, `Λ = 1/λ₀`.
    pub lambda: f64,
    pub big_lambda: f64,
    pub sup_b: f64,
    pub sup_c: f64,
    pub c_max: f64,
    pub dza_term_max: f64,
    pub dzb_term_max: f64,
    /// `λ ≤ eig(a) ≤ Λ` over every `(x, s, τ)`.
    pub ellipticity_eigen_lower: Margin,
    pub ellipticity_eigen_upper: Margin,
    /// Sampled quadratic-form sandwich on random unit ξ.
    pub ellipticity_xi_lower: Margin,
    pub ellipticity_xi_upper: Margin,
    /// Coefficients stay finite (boundedness).
    pub coeffs_bounded: bool,
    /// `c ≤ 0`, and its two parts against their closed-form budgets.
    pub zero_order_sign: Margin,
    pub zero_order_sym_part: Margin,
    pub zero_order_skew_part: Margin,
}

impl ClaimsReport {
    pub fn margins(&self) -> [&Margin; 7] {
        [
            &self.ellipticity_eigen_lower,
            &self.ellipticity_eigen_upper,
            &self.ellipticity_xi_lower,
            &self.ellipticity_xi_upper,
            &self.zero_order_sign,
            &self.zero_order_sym_part,
            &self.zero_order_skew_part,
        ]
    }

    pub fn worst_margin(&self) -> f64 {
        self.margins()
            .iter()
            .map(|m| m.margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn all_pass(&self, slack: f64) -> bool {
        self.coeffs_bounded && self.worst_margin() >= -slack
    }
}

struct NodeStats {
    min_eig_a: f64,
    max_eig_a: f64,
    min_xi_form: f64,
    max_xi_form: f64,
    sup_b: f64,
    sup_c: f64,
    c_max: f64,
    dza_max: f64,
    dzb_max: f64,
}

/// Checks the linearized-operator properties over every grid node and every
/// `(s, τ)` lattice point. Requires the ellipticity hypothesis: both ω
/// fields positive definite on the grid.
pub fn claims_check(scenario: &Scenario, grid: &Grid, cfg: &ClaimsConfig) -> Result<ClaimsReport> {
    let nodes: Vec<&DVector<f64>> = grid.all_points().collect();
    if nodes.is_empty() {
        return Err(Error::BadInput("empty grid".into()));
    }
    let dim = scenario.dim();
    let delta = scenario.delta;

    let per_node: Vec<Result<(f64, f64, NodeStats)>> = nodes
        .par_iter()
        .enumerate()
        .map(|(node_idx, x)| {
            let node = node_data(scenario, x);
            if !(node.omega_u.lambda_min > 0.0 && node.omega_v.lambda_min > 0.0) {
                return Err(Error::NonElliptic(format!(
                    "omega fields not positive definite at x = {:?}",
                    x.as_slice()
                )));
            }
            let lambda0 = node.omega_u.lambda_min.min(node.omega_v.lambda_min);
            let big_lambda0 = node.omega_u.lambda_max.max(node.omega_v.lambda_max);

            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ node_idx as u64);
            let xis: Vec<DVector<f64>> = (0..cfg.xi_samples)
                .map(|_| {
                    let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                    let n = v.norm();
                    if n == 0.0 {
                        DVector::from_fn(dim, |i, _| if i == 0 { 1.0 } else { 0.0 })
                    } else {
                        v / n
                    }
                })
                .collect();

            let mut stats = NodeStats {
                min_eig_a: f64::INFINITY,
                max_eig_a: f64::NEG_INFINITY,
                min_xi_form: f64::INFINITY,
                max_xi_form: f64::NEG_INFINITY,
                sup_b: 0.0,
                sup_c: 0.0,
                c_max: f64::NEG_INFINITY,
                dza_max: f64::NEG_INFINITY,
                dzb_max: f64::NEG_INFINITY,
            };
            for &s in &cfg.lattice.s {
                for &tau in &cfg.lattice.tau {
                    let coeffs = coeffs_at(scenario, x, &node, LinearizationPoint { s, tau })?;
                    let eig = coeffs.a.clone().symmetric_eigen().eigenvalues;
                    for &l in eig.iter() {
                        stats.min_eig_a = stats.min_eig_a.min(l);
                        stats.max_eig_a = stats.max_eig_a.max(l);
                    }
                    for xi in &xis {
                        let mut form = 0.0;
                        for i in 0..dim {
                            let xi_i = xi[i];
                            for j in 0..dim {
                                form += coeffs.a[(i, j)] * xi_i * xi[j];
                            }
                        }
                        stats.min_xi_form = stats.min_xi_form.min(form);
                        stats.max_xi_form = stats.max_xi_form.max(form);
                    }
                    stats.sup_b = stats.sup_b.max(coeffs.b.norm());
                    stats.sup_c = stats.sup_c.max(coeffs.c.abs());
                    stats.c_max = stats.c_max.max(coeffs.c);
                    stats.dza_max = stats.dza_max.max(coeffs.dza_term);
                    stats.dzb_max = stats.dzb_max.max(coeffs.dzb_term);
                }
            }
            Ok((lambda0, big_lambda0, stats))
        })
        .collect();

    let mut lambda0 = f64::INFINITY;
    let mut big_lambda0 = f64::NEG_INFINITY;
    let mut total = NodeStats {
        min_eig_a: f64::INFINITY,
        max_eig_a: f64::NEG_INFINITY,
        min_xi_form: f64::INFINITY,
        max_xi_form: f64::NEG_INFINITY,
        sup_b: 0.0,
        sup_c: 0.0,
        c_max: f64::NEG_INFINITY,
        dza_max: f64::NEG_INFINITY,
        dzb_max: f64::NEG_INFINITY,
    };
    for item in per_node {
        let (l0, b0, stats) = item?;
        lambda0 = lambda0.min(l0);
        big_lambda0 = big_lambda0.max(b0);
        total.min_eig_a = total.min_eig_a.min(stats.min_eig_a);
        total.max_eig_a = total.max_eig_a.max(stats.max_eig_a);
        total.min_xi_form = total.min_xi_form.min(stats.min_xi_form);
        total.max_xi_form = total.max_xi_form.max(stats.max_xi_form);
        total.sup_b = total.sup_b.max(stats.sup_b);
        total.sup_c = total.sup_c.max(stats.sup_c);
        total.c_max = total.c_max.max(stats.c_max);
        total.dza_max = total.dza_max.max(stats.dza_max);
        total.dzb_max = total.dzb_max.max(stats.dzb_max);
    }

    let lambda = 1.0 / ((1.0 + delta * delta) * big_lambda0);
    let big_lambda = 1.0 / lambda0;
    let n = dim as f64;

    Ok(ClaimsReport {
        lambda0,
        big_lambda0,
        lambda,
        big_lambda,
        sup_b: total.sup_b,
        sup_c: total.sup_c,
        c_max: total.c_max,
        dza_term_max: total.dza_max,
        dzb_term_max: total.dzb_max,
        ellipticity_eigen_lower: Margin::leq(
            "lambda <= min eig(a)",
            lambda,
            total.min_eig_a,
        ),
        ellipticity_eigen_upper: Margin::leq(
            "max eig(a) <= Lambda",
            total.max_eig_a,
            big_lambda,
        ),
        ellipticity_xi_lower: Margin::leq(
            "lambda |xi|^2 <= (a xi, xi)",
            lambda,
            total.min_xi_form,
        ),
        ellipticity_xi_upper: Margin::leq(
            "(a xi, xi) <= Lambda |xi|^2",
            total.max_xi_form,
            big_lambda,
        ),
        coeffs_bounded: total.sup_b.is_finite() && total.sup_c.is_finite(),
        zero_order_sign: Margin::leq("c <= 0", total.c_max, 0.0),
        zero_order_sym_part: Margin::leq(
            "-tr(R(s)^-1 D_z A) <= n alpha1",
            total.dza_max,
            n * scenario.alpha1,
        ),
        zero_order_skew_part: Margin::leq(
            "-tr(R(s)^-1 D_z B) <= n delta beta1/(1+delta^2)",
            total.dzb_max,
            n * delta / (1.0 + delta * delta) * scenario.beta1,
        ),
    })
}

/// Ordering preconditions of the comparison theorem, evaluated on the grid.
#[derive(Debug, Clone, Serialize)]
pub struct Preconditions {
    /// `G[u] ≤ G[v]` at every interior node; `None` when `G` was not
    /// evaluable (non-elliptic ω field).
    pub min_g_gap: Option<f64>,
    pub g_ordered: bool,
    /// `u ≥ v` at every boundary node.
    pub min_boundary_gap: f64,
    pub boundary_ordered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    UGtV,
    UIdenticalV,
    Violated,
}

/// Numerical verdict of the comparison principle on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub preconditions: Preconditions,
    pub hypotheses: HypothesesReport,
    pub claims: Option<ClaimsReport>,
    pub conclusion: Conclusion,
    /// `min (u - v)` over interior nodes.
    pub min_interior_margin: f64,
    /// `max |u - v|` over all nodes.
    pub max_abs_diff: f64,
    /// `min ∂(u-v)/∂ν` over boundary nodes, when the strict case applies
    /// (`G[u] < G[v]` strictly and `u = v` on the boundary).
    pub boundary_normal_margin: Option<f64>,
    pub tol_conclude: f64,
}

/// Absolute tolerance deciding `u > v` vs `u ≡ v` at grid nodes.
pub const TOL_CONCLUDE: f64 = 1e-8;

pub fn comparison_verdict(scenario: &Scenario, grid: &Grid) -> Result<Verdict> {
    comparison_verdict_with(scenario, grid, &ClaimsConfig::default())
}

pub fn comparison_verdict_with(
    scenario: &Scenario,
    grid: &Grid,
    cfg: &ClaimsConfig,
) -> Result<Verdict> {
    scenario.validate()?;
    let hypotheses = hypotheses_check(scenario, grid);

    // u - v statistics
    let interior_diffs: Vec<f64> = grid
        .interior
        .par_iter()
        .map(|x| scenario.u.value(x) - scenario.v.value(x))
        .collect();
    let boundary_diffs: Vec<f64> = grid
        .boundary
        .par_iter()
        .map(|b| scenario.u.value(&b.point) - scenario.v.value(&b.point))
        .collect();
    let min_interior_margin = interior_diffs
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let min_boundary_gap = boundary_diffs
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let boundary_max_abs = boundary_diffs
        .iter()
        .fold(0.0f64, |acc, d| acc.max(d.abs()));
    let max_abs_diff = interior_diffs
        .iter()
        .fold(boundary_max_abs, |acc, d| acc.max(d.abs()));

    // operator ordering on the interior
    let elliptic_everywhere = hypotheses.conditions[0].pass;
    let (min_g_gap, claims) = if elliptic_everywhere {
        let gaps: Vec<Result<f64>> = grid
            .interior
            .par_iter()
            .map(|x| {
                Ok(operator_g(scenario, WhichFn::V, x)? - operator_g(scenario, WhichFn::U, x)?)
            })
            .collect();
        let mut min_gap = f64::INFINITY;
        for g in gaps {
            min_gap = min_gap.min(g?);
        }
        let claims = claims_check(scenario, grid, cfg)?;
        (Some(min_gap), Some(claims))
    } else {
        (None, None)
    };
    let g_ordered = min_g_gap.is_some_and(|g| g >= -1e-12);
    let boundary_ordered = min_boundary_gap >= -1e-12;
    let preconditions = Preconditions {
        min_g_gap,
        g_ordered,
        min_boundary_gap,
        boundary_ordered,
    };

    let theorem_applies = hypotheses.all_pass && g_ordered && boundary_ordered;
    let conclusion = if !theorem_applies {
        Conclusion::Violated
    } else if min_interior_margin > TOL_CONCLUDE {
        Conclusion::UGtV
    } else if max_abs_diff < TOL_CONCLUDE {
        Conclusion::UIdenticalV
    } else {
        Conclusion::Violated
    };

    // strict case: G[u] < G[v] in the interior and u = v on the boundary
    let boundary_normal_margin = if theorem_applies
        && min_g_gap.is_some_and(|g| g > TOL_CONCLUDE)
        && boundary_max_abs < TOL_CONCLUDE
    {
        Some(
            grid.boundary
                .par_iter()
                .map(|b| {
                    let du = scenario.u.gradient(&b.point);
                    let dv = scenario.v.gradient(&b.point);
                    (du - dv).dot(&b.inner_normal)
                })
                .collect::<Vec<f64>>()
                .into_iter()
                .fold(f64::INFINITY, f64::min),
        )
    } else {
        None
    };

    Ok(Verdict {
        preconditions,
        hypotheses,
        claims,
        conclusion,
        min_interior_margin,
        max_abs_diff,
        boundary_normal_margin,
        tol_conclude: TOL_CONCLUDE,
    })
}

#[cfg(test)]
mod tests;
