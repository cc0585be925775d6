//! Seeded, reproducible verification campaigns over the cone, forms and
//! compound modules.
//!
//! A campaign sweeps configurations `(n, δ, μ)` and runs a fixed battery of
//! checks on freshly sampled cone members. Per-trial seeds are derived as
//! `seed ⊕ trial` so parallel scheduling cannot reorder randomness: reports
//! are byte-identical across serial and parallel runs and across repeats with
//! the same seed (wall-clock aside).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::compound::check_compound_identities;
use crate::cone::{
    cone_report, grad_f, hess_f, inv_parts, membership, sample_cone_with, ConeParams, DecomposedR,
};
use crate::error::{Error, Result};
use crate::forms::{
    bounds_report, concavity_gap, d_bound, gh_forms, quad_form_direct, spectral_forms, split_form,
};
use crate::matrix::{norms, RealMatrix, SkewMatrix};
use crate::report::{mat_residual, rel_residual};

/// Campaign parameters. `delta_list` and `mu_list` are zipped: entry `i`
/// gives the cone `D_{δᵢ,μᵢ}`, crossed with every `n` in `n_list`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CampaignConfig {
    pub n_list: Vec<usize>,
    pub delta_list: Vec<f64>,
    pub mu_list: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub eta_list: Vec<f64>,
    /// Slack for inequality margins.
    pub slack: f64,
    /// Agreement tolerance across form representations.
    pub rep_tol: f64,
    /// Finite-difference agreement tolerance for derivatives.
    pub fd_tol: f64,
    /// Residual tolerance for compound identities.
    pub compound_tol: f64,
    /// Residual tolerance for the determinant product identity.
    pub det_product_tol: f64,
    /// Residual tolerance for the n = 2 determinant sum identity.
    pub det_sum_tol: f64,
    /// Cross-check tolerance for the closed-form inverse parts.
    pub inverse_parts_tol: f64,
    /// Spread of the sampled eigenvalues above the cone floor.
    pub spread: f64,
    /// Scale sweep for the sampled direction matrices P and Q.
    pub scales: Vec<f64>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            n_list: vec![2, 3, 5],
            delta_list: vec![0.0, 0.3, 0.9],
            mu_list: vec![0.0, 0.3, 0.9],
            trials: 500,
            seed: 42,
            eta_list: vec![0.1, 0.5, 1.0],
            slack: 1e-9,
            rep_tol: 1e-8,
            fd_tol: 1e-6,
            compound_tol: 1e-10,
            det_product_tol: 1e-10,
            det_sum_tol: 1e-12,
            inverse_parts_tol: 1e-10,
            spread: 4.0,
            scales: vec![0.1, 1.0, 10.0],
        }
    }
}

impl CampaignConfig {
    /// Expands the config into the `(n, params)` grid, validating everything.
    pub fn expand(&self) -> Result<Vec<(usize, ConeParams)>> {
        if self.trials == 0 {
            return Err(Error::BadParams("trials must be >= 1".into()));
        }
        if self.n_list.is_empty() || self.delta_list.is_empty() {
            return Err(Error::BadParams(
                "n_list and delta_list must be non-empty".into(),
            ));
        }
        if self.delta_list.len() != self.mu_list.len() {
            return Err(Error::BadParams(format!(
                "delta_list and mu_list must have equal length ({} vs {})",
                self.delta_list.len(),
                self.mu_list.len()
            )));
        }
        if let Some(&bad) = self.eta_list.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::BadEta(bad));
        }
        if self.scales.is_empty() {
            return Err(Error::BadParams("scales must be non-empty".into()));
        }
        let mut grid = Vec::new();
        for &n in &self.n_list {
            if n < 2 {
                return Err(Error::BadParams(format!(
                    "campaign dimensions must be >= 2, got {n}"
                )));
            }
            for (&delta, &mu) in self.delta_list.iter().zip(&self.mu_list) {
                grid.push((n, ConeParams::new(delta, mu)?));
            }
        }
        Ok(grid)
    }
}

/// Central finite differences of `log det` by plain LU determinants; the
/// independent route the exact derivatives are checked against.
pub mod fd {
    use super::*;

    fn log_det_plain(m: &RealMatrix) -> f64 {
        m.determinant().ln()
    }

    /// Step `h = 1e-5 (1 + ‖R‖)`.
    pub fn step(r: &RealMatrix) -> f64 {
        1e-5 * (1.0 + norms(r).operator)
    }

    pub fn gradient(r: &RealMatrix, h: f64) -> RealMatrix {
        let n = r.nrows();
        RealMatrix::from_fn(n, n, |i, j| {
            let mut plus = r.clone();
            plus[(i, j)] += h;
            let mut minus = r.clone();
            minus[(i, j)] -= h;
            (log_det_plain(&plus) - log_det_plain(&minus)) / (2.0 * h)
        })
    }

    /// Max-abs residual of second-order central differences against the
    /// exact second derivative, normalized by `1 + max-abs(exact)`.
    pub fn hessian_residual(r: &RealMatrix, h: f64, exact: &crate::cone::HessF) -> f64 {
        let n = r.nrows();
        let mut worst_diff = 0.0f64;
        let mut worst_ref = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut pp = r.clone();
                        pp[(i, j)] += h;
                        pp[(k, l)] += h;
                        let mut pm = r.clone();
                        pm[(i, j)] += h;
                        pm[(k, l)] -= h;
                        let mut mp = r.clone();
                        mp[(i, j)] -= h;
                        mp[(k, l)] += h;
                        let mut mm = r.clone();
                        mm[(i, j)] -= h;
                        mm[(k, l)] -= h;
                        let fd = (log_det_plain(&pp) - log_det_plain(&pm) - log_det_plain(&mp)
                            + log_det_plain(&mm))
                            / (4.0 * h * h);
                        let ex = exact.get(i, j, k, l);
                        worst_diff = worst_diff.max((fd - ex).abs());
                        worst_ref = worst_ref.max(ex.abs());
                    }
                }
            }
        }
        worst_diff / (1.0 + worst_ref)
    }
}

/// Gaussian symmetric matrix at the given scale.
pub fn sample_symmetric(n: usize, scale: f64, rng: &mut impl Rng) -> RealMatrix {
    let g = RealMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
    (&g + g.transpose()) * 0.5
}

/// Gaussian skew matrix at the given scale.
pub fn sample_skew(n: usize, scale: f64, rng: &mut impl Rng) -> SkewMatrix {
    let g = RealMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
    SkewMatrix::try_new(&((&g - g.transpose()) * 0.5)).expect("antisymmetrized matrix is skew")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Pass when `worst >= -threshold` (worst = smallest margin).
    Margin,
    /// Pass when `worst <= threshold` (worst = largest residual).
    Residual,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckStat {
    pub name: String,
    pub kind: CheckKind,
    pub threshold: f64,
    pub trials: u64,
    pub failures: u64,
    pub worst: f64,
}

impl CheckStat {
    fn new(name: &str, kind: CheckKind, threshold: f64) -> Self {
        let worst = match kind {
            CheckKind::Margin => f64::INFINITY,
            CheckKind::Residual => 0.0,
        };
        CheckStat {
            name: name.to_string(),
            kind,
            threshold,
            trials: 0,
            failures: 0,
            worst,
        }
    }

    fn record(&mut self, value: f64) {
        self.trials += 1;
        let pass = match self.kind {
            CheckKind::Margin => value >= -self.threshold,
            CheckKind::Residual => value <= self.threshold,
        };
        if !pass {
            self.failures += 1;
        }
        self.worst = match self.kind {
            CheckKind::Margin => self.worst.min(value),
            CheckKind::Residual => self.worst.max(value),
        };
    }
}

/// A failing trial, with the member serialized for replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureCase {
    pub n: usize,
    pub delta: f64,
    pub mu: f64,
    pub trial: u64,
    pub check: String,
    pub value: f64,
    pub member: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigReport {
    pub n: usize,
    pub delta: f64,
    pub mu: f64,
    pub checks: Vec<CheckStat>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub seed: u64,
    pub trials: u64,
    pub configs: Vec<ConfigReport>,
    pub failures: Vec<FailureCase>,
    pub total_failures: u64,
    pub wall_clock_seconds: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.total_failures == 0
    }

    /// The report without its timing field, for determinism comparisons.
    pub fn deterministic_view(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_clock_seconds");
        }
        v
    }
}

const MAX_FAILURES_KEPT: usize = 10;

struct TrialResult {
    values: Vec<f64>,
    failures: Vec<(usize, f64)>,
    member: Option<DecomposedR>,
}

fn check_battery(cfg: &CampaignConfig, n: usize) -> Vec<CheckStat> {
    let mut checks = vec![
        CheckStat::new("membership", CheckKind::Margin, 0.0),
        CheckStat::new("cone_bounds", CheckKind::Margin, cfg.slack),
        CheckStat::new("det_product", CheckKind::Residual, cfg.det_product_tol),
        CheckStat::new("inverse_parts", CheckKind::Residual, cfg.inverse_parts_tol),
        CheckStat::new("gradient_fd", CheckKind::Residual, cfg.fd_tol),
        CheckStat::new("hessian_fd", CheckKind::Residual, cfg.fd_tol),
        CheckStat::new("form_agreement", CheckKind::Residual, cfg.rep_tol),
        CheckStat::new("form_bounds", CheckKind::Margin, cfg.slack),
        CheckStat::new("compound_identities", CheckKind::Residual, cfg.compound_tol),
    ];
    if n == 2 {
        checks.push(CheckStat::new(
            "det_sum_n2",
            CheckKind::Residual,
            cfg.det_sum_tol,
        ));
    }
    checks
}

fn run_trial(
    cfg: &CampaignConfig,
    n: usize,
    params: &ConeParams,
    trial_seed: u64,
    trial: u64,
    check_count: usize,
) -> Result<TrialResult> {
    let mut values = vec![0.0f64; check_count];
    let mut failures: Vec<(usize, f64)> = Vec::new();

    let r = sample_cone_with(n, params, trial_seed, cfg.spread)?;

    // direction matrices come from a separate stream of the same seed
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    rng.set_stream(1);
    let scale = cfg.scales[(trial as usize) % cfg.scales.len()];
    let p = sample_symmetric(n, scale, &mut rng);
    let q = sample_skew(n, scale, &mut rng);
    let m_rand = RealMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let n_rand = RealMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));

    // membership margins
    let ms = membership(&r, params);
    values[0] = ms.lambda_min.min(ms.cone_margin).min(ms.beta_margin);
    if !ms.member {
        failures.push((0, values[0]));
    }

    // sandwich bounds
    let report = cone_report(&r, params)?;
    values[1] = report.worst_margin();
    if !report.all_hold(cfg.slack) {
        failures.push((1, values[1]));
    }

    // determinant product identity
    let det_r = r.matrix().determinant();
    let product = r.omega().det() * r.spectrum().det_product_factor();
    values[2] = rel_residual(det_r, product);
    if values[2] > cfg.det_product_tol {
        failures.push((2, values[2]));
    }

    // closed-form inverse parts against the direct inverse
    let parts = inv_parts(&r)?;
    values[3] = mat_residual(&(&parts.sym + &parts.skew), r.inverse());
    if values[3] > cfg.inverse_parts_tol {
        failures.push((3, values[3]));
    }

    // derivatives against central differences
    let h = fd::step(r.matrix());
    let grad_fd = fd::gradient(r.matrix(), h);
    values[4] = mat_residual(&grad_fd, &grad_f(&r));
    if values[4] > cfg.fd_tol {
        failures.push((4, values[4]));
    }
    let hess = hess_f(&r);
    values[5] = fd::hessian_residual(r.matrix(), h, &hess);
    if values[5] > cfg.fd_tol {
        failures.push((5, values[5]));
    }

    // representation agreement across the four routes
    let f_p_direct = quad_form_direct(&r, &p);
    let f_q_direct = quad_form_direct(&r, &q.to_matrix());
    let gh = gh_forms(&r, &p, &q)?;
    let (f_p_spec, f_q_spec) = spectral_forms(&r, &p, &q);
    let split = split_form(&r, &(&p + q.to_matrix()))?;
    let hess_p = hess.contract(&p, &p);
    let hess_q = hess.contract(&q.to_matrix(), &q.to_matrix());
    values[6] = [
        rel_residual(gh.f_p, f_p_direct),
        rel_residual(f_p_spec, f_p_direct),
        rel_residual(hess_p, f_p_direct),
        rel_residual(gh.f_q, f_q_direct),
        rel_residual(f_q_spec, f_q_direct),
        rel_residual(hess_q, f_q_direct),
        split.split_residual,
        rel_residual(split.f_p, f_p_direct),
        rel_residual(split.f_q, f_q_direct),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    if values[6] > cfg.rep_tol {
        failures.push((6, values[6]));
    }

    // upper bounds for every eta
    let mut bounds_worst = f64::INFINITY;
    for &eta in &cfg.eta_list {
        let fr = bounds_report(&r, &p, &q, eta, params)?;
        bounds_worst = bounds_worst.min(fr.worst_margin());
    }
    values[7] = bounds_worst;
    if values[7] < -cfg.slack {
        failures.push((7, values[7]));
    }

    // compound identity battery on fresh random matrices
    let id_report = check_compound_identities(&m_rand, &n_rand)?;
    values[8] = id_report.max_residual();
    if values[8] > cfg.compound_tol {
        failures.push((8, values[8]));
    }

    if n == 2 {
        let det_beta = r.beta().to_matrix().determinant();
        values[9] = rel_residual(det_r, r.omega().det() + det_beta);
        if values[9] > cfg.det_sum_tol {
            failures.push((9, values[9]));
        }
    }

    let member = (!failures.is_empty()).then_some(r);
    Ok(TrialResult {
        values,
        failures,
        member,
    })
}

/// Runs the full verification campaign described by the config.
pub fn run_verify(cfg: &CampaignConfig) -> Result<VerifyReport> {
    let started = std::time::Instant::now();
    let grid = cfg.expand()?;
    let mut configs = Vec::with_capacity(grid.len());
    let mut all_failures = Vec::new();
    let mut total_failures = 0u64;

    for (cfg_idx, (n, params)) in grid.iter().enumerate() {
        let mut checks = check_battery(cfg, *n);
        let base = cfg.seed.wrapping_add((cfg_idx as u64) << 40);
        let outcomes: Vec<Result<TrialResult>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_trial(cfg, *n, params, base ^ trial, trial, checks.len()))
            .collect();
        for (trial, outcome) in outcomes.into_iter().enumerate() {
            let outcome = outcome?;
            for (check, value) in checks.iter_mut().zip(&outcome.values) {
                check.record(*value);
            }
            total_failures += outcome.failures.len() as u64;
            if let Some(member) = outcome.member {
                if all_failures.len() < MAX_FAILURES_KEPT {
                    let member_json = serde_json::to_value(&member).expect("member serializes");
                    for (check_idx, value) in &outcome.failures {
                        all_failures.push(FailureCase {
                            n: *n,
                            delta: params.delta(),
                            mu: params.mu(),
                            trial: trial as u64,
                            check: checks[*check_idx].name.clone(),
                            value: *value,
                            member: member_json.clone(),
                        });
                    }
                }
            }
        }
        configs.push(ConfigReport {
            n: *n,
            delta: params.delta(),
            mu: params.mu(),
            checks,
        });
    }

    Ok(VerifyReport {
        schema: 1,
        seed: cfg.seed,
        trials: cfg.trials,
        configs,
        failures: all_failures,
        total_failures,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}

/// One row of the concavity-defect table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    pub delta: f64,
    pub mu: f64,
    pub trials: u64,
    pub max_gap: f64,
    pub d_bound: f64,
    /// `d_bound - max_gap`.
    pub margin: f64,
    pub failures: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DconcavityReport {
    pub schema: u32,
    pub seed: u64,
    pub rows: Vec<GapRow>,
    pub total_failures: u64,
    pub wall_clock_seconds: f64,
}

impl DconcavityReport {
    pub fn passed(&self) -> bool {
        self.total_failures == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,delta,mu,trials,max_gap,d_bound,margin,failures\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.15e},{:.15e},{:.15e},{}\n",
                row.n,
                row.delta,
                row.mu,
                row.trials,
                row.max_gap,
                row.d_bound,
                row.margin,
                row.failures
            ));
        }
        out
    }
}

/// Samples pairs of members per configuration and records the worst
/// first-order Taylor overshoot against the closed-form defect.
pub fn run_dconcavity(cfg: &CampaignConfig) -> Result<DconcavityReport> {
    let started = std::time::Instant::now();
    let grid = cfg.expand()?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut total_failures = 0u64;

    for (cfg_idx, (n, params)) in grid.iter().enumerate() {
        let base = cfg.seed.wrapping_add((cfg_idx as u64) << 40);
        let gaps: Vec<Result<(f64, bool)>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let r0 = sample_cone_with(*n, params, base ^ (2 * trial), cfg.spread)?;
                let r1 = sample_cone_with(*n, params, base ^ (2 * trial + 1), cfg.spread)?;
                let result = concavity_gap(&r0, &r1, params)?;
                let ok = result.gap <= result.d_bound + cfg.slack
                    && result.gap <= result.segment_bound + cfg.slack;
                Ok((result.gap, ok))
            })
            .collect();
        let mut max_gap = f64::NEG_INFINITY;
        let mut failures = 0u64;
        for gap in gaps {
            let (gap, ok) = gap?;
            max_gap = max_gap.max(gap);
            if !ok {
                failures += 1;
            }
        }
        let bound = d_bound(*n, params.delta());
        total_failures += failures;
        rows.push(GapRow {
            n: *n,
            delta: params.delta(),
            mu: params.mu(),
            trials: cfg.trials,
            max_gap,
            d_bound: bound,
            margin: bound - max_gap,
            failures,
        });
    }

    Ok(DconcavityReport {
        schema: 1,
        seed: cfg.seed,
        rows,
        total_failures,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    })
}
