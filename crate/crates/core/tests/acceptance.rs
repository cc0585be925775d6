//! Acceptance suite: every release gate in one place, one pass/fail line per
//! criterion (run with `--nocapture` to see the lines for passing tests).
//!
//! The criteria are property-based at desk scale: fixed seeds, pinned
//! tolerances, and independent oracles (brute-force minors, LU determinants,
//! central finite differences, cross-representation agreement).

use std::time::Instant;

use nsma_core::campaign::{
    self, fd, run_verify, sample_skew, sample_symmetric, CampaignConfig,
};
use nsma_core::comparison::{
    comparison_verdict_with, ClaimsConfig, Conclusion, Grid, Scenario, StauLattice,
};
use nsma_core::compound::check_compound_identities;
use nsma_core::cone::{
    cone_report, grad_f, hess_f, membership, sample_cone, ConeParams, DecomposedR,
};
use nsma_core::forms::{
    bounds_report, concavity_gap, gh_forms, quad_form_direct, spectral_forms, split_form,
};
use nsma_core::matrix::RealMatrix;
use nsma_core::report::{rel_residual, Margin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn conclude(criterion: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "acceptance {criterion} ({name}): {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> RealMatrix {
    RealMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

/// 1. Compound identities at 1e-10 over 500 random pairs per n in 2..=8.
#[test]
fn criterion_1_compound_identities() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0403);
    let mut worst = 0.0f64;
    for n in 2..=8 {
        for _ in 0..500 {
            let m = random_matrix(n, &mut rng);
            let nn = random_matrix(n, &mut rng);
            let report = check_compound_identities(&m, &nn).unwrap();
            worst = worst.max(report.max_residual());
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = worst <= 1e-10 && elapsed < 10.0;
    conclude(
        1,
        "compound identities",
        ok,
        &format!("3500 pairs, worst residual {worst:.3e} (tol 1e-10), {elapsed:.1}s (target < 10s)"),
    );
}

/// 2. Determinant structure over 1e4 members per (n, delta) in
///    {2,3,5} x {0, 0.3, 0.9} with mu = delta: product identity at 1e-10,
///    sandwich margins >= -1e-9, exact n = 2 sum at 1e-12.
#[test]
fn criterion_2_determinant_structure() {
    let started = Instant::now();
    let trials: u64 = 10_000;
    let mut worst_product = 0.0f64;
    let mut worst_margin = f64::INFINITY;
    let mut worst_n2 = 0.0f64;
    for (cfg_idx, &n) in [2usize, 3, 5].iter().enumerate() {
        for (d_idx, &delta) in [0.0f64, 0.3, 0.9].iter().enumerate() {
            let params = ConeParams::new(delta, delta).unwrap();
            let base = 0xDE7u64.wrapping_add(((cfg_idx * 3 + d_idx) as u64) << 40);
            for trial in 0..trials {
                let r = sample_cone(n, &params, base ^ trial).unwrap();

                let det_r = r.matrix().determinant();
                let product = r.omega().det() * r.spectrum().det_product_factor();
                worst_product = worst_product.max(rel_residual(det_r, product));

                let report = cone_report(&r, &params).unwrap();
                worst_margin = worst_margin.min(report.worst_margin());
                // det R >= det omega + det beta >= det omega, det beta >= 0
                let det_beta = report.det_beta;
                let det_omega = report.det_omega;
                worst_margin = worst_margin
                    .min(Margin::leq("sum", det_omega + det_beta, det_r).margin)
                    .min(Margin::leq("beta", 0.0, det_beta).margin);

                if n == 2 {
                    worst_n2 = worst_n2.max(rel_residual(det_r, det_omega + det_beta));
                }
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    let ok = worst_product <= 1e-10 && worst_margin >= -1e-9 && worst_n2 <= 1e-12 && elapsed < 60.0;
    conclude(
        2,
        "determinant structure",
        ok,
        &format!(
            "9x{trials} members: product residual {worst_product:.3e} (tol 1e-10), \
             worst margin {worst_margin:.3e} (>= -1e-9), n=2 sum residual {worst_n2:.3e} \
             (tol 1e-12), {elapsed:.1}s (target < 60s)"
        ),
    );
}

/// 3. Exact derivatives match central finite differences at 1e-6 on
///    100 members per n in 2..=5.
#[test]
fn criterion_3_derivative_exactness() {
    let mut worst_grad = 0.0f64;
    let mut worst_hess = 0.0f64;
    for n in 2..=5usize {
        let params = ConeParams::new(0.5, 0.5).unwrap();
        let base = (0xF0 + n as u64) << 32;
        for trial in 0..100u64 {
            let r = sample_cone(n, &params, base ^ trial).unwrap();
            let h = fd::step(r.matrix());
            let grad_fd = fd::gradient(r.matrix(), h);
            worst_grad =
                worst_grad.max(nsma_core::report::mat_residual(&grad_fd, &grad_f(&r)));
            worst_hess = worst_hess.max(fd::hessian_residual(r.matrix(), h, &hess_f(&r)));
        }
    }
    let ok = worst_grad <= 1e-6 && worst_hess <= 1e-6;
    conclude(
        3,
        "derivative exactness",
        ok,
        &format!(
            "400 members: gradient residual {worst_grad:.3e}, second-derivative residual \
             {worst_hess:.3e} (tol 1e-6)"
        ),
    );
}

fn triple_campaign(mut body: impl FnMut(usize, &ConeParams, &DecomposedR, &RealMatrix, &nsma_core::matrix::SkewMatrix)) {
    let param_sweep = [
        ConeParams::new(0.0, 0.0).unwrap(),
        ConeParams::new(0.3, 0.3).unwrap(),
        ConeParams::new(0.9, 0.9).unwrap(),
    ];
    let scales = [0.1, 1.0, 10.0];
    for n in 2..=5usize {
        let base = 0xF02 + ((n as u64) << 40);
        for trial in 0..1000u64 {
            let params = &param_sweep[(trial % 3) as usize];
            let r = sample_cone(n, params, base ^ trial).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(base ^ trial);
            rng.set_stream(1);
            let scale = scales[(trial as usize / 3) % 3];
            let p = sample_symmetric(n, scale, &mut rng);
            let q = sample_skew(n, scale, &mut rng);
            body(n, params, &r, &p, &q);
        }
    }
}

/// 4. The four representations of the quadratic form agree pairwise at 1e-8
///    on 1e3 triples per n in 2..=5.
#[test]
fn criterion_4_representation_consistency() {
    let mut worst = 0.0f64;
    triple_campaign(|_n, _params, r, p, q| {
        let f_p = quad_form_direct(r, p);
        let f_q = quad_form_direct(r, &q.to_matrix());
        let gh = gh_forms(r, p, q).unwrap();
        let (f_p_spec, f_q_spec) = spectral_forms(r, p, q);
        let split = split_form(r, &(p + q.to_matrix())).unwrap();
        let hess = hess_f(r);
        for residual in [
            rel_residual(gh.f_p, f_p),
            rel_residual(f_p_spec, f_p),
            rel_residual(hess.contract(p, p), f_p),
            rel_residual(gh.f_q, f_q),
            rel_residual(f_q_spec, f_q),
            rel_residual(hess.contract(&q.to_matrix(), &q.to_matrix()), f_q),
            split.split_residual,
        ] {
            worst = worst.max(residual);
        }
    });
    let ok = worst <= 1e-8;
    conclude(
        4,
        "representation consistency",
        ok,
        &format!("4000 triples: worst pairwise residual {worst:.3e} (tol 1e-8)"),
    );
}

/// 5. Upper bounds for the symmetric, skew, mixed and combined forms hold
///    with margins >= -1e-9, eta in {0.1, 0.5, 1.0}.
#[test]
fn criterion_5_form_bounds() {
    let mut worst = f64::INFINITY;
    triple_campaign(|_n, params, r, p, q| {
        for eta in [0.1, 0.5, 1.0] {
            let report = bounds_report(r, p, q, eta, params).unwrap();
            worst = worst.min(report.worst_margin());
        }
    });
    let ok = worst >= -1e-9;
    conclude(
        5,
        "form bounds",
        ok,
        &format!("4000 triples x 3 eta: worst margin {worst:.3e} (>= -1e-9)"),
    );
}

/// 6. First-order Taylor overshoot stays below the closed-form defect
///    2n d^2 (1 + 4 n^2 d^2/(1-d^2)) over 1e4 pairs per configuration, and below
///    1e-9 at delta = 0.
#[test]
fn criterion_6_concavity_defect() {
    let trials: u64 = 10_000;
    let mut ok = true;
    let mut details = Vec::new();
    for (cfg_idx, &n) in [2usize, 3, 5].iter().enumerate() {
        for (d_idx, &delta) in [0.0f64, 0.3, 0.9].iter().enumerate() {
            let params = ConeParams::new(delta, delta).unwrap();
            let base = 0xDC0u64.wrapping_add(((cfg_idx * 3 + d_idx) as u64) << 40);
            let mut max_gap = f64::NEG_INFINITY;
            let mut d_bound = 0.0;
            for trial in 0..trials {
                let r0 = sample_cone(n, &params, base ^ (2 * trial)).unwrap();
                let r1 = sample_cone(n, &params, base ^ (2 * trial + 1)).unwrap();
                let result = concavity_gap(&r0, &r1, &params).unwrap();
                max_gap = max_gap.max(result.gap);
                d_bound = result.d_bound;
                ok &= result.gap <= result.d_bound + 1e-9;
                ok &= result.gap <= result.segment_bound + 1e-9;
            }
            if delta == 0.0 {
                ok &= max_gap <= 1e-9;
            }
            details.push(format!("(n={n}, d={delta}): max gap {max_gap:.3e} <= {d_bound:.3e}"));
        }
    }
    conclude(
        6,
        "concavity defect",
        ok,
        &format!("9x{trials} pairs — {}", details.join("; ")),
    );
}

/// 7. The bundled disk scenario passes hypotheses and linearization claims
///    on a 5x5 (s, tau) lattice over a >= 41x41 grid, with verdict u > v and
///    the inner-normal boundary margin matching its closed form 0.02 at 1e-9.
#[test]
fn criterion_7_comparison_principle() {
    let started = Instant::now();
    let scenario = Scenario::bundled_disk();
    let grid = Grid::build(&scenario.domain, 0.05, 256).unwrap();
    assert!(grid.interior.len() >= 1000);
    let cfg = ClaimsConfig {
        lattice: StauLattice::uniform(5, 5),
        xi_samples: 1000,
        seed: 0x5eed,
    };
    let verdict = comparison_verdict_with(&scenario, &grid, &cfg).unwrap();
    let elapsed = started.elapsed().as_secs_f64();

    let claims = verdict.claims.as_ref().expect("claims evaluated");
    let normal = verdict.boundary_normal_margin.unwrap_or(f64::NAN);
    let ok = verdict.hypotheses.all_pass
        && claims.all_pass(1e-9)
        && verdict.conclusion == Conclusion::UGtV
        && verdict.min_interior_margin > 0.0
        && (normal - 0.02).abs() <= 1e-9
        && elapsed < 10.0;
    conclude(
        7,
        "comparison principle",
        ok,
        &format!(
            "{} interior nodes: hypotheses {}, claims worst margin {:.3e}, verdict {:?}, \
             interior margin {:.3e}, boundary normal {:.9} (expected 0.02), {elapsed:.1}s \
             (target < 10s)",
            grid.interior.len(),
            verdict.hypotheses.all_pass,
            claims.worst_margin(),
            verdict.conclusion,
            verdict.min_interior_margin,
            normal
        ),
    );
}

/// 8. Two runs of the verification campaign with one seed produce identical
///    numerical report content.
#[test]
fn criterion_8_determinism() {
    let cfg = CampaignConfig {
        trials: 100,
        seed: 424242,
        ..CampaignConfig::default()
    };
    let report1 = run_verify(&cfg).unwrap();
    let report2 = run_verify(&cfg).unwrap();
    let identical = report1.deterministic_view() == report2.deterministic_view();
    let ok = identical && report1.passed() && report2.passed();
    conclude(
        8,
        "determinism",
        ok,
        &format!(
            "two runs, seed {}: identical content = {identical}, failures = {}",
            cfg.seed, report1.total_failures
        ),
    );
}

/// Membership margins of sampled members stay consistent (the sampler only
/// produces members).
#[test]
fn sampled_members_always_pass_membership() {
    for n in [2usize, 3, 5] {
        for delta in [0.0, 0.3, 0.9] {
            let params = ConeParams::new(delta, delta).unwrap();
            for seed in 0..200u64 {
                let r = sample_cone(n, &params, 0xAB0 ^ seed).unwrap();
                assert!(membership(&r, &params).member);
            }
        }
    }
}

/// Campaign entry points agree with the CLI exit semantics: zero failures on
/// the default configuration at reduced trial count.
#[test]
fn default_campaign_passes() {
    let cfg = CampaignConfig {
        trials: 50,
        ..CampaignConfig::default()
    };
    let verify = run_verify(&cfg).unwrap();
    assert!(verify.passed(), "failures: {:#?}", verify.failures);
    let gaps = campaign::run_dconcavity(&cfg).unwrap();
    assert!(gaps.passed());
}
