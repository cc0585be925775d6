use super::*;
use crate::matrix::SpdMatrix;
use crate::report::mat_residual;
use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn paraboloid(scale: f64) -> ScalarField {
    ScalarField::quadratic(
        RealMatrix::identity(2, 2) * scale,
        vec![0.0, 0.0],
        0.0,
    )
}

fn simple_scenario(a: MatrixField, b: MatrixField, f: ForcingField) -> Scenario {
    Scenario {
        domain: Domain::Disk {
            center: vec![0.0, 0.0],
            radius: 1.0,
        },
        u: paraboloid(1.0),
        v: paraboloid(1.0),
        a,
        b,
        f,
        delta: 0.2,
        alpha1: 0.0,
        beta1: 0.0,
        sampling: SamplingBox::default(),
    }
}

fn coarse_grid(scenario: &Scenario) -> Grid {
    Grid::build(&scenario.domain, 0.1, 64).unwrap()
}

#[test]
fn omega_field_of_paraboloid_is_identity() {
    let s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    for x in [
        DVector::from_vec(vec![0.0, 0.0]),
        DVector::from_vec(vec![0.3, -0.4]),
        DVector::from_vec(vec![-0.9, 0.1]),
    ] {
        let eval = omega_field(&s, WhichFn::U, &x);
        assert!(mat_residual(&eval.matrix, &RealMatrix::identity(2, 2)) < 1e-14);
        assert_relative_eq!(eval.lambda_min, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn omega_field_with_constant_shift() {
    let c = 0.4;
    let s = simple_scenario(
        MatrixField::Constant {
            matrix: RealMatrix::identity(2, 2) * -c,
        },
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    let x = DVector::from_vec(vec![0.2, 0.5]);
    let eval = omega_field(&s, WhichFn::U, &x);
    assert!(mat_residual(&eval.matrix, &(RealMatrix::identity(2, 2) * (1.0 + c))) < 1e-14);
}

#[test]
fn omega_field_matches_random_quadratic_hessian() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let g = RealMatrix::from_fn(2, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
    let spd = SpdMatrix::new(&g * g.transpose() + RealMatrix::identity(2, 2)).unwrap();
    let mut s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    s.u = ScalarField::quadratic(spd.matrix().clone(), vec![0.1, -0.2], 0.3);
    let x = DVector::from_vec(vec![0.25, -0.6]);
    let eval = omega_field(&s, WhichFn::U, &x);
    assert!(mat_residual(&eval.matrix, spd.matrix()) < 1e-14);
}

#[test]
fn operator_g_trivial_values() {
    let x = DVector::from_vec(vec![0.3, 0.4]);

    let s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    assert_relative_eq!(operator_g(&s, WhichFn::U, &x).unwrap(), 0.0, epsilon = 1e-14);

    let s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Zero,
        ForcingField::ExpZ { rate: 1.0 },
    );
    // G[u] = -u(x) = -|x|^2/2
    assert_relative_eq!(
        operator_g(&s, WhichFn::U, &x).unwrap(),
        -0.125,
        epsilon = 1e-12
    );

    let b = 0.7;
    let s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Constant {
            matrix: RealMatrix::from_row_slice(2, 2, &[0.0, b, -b, 0.0]),
        },
        ForcingField::Constant { value: 1.0 },
    );
    assert_relative_eq!(
        operator_g(&s, WhichFn::U, &x).unwrap(),
        (1.0 + b * b).ln(),
        epsilon = 1e-12
    );
}

#[test]
fn operator_g_matches_plain_symmetric_form_when_b_vanishes() {
    // with B = 0 the operator reduces to log det(D^2 u - A) - log f
    let c = 0.3;
    let s = simple_scenario(
        MatrixField::Constant {
            matrix: RealMatrix::identity(2, 2) * -c,
        },
        MatrixField::Zero,
        ForcingField::ExpZ { rate: 2.0 },
    );
    let x = DVector::from_vec(vec![0.5, -0.1]);
    let expected = ((1.0 + c) * (1.0 + c)).ln() - 2.0 * s.u.value(&x);
    assert_relative_eq!(operator_g(&s, WhichFn::U, &x).unwrap(), expected, epsilon = 1e-12);
}

#[test]
fn operator_g_flags_non_elliptic() {
    let s = simple_scenario(
        MatrixField::Constant {
            matrix: RealMatrix::identity(2, 2) * 2.0,
        },
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    // omega = (1 - 2) I is negative definite
    let x = DVector::from_vec(vec![0.0, 0.0]);
    assert!(matches!(
        operator_g(&s, WhichFn::U, &x),
        Err(crate::Error::NonElliptic(_))
    ));
}

#[test]
fn mu_bounds_constant_field() {
    let b = 0.35;
    let s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Constant {
            matrix: RealMatrix::from_row_slice(2, 2, &[0.0, b, -b, 0.0]),
        },
        ForcingField::Constant { value: 1.0 },
    );
    let mu = mu_bounds(&s);
    assert!(mu.mu_b.exact);
    assert_relative_eq!(mu.mu_b.value, b, epsilon = 1e-12);
    assert!(mu.mu_dzb.exact);
    assert_eq!(mu.mu_dzb.value, 0.0);
}

#[test]
fn hypotheses_pass_on_bundled_scenario() {
    let s = Scenario::bundled_disk();
    let grid = coarse_grid(&s);
    let report = hypotheses_check(&s, &grid);
    assert!(report.all_pass, "{:#?}", report.conditions);
    // the forcing growth condition reads 1 >= 0 here
    assert_relative_eq!(report.conditions[4].lhs, 1.0, epsilon = 1e-14);
    assert_eq!(report.conditions[4].rhs, 0.0);
}

#[test]
fn hypotheses_trivial_when_b_and_delta_vanish() {
    let mut s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    s.delta = 0.0;
    let grid = coarse_grid(&s);
    let report = hypotheses_check(&s, &grid);
    assert!(report.conditions[1].pass);
    assert!(report.conditions[3].pass);
    assert!(report.all_pass);
}

#[test]
fn hypotheses_detect_insufficient_ellipticity() {
    // lambda_min = 0.3 with mu(B) = 0.1 and delta = 0.2: 0.06 < 0.1
    let mut s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Constant {
            matrix: RealMatrix::from_row_slice(2, 2, &[0.0, 0.1, -0.1, 0.0]),
        },
        ForcingField::ExpZ { rate: 1.0 },
    );
    s.u = paraboloid(0.3);
    s.v = paraboloid(0.3);
    let grid = coarse_grid(&s);
    let report = hypotheses_check(&s, &grid);
    assert!(report.conditions[0].pass);
    assert!(!report.conditions[1].pass);
    assert_relative_eq!(report.conditions[1].lhs, 0.06, epsilon = 1e-12);
    assert_relative_eq!(report.conditions[1].rhs, 0.1, epsilon = 1e-12);
    assert!(!report.all_pass);
}

#[test]
fn linearized_coeffs_vanish_for_plain_log_det() {
    let s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    let x = DVector::from_vec(vec![0.1, 0.2]);
    let coeffs = linearized_coeffs(&s, &x, LinearizationPoint::new(0.3, 0.7).unwrap()).unwrap();
    assert_eq!(coeffs.b.norm(), 0.0);
    assert_eq!(coeffs.c, 0.0);
    assert!(mat_residual(&coeffs.a, &RealMatrix::identity(2, 2)) < 1e-12);
}

#[test]
fn linearized_coeffs_s_independent_when_u_equals_v() {
    let s = Scenario::bundled_disk_identical();
    let x = DVector::from_vec(vec![0.4, -0.3]);
    let c1 = linearized_coeffs(&s, &x, LinearizationPoint::new(0.0, 0.5).unwrap()).unwrap();
    let c2 = linearized_coeffs(&s, &x, LinearizationPoint::new(1.0, 0.5).unwrap()).unwrap();
    assert!(mat_residual(&c1.a, &c2.a) < 1e-14);
    // a is the symmetric part of (omega - B)^{-1} and must be symmetric
    assert!(mat_residual(&c1.a, &c1.a.transpose()) < 1e-15);
}

#[test]
fn linearization_point_domain() {
    assert!(LinearizationPoint::new(0.0, 1.0).is_ok());
    assert!(LinearizationPoint::new(-0.1, 0.5).is_err());
    assert!(LinearizationPoint::new(0.5, 1.1).is_err());
}

#[test]
fn mean_value_residual_shrinks_under_refinement() {
    let s = Scenario::bundled_disk();
    let x = DVector::from_vec(vec![0.3, 0.2]);
    let coarse = mean_value_residual(&s, &x, &StauLattice::uniform(5, 5)).unwrap();
    let fine = mean_value_residual(&s, &x, &StauLattice::uniform(41, 41)).unwrap();
    assert!(fine <= coarse + 1e-15, "coarse {coarse:e}, fine {fine:e}");
    assert!(fine < 1e-4, "fine-lattice residual {fine:e}");
}

#[test]
fn claims_on_bundled_scenario() {
    let s = Scenario::bundled_disk();
    let grid = coarse_grid(&s);
    let cfg = ClaimsConfig {
        xi_samples: 200,
        ..ClaimsConfig::default()
    };
    let report = claims_check(&s, &grid, &cfg).unwrap();
    // c = -D_z f / f = -1 at every lattice point
    assert_relative_eq!(report.c_max, -1.0, epsilon = 1e-12);
    assert!(report.coeffs_bounded);
    assert!(report.all_pass(1e-9), "worst {:.3e}", report.worst_margin());
    // skew budget is zero when beta1 = 0, and the term itself vanishes
    assert_eq!(report.zero_order_skew_part.rhs, 0.0);
    assert!(report.dzb_term_max.abs() < 1e-12);
}

#[test]
fn claims_hold_on_random_quadratic_scenarios() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1A1);
    for _ in 0..5 {
        let mut random_spd = || {
            let g = RealMatrix::from_fn(2, 2, |_, _| rng.sample::<f64, _>(StandardNormal));
            &g * g.transpose() + RealMatrix::identity(2, 2)
        };
        let q_u = random_spd();
        let q_v = random_spd();
        let s = Scenario {
            domain: Domain::Disk {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            u: ScalarField::quadratic(q_u, vec![0.2, -0.1], 0.0),
            v: ScalarField::quadratic(q_v, vec![-0.3, 0.4], 0.1),
            a: MatrixField::Zero,
            b: MatrixField::Constant {
                matrix: RealMatrix::from_row_slice(2, 2, &[0.0, 0.1, -0.1, 0.0]),
            },
            f: ForcingField::ExpZ { rate: 1.0 },
            delta: 0.3,
            alpha1: 0.0,
            beta1: 0.0,
            sampling: SamplingBox::default(),
        };
        s.validate().unwrap();
        let grid = Grid::build(&s.domain, 0.2, 32).unwrap();
        let hypotheses = hypotheses_check(&s, &grid);
        assert!(hypotheses.all_pass, "{:#?}", hypotheses.conditions);
        let cfg = ClaimsConfig {
            xi_samples: 100,
            ..ClaimsConfig::default()
        };
        let claims = claims_check(&s, &grid, &cfg).unwrap();
        assert!(
            claims.all_pass(1e-9),
            "worst margin {:.3e}",
            claims.worst_margin()
        );
    }
}

#[test]
fn verdict_identical_functions() {
    let s = Scenario::bundled_disk_identical();
    let grid = coarse_grid(&s);
    let verdict = comparison_verdict(&s, &grid).unwrap();
    assert_eq!(verdict.conclusion, Conclusion::UIdenticalV);
    assert!(verdict.max_abs_diff < 1e-12);
    assert!(verdict.boundary_normal_margin.is_none());
}

#[test]
fn verdict_bundled_scenario_orders_u_above_v() {
    let s = Scenario::bundled_disk();
    let grid = coarse_grid(&s);
    let verdict = comparison_verdict(&s, &grid).unwrap();
    assert!(verdict.preconditions.g_ordered);
    assert!(verdict.preconditions.boundary_ordered);
    assert!(verdict.hypotheses.all_pass);
    assert_eq!(verdict.conclusion, Conclusion::UGtV);
    assert!(verdict.min_interior_margin > 0.0);
    let normal = verdict.boundary_normal_margin.expect("strict case applies");
    assert_relative_eq!(normal, 0.02, epsilon = 1e-9);
}

#[test]
fn verdict_handles_total_ellipticity_failure() {
    // concave u: omega = -I everywhere, so the operator is nowhere defined
    let mut s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Zero,
        ForcingField::Constant { value: 1.0 },
    );
    s.u = paraboloid(-1.0);
    s.v = paraboloid(-1.0);
    let grid = coarse_grid(&s);
    let verdict = comparison_verdict(&s, &grid).unwrap();
    assert!(!verdict.hypotheses.conditions[0].pass);
    assert!(verdict.preconditions.min_g_gap.is_none());
    assert!(verdict.claims.is_none());
    assert_eq!(verdict.conclusion, Conclusion::Violated);
}

#[test]
fn claims_with_nonzero_growth_budgets() {
    // z-dependent A and B exercise the alpha1/beta1 budgets of the
    // zero-order coefficient
    let j = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let s = Scenario {
        domain: Domain::Disk {
            center: vec![0.0, 0.0],
            radius: 1.0,
        },
        u: paraboloid(1.0),
        v: paraboloid(1.0),
        a: MatrixField::ZProfile {
            profile: Profile::Linear {
                intercept: 0.0,
                slope: -0.2,
            },
            matrix: RealMatrix::identity(2, 2),
        },
        b: MatrixField::ZProfile {
            profile: Profile::Linear {
                intercept: 0.0,
                slope: 0.1,
            },
            matrix: j,
        },
        f: ForcingField::ExpZ { rate: 0.7 },
        delta: 0.4,
        alpha1: 0.25,
        beta1: 0.15,
        sampling: SamplingBox::default(),
    };
    s.validate().unwrap();
    let grid = coarse_grid(&s);
    let hypotheses = hypotheses_check(&s, &grid);
    assert!(hypotheses.all_pass, "{:#?}", hypotheses.conditions);
    // mu(B) has no closed form for an affine profile; the report says so
    assert!(!hypotheses.mu_b.exact);
    assert!(hypotheses.mu_dzb.exact);

    let cfg = ClaimsConfig {
        xi_samples: 100,
        ..ClaimsConfig::default()
    };
    let claims = claims_check(&s, &grid, &cfg).unwrap();
    assert!(claims.all_pass(1e-9), "worst {:.3e}", claims.worst_margin());
    // both zero-order parts are active and within their budgets
    assert!(claims.dza_term_max > 0.0);
    assert!(claims.dzb_term_max > 0.0);
    assert!(claims.zero_order_sym_part.rhs > 0.0);
    assert!(claims.zero_order_skew_part.rhs > 0.0);
    assert!(claims.c_max < 0.0);
}

#[test]
fn verdict_on_three_dimensional_box() {
    let eps = 0.05;
    let b = RealMatrix::from_row_slice(
        3,
        3,
        &[0.0, 0.1, 0.0, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0],
    );
    let s = Scenario {
        domain: Domain::Box {
            min: vec![0.0, 0.0, 0.0],
            max: vec![1.0, 1.0, 1.0],
        },
        u: ScalarField::quadratic(RealMatrix::identity(3, 3), vec![0.0; 3], 0.0),
        v: ScalarField::quadratic(RealMatrix::identity(3, 3), vec![0.0; 3], -eps),
        a: MatrixField::Zero,
        b: MatrixField::Constant { matrix: b },
        f: ForcingField::ExpZ { rate: 1.0 },
        delta: 0.2,
        alpha1: 0.0,
        beta1: 0.0,
        sampling: SamplingBox::default(),
    };
    s.validate().unwrap();
    let grid = Grid::build(&s.domain, 0.25, 0).unwrap();
    assert_eq!(grid.interior.len(), 27);
    let cfg = ClaimsConfig {
        xi_samples: 50,
        ..ClaimsConfig::default()
    };
    let verdict = comparison_verdict_with(&s, &grid, &cfg).unwrap();
    assert!(verdict.hypotheses.all_pass);
    // u - v = eps everywhere: ordered on the boundary but not equal there,
    // so the strict boundary case does not apply
    assert_eq!(verdict.conclusion, Conclusion::UGtV);
    assert!((verdict.min_interior_margin - eps).abs() < 1e-12);
    assert!(verdict.boundary_normal_margin.is_none());
}

#[test]
fn verdict_violated_when_hypotheses_fail() {
    let mut s = simple_scenario(
        MatrixField::Zero,
        MatrixField::Constant {
            matrix: RealMatrix::from_row_slice(2, 2, &[0.0, 0.1, -0.1, 0.0]),
        },
        ForcingField::ExpZ { rate: 1.0 },
    );
    s.u = paraboloid(0.3);
    s.v = paraboloid(0.3);
    let grid = coarse_grid(&s);
    let verdict = comparison_verdict(&s, &grid).unwrap();
    assert!(!verdict.hypotheses.all_pass);
    assert_eq!(verdict.conclusion, Conclusion::Violated);
}
