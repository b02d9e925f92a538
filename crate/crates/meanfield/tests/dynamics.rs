use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use spinlab_meanfield::*;

fn symmetric(s: f64, gamma: f64, h: f64) -> MfParams {
    MfParams { s, g: 1.0, h, gamma_g: gamma, gamma_l: gamma }
}

fn order_parameter(s: f64, gamma: f64, h: f64, t_max: f64) -> f64 {
    let init = MfState::tilted(s, 0.3, PI - 0.3);
    let tr = integrate_mf(init, &symmetric(s, gamma, h), t_max, MfOptions::default()).unwrap();
    tr.last().transverse().0 / s
}

#[test]
fn uncoupled_pumps_have_polarized_fixed_points() {
    let p = MfParams { s: 4.0, g: 0.0, h: 0.0, gamma_g: 0.8, gamma_l: 0.3 };
    let rhs = mf_rhs(&MfState([0.0, 0.0, 4.0, 0.0, 0.0, 1.0]), &p);
    assert!(rhs.0[2].abs() < 1e-14);
    assert!(rhs.0[5] < 0.0, "loss must lower S_b^z");
    let rhs = mf_rhs(&MfState([0.0, 0.0, 1.0, 0.0, 0.0, -4.0]), &p);
    assert!(rhs.0[5].abs() < 1e-14);
    assert!(rhs.0[2] > 0.0, "gain must raise S_a^z");
}

#[test]
fn order_parameter_below_threshold() {
    // Gbar = 0.5 g, h = 0.5 g: sqrt(0.5 / 1.5) = 0.5774.
    let delta = order_parameter(100.0, 0.5, 0.5, 20_000.0);
    assert!((delta - (0.5f64 / 1.5).sqrt()).abs() < 0.006, "{delta}");
}

#[test]
fn order_parameter_vanishes_above_threshold() {
    assert!(order_parameter(100.0, 2.0, 0.5, 20_000.0) < 1e-6);
}

#[test]
fn transition_sharpens_with_spin() {
    let small = order_parameter(5.0, 1.4, 0.5, 3_000.0);
    let large = order_parameter(50.0, 1.4, 0.5, 20_000.0);
    assert!(small < 1e-6, "{small}");
    assert!((large - (1.4f64 / 1.5).sqrt()).abs() < 0.01, "{large}");
}

#[test]
fn weak_unequal_pumping_leaves_a_spin_on_a_limit_cycle() {
    let p = MfParams { s: 10.0, g: 1.0, h: 0.0, gamma_g: 0.2, gamma_l: 0.1 };
    let tr = integrate_mf(MfState::tilted(10.0, 0.3, PI - 0.3), &p, 3_000.0, MfOptions::default()).unwrap();
    assert_eq!(tr.kind_b, SteadyKind::LimitCycle);
    assert!(tr.period_b.unwrap() > 0.0);
    // The weaker-pumped spin averages to zero magnetization while the
    // stronger one keeps a finite polarization.
    assert!(tr.tail_mean.0[5].abs() / 10.0 < 0.05, "{:?}", tr.tail_mean);
    assert!(tr.tail_mean.0[2] / 10.0 > 0.5, "{:?}", tr.tail_mean);
}

#[test]
fn invalid_inputs_are_rejected() {
    let p = symmetric(0.0, 1.0, 0.5);
    assert!(integrate_mf(MfState([0.0; 6]), &p, 1.0, MfOptions::default()).is_err());
    let p = symmetric(2.0, 1.0, 0.5);
    assert!(integrate_mf(MfState([0.0; 6]), &p, 0.0, MfOptions::default()).is_err());
}

proptest! {
    #[test]
    fn staggered_poles_are_fixed_for_all_couplings(g in 0.0f64..3.0, h in 0.0f64..3.0, gg in 0.0f64..3.0, gl in 0.0f64..3.0, s in 0.5f64..50.0) {
        let p = MfParams { s, g, h, gamma_g: gg, gamma_l: gl };
        let rhs = mf_rhs(&MfState([0.0, 0.0, s, 0.0, 0.0, -s]), &p);
        prop_assert!(rhs.0.iter().all(|v| v.abs() < 1e-10 * (1.0 + s)));
    }

    #[test]
    fn jacobian_matches_finite_differences(
        x in proptest::array::uniform6(-3.0f64..3.0),
        g in 0.1f64..2.0, h in 0.0f64..2.0, gg in 0.0f64..2.0, gl in 0.0f64..2.0,
    ) {
        let p = MfParams { s: 3.0, g, h, gamma_g: gg, gamma_l: gl };
        let st = MfState(x);
        let jac = jacobian(&st, &p);
        let scale = jac.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        for j in 0..6 {
            let eps = 1e-6;
            let (mut up, mut dn) = (st, st);
            up.0[j] += eps;
            dn.0[j] -= eps;
            let (fu, fd) = (mf_rhs(&up, &p), mf_rhs(&dn, &p));
            for i in 0..6 {
                let fd_ij = (fu.0[i] - fd.0[i]) / (2.0 * eps);
                prop_assert!((fd_ij - jac[i][j]).abs() < 1e-6 * scale, "({i},{j}): {fd_ij} vs {}", jac[i][j]);
            }
        }
    }
}

#[test]
fn cluster_of_one_retains_transverse_order() {
    let report = cmf_solve(&CmfSpec::transformed(1, 1.5, 1.0, 1.0), Bias::Tilt { theta: FRAC_PI_2, phi: 0.0 }).unwrap();
    assert!(report.s_perp > 0.1 * 1.5, "{report:?}");
}

#[test]
fn unbiased_clusters_stay_symmetric() {
    for n_c in [1, 2] {
        let report = cmf_solve(&CmfSpec::transformed(n_c, 1.5, 1.0, 1.0), Bias::None).unwrap();
        assert!(report.s_perp_sites.iter().all(|&v| v == 0.0), "{report:?}");
        assert!(report.final_moments.iter().all(|m| m[0] == 0.0 && m[1] == 0.0));
    }
}

#[test]
fn transformed_pair_equals_one_untransformed_cell() {
    let (s, g, gamma) = (1.5, 1.0, 0.8);
    let (theta, phi) = (1.2, 0.4);
    let t = cmf_solve(&CmfSpec::transformed(2, s, g, gamma), Bias::Tilt { theta, phi }).unwrap();
    // The rotation by pi about x on gain sites maps (theta, phi) to (pi - theta, -phi).
    let bias = Bias::Staggered { a: (PI - theta, -phi), b: (theta, phi) };
    let u = cmf_solve(&CmfSpec::untransformed(1, s, g, g, gamma, gamma), bias).unwrap();
    let (mt, mu) = (&t.final_moments, &u.final_moments);
    let tol = 1e-8;
    assert!((mt[0][0] - mu[0][0]).abs() < tol && (mt[0][1] + mu[0][1]).abs() < tol && (mt[0][2] + mu[0][2]).abs() < tol, "{mt:?} {mu:?}");
    for k in 0..3 {
        assert!((mt[1][k] - mu[1][k]).abs() < tol, "{mt:?} {mu:?}");
    }
    assert!((t.s_perp_sites[0] - u.s_perp_sites[0]).abs() < tol);
}

#[test]
fn cmf_spec_validation() {
    let mut spec = CmfSpec::transformed(2, 1.5, 1.0, 1.0);
    spec.h = 0.5;
    assert!(cmf_solve(&spec, Bias::None).is_err());
    let big = CmfSpec::transformed(8, 4.0, 1.0, 1.0);
    assert!(matches!(cmf_solve(&big, Bias::None), Err(MeanFieldError::InvalidArgument(_))));
}

#[test]
fn cmf_reports_unconverged_runs() {
    let mut spec = CmfSpec::transformed(1, 1.5, 1.0, 1.0);
    spec.window = 0.1;
    spec.tol = 1e-14;
    spec.max_windows = 3;
    let err = cmf_solve(&spec, Bias::Tilt { theta: FRAC_PI_2, phi: 0.0 }).unwrap_err();
    assert!(matches!(err, MeanFieldError::NotConverged { windows: 3, .. }), "{err}");
}
