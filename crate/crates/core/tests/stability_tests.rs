mod common;

use common::dense;
use ppide_core::model::compensator;
use ppide_core::operators::{build_a_operator, OperatorSpec};
use ppide_core::pp_stepper::{scheme_matrices, PadeOrder};
use ppide_core::stability::{
    iteration_matrix, measure_spectral_radius, pade_stability, vg_stability, zeta_b, RadiusMethod,
};
use ppide_core::JumpSide;

fn dense_radius(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

#[test]
fn zeta_matches_generator_diagonal() {
    for alpha in [-1.0, -2.0, -3.0, -4.0] {
        for h in [0.05, 0.1, 0.2] {
            let (sqrt_v, lambda, nu) = (1.3, 0.2, 1.0);
            let spec = OperatorSpec {
                side: JumpSide::Positive,
                p: (-alpha - 1.0) as u32,
                nu,
                lambda,
                n: 32,
                h,
            };
            let inv = dense(&build_a_operator(&spec).unwrap()).try_inverse().unwrap();
            let b = inv * sqrt_v
                - nalgebra::DMatrix::identity(32, 32) * (sqrt_v * compensator(lambda, nu, alpha).unwrap());
            let z = zeta_b(sqrt_v, lambda, nu, alpha, h, JumpSide::Positive).unwrap();
            for i in 0..32 {
                assert!(((b[(i, i)] - z) / z).abs() < 1e-10, "alpha={alpha} h={h}");
            }
        }
    }
}

#[test]
fn cn_pair_radius_below_one_and_cross_checked() {
    let r = pade_stability(PadeOrder::Cn11, 1.0, 0.2, 1.0, -1.0, 0.1, 0.01, 64).unwrap();
    assert_eq!(r.method, RadiusMethod::DiagonalRatio);
    let measured = r.spectral_radius_measured.unwrap();
    assert!(measured < 1.0);
    let spec = OperatorSpec {
        side: JumpSide::Positive,
        p: 0,
        nu: 1.0,
        lambda: 0.2,
        n: 64,
        h: 0.1,
    };
    let a = build_a_operator(&spec).unwrap();
    let (lhs, rhs) = scheme_matrices(&a, 1.0, compensator(0.2, 1.0, -1.0).unwrap(), 0.01, PadeOrder::Cn11).unwrap();
    let m = iteration_matrix(&lhs, &rhs).unwrap();
    assert!((dense_radius(&m) - measured).abs() < 1e-10);
    // amplification of the analytic eigenvalue
    let z = 0.01 * r.zeta_analytic;
    assert!((measured - ((1.0 + z / 2.0) / (1.0 - z / 2.0)).abs()).abs() < 1e-12);
}

#[test]
fn cn_sweep_is_stable() {
    for alpha in [-1.0, -2.0, -3.0] {
        for h in [0.05, 0.1, 0.2] {
            for theta in [1e-3, 1e-2, 1e-1] {
                let r = pade_stability(PadeOrder::Cn11, 1.0, 0.2, 1.0, alpha, h, theta, 64).unwrap();
                assert!(r.stable, "alpha={alpha} h={h} theta={theta} {:?}", r.spectral_radius_measured);
                assert!(r.zeta_analytic < 0.0);
            }
        }
    }
}

#[test]
fn power_iteration_agrees_with_dense_eigenvalues() {
    // mixed-side pair: upper-triangular lhs against a lower-triangular rhs
    let n = 40;
    let spec = |side| OperatorSpec {
        side,
        p: 0,
        nu: 1.0,
        lambda: 0.2,
        n,
        h: 0.1,
    };
    let lhs = build_a_operator(&spec(JumpSide::Positive)).unwrap();
    let rhs = build_a_operator(&spec(JumpSide::Negative)).unwrap().scaled(0.5);
    let est = measure_spectral_radius(&lhs, &rhs).unwrap();
    assert_ne!(est.method, RadiusMethod::DiagonalRatio);
    let want = dense_radius(&iteration_matrix(&lhs, &rhs).unwrap());
    assert!((est.radius.unwrap() - want).abs() < 1e-8 * want, "{est:?} {want}");
}

#[test]
fn vg_radius_and_admissibility() {
    for side in [JumpSide::Positive, JumpSide::Negative] {
        for nu in [1.0, 1.5, 3.0] {
            for h in [0.05, 0.5, 5.0] {
                for m in [1u32, 2] {
                    let r = vg_stability(side, nu, m, h, 64).unwrap();
                    assert!(r.stable && r.admissible);
                    assert!((r.spectral_radius_measured.unwrap() - r.zeta_analytic).abs() < 1e-14);
                }
            }
        }
        let exact = vg_stability(side, 1.0, 1, 0.1, 64).unwrap();
        assert_eq!(exact.spectral_radius_measured, Some(1.0 / 16.0));
        // ν = 0.5: the bound is h < 3
        for (h, ok) in [(0.1, true), (2.9, true), (3.0, false), (3.1, false), (10.0, false)] {
            let r = vg_stability(side, 0.5, 1, h, 64).unwrap();
            assert_eq!(r.admissible, ok, "h={h}");
            assert!(r.condition.starts_with("nu<1"));
        }
    }
}

#[test]
fn all_pade_orders_report_norms() {
    for pade in [PadeOrder::Cn11, PadeOrder::Pade12, PadeOrder::Pade22] {
        let r = pade_stability(pade, 1.0, 0.2, 1.0, -2.0, 0.1, 0.01, 48).unwrap();
        assert!(r.stable);
        assert!(r.norm_inf.unwrap() >= r.spectral_radius_measured.unwrap() - 1e-12);
    }
}
