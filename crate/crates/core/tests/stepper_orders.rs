mod common;

use common::{dense, lcg_vec, max_abs_diff, orders};
use nalgebra::{DMatrix, DVector};
use ppide_core::model::compensator;
use ppide_core::operators::{build_a_operator, build_basic_operator, OperatorSpec};
use ppide_core::pp_stepper::{
    cn_step, cn_step_compensated, pade12_step, pade22_step, DeltaWeight, PadeOrder, PpStepper, SchemeConfig,
};
use ppide_core::stability::{iteration_matrix, measure_spectral_radius};
use ppide_core::{BandedMatrix, JumpSide};
use proptest::prelude::*;

const THETAS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
const HORIZON: f64 = 0.1;

/// n = 8, p = 0 operator with ‖θ𝔹‖ large enough for the Padé errors to
/// stay well above rounding at θ = 2.5e-3.
fn order_operator() -> BandedMatrix {
    build_a_operator(&OperatorSpec {
        side: JumpSide::Positive,
        p: 0,
        nu: 0.5,
        lambda: 0.2,
        n: 8,
        h: 1.0,
    })
    .unwrap()
}

const SQRT_V: f64 = 20.0;

fn initial(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 + (i as f64 * 0.9).sin()).collect()
}

/// exp(T·(β𝒜⁻¹ - γI))·c0 computed densely.
fn dense_reference(a: &BandedMatrix, beta: f64, gamma: f64, c0: &[f64]) -> Vec<f64> {
    let n = a.n();
    let inv = dense(a).try_inverse().unwrap();
    let b = inv * beta - DMatrix::identity(n, n) * gamma;
    let e = (b * HORIZON).exp();
    (e * DVector::from_column_slice(c0)).iter().copied().collect()
}

fn measured_orders(stepper: impl Fn(f64) -> PpStepper, reference: &[f64], c0: &[f64]) -> Vec<f64> {
    let errs: Vec<f64> = THETAS
        .iter()
        .map(|&th| {
            let steps = (HORIZON / th).round() as usize;
            let c = stepper(th).march(c0, steps).unwrap();
            max_abs_diff(&c, reference)
        })
        .collect();
    orders(&errs)
}

#[test]
fn pade_orders_against_dense_exponential() {
    let a = order_operator();
    let c0 = initial(8);
    let reference = dense_reference(&a, SQRT_V * 0.5, 0.0, &c0);
    for (pade, nominal) in [(PadeOrder::Cn11, 2.0), (PadeOrder::Pade12, 3.0), (PadeOrder::Pade22, 4.0)] {
        let ord = measured_orders(|th| PpStepper::new(&a, &SchemeConfig::new(pade, th, SQRT_V), 0.0).unwrap(), &reference, &c0);
        for o in ord {
            assert!((o - nominal).abs() <= 0.3, "{}: order {o}", pade.name());
        }
    }
}

#[test]
fn compensated_cn_order() {
    let a = order_operator();
    let c0 = initial(8);
    let comp = compensator(0.2, 0.5, -1.0).unwrap() * 20.0;
    let reference = dense_reference(&a, 0.5, comp, &c0);
    let cfg = |th| SchemeConfig::new(PadeOrder::Cn11, th, 1.0).compensated();
    let ord = measured_orders(|th| PpStepper::new(&a, &cfg(th), comp).unwrap(), &reference, &c0);
    for o in ord {
        assert!((o - 2.0).abs() <= 0.3, "order {o}");
    }
}

#[test]
fn basic_model_order() {
    let (alpha, lambda, h, n) = (1.0, 20.0, 0.5, 8);
    let a = build_basic_operator(alpha, n, h).unwrap();
    let c0 = initial(n);
    let reference = dense_reference(&a, lambda * alpha * alpha, -lambda, &c0);
    let ord = measured_orders(|th| PpStepper::basic_model(alpha, lambda, th, n, h).unwrap(), &reference, &c0);
    for o in ord {
        assert!((o - 2.0).abs() <= 0.3, "order {o}");
    }
}

#[test]
fn pade22_composed_with_reverse_step() {
    let a = order_operator();
    let c0 = initial(8);
    let fwd = pade22_step(&a, &SchemeConfig::new(PadeOrder::Pade22, 0.01, SQRT_V), &c0).unwrap();
    let (beta, _) = SchemeConfig::new(PadeOrder::Pade22, 0.01, SQRT_V).generator(0.0);
    let rev = PpStepper::from_generator(&a, beta, 0.0, -0.01, PadeOrder::Pade22).unwrap();
    let round = rev.step(&fwd).unwrap();
    assert!(max_abs_diff(&round, &c0) < 1e-8);
}

#[test]
fn single_steps_agree_with_stepper() {
    let a = order_operator();
    let c0 = initial(8);
    let cfg = SchemeConfig::new(PadeOrder::Cn11, 0.01, SQRT_V);
    assert_eq!(cn_step(&a, &cfg, &c0).unwrap(), PpStepper::new(&a, &cfg, 0.0).unwrap().step(&c0).unwrap());
    let c12 = SchemeConfig { pade: PadeOrder::Pade12, ..cfg };
    assert_eq!(pade12_step(&a, &c12, &c0).unwrap(), PpStepper::new(&a, &c12, 0.0).unwrap().step(&c0).unwrap());
    let comp = cfg.compensated();
    assert_eq!(
        cn_step_compensated(&a, &comp, &c0, 0.3).unwrap(),
        PpStepper::new(&a, &comp, 0.3).unwrap().step(&c0).unwrap()
    );
}

#[test]
fn compensated_cn_norm_below_one() {
    let (nu, lambda, h, theta) = (1.0, 0.2, 0.1, 0.01);
    let a = build_a_operator(&OperatorSpec {
        side: JumpSide::Positive,
        p: 0,
        nu,
        lambda,
        n: 32,
        h,
    })
    .unwrap();
    let comp = compensator(lambda, nu, -1.0).unwrap();
    for weight in [DeltaWeight::Half, DeltaWeight::Full] {
        let cfg = SchemeConfig::new(PadeOrder::Cn11, theta, 1.0).compensated().with_weight(weight);
        let s = PpStepper::new(&a, &cfg, comp).unwrap();
        let m = iteration_matrix(s.lhs(), s.rhs()).unwrap();
        let two_norm = m.singular_values().max();
        assert!(two_norm < 1.0, "{weight:?}: {two_norm}");
        let rho = measure_spectral_radius(s.lhs(), s.rhs()).unwrap().radius.unwrap();
        assert!(rho < 1.0);
    }
}

#[test]
fn radius_at_most_one_across_sweep() {
    for side in [JumpSide::Positive, JumpSide::Negative] {
        for p in 0..3u32 {
            let alpha = -1.0 - p as f64;
            let comp = compensator(0.2, 1.0, alpha).unwrap();
            for h in [0.05, 0.1, 0.2] {
                let a = build_a_operator(&OperatorSpec {
                    side,
                    p,
                    nu: 1.0,
                    lambda: 0.2,
                    n: 48,
                    h,
                })
                .unwrap();
                for theta in [1e-3, 1e-2, 1e-1] {
                    for pade in [PadeOrder::Cn11, PadeOrder::Pade12, PadeOrder::Pade22] {
                        let cfg = SchemeConfig::new(pade, theta, 1.0).compensated().with_weight(DeltaWeight::Full);
                        let s = PpStepper::new(&a, &cfg, comp).unwrap();
                        let r = measure_spectral_radius(s.lhs(), s.rhs()).unwrap().radius.unwrap();
                        assert!(r <= 1.0 + 1e-12, "{side:?} p={p} h={h} θ={theta} {}: {r}", pade.name());
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn steps_are_linear(seed in 0u64..5000, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let a = order_operator();
        let u = lcg_vec(seed, 8);
        let v = lcg_vec(seed + 7, 8);
        let mix: Vec<f64> = u.iter().zip(&v).map(|(p, q)| x * p + y * q).collect();
        for pade in [PadeOrder::Cn11, PadeOrder::Pade12, PadeOrder::Pade22] {
            let s = PpStepper::new(&a, &SchemeConfig::new(pade, 0.01, SQRT_V), 0.0).unwrap();
            let lhs = s.step(&mix).unwrap();
            let su = s.step(&u).unwrap();
            let sv = s.step(&v).unwrap();
            for i in 0..8 {
                prop_assert!((lhs[i] - (x * su[i] + y * sv[i])).abs() < 1e-12 * (1.0 + lhs[i].abs()));
            }
        }
    }
}
