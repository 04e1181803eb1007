//! Gamma function and the standard normal CDF.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) by the Lanczos approximation (g = 7, nine terms), with the reflection
/// formula for x < 1/2. Returns `NaN` at the poles 0, -1, -2, ...
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    // Γ(n) for small integers is exact in f64; keep it so.
    if x == x.floor() && x <= 21.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Standard normal cumulative distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_matches_factorials() {
        let mut fact = 1.0;
        for n in 1..=20u32 {
            assert_eq!(gamma(n as f64), fact, "Γ({n})");
            fact *= n as f64;
        }
    }

    #[test]
    fn gamma_half_integers() {
        let sqrt_pi = PI.sqrt();
        assert!((gamma(0.5) - sqrt_pi).abs() < 1e-14);
        assert!((gamma(1.5) - 0.5 * sqrt_pi).abs() < 1e-14);
        assert!((gamma(2.5) - 0.75 * sqrt_pi).abs() < 1e-14);
        assert!((gamma(-0.5) + 2.0 * sqrt_pi).abs() < 1e-13);
    }

    #[test]
    fn gamma_poles_are_nan() {
        assert!(gamma(0.0).is_nan());
        assert!(gamma(-3.0).is_nan());
    }

    #[test]
    fn gamma_agrees_with_statrs() {
        for &x in &[0.1, 0.37, 1.3, 2.5, 3.7, 7.25, 12.5, 25.5, -1.5, -2.3] {
            let want = statrs::function::gamma::gamma(x);
            assert!(((gamma(x) - want) / want).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn norm_cdf_symmetry() {
        assert_eq!(norm_cdf(0.0), 0.5);
        for &x in &[0.3, 1.0, 2.5, 6.0] {
            assert!((norm_cdf(x) + norm_cdf(-x) - 1.0).abs() < 1e-15);
        }
    }
}
