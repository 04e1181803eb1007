//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use ppide_core::BandedMatrix;

/// Adaptive Simpson quadrature on [a, b].
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let floor = 256.0 * f64::EPSILON * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) || b - a < 1e-9 {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb) = (f(a), f(b));
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// ∫₀^∞ g(y) e^{-νy} y^{-(1+α)} dy for α < 0 with smooth g, via y = t²
/// (which removes the endpoint singularity for α > -1) and a finite cutoff.
pub fn tempered_moment(g: &dyn Fn(f64) -> f64, nu: f64, alpha: f64, tol: f64) -> f64 {
    let t_max = (60.0 / nu).sqrt();
    let f = |t: f64| {
        if t == 0.0 {
            return if alpha == -0.5 { 2.0 * g(0.0) } else { 0.0 };
        }
        let y = t * t;
        2.0 * t * g(y) * (-nu * y).exp() * y.powf(-(1.0 + alpha))
    };
    // split so that each piece is resolved
    let cuts = [0.0, 0.25 * t_max, 0.5 * t_max, t_max];
    cuts.windows(2).map(|w| adaptive_simpson(&f, w[0], w[1], tol)).sum()
}

/// Black-Scholes put/call by quadrature of the discounted payoff against
/// the Gaussian density.
pub fn bs_quadrature(call: bool, spot: f64, strike: f64, rate: f64, vol: f64, t: f64) -> f64 {
    let sd = vol * t.sqrt();
    let mu = (rate - 0.5 * vol * vol) * t;
    let z_star = ((strike / spot).ln() - mu) / sd;
    let pdf = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let payoff = |z: f64| {
        let s = spot * (mu + sd * z).exp();
        if call {
            (s - strike).max(0.0)
        } else {
            (strike - s).max(0.0)
        }
    };
    let f = |z: f64| payoff(z) * pdf(z);
    let lo = -14.0f64;
    let hi = 14.0f64;
    let k = z_star.clamp(lo, hi);
    let tol = 1e-13;
    (-rate * t).exp() * (adaptive_simpson(&f, lo, k, tol) + adaptive_simpson(&f, k, hi, tol))
}

pub fn dense(b: &BandedMatrix) -> DMatrix<f64> {
    let n = b.n();
    DMatrix::from_fn(n, n, |i, j| b.get(i, j))
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// log2 of successive error ratios.
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Deterministic pseudo-random numbers in [-1, 1).
pub fn lcg_vec(seed: u64, n: usize) -> Vec<f64> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}
