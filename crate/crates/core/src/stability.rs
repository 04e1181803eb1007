//! Eigenvalue formulas and numerical stability measurements for the
//! iteration matrices lhs⁻¹·rhs of the banded schemes.

use nalgebra::DMatrix;

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::model::{compensator, JumpSide};
use crate::operators::{build_a_operator, build_vg_factor, OperatorSpec};
use crate::pp_stepper::{scheme_matrices, PadeOrder};
use crate::special::gamma;
use crate::vg_stepper::{vg_admissible, vg_h_limit};

/// Radius tolerance for calling a scheme stable.
pub const RADIUS_TOL: f64 = 1e-12;

/// Diagonal-to-jump-term ratio above which the conditioning warning fires.
pub const CONDITIONING_LIMIT: f64 = 1e8;

/// √V λ Γ(-α) ([ν + 3/(2h)]^α - ν^α), the eigenvalue of the compensated
/// generator on either side.
pub fn zeta_b(sqrt_v: f64, lambda: f64, nu: f64, alpha: f64, h: f64, _side: JumpSide) -> Result<f64> {
    if !(alpha < 0.0) {
        return Err(Error::domain(format!("zeta_B needs alpha < 0, got {alpha}")));
    }
    if !(nu > 0.0 && h > 0.0) {
        return Err(Error::domain("zeta_B needs nu > 0 and h > 0"));
    }
    Ok(sqrt_v * lambda * gamma(-alpha) * ((nu + 1.5 / h).powf(alpha) - nu.powf(alpha)))
}

/// (1 + 3/(2hν))^{-m}, the eigenvalue of one α = 0 step.
pub fn vg_eigenvalue(nu: f64, h: f64, m: f64) -> f64 {
    (1.0 + 1.5 / (h * nu)).powf(-m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMethod {
    /// Both matrices triangular on the same side: eigenvalues are the
    /// ratios of diagonals.
    DiagonalRatio,
    PowerIteration,
    DenseEigen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusEstimate {
    /// `None` when power iteration did not converge and the matrix is too
    /// large for the dense fallback.
    pub radius: Option<f64>,
    pub method: RadiusMethod,
    /// max |r_ii / l_ii|, exact for triangular pairs.
    pub diagonal_ratio: Option<f64>,
}

const DENSE_LIMIT: usize = 256;
const POWER_CAP: usize = 20_000;

fn same_side_triangular(l: &BandedMatrix, r: &BandedMatrix) -> bool {
    (l.is_upper_triangular() && r.is_upper_triangular()) || (l.is_lower_triangular() && r.is_lower_triangular())
}

/// Spectral radius of lhs⁻¹·rhs.
pub fn measure_spectral_radius(lhs: &BandedMatrix, rhs: &BandedMatrix) -> Result<RadiusEstimate> {
    if lhs.n() != rhs.n() {
        return Err(Error::DimensionMismatch {
            expected: lhs.n(),
            got: rhs.n(),
        });
    }
    let lu = lhs.lu()?;
    if same_side_triangular(lhs, rhs) {
        let ratio = lhs
            .diagonal()
            .iter()
            .zip(rhs.diagonal())
            .fold(0.0f64, |m, (l, r)| m.max((r / l).abs()));
        return Ok(RadiusEstimate {
            radius: Some(ratio),
            method: RadiusMethod::DiagonalRatio,
            diagonal_ratio: Some(ratio),
        });
    }
    let n = lhs.n();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 1.618).sin()).collect();
    normalize(&mut v);
    let mut prev = f64::NAN;
    let mut stable_hits = 0;
    for _ in 0..POWER_CAP {
        let mut w = rhs.matvec(&v)?;
        lu.solve_in_place(&mut w)?;
        let r = normalize(&mut w);
        v = w;
        if r == 0.0 {
            return Ok(RadiusEstimate {
                radius: Some(0.0),
                method: RadiusMethod::PowerIteration,
                diagonal_ratio: None,
            });
        }
        if (r - prev).abs() <= 1e-13 * r {
            stable_hits += 1;
            if stable_hits >= 5 {
                return Ok(RadiusEstimate {
                    radius: Some(r),
                    method: RadiusMethod::PowerIteration,
                    diagonal_ratio: None,
                });
            }
        } else {
            stable_hits = 0;
        }
        prev = r;
    }
    if n <= DENSE_LIMIT {
        let m = iteration_matrix(lhs, rhs)?;
        let radius = m.complex_eigenvalues().iter().fold(0.0f64, |a, z| a.max(z.norm()));
        return Ok(RadiusEstimate {
            radius: Some(radius),
            method: RadiusMethod::DenseEigen,
            diagonal_ratio: None,
        });
    }
    Ok(RadiusEstimate {
        radius: None,
        method: RadiusMethod::PowerIteration,
        diagonal_ratio: None,
    })
}

fn normalize(v: &mut [f64]) -> f64 {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if r > 0.0 {
        v.iter_mut().for_each(|x| *x /= r);
    }
    r
}

/// Dense lhs⁻¹·rhs, built column by column.
pub fn iteration_matrix(lhs: &BandedMatrix, rhs: &BandedMatrix) -> Result<DMatrix<f64>> {
    let n = lhs.n();
    let lu = lhs.lu()?;
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.fill(0.0);
        e[j] = 1.0;
        let mut col = rhs.matvec(&e)?;
        lu.solve_in_place(&mut col)?;
        for (i, v) in col.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// ‖lhs⁻¹·rhs‖∞.
pub fn iteration_norm_inf(lhs: &BandedMatrix, rhs: &BandedMatrix) -> Result<f64> {
    let m = iteration_matrix(lhs, rhs)?;
    Ok(m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max))
}

/// Warning text when the operator diagonal swamps the jump term βθ/2.
pub fn conditioning_warning(a: &BandedMatrix, beta: f64, theta: f64) -> Option<String> {
    let d = a.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let jump = 0.5 * beta.abs() * theta;
    let ratio = if jump > 0.0 { d / jump } else { f64::INFINITY };
    (ratio > CONDITIONING_LIMIT).then(|| {
        format!("operator diagonal {d:.3e} exceeds the jump term {jump:.3e} by {ratio:.1e}; the step is A-stable only")
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub zeta_analytic: f64,
    pub spectral_radius_measured: Option<f64>,
    pub method: RadiusMethod,
    pub norm_inf: Option<f64>,
    pub stable: bool,
    /// Analytic admissibility of the configuration.
    pub admissible: bool,
    pub condition: String,
    pub warning: Option<String>,
}

fn is_stable(r: Option<f64>) -> bool {
    r.is_some_and(|r| r <= 1.0 + RADIUS_TOL)
}

/// Padé step for the compensated generator √V(𝒜⁻¹ - λν^αΓ(-α)) at integer
/// α ≤ -1 on the positive-jump side.
pub fn pade_stability(
    pade: PadeOrder,
    sqrt_v: f64,
    lambda: f64,
    nu: f64,
    alpha: f64,
    h: f64,
    theta: f64,
    n: usize,
) -> Result<StabilityReport> {
    let spec = OperatorSpec {
        side: JumpSide::Positive,
        p: crate::operators::integer_p(alpha)?,
        nu,
        lambda,
        n,
        h,
    };
    let a = build_a_operator(&spec)?;
    let comp = compensator(lambda, nu, alpha)?;
    let (lhs, rhs) = scheme_matrices(&a, sqrt_v, sqrt_v * comp, theta, pade)?;
    let est = measure_spectral_radius(&lhs, &rhs)?;
    let norm_inf = if n <= DENSE_LIMIT {
        Some(iteration_norm_inf(&lhs, &rhs)?)
    } else {
        None
    };
    Ok(StabilityReport {
        zeta_analytic: zeta_b(sqrt_v, lambda, nu, alpha, h, JumpSide::Positive)?,
        spectral_radius_measured: est.radius,
        method: est.method,
        norm_inf,
        stable: is_stable(est.radius),
        admissible: true,
        condition: "integer alpha<=-1 unconditional".into(),
        warning: conditioning_warning(&a, sqrt_v, theta),
    })
}

/// Step matrices (I ∓ D1/ν)^m and I of the α = 0 scheme at integer m.
pub fn vg_pair(side: JumpSide, nu: f64, m: u32, n: usize, h: f64) -> Result<(BandedMatrix, BandedMatrix)> {
    Ok((build_vg_factor(side, nu, n, h)?.pow(m), BandedMatrix::identity(n)))
}

pub fn vg_stability(side: JumpSide, nu: f64, m: u32, h: f64, n: usize) -> Result<StabilityReport> {
    let (lhs, rhs) = vg_pair(side, nu, m, n, h)?;
    let est = measure_spectral_radius(&lhs, &rhs)?;
    let norm_inf = if n <= DENSE_LIMIT {
        Some(iteration_norm_inf(&lhs, &rhs)?)
    } else {
        None
    };
    let admissible = vg_admissible(nu, h);
    let condition = if nu >= 1.0 {
        "nu>=1 unconditional".to_string()
    } else if admissible {
        format!("nu<1 conditional: h < {}", vg_h_limit(nu))
    } else {
        format!("nu<1 violated: h >= {}", vg_h_limit(nu))
    };
    Ok(StabilityReport {
        zeta_analytic: vg_eigenvalue(nu, h, m as f64),
        spectral_radius_measured: est.radius,
        method: est.method,
        norm_inf,
        stable: is_stable(est.radius),
        admissible,
        condition,
        warning: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_example_and_sign() {
        let z = zeta_b(1.0, 0.2, 1.0, -1.0, 0.1, JumpSide::Positive).unwrap();
        assert!((z + 0.1875).abs() < 1e-14);
        for alpha in [-0.5, -1.0, -2.5, -4.0] {
            for h in [0.01, 0.5, 3.0] {
                assert!(zeta_b(1.0, 0.3, 0.7, alpha, h, JumpSide::Negative).unwrap() < 0.0);
            }
        }
        assert!(zeta_b(1.0, 0.2, 1.0, -1.0, 1e12, JumpSide::Positive).unwrap().abs() < 1e-10);
        assert!(zeta_b(1.0, 0.2, 1.0, 0.0, 0.1, JumpSide::Positive).is_err());
    }

    #[test]
    fn identity_pair() {
        let i = BandedMatrix::identity(5);
        let est = measure_spectral_radius(&i, &i).unwrap();
        assert_eq!(est.radius, Some(1.0));
    }

    #[test]
    fn power_iteration_on_symmetric_pair() {
        let lhs = BandedMatrix::toeplitz(20, -1, &[-1.0, 4.0, -1.0]);
        let rhs = BandedMatrix::identity(20);
        let est = measure_spectral_radius(&lhs, &rhs).unwrap();
        assert_ne!(est.method, RadiusMethod::DiagonalRatio);
        // smallest eigenvalue of the tridiagonal is 4 - 2cos(π/21)
        let want = 1.0 / (4.0 - 2.0 * (std::f64::consts::PI / 21.0).cos());
        assert!((est.radius.unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn vg_radius_is_eigenvalue() {
        let r = vg_stability(JumpSide::Positive, 1.0, 1, 0.1, 32).unwrap();
        assert!((r.spectral_radius_measured.unwrap() - 0.0625).abs() < 1e-15);
        assert!(r.stable && r.admissible);
        let bad = vg_stability(JumpSide::Positive, 0.5, 1, 3.5, 32).unwrap();
        assert!(!bad.admissible);
    }

    #[test]
    fn conditioning_warning_fires_for_deep_alpha() {
        let r = pade_stability(PadeOrder::Cn11, 1.0, 0.2, 1.0, -6.0, 0.01, 1e-3, 64).unwrap();
        assert!(r.warning.is_some());
        let r = pade_stability(PadeOrder::Cn11, 1.0, 0.2, 1.0, -1.0, 0.1, 1e-2, 64).unwrap();
        assert!(r.warning.is_none());
    }
}
