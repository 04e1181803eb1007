//! Discrete one-sided derivatives and the Green's-function operators.

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::model::{JumpSide, SideParams};
use crate::special::gamma;

/// Inputs of the operator (ν ∓ ∂x)^{p+1} / (λ p!) on a grid of `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub side: JumpSide,
    pub p: u32,
    pub nu: f64,
    pub lambda: f64,
    pub n: usize,
    pub h: f64,
}

impl OperatorSpec {
    /// Operator data for an integer damping exponent α ≤ -1, i.e. p = -(1 + α).
    pub fn from_side(side: JumpSide, s: &SideParams, n: usize, h: f64) -> Result<Self> {
        let p = integer_p(s.alpha)?;
        Ok(OperatorSpec {
            side,
            p,
            nu: s.nu,
            lambda: s.lambda,
            n,
            h,
        })
    }

    /// Constant diagonal of the assembled operator.
    pub fn diagonal_value(&self) -> f64 {
        (self.nu + 1.5 / self.h).powi(self.p as i32 + 1) / (self.lambda * gamma(self.p as f64 + 1.0))
    }
}

/// p = -(1 + α) for integer α ≤ -1.
pub fn integer_p(alpha: f64) -> Result<u32> {
    if alpha.fract() != 0.0 || alpha > -1.0 {
        return Err(Error::domain(format!(
            "banded operator needs an integer alpha <= -1, got {alpha}"
        )));
    }
    Ok((-1.0 - alpha) as u32)
}

fn check_stencil_args(n: usize, h: f64) -> Result<()> {
    if n < 3 {
        return Err(Error::config(format!("one-sided stencil needs n >= 3, got {n}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::config(format!("grid step must be positive, got {h}")));
    }
    Ok(())
}

/// Second-order forward difference (-3, 4, -1)/(2h); upper triangular.
pub fn build_forward_d1(n: usize, h: f64) -> Result<BandedMatrix> {
    check_stencil_args(n, h)?;
    let c = 0.5 / h;
    Ok(BandedMatrix::toeplitz(n, 0, &[-3.0 * c, 4.0 * c, -c]))
}

/// Second-order backward difference (1, -4, 3)/(2h) on diagonals -2, -1, 0;
/// lower triangular.
pub fn build_backward_d1(n: usize, h: f64) -> Result<BandedMatrix> {
    check_stencil_args(n, h)?;
    let c = 0.5 / h;
    Ok(BandedMatrix::toeplitz(n, -2, &[c, -4.0 * c, 3.0 * c]))
}

/// The one-sided derivative paired with a jump side: forward for positive
/// jumps, backward for negative ones.
pub fn side_d1(side: JumpSide, n: usize, h: f64) -> Result<BandedMatrix> {
    match side {
        JumpSide::Positive => build_forward_d1(n, h),
        JumpSide::Negative => build_backward_d1(n, h),
    }
}

/// ν·I ∓ D1 with the stencil of [`side_d1`]; diagonal ν + 3/(2h) on both sides.
pub fn shifted_d1(side: JumpSide, nu: f64, n: usize, h: f64) -> Result<BandedMatrix> {
    let d = side_d1(side, n, h)?;
    let sign = match side {
        JumpSide::Positive => -1.0,
        JumpSide::Negative => 1.0,
    };
    Ok(d.scaled(sign).shifted(nu))
}

/// (ν·I ∓ D1)^{p+1} / (λ Γ(p+1)), assembled by repeated banded products.
pub fn build_a_operator(spec: &OperatorSpec) -> Result<BandedMatrix> {
    if !(spec.nu > 0.0 && spec.lambda > 0.0) {
        return Err(Error::domain("operator needs nu > 0 and lambda > 0"));
    }
    let base = shifted_d1(spec.side, spec.nu, spec.n, spec.h)?;
    let scale = 1.0 / (spec.lambda * gamma(spec.p as f64 + 1.0));
    Ok(base.pow(spec.p + 1).scaled(scale))
}

/// I ∓ D1/ν, the factor whose real powers drive the α = 0 scheme.
pub fn build_vg_factor(side: JumpSide, nu: f64, n: usize, h: f64) -> Result<BandedMatrix> {
    if !(nu > 0.0) {
        return Err(Error::domain(format!("nu must be positive, got {nu}")));
    }
    Ok(shifted_d1(side, nu, n, h)?.scaled(1.0 / nu))
}

/// Central second difference minus α²·I.
pub fn build_basic_operator(alpha: f64, n: usize, h: f64) -> Result<BandedMatrix> {
    check_stencil_args(n, h)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("basic operator needs alpha > 0, got {alpha}")));
    }
    let c = 1.0 / (h * h);
    Ok(BandedMatrix::toeplitz(n, -1, &[c, -2.0 * c - alpha * alpha, c]))
}
