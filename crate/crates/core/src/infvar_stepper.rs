//! The α = 1 scheme. The generator is written as an integral over the
//! tempering rate of α = 0 generators, truncated at ν*, discretised by
//! composite Simpson, and its exponential split into M + 1 commuting factors.
//! Each factor is a convection step followed by a fractional-power step.

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::model::JumpSide;
use crate::operators::side_d1;
use crate::vg_stepper::{vg_admissible, MInterpolation, VgFactor};
use crate::PriceVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TimeOrder {
    /// Crank-Nicolson convection, quadratic interpolation in m.
    #[default]
    Order2,
    /// Padé(1,2) convection, cubic interpolation in m.
    Order3,
}

impl TimeOrder {
    pub fn interpolation(self) -> MInterpolation {
        match self {
            TimeOrder::Order2 => MInterpolation::Quadratic,
            TimeOrder::Order3 => MInterpolation::Cubic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfVarConfig {
    pub side: JumpSide,
    pub nu: f64,
    pub lambda: f64,
    pub sqrt_v: f64,
    pub nu_star: f64,
    /// Even number of Simpson intervals M.
    pub m_intervals: usize,
    pub theta: f64,
    pub h: f64,
    pub time_order: TimeOrder,
}

impl InfVarConfig {
    pub fn new(side: JumpSide, nu: f64, lambda: f64, sqrt_v: f64, theta: f64, h: f64) -> Self {
        InfVarConfig {
            side,
            nu,
            lambda,
            sqrt_v,
            nu_star: 300.0,
            m_intervals: 80,
            theta,
            h,
            time_order: TimeOrder::Order2,
        }
    }

    /// Quadrature nodes ν_i = ν + i(ν* - ν)/M.
    pub fn nodes(&self) -> Vec<f64> {
        let d = (self.nu_star - self.nu) / self.m_intervals as f64;
        (0..=self.m_intervals).map(|i| self.nu + i as f64 * d).collect()
    }

    /// Rates w_i = a_i √V λ (ν* - ν)/(3M); the factor exponents are m_i = w_i θ.
    pub fn rates(&self) -> Result<Vec<f64>> {
        let c = self.sqrt_v * self.lambda * (self.nu_star - self.nu) / (3.0 * self.m_intervals as f64);
        Ok(simpson_weights(self.m_intervals)?.into_iter().map(|a| a * c).collect())
    }

    pub fn validate(&self) -> Result<()> {
        simpson_weights(self.m_intervals)?;
        if !(self.nu > 0.0 && self.lambda >= 0.0 && self.sqrt_v >= 0.0) {
            return Err(Error::domain("infvar scheme needs nu > 0, lambda >= 0, sqrt_v >= 0"));
        }
        if self.side == JumpSide::Positive && self.nu <= 1.0 {
            return Err(Error::domain(format!(
                "positive-jump alpha = 1 scheme needs nu > 1, got {}",
                self.nu
            )));
        }
        if !(self.nu_star > self.nu) {
            return Err(Error::config(format!(
                "nu_star = {} must exceed nu = {}",
                self.nu_star, self.nu
            )));
        }
        if !(self.theta >= 0.0 && self.h > 0.0) {
            return Err(Error::config("theta must be nonnegative and h positive"));
        }
        if !vg_admissible(self.nu, self.h) {
            return Err(Error::domain(format!(
                "grid step {} violates the fractional-factor stability bound for nu = {}",
                self.h, self.nu
            )));
        }
        let lim = self.time_order.interpolation().m_limit();
        let m_max = self.rates()?.into_iter().fold(0.0, f64::max) * self.theta;
        if m_max >= lim {
            return Err(Error::config(format!(
                "largest factor exponent {m_max} reaches {lim}; increase M or reduce theta"
            )));
        }
        Ok(())
    }
}

/// Composite Simpson weights (1, 4, 2, 4, …, 2, 4, 1).
pub fn simpson_weights(m_intervals: usize) -> Result<Vec<f64>> {
    if m_intervals < 2 || !m_intervals.is_multiple_of(2) {
        return Err(Error::config(format!(
            "Simpson needs an even number of intervals >= 2, got {m_intervals}"
        )));
    }
    Ok((0..=m_intervals)
        .map(|i| {
            if i == 0 || i == m_intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect())
}

/// log((ν ∓ 1)/ν): the drift part of the α = 0 generator at rate ν.
pub fn convection_log(side: JumpSide, nu_i: f64) -> Result<f64> {
    let arg = match side {
        JumpSide::Positive => (nu_i - 1.0) / nu_i,
        JumpSide::Negative => (nu_i + 1.0) / nu_i,
    };
    if !(arg > 0.0) {
        return Err(Error::domain(format!(
            "convection coefficient needs nu > 1 on the positive side, got {nu_i}"
        )));
    }
    Ok(arg.ln())
}

/// Upwind derivative for the convection factor: backward for positive
/// jumps, forward for negative ones.
fn convection_d1(side: JumpSide, n: usize, h: f64) -> Result<BandedMatrix> {
    match side {
        JumpSide::Positive => side_d1(JumpSide::Negative, n, h),
        JumpSide::Negative => side_d1(JumpSide::Positive, n, h),
    }
}

/// Factorised convection step exp(κθ∂x) with κ = w·log((ν∓1)/ν).
#[derive(Debug, Clone)]
struct ConvectionFactor {
    lu: BandedLu,
    rhs: BandedMatrix,
}

impl ConvectionFactor {
    fn new(side: JumpSide, nu_i: f64, rate: f64, theta: f64, n: usize, h: f64, order: TimeOrder) -> Result<Self> {
        let kt = rate * convection_log(side, nu_i)? * theta;
        let d = convection_d1(side, n, h)?;
        let (lhs, rhs) = match order {
            TimeOrder::Order2 => (d.scaled(-0.5 * kt).shifted(1.0), d.scaled(0.5 * kt).shifted(1.0)),
            TimeOrder::Order3 => {
                let d2 = d.mul(&d)?;
                let lhs = d.lin_comb(-2.0 * kt / 3.0, &d2, kt * kt / 6.0)?.shifted(1.0);
                (lhs, d.scaled(kt / 3.0).shifted(1.0))
            }
        };
        Ok(ConvectionFactor { lu: lhs.lu()?, rhs })
    }

    fn apply(&self, c: &[f64]) -> Result<PriceVector> {
        let mut out = self.rhs.matvec(c)?;
        self.lu.solve_in_place(&mut out)?;
        Ok(out)
    }
}

/// Crank-Nicolson convection factor [I - (κθ/2)D]C* = [I + (κθ/2)D]C, where
/// κ = rate·log((ν_i ∓ 1)/ν_i) and `rate` = m_i/θ.
pub fn convection_factor_step(nu_i: f64, rate: f64, theta: f64, side: JumpSide, h: f64, c: &[f64]) -> Result<PriceVector> {
    ConvectionFactor::new(side, nu_i, rate, theta, c.len(), h, TimeOrder::Order2)?.apply(c)
}

/// Third-order convection factor [1 - 2pθ/3 + p²θ²/6]C* = [1 + pθ/3]C with p = κ∂x.
pub fn order3_convection_step(nu_i: f64, rate: f64, theta: f64, side: JumpSide, h: f64, c: &[f64]) -> Result<PriceVector> {
    ConvectionFactor::new(side, nu_i, rate, theta, c.len(), h, TimeOrder::Order3)?.apply(c)
}

/// (1 ∓ ∂x/ν_i)^{-m_i} by interpolation of integer powers.
pub fn fractional_factor_step(
    nu_i: f64,
    m_i: f64,
    side: JumpSide,
    h: f64,
    order: TimeOrder,
    c: &[f64],
) -> Result<PriceVector> {
    VgFactor::new(side, nu_i, c.len(), h)?.real_power(m_i, order.interpolation(), c)
}

/// Prefactored α = 1 stepper for one grid.
#[derive(Debug, Clone)]
pub struct InfVarStepper {
    cfg: InfVarConfig,
    factors: Vec<(ConvectionFactor, VgFactor, f64)>,
}

impl InfVarStepper {
    pub fn new(cfg: InfVarConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        let factors = cfg
            .nodes()
            .into_iter()
            .zip(cfg.rates()?)
            .map(|(nu_i, w)| {
                Ok((
                    ConvectionFactor::new(cfg.side, nu_i, w, cfg.theta, n, cfg.h, cfg.time_order)?,
                    VgFactor::new(cfg.side, nu_i, n, cfg.h)?,
                    w * cfg.theta,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InfVarStepper { cfg, factors })
    }

    pub fn config(&self) -> &InfVarConfig {
        &self.cfg
    }

    fn apply_factor(&self, i: usize, c: &[f64]) -> Result<PriceVector> {
        let (conv, frac, m) = &self.factors[i];
        let c = conv.apply(c)?;
        frac.real_power(*m, self.cfg.time_order.interpolation(), &c)
    }

    /// One time step: factors i = 0..M in order.
    pub fn step(&self, c: &[f64]) -> Result<PriceVector> {
        let mut x = c.to_vec();
        for i in 0..self.factors.len() {
            x = self.apply_factor(i, &x)?;
        }
        Ok(x)
    }

    /// One time step with the factors applied in reverse order.
    pub fn step_reversed(&self, c: &[f64]) -> Result<PriceVector> {
        let mut x = c.to_vec();
        for i in (0..self.factors.len()).rev() {
            x = self.apply_factor(i, &x)?;
        }
        Ok(x)
    }

    pub fn march(&self, c0: &[f64], steps: usize) -> Result<PriceVector> {
        let mut c = c0.to_vec();
        for k in 0..steps {
            c = self.step(&c)?;
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numerical {
                    module: "infvar_stepper",
                    step: k + 1,
                    detail: format!("non-finite value at node {i}"),
                });
            }
        }
        Ok(c)
    }
}

pub fn infvar_step(cfg: &InfVarConfig, c_k: &[f64]) -> Result<PriceVector> {
    InfVarStepper::new(*cfg, c_k.len())?.step(c_k)
}
