//! The α = 0 scheme: C^{k+1} = (I ∓ D1/ν)^{-m} C^k with real m = √V·λ·θ,
//! obtained from integer powers by Lagrange interpolation in m.

use crate::banded::BandedLu;
use crate::error::{Error, Result};
use crate::interp::lagrange_weights;
use crate::model::JumpSide;
use crate::operators::build_vg_factor;
use crate::PriceVector;

/// Integer powers used to interpolate in m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MInterpolation {
    /// m ∈ {0, 1, 2}, valid for m < 2.
    #[default]
    Quadratic,
    /// m ∈ {0, 1, 2, 3}, valid for m < 3.
    Cubic,
}

impl MInterpolation {
    pub fn nodes(self) -> &'static [f64] {
        match self {
            MInterpolation::Quadratic => &[0.0, 1.0, 2.0],
            MInterpolation::Cubic => &[0.0, 1.0, 2.0, 3.0],
        }
    }

    /// Exclusive upper bound on the real power.
    pub fn m_limit(self) -> f64 {
        match self {
            MInterpolation::Quadratic => 2.0,
            MInterpolation::Cubic => 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VgStepConfig {
    pub side: JumpSide,
    /// √V·λ·θ.
    pub m_real: f64,
    pub nu: f64,
    pub h: f64,
    pub interpolation: MInterpolation,
}

impl VgStepConfig {
    pub fn new(side: JumpSide, sqrt_v: f64, lambda: f64, theta: f64, nu: f64, h: f64) -> Self {
        VgStepConfig {
            side,
            m_real: sqrt_v * lambda * theta,
            nu,
            h,
            interpolation: MInterpolation::Quadratic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m_real >= 0.0 && self.m_real.is_finite()) {
            return Err(Error::config(format!("m must be nonnegative, got {}", self.m_real)));
        }
        let lim = self.interpolation.m_limit();
        if self.m_real >= lim {
            return Err(Error::config(format!(
                "m = {} must stay below {lim}; reduce the time step",
                self.m_real
            )));
        }
        if !vg_admissible(self.nu, self.h) {
            return Err(Error::domain(format!(
                "nu = {} < 1 needs h < 3/(2(1 - nu)) = {}, got h = {}",
                self.nu,
                vg_h_limit(self.nu),
                self.h
            )));
        }
        Ok(())
    }
}

/// Largest admissible step for ν < 1 (infinite for ν ≥ 1).
pub fn vg_h_limit(nu: f64) -> f64 {
    if nu >= 1.0 {
        f64::INFINITY
    } else {
        1.5 / (1.0 - nu)
    }
}

/// ν ≥ 1, or h < 3/(2(1 - ν)).
pub fn vg_admissible(nu: f64, h: f64) -> bool {
    nu > 0.0 && h < vg_h_limit(nu)
}

/// Factorised I ∓ D1/ν on a fixed grid.
#[derive(Debug, Clone)]
pub struct VgFactor {
    lu: BandedLu,
}

impl VgFactor {
    pub fn new(side: JumpSide, nu: f64, n: usize, h: f64) -> Result<Self> {
        Ok(VgFactor {
            lu: build_vg_factor(side, nu, n, h)?.lu()?,
        })
    }

    /// (I ∓ D1/ν)^{-m}·c by m successive triangular solves.
    pub fn integer_power(&self, m: u32, c: &[f64]) -> Result<PriceVector> {
        let mut x = c.to_vec();
        for _ in 0..m {
            self.lu.solve_in_place(&mut x)?;
        }
        Ok(x)
    }

    /// c, (I∓D/ν)^{-1}c, … up to the highest interpolation node.
    pub fn power_ladder(&self, interp: MInterpolation, c: &[f64]) -> Result<Vec<PriceVector>> {
        let mut out = vec![c.to_vec()];
        for _ in 1..interp.nodes().len() {
            let mut next = out.last().expect("nonempty").clone();
            self.lu.solve_in_place(&mut next)?;
            out.push(next);
        }
        Ok(out)
    }

    /// Real power m by pointwise interpolation of the integer powers.
    pub fn real_power(&self, m: f64, interp: MInterpolation, c: &[f64]) -> Result<PriceVector> {
        if !(0.0..interp.m_limit()).contains(&m) {
            return Err(Error::config(format!(
                "power m = {m} outside [0, {})",
                interp.m_limit()
            )));
        }
        let ladder = self.power_ladder(interp, c)?;
        Ok(combine(&ladder, &lagrange_weights(interp.nodes(), m)?))
    }
}

fn combine(ladder: &[PriceVector], w: &[f64]) -> PriceVector {
    let mut out = vec![0.0; ladder[0].len()];
    for (wk, v) in w.iter().zip(ladder) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += wk * x;
        }
    }
    out
}

/// Reusable α = 0 stepper for one grid and configuration.
#[derive(Debug, Clone)]
pub struct VgStepper {
    cfg: VgStepConfig,
    factor: VgFactor,
    weights: Vec<f64>,
}

impl VgStepper {
    pub fn new(cfg: VgStepConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        Ok(VgStepper {
            factor: VgFactor::new(cfg.side, cfg.nu, n, cfg.h)?,
            weights: lagrange_weights(cfg.interpolation.nodes(), cfg.m_real)?,
            cfg,
        })
    }

    pub fn config(&self) -> &VgStepConfig {
        &self.cfg
    }

    pub fn step(&self, c: &[f64]) -> Result<PriceVector> {
        Ok(self.step_with_spread(c)?.0)
    }

    /// The step together with max|step(m=1) - step(m=0)|, a rough gauge of
    /// how much the interpolation has to bridge.
    pub fn step_with_spread(&self, c: &[f64]) -> Result<(PriceVector, f64)> {
        let ladder = self.factor.power_ladder(self.cfg.interpolation, c)?;
        let spread = ladder[0]
            .iter()
            .zip(&ladder[1])
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        Ok((combine(&ladder, &self.weights), spread))
    }

    pub fn march(&self, c0: &[f64], steps: usize) -> Result<PriceVector> {
        let mut c = c0.to_vec();
        for k in 0..steps {
            c = self.step(&c)?;
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numerical {
                    module: "vg_stepper",
                    step: k + 1,
                    detail: format!("non-finite value at node {i}"),
                });
            }
        }
        Ok(c)
    }
}

/// (I ∓ D1/ν)^{-m_int}·c_k.
pub fn vg_integer_step(cfg: &VgStepConfig, m_int: u32, c_k: &[f64]) -> Result<PriceVector> {
    VgFactor::new(cfg.side, cfg.nu, c_k.len(), cfg.h)?.integer_power(m_int, c_k)
}

pub fn vg_step(cfg: &VgStepConfig, c_k: &[f64]) -> Result<PriceVector> {
    VgStepper::new(*cfg, c_k.len())?.step(c_k)
}
