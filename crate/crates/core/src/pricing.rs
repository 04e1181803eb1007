//! Full time marches of the jump step: banded FD schemes by integer α, the
//! FFT reference, and their comparison.

use crate::error::{Error, Result};
use crate::fft_ref::{euler_march, ToeplitzKernel};
use crate::grid::{extend_fft_domain, Grid};
use crate::infvar_stepper::{InfVarConfig, InfVarStepper, TimeOrder};
use crate::interp::uniform_cubic;
use crate::model::{compensator, terminal_condition, GtspParams, JumpSide, MarketConfig, SideParams};
use crate::operators::{build_a_operator, OperatorSpec};
use crate::pp_stepper::{DeltaWeight, PadeOrder, PpStepper, RhsSign, SchemeConfig};
use crate::vg_stepper::{MInterpolation, VgStepConfig, VgStepper};
use crate::PriceVector;

/// Which jump integral is being advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JumpEquation {
    /// ∂τC = √V ∫ C(x+y) ν(dy), defined for α < 0.
    Plain,
    /// ∂τC = √V ∫ [C(x+y) - C(x)] ν(dy); at α = 1 the drift term
    /// (e^y - 1)∂xC is included as well.
    #[default]
    Compensated,
}

/// Scheme family used for one integer α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Pade(PadeOrder),
    Vg,
    InfVar,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Pade(p) => p.name(),
            SchemeKind::Vg => "vg",
            SchemeKind::InfVar => "infvar",
        }
    }
}

/// Settings of the α = 1 scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfVarSettings {
    pub nu_star: f64,
    pub m_intervals: usize,
    pub time_order: TimeOrder,
}

impl Default for InfVarSettings {
    fn default() -> Self {
        InfVarSettings {
            nu_star: 300.0,
            m_intervals: 80,
            time_order: TimeOrder::Order2,
        }
    }
}

/// A finite-difference pricing run for one jump side.
#[derive(Debug, Clone, PartialEq)]
pub struct FdProblem {
    pub grid: Grid,
    pub params: GtspParams,
    pub market: MarketConfig,
    pub side: JumpSide,
    pub equation: JumpEquation,
    pub pade: PadeOrder,
    pub weight: DeltaWeight,
    pub sign: RhsSign,
    pub vg_interpolation: MInterpolation,
    pub infvar: InfVarSettings,
}

impl FdProblem {
    pub fn new(grid: Grid, params: GtspParams, market: MarketConfig, side: JumpSide) -> Self {
        FdProblem {
            grid,
            params,
            market,
            side,
            equation: JumpEquation::Compensated,
            pade: PadeOrder::Cn11,
            weight: DeltaWeight::Full,
            sign: RhsSign::Positive,
            vg_interpolation: MInterpolation::Quadratic,
            infvar: InfVarSettings::default(),
        }
    }

    pub fn side_params(&self) -> SideParams {
        self.params.side(self.side)
    }

    pub fn scheme_for(&self, alpha: i32) -> Result<SchemeKind> {
        match (alpha, self.equation) {
            (a, _) if a <= -1 => Ok(SchemeKind::Pade(self.pade)),
            (0, JumpEquation::Compensated) => Ok(SchemeKind::Vg),
            (1, JumpEquation::Compensated) => Ok(SchemeKind::InfVar),
            (a, JumpEquation::Plain) if a >= 0 => Err(Error::domain(format!(
                "the uncompensated jump integral diverges at alpha = {a}"
            ))),
            (a, _) => Err(Error::domain(format!("no banded scheme for alpha = {a}"))),
        }
    }

    pub fn terminal(&self) -> Result<PriceVector> {
        terminal_condition(&self.grid, &self.market)
    }

    /// March to maturity with the side's α, which must be an integer.
    pub fn solve(&self) -> Result<PriceVector> {
        let a = self.side_params().alpha;
        if a.fract() != 0.0 {
            return Err(Error::domain(format!(
                "alpha = {a} is not an integer; use the alpha bridge"
            )));
        }
        self.solve_integer_alpha(a as i32)
    }

    pub fn solve_integer_alpha(&self, alpha: i32) -> Result<PriceVector> {
        let c0 = self.terminal()?;
        self.march_integer_alpha(alpha, &c0)
    }

    /// March `c0` over the grid's time steps at integer α.
    pub fn march_integer_alpha(&self, alpha: i32, c0: &[f64]) -> Result<PriceVector> {
        let s = self.side_params().with_alpha(alpha as f64);
        let g = &self.grid;
        let n = g.n_space;
        match self.scheme_for(alpha)? {
            SchemeKind::Pade(pade) => {
                let spec = OperatorSpec::from_side(self.side, &s, n, g.h)?;
                let a = build_a_operator(&spec)?;
                let mut cfg = SchemeConfig::new(pade, g.theta, s.sqrt_v)
                    .with_weight(self.weight)
                    .with_sign(self.sign);
                let comp = match self.equation {
                    JumpEquation::Plain => 0.0,
                    JumpEquation::Compensated => {
                        cfg = cfg.compensated();
                        compensator(s.lambda, s.nu, s.alpha)?
                    }
                };
                PpStepper::new(&a, &cfg, comp)?.march(c0, g.n_time)
            }
            SchemeKind::Vg => {
                let cfg = VgStepConfig {
                    interpolation: self.vg_interpolation,
                    ..VgStepConfig::new(self.side, s.sqrt_v, s.lambda, g.theta, s.nu, g.h)
                };
                VgStepper::new(cfg, n)?.march(c0, g.n_time)
            }
            SchemeKind::InfVar => {
                let cfg = InfVarConfig {
                    nu_star: self.infvar.nu_star,
                    m_intervals: self.infvar.m_intervals,
                    time_order: self.infvar.time_order,
                    ..InfVarConfig::new(self.side, s.nu, s.lambda, s.sqrt_v, g.theta, g.h)
                };
                InfVarStepper::new(cfg, n)?.march(c0, g.n_time)
            }
        }
    }
}

/// An FFT reference run on a symmetric window, padded internally.
#[derive(Debug, Clone, PartialEq)]
pub struct FftProblem {
    /// Reporting window (-x*, x*) with its time grid.
    pub window: Grid,
    pub params: GtspParams,
    pub market: MarketConfig,
    pub side: JumpSide,
    pub equation: JumpEquation,
}

impl FftProblem {
    pub fn new(window: Grid, params: GtspParams, market: MarketConfig, side: JumpSide) -> Self {
        FftProblem {
            window,
            params,
            market,
            side,
            equation: JumpEquation::Compensated,
        }
    }

    /// Window values after the Euler march at damping exponent `alpha`.
    pub fn solve_alpha(&self, alpha: f64) -> Result<PriceVector> {
        let s = self.params.side(self.side).with_alpha(alpha);
        let ext = extend_fft_domain(&self.window)?;
        let kernel = ToeplitzKernel::one_sided(self.side, s.lambda * s.sqrt_v, s.nu, alpha, ext.n_space, ext.h)?;
        let (compensated, comp) = match self.equation {
            JumpEquation::Plain => {
                if alpha >= 0.0 {
                    return Err(Error::domain(format!(
                        "the uncompensated jump integral diverges at alpha = {alpha}"
                    )));
                }
                (false, 0.0)
            }
            JumpEquation::Compensated => (true, s.sqrt_v * compensator(s.lambda, s.nu, alpha)?),
        };
        let c0 = terminal_condition(&ext, &self.market)?;
        let c = euler_march(&kernel, ext.h, &c0, ext.theta, ext.n_time, compensated, comp)?;
        Ok(ext.restrict(&c)?.to_vec())
    }

    pub fn solve(&self) -> Result<PriceVector> {
        self.solve_alpha(self.params.side(self.side).alpha)
    }
}

/// FD and FFT solutions on the FD nodes covered by the FFT window.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub x: Vec<f64>,
    pub fd: Vec<f64>,
    pub fft: Vec<f64>,
}

impl Comparison {
    pub fn diff(&self) -> Vec<f64> {
        self.fd.iter().zip(&self.fft).map(|(a, b)| a - b).collect()
    }

    pub fn max_abs_diff(&self) -> f64 {
        self.diff().iter().fold(0.0, |m, d| m.max(d.abs()))
    }

    /// Node and value of the largest absolute difference.
    pub fn argmax_abs_diff(&self) -> (f64, f64) {
        self.x
            .iter()
            .zip(self.diff())
            .fold((f64::NAN, 0.0), |(bx, bd), (&x, d)| if d.abs() > bd.abs() { (x, d) } else { (bx, bd) })
    }
}

/// Interpolates the FFT window solution (cubic Lagrange) onto FD nodes.
pub fn compare_fd_fft(fd_grid: &Grid, fd: &[f64], fft_window: &Grid, fft: &[f64]) -> Result<Comparison> {
    if fd.len() != fd_grid.n_space {
        return Err(Error::DimensionMismatch {
            expected: fd_grid.n_space,
            got: fd.len(),
        });
    }
    if fft.len() != fft_window.n_space {
        return Err(Error::DimensionMismatch {
            expected: fft_window.n_space,
            got: fft.len(),
        });
    }
    let lo = fft_window.x_min;
    let hi = fft_window.x(fft_window.n_space - 1);
    let (x, fd): (Vec<f64>, Vec<f64>) = fd_grid
        .nodes()
        .zip(fd.iter().copied())
        .filter(|(x, _)| *x >= lo && *x <= hi)
        .unzip();
    if x.is_empty() {
        return Err(Error::config("FD and FFT domains do not overlap"));
    }
    let fft = uniform_cubic(lo, fft_window.h, fft, &x)?;
    Ok(Comparison { x, fd, fft })
}
