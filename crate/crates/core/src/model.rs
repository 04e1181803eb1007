//! Jump-model parameters, market data and scalar kernel evaluations.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::special::{gamma, norm_cdf};
use crate::PriceVector;

/// Six-parameter GTSP Lévy measure plus the variance weights that scale the
/// two jump integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GtspParams {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    /// Right variance weight V_R; schemes only see its square root.
    pub v_r: f64,
    /// Left variance weight V_L.
    pub v_l: f64,
}

impl GtspParams {
    pub fn new(
        lambda_plus: f64,
        lambda_minus: f64,
        nu_plus: f64,
        nu_minus: f64,
        alpha_plus: f64,
        alpha_minus: f64,
    ) -> Result<Self> {
        let p = GtspParams {
            lambda_plus,
            lambda_minus,
            nu_plus,
            nu_minus,
            alpha_plus,
            alpha_minus,
            v_r: 1.0,
            v_l: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Mirrored measure (CGMY-style when the exponents also agree).
    pub fn symmetric(lambda: f64, nu: f64, alpha: f64) -> Result<Self> {
        Self::new(lambda, lambda, nu, nu, alpha, alpha)
    }

    pub fn with_variances(mut self, v_r: f64, v_l: f64) -> Result<Self> {
        self.v_r = v_r;
        self.v_l = v_l;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_plus", self.lambda_plus),
            ("lambda_minus", self.lambda_minus),
            ("nu_plus", self.nu_plus),
            ("nu_minus", self.nu_minus),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, a) in [("alpha_plus", self.alpha_plus), ("alpha_minus", self.alpha_minus)] {
            if !(a < 2.0) {
                return Err(Error::domain(format!("{name} must be < 2, got {a}")));
            }
        }
        for (name, v) in [("v_r", self.v_r), ("v_l", self.v_l)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be nonnegative, got {v}")));
            }
        }
        Ok(())
    }

    /// Parameters of one jump direction.
    pub fn side(&self, side: JumpSide) -> SideParams {
        match side {
            JumpSide::Positive => SideParams {
                lambda: self.lambda_plus,
                nu: self.nu_plus,
                alpha: self.alpha_plus,
                sqrt_v: self.v_r.sqrt(),
            },
            JumpSide::Negative => SideParams {
                lambda: self.lambda_minus,
                nu: self.nu_minus,
                alpha: self.alpha_minus,
                sqrt_v: self.v_l.sqrt(),
            },
        }
    }
}

/// Jump direction handled by one splitting sub-step.
///
/// Positive jumps look to the right of `x` and pair with the operator built
/// from forward stencils; negative jumps look left and use backward stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpSide {
    Positive,
    Negative,
}

impl JumpSide {
    pub fn name(self) -> &'static str {
        match self {
            JumpSide::Positive => "positive",
            JumpSide::Negative => "negative",
        }
    }
}

/// (λ, ν, α, √V) for one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideParams {
    pub lambda: f64,
    pub nu: f64,
    pub alpha: f64,
    pub sqrt_v: f64,
}

impl SideParams {
    pub fn with_alpha(self, alpha: f64) -> Self {
        SideParams { alpha, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptionKind {
    Put,
    Call,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketConfig {
    pub strike: f64,
    pub rate: f64,
    /// Volatility used only to build the smooth seed condition.
    pub vol: f64,
    /// Maturity in years.
    pub maturity: f64,
    pub option_kind: OptionKind,
    /// Time to expiry of the Black-Scholes value used as the seed.
    pub seed_time: f64,
}

impl MarketConfig {
    /// Seed time defaults to the maturity.
    pub fn new(strike: f64, rate: f64, vol: f64, maturity: f64, option_kind: OptionKind) -> Result<Self> {
        let m = MarketConfig {
            strike,
            rate,
            vol,
            maturity,
            option_kind,
            seed_time: maturity,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_seed_time(mut self, seed_time: f64) -> Result<Self> {
        self.seed_time = seed_time;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0) {
            return Err(Error::domain(format!("strike must be positive, got {}", self.strike)));
        }
        if !(self.maturity > 0.0) {
            return Err(Error::domain(format!("maturity must be positive, got {}", self.maturity)));
        }
        if !(self.vol > 0.0) {
            return Err(Error::domain(format!("vol must be positive, got {}", self.vol)));
        }
        if !(self.seed_time >= 0.0) || !self.rate.is_finite() {
            return Err(Error::domain("seed_time must be nonnegative and rate finite"));
        }
        Ok(())
    }
}

/// Lévy density of the GTSP measure at a nonzero jump size `y`.
pub fn levy_density(y: f64, p: &GtspParams) -> Result<f64> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::domain(format!("Lévy density undefined at y = {y}")));
    }
    let s = if y > 0.0 {
        p.side(JumpSide::Positive)
    } else {
        p.side(JumpSide::Negative)
    };
    Ok(one_sided_density(y.abs(), s.lambda, s.nu, s.alpha))
}

/// λ e^{-ν y} / y^{1+α} for y > 0.
#[inline]
pub(crate) fn one_sided_density(y: f64, lambda: f64, nu: f64, alpha: f64) -> f64 {
    lambda * (-nu * y).exp() * y.powf(-(1.0 + alpha))
}

/// Kernel value used when the density is sampled on a grid that contains the
/// origin: the limit 0 for α < -1, the one-sided value λ at α = -1, and 0
/// (node excluded) where the density is singular.
pub fn kernel_sample(dist: f64, lambda: f64, nu: f64, alpha: f64) -> f64 {
    if dist > 0.0 {
        one_sided_density(dist, lambda, nu, alpha)
    } else if alpha == -1.0 {
        lambda
    } else {
        0.0
    }
}

/// λ ν^α Γ(-α) = ∫₀^∞ λ e^{-νy} y^{-(1+α)} dy, the integrated compensator
/// term. Finite only for α < 0.
pub fn compensator(lambda: f64, nu: f64, alpha: f64) -> Result<f64> {
    if !(alpha < 0.0) {
        return Err(Error::domain(format!("compensator requires alpha < 0, got {alpha}")));
    }
    if !(lambda > 0.0 && nu > 0.0) {
        return Err(Error::domain("compensator requires lambda > 0 and nu > 0"));
    }
    Ok(lambda * nu.powf(alpha) * gamma(-alpha))
}

/// Black-Scholes value with time to expiry `t`; at t = 0 the payoff.
pub fn black_scholes(kind: OptionKind, spot: f64, strike: f64, rate: f64, vol: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return match kind {
            OptionKind::Put => (strike - spot).max(0.0),
            OptionKind::Call => (spot - strike).max(0.0),
        };
    }
    let df = (-rate * t).exp();
    if spot <= 0.0 {
        return match kind {
            OptionKind::Put => strike * df,
            OptionKind::Call => 0.0,
        };
    }
    let sd = vol * t.sqrt();
    let d1 = ((spot / strike).ln() + (rate + 0.5 * vol * vol) * t) / sd;
    let d2 = d1 - sd;
    match kind {
        OptionKind::Put => strike * df * norm_cdf(-d2) - spot * norm_cdf(-d1),
        OptionKind::Call => spot * norm_cdf(d1) - strike * df * norm_cdf(d2),
    }
}

/// Seed values C(x_i, 0): Black-Scholes prices at spot e^{x_i} with the
/// configured seed time.
pub fn terminal_condition(g: &Grid, m: &MarketConfig) -> Result<PriceVector> {
    m.validate()?;
    Ok(g
        .nodes()
        .map(|x| black_scholes(m.option_kind, x.exp(), m.strike, m.rate, m.vol, m.seed_time))
        .collect())
}
