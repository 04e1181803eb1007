//! Padé time steppers for the pseudo-parabolic form of the jump integral at
//! integer α ≤ -1.
//!
//! Every scheme advances ∂τC = 𝔹C with a generator of the form
//! 𝔹 = β·𝒜⁻¹ - γ·I. Writing z = θ𝔹 and multiplying a Padé approximant
//! P(z)/Q(z) of degree d through by 𝒜^d gives two banded matrix polynomials
//! in 𝒜, since 𝒜z = θ(β·I - γ·𝒜). One step is then a single banded solve.

use crate::banded::{BandedLu, BandedMatrix};
use crate::error::{Error, Result};
use crate::operators::build_basic_operator;
use crate::PriceVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PadeOrder {
    /// Crank-Nicolson.
    Cn11,
    Pade12,
    Pade22,
}

impl PadeOrder {
    pub fn name(self) -> &'static str {
        match self {
            PadeOrder::Cn11 => "cn11",
            PadeOrder::Pade12 => "pade12",
            PadeOrder::Pade22 => "pade22",
        }
    }

    pub fn nominal_order(self) -> u32 {
        match self {
            PadeOrder::Cn11 => 2,
            PadeOrder::Pade12 => 3,
            PadeOrder::Pade22 => 4,
        }
    }

    /// Numerator and denominator coefficients in z, lowest degree first.
    fn coefficients(self) -> ([f64; 3], [f64; 3]) {
        match self {
            PadeOrder::Cn11 => ([1.0, 0.5, 0.0], [1.0, -0.5, 0.0]),
            PadeOrder::Pade12 => ([1.0, 1.0 / 3.0, 0.0], [1.0, -2.0 / 3.0, 1.0 / 6.0]),
            PadeOrder::Pade22 => ([1.0, 0.5, 1.0 / 12.0], [1.0, -0.5, 1.0 / 12.0]),
        }
    }

    fn degree(self) -> u32 {
        match self {
            PadeOrder::Cn11 => 1,
            _ => 2,
        }
    }
}

impl std::str::FromStr for PadeOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cn11" | "cn" => Ok(PadeOrder::Cn11),
            "pade12" => Ok(PadeOrder::Pade12),
            "pade22" => Ok(PadeOrder::Pade22),
            other => Err(Error::config(format!("unknown Padé scheme '{other}'"))),
        }
    }
}

/// Sign of the right-hand side of 𝒜∂τC = ±c·C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RhsSign {
    #[default]
    Positive,
    Negative,
}

impl RhsSign {
    pub fn factor(self) -> f64 {
        match self {
            RhsSign::Positive => 1.0,
            RhsSign::Negative => -1.0,
        }
    }
}

/// Weight of 𝒜⁻¹ in the generator: `Half` gives the pseudo-parabolic form
/// 𝒜∂τC = (√V/2)C, `Full` the exact identity 𝒜⁻¹ = convolution with the
/// Lévy density, so that 𝔹 reproduces the jump integral itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DeltaWeight {
    #[default]
    Half,
    Full,
}

impl DeltaWeight {
    pub fn factor(self) -> f64 {
        match self {
            DeltaWeight::Half => 0.5,
            DeltaWeight::Full => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub pade: PadeOrder,
    pub theta: f64,
    pub sqrt_v: f64,
    /// Subtract the compensator λν^αΓ(-α) as a reaction term.
    pub compensated: bool,
    pub sign: RhsSign,
    pub weight: DeltaWeight,
}

impl SchemeConfig {
    pub fn new(pade: PadeOrder, theta: f64, sqrt_v: f64) -> Self {
        SchemeConfig {
            pade,
            theta,
            sqrt_v,
            compensated: false,
            sign: RhsSign::Positive,
            weight: DeltaWeight::Half,
        }
    }

    pub fn compensated(self) -> Self {
        SchemeConfig {
            compensated: true,
            ..self
        }
    }

    pub fn with_weight(self, weight: DeltaWeight) -> Self {
        SchemeConfig { weight, ..self }
    }

    pub fn with_sign(self, sign: RhsSign) -> Self {
        SchemeConfig { sign, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::config(format!("theta must be nonnegative, got {}", self.theta)));
        }
        if !(self.sqrt_v >= 0.0 && self.sqrt_v.is_finite()) {
            return Err(Error::config(format!("sqrt_v must be nonnegative, got {}", self.sqrt_v)));
        }
        Ok(())
    }

    /// (β, γ) of 𝔹 = β𝒜⁻¹ - γI for compensator value `comp`.
    pub fn generator(&self, comp: f64) -> (f64, f64) {
        let s = self.sign.factor() * self.sqrt_v;
        let gamma = if self.compensated { s * comp } else { 0.0 };
        (s * self.weight.factor(), gamma)
    }
}

/// Left and right matrices 𝒜^d·Q(θ𝔹) and 𝒜^d·P(θ𝔹) of one Padé step for
/// 𝔹 = β𝒜⁻¹ - γI.
pub fn scheme_matrices(
    a: &BandedMatrix,
    beta: f64,
    gamma: f64,
    theta: f64,
    pade: PadeOrder,
) -> Result<(BandedMatrix, BandedMatrix)> {
    let n = a.n();
    let (p, q) = pade.coefficients();
    if pade.degree() == 2 {
        let l = a.n_diagonals();
        if 2 * l - 1 > n {
            return Err(Error::config(format!(
                "{} needs 2l-1 <= n, got l = {l}, n = {n}",
                pade.name()
            )));
        }
    }
    // u = 𝒜·θ𝔹
    let u = a.scaled(-theta * gamma).shifted(theta * beta);
    let build = |c: &[f64; 3]| -> Result<BandedMatrix> {
        match pade.degree() {
            1 => a.lin_comb(c[0], &u, c[1]),
            _ => {
                let a2 = a.mul(a)?;
                let au = a.mul(&u)?;
                let u2 = u.mul(&u)?;
                a2.lin_comb(c[0], &au, c[1])?.lin_comb(1.0, &u2, c[2])
            }
        }
    };
    Ok((build(&q)?, build(&p)?))
}

/// A factorised one-step map C ↦ lhs⁻¹·rhs·C, reusable across time steps.
#[derive(Debug, Clone)]
pub struct PpStepper {
    lhs: BandedMatrix,
    lu: BandedLu,
    rhs: BandedMatrix,
}

impl PpStepper {
    pub fn new(a: &BandedMatrix, cfg: &SchemeConfig, comp: f64) -> Result<Self> {
        cfg.validate()?;
        if cfg.compensated && !(comp >= 0.0 && comp.is_finite()) {
            return Err(Error::domain(format!("compensator must be nonnegative, got {comp}")));
        }
        let (beta, gamma) = cfg.generator(comp);
        Self::from_generator(a, beta, gamma, cfg.theta, cfg.pade)
    }

    pub fn from_generator(a: &BandedMatrix, beta: f64, gamma: f64, theta: f64, pade: PadeOrder) -> Result<Self> {
        let (lhs, rhs) = scheme_matrices(a, beta, gamma, theta, pade)?;
        let lu = lhs.lu()?;
        Ok(PpStepper { lhs, lu, rhs })
    }

    /// Crank-Nicolson for ∂τu = λ(u + α²𝒜⁻¹u) with 𝒜 = D² - α²I.
    pub fn basic_model(alpha: f64, lambda: f64, theta: f64, n: usize, h: f64) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::domain(format!("lambda must be nonnegative, got {lambda}")));
        }
        let a = build_basic_operator(alpha, n, h)?;
        Self::from_generator(&a, lambda * alpha * alpha, -lambda, theta, PadeOrder::Cn11)
    }

    pub fn lhs(&self) -> &BandedMatrix {
        &self.lhs
    }

    pub fn rhs(&self) -> &BandedMatrix {
        &self.rhs
    }

    pub fn step(&self, c: &[f64]) -> Result<PriceVector> {
        let mut out = self.rhs.matvec(c)?;
        self.lu.solve_in_place(&mut out)?;
        Ok(out)
    }

    /// `steps` successive steps, failing on the first non-finite value.
    pub fn march(&self, c0: &[f64], steps: usize) -> Result<PriceVector> {
        let mut c = c0.to_vec();
        let mut tmp = vec![0.0; c.len()];
        for k in 0..steps {
            self.rhs.matvec_into(&c, &mut tmp)?;
            self.lu.solve_in_place(&mut tmp)?;
            std::mem::swap(&mut c, &mut tmp);
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numerical {
                    module: "pp_stepper",
                    step: k + 1,
                    detail: format!("non-finite value at node {i}"),
                });
            }
        }
        Ok(c)
    }
}

fn single_step(a: &BandedMatrix, cfg: &SchemeConfig, expect: PadeOrder, comp: f64, c: &[f64]) -> Result<PriceVector> {
    if cfg.pade != expect {
        return Err(Error::config(format!(
            "scheme {} requested through the {} entry point",
            cfg.pade.name(),
            expect.name()
        )));
    }
    PpStepper::new(a, cfg, comp)?.step(c)
}

/// One Crank-Nicolson step; the compensator is ignored unless
/// `cfg.compensated` is set (see [`cn_step_compensated`]).
pub fn cn_step(a: &BandedMatrix, cfg: &SchemeConfig, c_k: &[f64]) -> Result<PriceVector> {
    single_step(a, &SchemeConfig { compensated: false, ..*cfg }, PadeOrder::Cn11, 0.0, c_k)
}

pub fn pade12_step(a: &BandedMatrix, cfg: &SchemeConfig, c_k: &[f64]) -> Result<PriceVector> {
    single_step(a, &SchemeConfig { compensated: false, ..*cfg }, PadeOrder::Pade12, 0.0, c_k)
}

pub fn pade22_step(a: &BandedMatrix, cfg: &SchemeConfig, c_k: &[f64]) -> Result<PriceVector> {
    single_step(a, &SchemeConfig { compensated: false, ..*cfg }, PadeOrder::Pade22, 0.0, c_k)
}

/// Crank-Nicolson step with the reaction term -comp·C.
pub fn cn_step_compensated(a: &BandedMatrix, cfg: &SchemeConfig, c_k: &[f64], comp: f64) -> Result<PriceVector> {
    if !cfg.compensated {
        return Err(Error::config("cn_step_compensated needs cfg.compensated = true"));
    }
    single_step(a, cfg, PadeOrder::Cn11, comp, c_k)
}

pub fn basic_model_step(alpha: f64, lambda: f64, theta: f64, h: f64, c_k: &[f64]) -> Result<PriceVector> {
    PpStepper::basic_model(alpha, lambda, theta, c_k.len(), h)?.step(c_k)
}
