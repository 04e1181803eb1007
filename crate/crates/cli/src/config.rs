//! Experiment configuration: strict TOML with `--set` overrides.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ppide_core::infvar_stepper::TimeOrder;
use ppide_core::pp_stepper::{DeltaWeight, PadeOrder};
use ppide_core::pricing::JumpEquation;
use ppide_core::vg_stepper::MInterpolation;
use ppide_core::{GtspParams, JumpSide, MarketConfig, OptionKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    FdVsFft,
    AlphaInterp,
    VgCase,
    InfvarNuStarSweep,
    InfvarMSweep,
    StabilitySweep,
    TestIntegral,
    BasicModel,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::FdVsFft => "fd_vs_fft",
            Experiment::AlphaInterp => "alpha_interp",
            Experiment::VgCase => "vg_case",
            Experiment::InfvarNuStarSweep => "infvar_nu_star_sweep",
            Experiment::InfvarMSweep => "infvar_m_sweep",
            Experiment::StabilitySweep => "stability_sweep",
            Experiment::TestIntegral => "test_integral",
            Experiment::BasicModel => "basic_model",
        }
    }

    /// α the experiment is defined at, if it pins one.
    pub fn required_alpha(self) -> Option<f64> {
        match self {
            Experiment::VgCase => Some(0.0),
            Experiment::InfvarNuStarSweep | Experiment::InfvarMSweep => Some(1.0),
            _ => None,
        }
    }

    fn default_alpha(self) -> f64 {
        match self {
            Experiment::AlphaInterp => -2.5,
            other => other.required_alpha().unwrap_or(-1.0),
        }
    }

    fn default_nu(self) -> f64 {
        match self.required_alpha() {
            Some(a) if a >= 1.0 => 1.5,
            _ => 1.0,
        }
    }

    /// Experiments that march a terminal condition in time.
    pub fn marches(self) -> bool {
        !matches!(self, Experiment::StabilitySweep | Experiment::TestIntegral)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Positive,
    Negative,
}

impl From<Side> for JumpSide {
    fn from(s: Side) -> Self {
        match s {
            Side::Positive => JumpSide::Positive,
            Side::Negative => JumpSide::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Put,
    Call,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pade {
    Cn11,
    Pade12,
    Pade22,
}

impl From<Pade> for PadeOrder {
    fn from(p: Pade) -> Self {
        match p {
            Pade::Cn11 => PadeOrder::Cn11,
            Pade::Pade12 => PadeOrder::Pade12,
            Pade::Pade22 => PadeOrder::Pade22,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Compensated,
    Plain,
}

impl From<Equation> for JumpEquation {
    fn from(e: Equation) -> Self {
        match e {
            Equation::Compensated => JumpEquation::Compensated,
            Equation::Plain => JumpEquation::Plain,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weight {
    Full,
    Half,
}

impl From<Weight> for DeltaWeight {
    fn from(w: Weight) -> Self {
        match w {
            Weight::Full => DeltaWeight::Full,
            Weight::Half => DeltaWeight::Half,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Order2,
    Order3,
}

impl From<Order> for TimeOrder {
    fn from(o: Order) -> Self {
        match o {
            Order::Order2 => TimeOrder::Order2,
            Order::Order3 => TimeOrder::Order3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interp {
    Quadratic,
    Cubic,
}

impl From<Interp> for MInterpolation {
    fn from(i: Interp) -> Self {
        match i {
            Interp::Quadratic => MInterpolation::Quadratic,
            Interp::Cubic => MInterpolation::Cubic,
        }
    }
}

/// Lévy measure. Unset λ, ν, α take experiment defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_minus: Option<f64>,
    pub v_r: f64,
    pub v_l: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            lambda_plus: None,
            lambda_minus: None,
            nu_plus: None,
            nu_minus: None,
            alpha_plus: None,
            alpha_minus: None,
            v_r: 1.0,
            v_l: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketSection {
    pub strike: f64,
    pub rate: f64,
    pub vol: f64,
    /// Years.
    pub maturity: f64,
    pub option_kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_time: Option<f64>,
}

impl Default for MarketSection {
    fn default() -> Self {
        MarketSection {
            strike: 100.0,
            rate: 0.01,
            vol: 0.1,
            maturity: 30.0 / 365.0,
            option_kind: Kind::Put,
            seed_time: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub s_min: f64,
    pub s_max: f64,
    pub n_fd: usize,
    pub n_time: usize,
    /// Half-width of the FFT window (-x*, x*).
    pub x_star: f64,
    pub n_fft: Vec<usize>,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            s_min: 1e-8,
            s_max: 500.0,
            n_fd: 256,
            n_time: 50,
            x_star: 20.0,
            n_fft: vec![256, 512, 1024, 2048, 4096],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub side: Side,
    pub pade: Pade,
    pub equation: Equation,
    pub weight: Weight,
    pub nu_star: f64,
    pub m_intervals: usize,
    pub time_order: Order,
    pub interpolation: Interp,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<i32>>,
}

impl Default for SchemeSection {
    fn default() -> Self {
        SchemeSection {
            side: Side::Positive,
            pade: Pade::Cn11,
            equation: Equation::Compensated,
            weight: Weight::Full,
            nu_star: 300.0,
            m_intervals: 80,
            time_order: Order::Order2,
            interpolation: Interp::Quadratic,
            anchors: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub nu_star_values: Vec<f64>,
    pub m_values: Vec<usize>,
    /// Simpson spacing held fixed across the ν* sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dnu: Option<f64>,
    pub h_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub alpha_values: Vec<i32>,
    pub nu_values: Vec<f64>,
    pub vg_powers: Vec<u32>,
    pub n_stability: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            nu_star_values: vec![100.0, 300.0, 600.0],
            m_values: vec![40, 80, 160],
            dnu: None,
            h_values: vec![0.05, 0.1, 0.5, 1.0, 2.0, 2.9, 3.1],
            theta_values: vec![1e-3, 1e-2, 1e-1],
            alpha_values: vec![-1, -2, -3],
            nu_values: vec![0.5, 1.0, 1.5, 4.0],
            vg_powers: vec![1, 2],
            n_stability: 64,
        }
    }
}

/// The model ∂τu = λ(u + α²𝒜⁻¹u) with 𝒜 = D² - α²I.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasicSection {
    pub alpha: f64,
    pub lambda: f64,
}

impl Default for BasicSection {
    fn default() -> Self {
        BasicSection { alpha: 1.0, lambda: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// File name inside the output directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub market: MarketSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub scheme: SchemeSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub basic: BasicSection,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path, sets: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, sets).with_context(|| format!("in config {}", path.display()))
    }

    /// Parses TOML, applies `key=value` overrides, then fills defaults.
    pub fn parse(text: &str, sets: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().context("malformed TOML")?;
        for s in sets {
            apply_override(&mut table, s)?;
        }
        let cfg: ExperimentConfig = table.try_into().context("invalid configuration")?;
        cfg.resolve()
    }

    /// Fills the experiment-dependent defaults and checks consistency.
    pub fn resolve(mut self) -> Result<Self> {
        let e = self.experiment;
        let m = &mut self.model;
        for lam in [&mut m.lambda_plus, &mut m.lambda_minus] {
            lam.get_or_insert(0.2);
        }
        for nu in [&mut m.nu_plus, &mut m.nu_minus] {
            nu.get_or_insert(e.default_nu());
        }
        for a in [&mut m.alpha_plus, &mut m.alpha_minus] {
            a.get_or_insert(e.default_alpha());
        }
        if let Some(req) = e.required_alpha() {
            let (name, a) = match self.scheme.side {
                Side::Positive => ("model.alpha_plus", m.alpha_plus),
                Side::Negative => ("model.alpha_minus", m.alpha_minus),
            };
            if a != Some(req) {
                bail!("{} is defined at alpha = {req}, but {name} = {}", e.name(), a.unwrap_or(f64::NAN));
            }
        }
        if self.market.seed_time.is_none() {
            self.market.seed_time = Some(self.market.maturity);
        }
        if e == Experiment::InfvarNuStarSweep && self.sweep.dnu.is_none() {
            // M = 30 intervals between ν and ν* = 5
            let nu = self.side_params_nu();
            if nu >= 5.0 {
                bail!("sweep.dnu must be set when nu >= 5");
            }
            self.sweep.dnu = Some((5.0 - nu) / 30.0);
        }
        if let Some(a) = &self.scheme.anchors {
            if a.len() != 4 {
                bail!("scheme.anchors needs exactly four integers, got {}", a.len());
            }
        }
        if let Some(p) = &self.output_path {
            let p = Path::new(p);
            if p.is_absolute() || p.components().count() != 1 {
                bail!("output_path must be a plain file name, got {}", p.display());
            }
        }
        self.params()?;
        self.market()?;
        Ok(self)
    }

    fn side_params_nu(&self) -> f64 {
        match self.scheme.side {
            Side::Positive => self.model.nu_plus,
            Side::Negative => self.model.nu_minus,
        }
        .unwrap_or(f64::NAN)
    }

    pub fn side(&self) -> JumpSide {
        self.scheme.side.into()
    }

    pub fn params(&self) -> Result<GtspParams> {
        let m = &self.model;
        let get = |v: Option<f64>, name: &str| v.with_context(|| format!("model.{name} unresolved"));
        Ok(GtspParams::new(
            get(m.lambda_plus, "lambda_plus")?,
            get(m.lambda_minus, "lambda_minus")?,
            get(m.nu_plus, "nu_plus")?,
            get(m.nu_minus, "nu_minus")?,
            get(m.alpha_plus, "alpha_plus")?,
            get(m.alpha_minus, "alpha_minus")?,
        )?
        .with_variances(m.v_r, m.v_l)?)
    }

    pub fn market(&self) -> Result<MarketConfig> {
        let s = &self.market;
        let kind = match s.option_kind {
            Kind::Put => OptionKind::Put,
            Kind::Call => OptionKind::Call,
        };
        let m = MarketConfig::new(s.strike, s.rate, s.vol, s.maturity, kind)?;
        Ok(match s.seed_time {
            Some(t) => m.with_seed_time(t)?,
            None => m,
        })
    }

    pub fn file_name(&self) -> String {
        self.output_path
            .clone()
            .unwrap_or_else(|| format!("{}.csv", self.experiment.name()))
    }

    /// Canonical TOML of the resolved configuration.
    pub fn canonical(&self) -> Result<String> {
        toml::to_string(self).context("serialising configuration")
    }
}

/// Sets a dotted key, e.g. `grid.n_time=0`. Values are read as TOML
/// literals, falling back to a bare string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .with_context(|| format!("override '{assignment}' is not key=value"))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("override '{assignment}' has an empty key segment");
    }
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let (last, parents) = path.split_last().expect("nonempty path");
    let mut cur = table;
    for p in parents {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .with_context(|| format!("override '{assignment}': '{p}' is not a section"))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
