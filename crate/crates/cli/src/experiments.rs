//! One function per experiment, each filling a [`Table`].

use anyhow::{bail, Context, Result};
use ppide_core::alpha_bridge::{price_real_alpha, AlphaQuery};
use ppide_core::fft_ref::{euler_march, test_integral_fft, ToeplitzKernel};
use ppide_core::grid::{extend_fft_domain, log_price_grid, symmetric_window};
use ppide_core::model::terminal_condition;
use ppide_core::pp_stepper::PpStepper;
use ppide_core::pricing::{compare_fd_fft, FdProblem, FftProblem, InfVarSettings, JumpEquation};
use ppide_core::stability::{pade_stability, vg_stability, RadiusMethod, StabilityReport};
use ppide_core::{Grid, PriceVector};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{flatten, num, sha256_hex, Table};

/// Runs the configured experiment and returns the CSV text.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<String> {
    let canonical = cfg.canonical()?;
    let mut table = if cfg.experiment.marches() && cfg.grid.n_time == 0 {
        terminal_only(cfg)?
    } else {
        match cfg.experiment {
            Experiment::FdVsFft | Experiment::VgCase => fd_vs_fft(cfg, false)?,
            Experiment::AlphaInterp => fd_vs_fft(cfg, true)?,
            Experiment::InfvarNuStarSweep => nu_star_sweep(cfg)?,
            Experiment::InfvarMSweep => m_sweep(cfg)?,
            Experiment::StabilitySweep => stability_sweep(cfg)?,
            Experiment::TestIntegral => test_integral(cfg)?,
            Experiment::BasicModel => basic_model(cfg)?,
        }
    };
    let parsed: toml::Table = canonical.parse().context("re-reading canonical configuration")?;
    let mut head = vec![
        ("experiment".to_string(), cfg.experiment.name().to_string()),
        ("config_sha256".to_string(), sha256_hex(&canonical)),
    ];
    head.extend(flatten(&parsed));
    table.prepend_meta(head);
    table.render()
}

fn fd_grid(cfg: &ExperimentConfig, n_time: usize) -> Result<Grid> {
    let g = &cfg.grid;
    Ok(log_price_grid(g.s_min, g.s_max, g.n_fd, cfg.market.maturity, n_time)?)
}

fn fd_problem(cfg: &ExperimentConfig, grid: Grid) -> Result<FdProblem> {
    let s = &cfg.scheme;
    let mut p = FdProblem::new(grid, cfg.params()?, cfg.market()?, cfg.side());
    p.equation = s.equation.into();
    p.pade = s.pade.into();
    p.weight = s.weight.into();
    p.vg_interpolation = s.interpolation.into();
    p.infvar = InfVarSettings {
        nu_star: s.nu_star,
        m_intervals: s.m_intervals,
        time_order: s.time_order.into(),
    };
    Ok(p)
}

fn side_alpha(cfg: &ExperimentConfig) -> Result<f64> {
    Ok(cfg.params()?.side(cfg.side()).alpha)
}

fn query(cfg: &ExperimentConfig, alpha: f64) -> Result<AlphaQuery> {
    Ok(match &cfg.scheme.anchors {
        Some(a) => AlphaQuery::with_anchors(alpha, [a[0], a[1], a[2], a[3]])?,
        None => AlphaQuery::new(alpha)?,
    })
}

fn terminal_only(cfg: &ExperimentConfig) -> Result<Table> {
    let g = fd_grid(cfg, 1)?;
    let c0 = terminal_condition(&g, &cfg.market()?)?;
    let mut t = Table::new(&["x", "c_terminal"]);
    t.meta("note", "n_time = 0: terminal condition only");
    for (x, c) in g.nodes().zip(&c0) {
        t.row(vec![num(x), num(*c)]);
    }
    Ok(t)
}

/// FFT reference at `alpha`. For 0 ≤ α < 1 the compensator λν^αΓ(-α) is
/// infinite and is replaced by the quadrature sum h·Σf_j of the same kernel.
fn fft_solution(cfg: &ExperimentConfig, window: &Grid, alpha: f64) -> Result<PriceVector> {
    let equation: JumpEquation = cfg.scheme.equation.into();
    if alpha < 0.0 || equation == JumpEquation::Plain {
        let mut p = FftProblem::new(window.clone(), cfg.params()?, cfg.market()?, cfg.side());
        p.equation = equation;
        return Ok(p.solve_alpha(alpha)?);
    }
    if alpha >= 1.0 {
        bail!("no FFT reference for alpha = {alpha}: the jump integral needs a drift correction there");
    }
    let s = cfg.params()?.side(cfg.side());
    let ext = extend_fft_domain(window)?;
    let kernel = ToeplitzKernel::one_sided(cfg.side(), s.lambda * s.sqrt_v, s.nu, alpha, ext.n_space, ext.h)?;
    let comp = ext.h * (kernel.ahead.iter().sum::<f64>() + kernel.behind.iter().sum::<f64>());
    let c0 = terminal_condition(&ext, &cfg.market()?)?;
    let c = euler_march(&kernel, ext.h, &c0, ext.theta, ext.n_time, true, comp)?;
    Ok(ext.restrict(&c)?.to_vec())
}

/// FD solution against the FFT reference for every configured N.
fn fd_vs_fft(cfg: &ExperimentConfig, with_anchors: bool) -> Result<Table> {
    let alpha = side_alpha(cfg)?;
    let grid = fd_grid(cfg, cfg.grid.n_time)?;
    let problem = fd_problem(cfg, grid.clone())?;
    let bridged = with_anchors || alpha.fract() != 0.0;
    let (fd, anchors, mode) = if bridged {
        let q = query(cfg, alpha)?;
        let sol = price_real_alpha(&q, &problem).context("FD solve via the alpha bridge")?;
        (sol.values, sol.anchors, Some(sol.mode))
    } else {
        (problem.solve().context("FD solve")?, Vec::new(), None)
    };

    let mut columns: Vec<String> = ["n_fft", "x", "c_fd", "c_fft", "diff"].map(String::from).to_vec();
    if with_anchors {
        columns.extend(anchors.iter().map(|a| format!("c_alpha_{}", a.alpha)));
    }
    let mut t = Table::with_columns(columns);
    t.meta("derived.h_fd", num(grid.h));
    t.meta("derived.theta", num(grid.theta));
    if let Some(mode) = mode {
        t.meta("derived.alpha_mode", mode.name());
        let list: Vec<String> = anchors.iter().map(|a| format!("{}:{}", a.alpha, a.scheme.name())).collect();
        t.meta("derived.anchors", list.join(" "));
    } else {
        t.meta("derived.scheme", problem.scheme_for(alpha as i32)?.name());
    }

    let runs = cfg
        .grid
        .n_fft
        .par_iter()
        .map(|&n| {
            let w = symmetric_window(cfg.grid.x_star, n, cfg.market.maturity, cfg.grid.n_time)?;
            let f = fft_solution(cfg, &w, alpha).with_context(|| format!("FFT solve at N = {n}"))?;
            let cmp = compare_fd_fft(&grid, &fd, &w, &f)?;
            Ok((n, w.h, cmp))
        })
        .collect::<Result<Vec<_>>>()?;

    let lo = grid.x_min;
    for (n, h, cmp) in runs {
        t.meta(format!("derived.h_fft_{n}"), num(h));
        t.meta(format!("derived.max_abs_diff_{n}"), num(cmp.max_abs_diff()));
        for ((x, (a, b)), d) in cmp.x.iter().zip(cmp.fd.iter().zip(&cmp.fft)).zip(cmp.diff()) {
            let mut row = vec![n.to_string(), num(*x), num(*a), num(*b), num(d)];
            if with_anchors {
                let i = ((x - lo) / grid.h).round() as usize;
                row.extend(anchors.iter().map(|s| num(s.values[i])));
            }
            t.row(row);
        }
    }
    Ok(t)
}

fn infvar_run(cfg: &ExperimentConfig, nu_star: f64, m_intervals: usize) -> Result<PriceVector> {
    let mut p = fd_problem(cfg, fd_grid(cfg, cfg.grid.n_time)?)?;
    p.infvar.nu_star = nu_star;
    p.infvar.m_intervals = m_intervals;
    p.solve()
        .with_context(|| format!("alpha = 1 solve at nu* = {nu_star}, M = {m_intervals}"))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn nu_star_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let nu = cfg.params()?.side(cfg.side()).nu;
    let dnu = cfg.sweep.dnu.context("sweep.dnu unresolved")?;
    let m_for = |nu_star: f64| {
        let k = ((nu_star - nu) / dnu).round().max(2.0) as usize;
        k + k % 2
    };
    let values = &cfg.sweep.nu_star_values;
    if values.len() < 2 {
        bail!("sweep.nu_star_values needs at least two entries");
    }
    let sols = values
        .par_iter()
        .map(|&v| infvar_run(cfg, v, m_for(v)))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["nu_star_from", "nu_star_to", "m_from", "m_to", "max_abs_diff"]);
    for i in 1..values.len() {
        let (a, b) = (values[i - 1], values[i]);
        t.row(vec![
            num(a),
            num(b),
            m_for(a).to_string(),
            m_for(b).to_string(),
            num(max_abs_diff(&sols[i - 1], &sols[i])),
        ]);
    }
    Ok(t)
}

fn m_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let values = &cfg.sweep.m_values;
    if values.len() < 2 {
        bail!("sweep.m_values needs at least two entries");
    }
    let nu_star = cfg.scheme.nu_star;
    let sols = values
        .par_iter()
        .map(|&m| infvar_run(cfg, nu_star, m))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["nu_star", "m_from", "m_to", "max_abs_diff"]);
    for i in 1..values.len() {
        t.row(vec![
            num(nu_star),
            values[i - 1].to_string(),
            values[i].to_string(),
            num(max_abs_diff(&sols[i - 1], &sols[i])),
        ]);
    }
    Ok(t)
}

fn method_name(m: RadiusMethod) -> &'static str {
    match m {
        RadiusMethod::DiagonalRatio => "diagonal_ratio",
        RadiusMethod::PowerIteration => "power_iteration",
        RadiusMethod::DenseEigen => "dense_eigen",
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "nan".into())
}

fn stability_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let sw = &cfg.sweep;
    let s = cfg.params()?.side(cfg.side());
    let n = sw.n_stability;
    let mut t = Table::new(&[
        "family",
        "scheme",
        "alpha",
        "nu",
        "h",
        "theta",
        "m",
        "zeta",
        "radius",
        "method",
        "norm_inf",
        "stable",
        "admissible",
        "condition",
    ]);
    let mut push = |family: &str, scheme: &str, alpha: f64, nu: f64, h: f64, theta: String, m: String, r: StabilityReport| {
        t.row(vec![
            family.into(),
            scheme.into(),
            num(alpha),
            num(nu),
            num(h),
            theta,
            m,
            num(r.zeta_analytic),
            opt(r.spectral_radius_measured),
            method_name(r.method).into(),
            opt(r.norm_inf),
            r.stable.to_string(),
            r.admissible.to_string(),
            r.condition,
        ]);
    };
    let pade: ppide_core::pp_stepper::PadeOrder = cfg.scheme.pade.into();
    for &a in &sw.alpha_values {
        for &h in &sw.h_values {
            for &theta in &sw.theta_values {
                let r = pade_stability(pade, s.sqrt_v, s.lambda, s.nu, a as f64, h, theta, n)
                    .with_context(|| format!("Padé stability at alpha = {a}, h = {h}, theta = {theta}"))?;
                push("pade", pade.name(), a as f64, s.nu, h, num(theta), String::new(), r);
            }
        }
    }
    for &nu in &sw.nu_values {
        for &h in &sw.h_values {
            for &m in &sw.vg_powers {
                let r = vg_stability(cfg.side(), nu, m, h, n)
                    .with_context(|| format!("alpha = 0 stability at nu = {nu}, h = {h}, m = {m}"))?;
                push("vg", "vg", 0.0, nu, h, String::new(), m.to_string(), r);
            }
        }
    }
    Ok(t)
}

fn test_integral(cfg: &ExperimentConfig) -> Result<Table> {
    let s = cfg.params()?.side(cfg.side());
    let runs = cfg
        .grid
        .n_fft
        .par_iter()
        .map(|&n| {
            let w = symmetric_window(cfg.grid.x_star, n, cfg.market.maturity, 1)?;
            let r = test_integral_fft(&w, s.nu, s.alpha).with_context(|| format!("test integral at N = {n}"))?;
            Ok((n, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["n", "x", "fft", "exact", "error"]);
    for (n, r) in runs {
        t.meta(format!("derived.max_error_{n}"), num(r.max_error_within(f64::INFINITY)));
        for (((x, f), e), err) in r.x.iter().zip(&r.fft).zip(&r.exact).zip(r.errors()) {
            t.row(vec![n.to_string(), num(*x), num(*f), num(*e), num(err)]);
        }
    }
    Ok(t)
}

fn basic_model(cfg: &ExperimentConfig) -> Result<Table> {
    let g = fd_grid(cfg, cfg.grid.n_time)?;
    let c0 = terminal_condition(&g, &cfg.market()?)?;
    let b = &cfg.basic;
    let stepper = PpStepper::basic_model(b.alpha, b.lambda, g.theta, g.n_space, g.h)?;
    let c = stepper.march(&c0, g.n_time)?;
    let mut t = Table::new(&["x", "c_initial", "c_fd"]);
    for ((x, a), b) in g.nodes().zip(&c0).zip(&c) {
        t.row(vec![num(x), num(*a), num(*b)]);
    }
    Ok(t)
}
