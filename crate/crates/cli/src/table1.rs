//! Grid-step table for the FD log domain and the FFT windows.

use anyhow::Result;
use ppide_core::grid::{log_price_grid, symmetric_window};

use crate::output::{num, Table};

/// `v` rounded to `sig` significant figures, in plain decimal notation.
pub fn format_sig(v: f64, sig: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let mag = v.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

/// One row per grid: FD on [log 1e-8, log 500] with N = 256, then the FFT
/// windows on (-20, 20) with N = 256..4096.
pub fn table1() -> Result<String> {
    let mut t = Table::new(&["grid", "n", "x_min", "x_max", "h", "h_3sf"]);
    t.meta("table", "grid steps");
    let maturity = 30.0 / 365.0;
    let fd = log_price_grid(1e-8, 500.0, 256, maturity, 1)?;
    let mut grids = vec![("fd", fd)];
    for n in [256usize, 512, 1024, 2048, 4096] {
        grids.push(("fft", symmetric_window(20.0, n, maturity, 1)?));
    }
    for (name, g) in grids {
        t.row(vec![
            name.into(),
            g.n_space.to_string(),
            num(g.x_min),
            num(g.x_max),
            num(g.h),
            format_sig(g.h, 3),
        ]);
    }
    t.render()
}
