//! Uniform log-price and time grids.

use crate::error::{Error, Result};

/// Sub-range of an extended grid on which results are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub offset: usize,
    pub len: usize,
}

/// Uniform grid with `n_space` nodes x_i = x_min + i·h, h = (x_max - x_min)/n_space,
/// and `n_time` steps of size θ = T/n_time.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_space: usize,
    pub h: f64,
    pub n_time: usize,
    pub theta: f64,
    pub maturity: f64,
    /// Set on grids produced by [`extend_fft_domain`].
    pub window: Option<Window>,
}

impl Grid {
    /// Node `i`, computed with a single rounding.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (i as f64).mul_add(self.h, self.x_min)
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_space).map(move |i| self.x(i))
    }

    /// Nodes of the reporting window, or all nodes when there is none.
    pub fn window_nodes(&self) -> Vec<f64> {
        let w = self.window_or_all();
        (w.offset..w.offset + w.len).map(|i| self.x(i)).collect()
    }

    pub fn window_or_all(&self) -> Window {
        self.window.unwrap_or(Window {
            offset: 0,
            len: self.n_space,
        })
    }

    /// Restricts a full-grid vector to the reporting window.
    pub fn restrict<'a>(&self, values: &'a [f64]) -> Result<&'a [f64]> {
        if values.len() != self.n_space {
            return Err(Error::DimensionMismatch {
                expected: self.n_space,
                got: values.len(),
            });
        }
        let w = self.window_or_all();
        Ok(&values[w.offset..w.offset + w.len])
    }

    /// Same spatial grid with a different time discretisation.
    pub fn with_time(&self, maturity: f64, n_time: usize) -> Result<Grid> {
        check_time(maturity, n_time)?;
        Ok(Grid {
            n_time,
            maturity,
            theta: maturity / n_time as f64,
            ..self.clone()
        })
    }
}

fn check_time(maturity: f64, n_time: usize) -> Result<()> {
    if n_time < 1 {
        return Err(Error::config("n_time must be at least 1"));
    }
    if !(maturity > 0.0 && maturity.is_finite()) {
        return Err(Error::config(format!("maturity must be positive, got {maturity}")));
    }
    Ok(())
}

pub fn build_grid(x_min: f64, x_max: f64, n_space: usize, maturity: f64, n_time: usize) -> Result<Grid> {
    if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
        return Err(Error::config(format!("need x_min < x_max, got [{x_min}, {x_max}]")));
    }
    if n_space < 4 {
        return Err(Error::config(format!("n_space must be at least 4, got {n_space}")));
    }
    check_time(maturity, n_time)?;
    Ok(Grid {
        x_min,
        x_max,
        n_space,
        h: (x_max - x_min) / n_space as f64,
        n_time,
        theta: maturity / n_time as f64,
        maturity,
        window: None,
    })
}

/// Log-price grid over [log s_min, log s_max].
pub fn log_price_grid(s_min: f64, s_max: f64, n_space: usize, maturity: f64, n_time: usize) -> Result<Grid> {
    if !(s_min > 0.0 && s_max > s_min) {
        return Err(Error::config(format!("need 0 < s_min < s_max, got {s_min}, {s_max}")));
    }
    build_grid(s_min.ln(), s_max.ln(), n_space, maturity, n_time)
}

/// Symmetric window (-x*, x*) with step 2x*/N.
pub fn symmetric_window(x_star: f64, n_space: usize, maturity: f64, n_time: usize) -> Result<Grid> {
    build_grid(-x_star, x_star, n_space, maturity, n_time)
}

/// Pads N/2 nodes on each side of the window (N/2 - 1 left, N/2 + 1 right in
/// units of h), doubling the node count and keeping h unchanged. The original
/// nodes are recorded as the reporting window.
pub fn extend_fft_domain(g: &Grid) -> Result<Grid> {
    if g.window.is_some() {
        return Err(Error::config("grid is already extended"));
    }
    if !g.n_space.is_multiple_of(2) {
        return Err(Error::config(format!("FFT extension needs even N, got {}", g.n_space)));
    }
    let half = g.n_space / 2;
    let x_min = g.x_min - g.h * (half - 1) as f64;
    let n_space = 2 * g.n_space;
    Ok(Grid {
        x_min,
        x_max: x_min + g.h * n_space as f64,
        n_space,
        h: g.h,
        window: Some(Window {
            offset: half - 1,
            len: g.n_space,
        }),
        ..g.clone()
    })
}
