//! Pricing at real α by cubic Lagrange interpolation, in solution space,
//! between full solves at four integer anchors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interp::interpolate_vectors;
use crate::pricing::{FdProblem, SchemeKind};
use crate::PriceVector;

pub use crate::interp::cubic_lagrange;

/// Largest integer α any banded scheme handles.
pub const MAX_ANCHOR: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaQuery {
    pub alpha_real: f64,
    /// Sorted, distinct, each ≤ 1.
    pub anchor_alphas: [i32; 4],
}

impl AlphaQuery {
    pub fn new(alpha_real: f64) -> Result<Self> {
        Self::with_anchors(alpha_real, default_anchors(alpha_real)?)
    }

    pub fn with_anchors(alpha_real: f64, anchor_alphas: [i32; 4]) -> Result<Self> {
        if !alpha_real.is_finite() || alpha_real >= 2.0 {
            return Err(Error::domain(format!("alpha must be finite and < 2, got {alpha_real}")));
        }
        if anchor_alphas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "anchors must be sorted and distinct, got {anchor_alphas:?}"
            )));
        }
        if anchor_alphas[3] > MAX_ANCHOR {
            return Err(Error::config(format!(
                "anchor {} exceeds the largest solvable alpha {MAX_ANCHOR}",
                anchor_alphas[3]
            )));
        }
        Ok(AlphaQuery {
            alpha_real,
            anchor_alphas,
        })
    }

    pub fn mode(&self) -> InterpMode {
        let lo = self.anchor_alphas[0] as f64;
        let hi = self.anchor_alphas[3] as f64;
        if (lo..=hi).contains(&self.alpha_real) {
            InterpMode::Interpolation
        } else {
            InterpMode::Extrapolation
        }
    }
}

/// The four integers nearest α, kept at or below 0 for α ≤ 0 and at or
/// below 1 otherwise; α = 0 is therefore an anchor for -1 < α < 0.
pub fn default_anchors(alpha: f64) -> Result<[i32; 4]> {
    if !alpha.is_finite() || alpha >= 2.0 {
        return Err(Error::domain(format!("alpha must be finite and < 2, got {alpha}")));
    }
    let cap = if alpha <= 0.0 { 0 } else { MAX_ANCHOR };
    let first = (alpha.floor() as i32 - 1).min(cap - 3);
    Ok([first, first + 1, first + 2, first + 3])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpMode {
    Interpolation,
    Extrapolation,
}

impl InterpMode {
    pub fn name(self) -> &'static str {
        match self {
            InterpMode::Interpolation => "interpolation",
            InterpMode::Extrapolation => "extrapolation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSolution {
    pub alpha: i32,
    pub scheme: SchemeKind,
    pub values: PriceVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSolution {
    pub alpha_real: f64,
    pub values: PriceVector,
    pub mode: InterpMode,
    pub anchors: Vec<AnchorSolution>,
}

/// Solves the four anchors in parallel and interpolates pointwise.
pub fn price_real_alpha(q: &AlphaQuery, problem: &FdProblem) -> Result<AlphaSolution> {
    let anchors = q
        .anchor_alphas
        .par_iter()
        .map(|&a| {
            let wrap = |e: Error| Error::Anchor {
                alpha: a,
                source: Box::new(e),
            };
            let scheme = problem.scheme_for(a).map_err(wrap)?;
            let values = problem.solve_integer_alpha(a).map_err(wrap)?;
            Ok(AnchorSolution {
                alpha: a,
                scheme,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let nodes: Vec<f64> = anchors.iter().map(|s| s.alpha as f64).collect();
    let vectors: Vec<&[f64]> = anchors.iter().map(|s| s.values.as_slice()).collect();
    let values = match anchors.iter().find(|s| s.alpha as f64 == q.alpha_real) {
        Some(s) => s.values.clone(),
        None => interpolate_vectors(&nodes, &vectors, q.alpha_real)?,
    };
    Ok(AlphaSolution {
        alpha_real: q.alpha_real,
        values,
        mode: q.mode(),
        anchors,
    })
}
