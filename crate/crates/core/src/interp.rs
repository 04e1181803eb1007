//! Lagrange interpolation in a scalar parameter and on uniform grids.

use crate::error::{Error, Result};

/// Lagrange basis weights ℓ_k(target) for distinct abscissae.
pub fn lagrange_weights(nodes: &[f64], target: f64) -> Result<Vec<f64>> {
    if nodes.is_empty() {
        return Err(Error::config("interpolation needs at least one node"));
    }
    for (i, a) in nodes.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::domain(format!("non-finite interpolation node {a}")));
        }
        if nodes[..i].contains(a) {
            return Err(Error::domain(format!("duplicate interpolation node {a}")));
        }
    }
    Ok(nodes
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &xj)| (target - xj) / (xk - xj))
                .product()
        })
        .collect())
}

/// Cubic through four (abscissa, value) pairs, evaluated at `target`.
pub fn cubic_lagrange(points: &[(f64, f64); 4], target: f64) -> Result<f64> {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let w = lagrange_weights(&xs, target)?;
    Ok(w.iter().zip(points).map(|(wk, p)| wk * p.1).sum())
}

/// Pointwise interpolation of equally long vectors sampled at `nodes`.
pub fn interpolate_vectors(nodes: &[f64], vectors: &[&[f64]], target: f64) -> Result<Vec<f64>> {
    if nodes.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: nodes.len(),
            got: vectors.len(),
        });
    }
    let n = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    let w = lagrange_weights(nodes, target)?;
    let mut out = vec![0.0; n];
    for (wk, v) in w.iter().zip(vectors) {
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += wk * x;
        }
    }
    Ok(out)
}

/// Cubic interpolation of values on the uniform grid x_i = x0 + i·h at the
/// points `xs`, using the four nodes around each point (shifted inward at
/// the ends). Points outside the grid are rejected.
pub fn uniform_cubic(x0: f64, h: f64, values: &[f64], xs: &[f64]) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 4 {
        return Err(Error::config("uniform cubic interpolation needs four nodes"));
    }
    let last = x0 + (n - 1) as f64 * h;
    xs.iter()
        .map(|&x| {
            let tol = 1e-12 * h;
            if x < x0 - tol || x > last + tol {
                return Err(Error::domain(format!(
                    "point {x} outside interpolation range [{x0}, {last}]"
                )));
            }
            let s = (x - x0) / h;
            let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
            let t = s - base as f64;
            let pts = [
                (0.0, values[base]),
                (1.0, values[base + 1]),
                (2.0, values[base + 2]),
                (3.0, values[base + 3]),
            ];
            cubic_lagrange(&pts, t)
        })
        .collect()
}
