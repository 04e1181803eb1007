//! Reference solver: rectangle-rule quadrature of the jump integral,
//! evaluated as a Toeplitz matrix-vector product through circulant FFT
//! embedding, with explicit Euler time stepping.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{extend_fft_domain, Grid};
use crate::model::{kernel_sample, JumpSide};
use crate::special::gamma;
use crate::PriceVector;

/// Toeplitz kernel T_{ik} = f_{k-i} of the quadrature h·Σ_j C_{i+j} f_j.
///
/// `ahead[j] = f_j` for j ≥ 0 and `behind[j] = f_{-j}` for j ≥ 1
/// (`behind[0]` is unused and kept zero).
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzKernel {
    pub ahead: Vec<f64>,
    pub behind: Vec<f64>,
    /// Value assigned at j = 0.
    pub origin: f64,
}

impl ToeplitzKernel {
    /// Samples f_j = λ e^{-ν|x_j|}/|x_j|^{1+α} on one side of the origin.
    pub fn one_sided(side: JumpSide, lambda: f64, nu: f64, alpha: f64, n: usize, h: f64) -> Result<Self> {
        if !(lambda >= 0.0 && nu > 0.0 && alpha < 2.0 && h > 0.0) {
            return Err(Error::domain("kernel needs lambda >= 0, nu > 0, alpha < 2, h > 0"));
        }
        let samples: Vec<f64> = (0..n).map(|j| kernel_sample(j as f64 * h, lambda, nu, alpha)).collect();
        let origin = samples[0];
        let zeros = vec![0.0; n];
        Ok(match side {
            JumpSide::Positive => ToeplitzKernel {
                ahead: samples,
                behind: zeros,
                origin,
            },
            JumpSide::Negative => {
                let mut ahead = zeros;
                ahead[0] = origin;
                let mut behind = samples;
                behind[0] = 0.0;
                ToeplitzKernel { ahead, behind, origin }
            }
        })
    }

    /// Kernel whose quadrature returns its input: f_0 = 1/h, all else zero.
    pub fn delta(n: usize, h: f64) -> Self {
        let mut ahead = vec![0.0; n];
        ahead[0] = 1.0 / h;
        ToeplitzKernel {
            ahead,
            behind: vec![0.0; n],
            origin: 1.0 / h,
        }
    }

    pub fn n(&self) -> usize {
        self.ahead.len()
    }

    /// First row of the 2N circulant: (f_0, …, f_{N-1}, 0, f_{1-N}, …, f_{-1}).
    pub fn circulant_first_row(&self) -> Vec<f64> {
        let n = self.n();
        let mut row = self.ahead.clone();
        row.push(0.0);
        row.extend((1..n).rev().map(|j| self.behind[j]));
        row
    }

    /// First column of the same circulant, the vector actually convolved.
    pub fn circulant_first_column(&self) -> Vec<f64> {
        let n = self.n();
        let mut col: Vec<f64> = (0..n).map(|j| if j == 0 { self.ahead[0] } else { self.behind[j] }).collect();
        col.push(0.0);
        col.extend((1..n).rev().map(|j| self.ahead[j]));
        col
    }

    pub fn prepare(&self, h: f64) -> FftConvolver {
        FftConvolver::new(self, h)
    }
}

/// Precomputed transform of a kernel for repeated quadratures.
#[derive(Clone)]
pub struct FftConvolver {
    n: usize,
    h: f64,
    kernel_hat: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftConvolver").field("n", &self.n).field("h", &self.h).finish()
    }
}

impl FftConvolver {
    fn new(k: &ToeplitzKernel, h: f64) -> Self {
        let n = k.n();
        let size = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut kernel_hat: Vec<Complex64> = k
            .circulant_first_column()
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect();
        forward.process(&mut kernel_hat);
        FftConvolver {
            n,
            h,
            kernel_hat,
            forward,
            inverse,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// h·T·c.
    pub fn apply(&self, c: &[f64]) -> Result<PriceVector> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: c.len(),
            });
        }
        let size = 2 * self.n;
        let mut buf: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        buf.resize(size, Complex64::new(0.0, 0.0));
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let s = self.h / size as f64;
        Ok(buf[..self.n].iter().map(|z| z.re * s).collect())
    }
}

/// h·Σ_j C_{i+j} f_j for every node i, via FFT.
pub fn fft_jump_integral(kernel: &ToeplitzKernel, c: &[f64], h: f64) -> Result<PriceVector> {
    kernel.prepare(h).apply(c)
}

/// The same sum evaluated directly in O(N²).
pub fn direct_jump_integral(kernel: &ToeplitzKernel, c: &[f64], h: f64) -> Result<PriceVector> {
    let n = kernel.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: c.len() });
    }
    Ok((0..n)
        .map(|i| {
            let up: f64 = (0..n - i).map(|j| kernel.ahead[j] * c[i + j]).sum();
            let down: f64 = (1..=i).map(|j| kernel.behind[j] * c[i - j]).sum();
            h * (up + down)
        })
        .collect())
}

/// Explicit Euler: C^{k+1} = C^k + θ·(h·T·C^k - comp·C^k), with the
/// reaction term only when `compensated`.
pub fn euler_march(
    kernel: &ToeplitzKernel,
    h: f64,
    c0: &[f64],
    theta: f64,
    n_time: usize,
    compensated: bool,
    comp_value: f64,
) -> Result<PriceVector> {
    let conv = kernel.prepare(h);
    let comp = if compensated { comp_value } else { 0.0 };
    let mut c = c0.to_vec();
    for k in 0..n_time {
        let jump = conv.apply(&c)?;
        for (ci, ji) in c.iter_mut().zip(&jump) {
            *ci += theta * (ji - comp * *ci);
        }
        if let Some(i) = c.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical {
                module: "fft_ref",
                step: k + 1,
                detail: format!("non-finite value at node {i}"),
            });
        }
    }
    Ok(c)
}

/// ∫₀^∞ (x + y) e^{-νy} y^{-(1+α)} dy = (xν - α) ν^{α-1} Γ(-α).
pub fn test_integral_exact(x: f64, nu: f64, alpha: f64) -> Result<f64> {
    if !(alpha < 0.0) {
        return Err(Error::domain(format!("test integral needs alpha < 0, got {alpha}")));
    }
    if !(nu > 0.0) {
        return Err(Error::domain(format!("test integral needs nu > 0, got {nu}")));
    }
    Ok((x * nu - alpha) * nu.powf(alpha - 1.0) * gamma(-alpha))
}

/// FFT quadrature of the test integral against its closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct TestIntegral {
    pub x: Vec<f64>,
    pub fft: Vec<f64>,
    pub exact: Vec<f64>,
}

impl TestIntegral {
    pub fn errors(&self) -> Vec<f64> {
        self.fft.iter().zip(&self.exact).map(|(a, b)| a - b).collect()
    }

    /// Largest absolute error over nodes with |x| ≤ `radius`.
    pub fn max_error_within(&self, radius: f64) -> f64 {
        self.x
            .iter()
            .zip(self.errors())
            .filter(|(x, _)| x.abs() <= radius)
            .fold(0.0, |m, (_, e)| m.max(e.abs()))
    }
}

/// Evaluates C(x) = x against the unit-intensity positive-jump kernel on the
/// padded version of `window` and reports the window nodes.
pub fn test_integral_fft(window: &Grid, nu: f64, alpha: f64) -> Result<TestIntegral> {
    let ext = extend_fft_domain(window)?;
    let kernel = ToeplitzKernel::one_sided(JumpSide::Positive, 1.0, nu, alpha, ext.n_space, ext.h)?;
    let c: Vec<f64> = ext.nodes().collect();
    let full = fft_jump_integral(&kernel, &c, ext.h)?;
    let fft = ext.restrict(&full)?.to_vec();
    let x = ext.window_nodes();
    let exact = x.iter().map(|&xi| test_integral_exact(xi, nu, alpha)).collect::<Result<_>>()?;
    Ok(TestIntegral { x, fft, exact })
}
