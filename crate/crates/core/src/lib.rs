//! Solvers for the jump-integral step of option pricing PIDEs under
//! tempered-stable (GTSP / KoBoL / CGMY) Lévy measures.
//!
//! The jump integral is replaced by a pseudo-parabolic equation whose spatial
//! operator is a power of a one-sided first-derivative stencil, so every time
//! step reduces to a banded (mostly triangular) linear solve. Real damping
//! exponents are handled by interpolating in `alpha` between integer-exponent
//! solutions, and an FFT convolution solver serves as the reference.
//!
//! Module map:
//!
//! * [`model`]: Lévy measure parameters, market data, terminal condition.
//! * [`grid`]: uniform log-price / time grids and the padded FFT window.
//! * [`banded`]: banded storage, products and LU solves.
//! * [`operators`]: one-sided stencils and the Green's-function operators.
//! * [`pp_stepper`]: Padé time steppers for integer `alpha <= -1`.
//! * [`vg_stepper`]: the `alpha = 0` fractional-power scheme.
//! * [`infvar_stepper`]: the `alpha = 1` quadrature-splitting scheme.
//! * [`alpha_bridge`]: real-`alpha` pricing by cubic interpolation.
//! * [`fft_ref`]: circulant-FFT quadrature reference solver.
//! * [`stability`]: eigenvalue formulas and spectral-radius measurement.
//! * [`pricing`]: full time marches tying the pieces together.

pub mod alpha_bridge;
pub mod banded;
pub mod error;
pub mod fft_ref;
pub mod grid;
pub mod infvar_stepper;
pub mod interp;
pub mod model;
pub mod operators;
pub mod pp_stepper;
pub mod pricing;
pub mod special;
pub mod stability;
pub mod vg_stepper;

pub use banded::BandedMatrix;
pub use error::{Error, Result};
pub use grid::Grid;
pub use model::{GtspParams, JumpSide, MarketConfig, OptionKind};

/// Option values on the grid at one time level.
pub type PriceVector = Vec<f64>;
