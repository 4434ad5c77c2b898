//! Numerical laboratory for KdV-type equations with dissipative perturbations
//!
//! ```text
//! v_t + v_xxx + ηLv + (v²)_x = 0        (derivative equation)
//! u_t + u_xxx + ηLu + (u_x)² = 0        (gradient equation)
//! ```
//!
//! where `L` acts in Fourier space as `−Φ(ξ)` with `Φ(ξ) = −|ξ|^p + Φ₁(ξ)`.
//!
//! - [`symbol`]: the symbol Φ, its high-frequency threshold and upper bound.
//! - [`field`]: frequency grids, spectral fields, convolution, Sobolev norms.
//! - [`semigroup`]: the linear propagator `V(t)` and its smoothing estimates.
//! - [`wellposed`]: weighted norms, Duhamel integrals, the Picard solver and an
//!   independent exponential integrator.
//! - [`illposed`]: frequency-box data, the closed-form second iterate and
//!   norm-inflation sweeps.

// `!(x > y)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod illposed;
pub mod io;
pub mod quadrature;
pub mod semigroup;
pub mod symbol;
pub mod wellposed;

pub use error::{Error, Result};
pub use field::{convolve, ConvolutionMethod, FrequencyGrid, SpectralField, Trajectory};
pub use illposed::{CounterexampleParams, SweepResult};
pub use num_complex::Complex64;
pub use quadrature::QuadConfig;
pub use semigroup::{apply_semigroup, KernelWeight, SmoothingReport};
pub use symbol::{SymbolSpec, Term};
pub use wellposed::{ContractionReport, NormVariant, Nonlinearity, WeightedNormParams};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
