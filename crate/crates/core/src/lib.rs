//! Density of symmetric scalar Lévy processes started at the origin, computed
//! by a three-stage Fourier pipeline:
//!
//! 1. the one-sided Fourier transform of the radial jump density `mu`, by a
//!    double-exponential quadrature evaluated with a Gaussian-gridding NUFFT
//!    ([`de_ft`], [`nufft`]);
//! 2. one or two indefinite integrations of that transform on an equispaced
//!    grid with a sinc-Gauss formula and FFT convolution ([`sinc_gauss`]),
//!    producing the characteristic exponent;
//! 3. the inverse Fourier transform of `exp(t * exponent)` with an erfc
//!    (continuous Euler) weight, evaluated by fractional FFT ([`euler_ft`]).
//!
//! [`solver`] wires the stages together and carries the VG and NIG models
//! with their closed-form densities.

pub mod de_ft;
pub mod error;
pub mod euler_ft;
pub mod nufft;
pub mod numkit;
pub mod oracle;
pub mod sinc_gauss;
pub mod solver;

pub use error::{Error, Result, Stage};
pub use numkit::{ComplexSeries, RealSeries};
