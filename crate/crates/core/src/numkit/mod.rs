//! Numerical foundation: special functions, radix-2 FFT, fractional FFT and
//! the indexed series type passed between pipeline stages.

pub mod fft;
pub mod frft;
pub mod series;
pub mod special;

pub use fft::{fft, Direction, FftPlan};
pub use frft::{frft, FrftPlan};
pub use series::{ComplexSeries, RealSeries, Series};
pub use special::{bessel_k, erf, erfc, gamma, sinc};
