//! Double-exponential quadrature for one-sided Fourier transforms
//! `int_0^inf mu(y) e^{-i zeta y} dy`.
//!
//! Substituting `y = P phi(t)` with `P = pi / (zeta0 h)` and subtracting a
//! companion integral that is negligible on `(0, 2 zeta0)` leaves an
//! integrand whose weight `sin(pi phi_hat / 2h) phi'` decays double
//! exponentially at both ends. A midpoint rule with step `h` then gives
//!
//! ```text
//! int_0^inf mu(y) e^{-i zeta y} dy ~ sum_j Phi_j e^{-i zeta y_j},  j = -M_-..M_+-1
//! ```
//!
//! with source weights `Phi_j` and nodes `y_j = P phi(j h)` built here; the
//! sum itself is evaluated for many `zeta` at once by [`crate::nufft`].

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_BETA: f64 = 0.25;

/// Tuned constants of one DE quadrature run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeFtParams {
    pub zeta0: f64,
    pub h: f64,
    pub m_minus: usize,
    pub m_plus: usize,
    pub beta: f64,
    pub alpha: f64,
}

impl DeFtParams {
    pub fn new(zeta0: f64, h: f64, m_minus: usize, m_plus: usize) -> Result<Self> {
        if !(zeta0 > 0.0 && zeta0.is_finite()) {
            return Err(Error::InvalidParameter(format!("zeta0 must be > 0, got {zeta0}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("DE step h must be > 0, got {h}")));
        }
        if m_minus == 0 || m_plus == 0 {
            return Err(Error::InvalidParameter(
                "truncation indices M-, M+ must be positive".into(),
            ));
        }
        let m = m_minus + m_plus;
        if !m.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len: m });
        }
        Ok(DeFtParams {
            zeta0,
            h,
            m_minus,
            m_plus,
            beta: DEFAULT_BETA,
            alpha: alpha_for(zeta0, h, DEFAULT_BETA),
        })
    }

    /// Standard setting for `M` nodes: `h = log(1000 M) / M`, `M- = M+ = M/2`.
    pub fn for_nodes(zeta0: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 nodes, got {m}")));
        }
        Self::new(zeta0, default_step(m), m / 2, m - m / 2)
    }

    pub fn m(&self) -> usize {
        self.m_minus + self.m_plus
    }

    /// Scale `P = pi / (zeta0 h)` mapping `phi` onto the `y` axis.
    pub fn scale(&self) -> f64 {
        PI / (self.zeta0 * self.h)
    }

    pub fn transform(&self) -> Phi {
        Phi {
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    pub fn j_range(&self) -> RangeInclusive<i64> {
        -(self.m_minus as i64)..=(self.m_plus as i64 - 1)
    }
}

/// `alpha = beta / sqrt(1 + log(1 + pi/(zeta0 h)) / (4 zeta0 h))`.
pub fn alpha_for(zeta0: f64, h: f64, beta: f64) -> f64 {
    let zh = zeta0 * h;
    beta / (1.0 + (1.0 + PI / zh).ln() / (4.0 * zh)).sqrt()
}

/// DE step used for `M` nodes.
pub fn default_step(m: usize) -> f64 {
    (1e3 * m as f64).ln() / m as f64
}

/// Value, derivative and `phi(t) - t` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPoint {
    pub value: f64,
    pub derivative: f64,
    pub hat: f64,
}

/// `phi(t) = t / (1 - exp(-2t - alpha (1 - e^{-t}) - beta (e^t - 1)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi {
    pub alpha: f64,
    pub beta: f64,
}

impl Phi {
    fn exponent(&self, t: f64) -> f64 {
        2.0 * t - self.alpha * (-t).exp_m1() + self.beta * t.exp_m1()
    }

    fn exponent_slope(&self, t: f64) -> f64 {
        2.0 + self.alpha * (-t).exp() + self.beta * t.exp()
    }

    pub fn eval(&self, t: f64) -> PhiPoint {
        let c = 2.0 + self.alpha + self.beta;
        if t == 0.0 {
            let value = 1.0 / c;
            return PhiPoint {
                value,
                derivative: 0.5 - (self.beta - self.alpha) / (2.0 * c * c),
                hat: value,
            };
        }
        let u = self.exponent(t);
        let du = self.exponent_slope(t);
        if u > 0.0 {
            let em = (-u).exp();
            let denom = -(-u).exp_m1();
            PhiPoint {
                value: t / denom,
                derivative: 1.0 / denom - t * du * em / (denom * denom),
                hat: t * em / denom,
            }
        } else {
            // Written in s = e^u so that t -> -inf underflows to 0 instead of NaN.
            let s = u.exp();
            let sm1 = u.exp_m1();
            let value = t * s / sm1;
            let derivative = if s == 0.0 {
                0.0
            } else {
                s / sm1 - t * du * s / (sm1 * sm1)
            };
            PhiPoint {
                value,
                derivative,
                hat: value - t,
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).value
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.eval(t).derivative
    }

    pub fn hat(&self, t: f64) -> f64 {
        self.eval(t).hat
    }
}

/// `phi(t)` for the given `alpha`, `beta`.
pub fn phi(t: f64, alpha: f64, beta: f64) -> f64 {
    Phi { alpha, beta }.value(t)
}

/// Source weights and nodes of the DE sum.
#[derive(Debug, Clone)]
pub struct DeSources {
    /// `Phi[mu]_j` for `j = -M_-..M_+-1`.
    pub weights: Vec<Complex64>,
    /// `y_j = P phi(j h)`, nondecreasing (strictly so until `phi` underflows).
    pub points: Vec<f64>,
    pub params: DeFtParams,
}

impl DeSources {
    pub fn first_j(&self) -> i64 {
        -(self.params.m_minus as i64)
    }

    /// Direct `O(M)` evaluation of the DE sum at one frequency.
    pub fn evaluate(&self, zeta: f64) -> Complex64 {
        self.weights
            .iter()
            .zip(&self.points)
            .map(|(&w, &y)| w * Complex64::from_polar(1.0, -zeta * y))
            .sum()
    }
}

/// Builds `Phi[mu]_j = -(2 pi i / zeta0) mu(y_j) sin(theta_j) phi'(j h) e^{i theta_j}`
/// with `theta_j = pi phi_hat(j h) / (2h)`.
pub fn build_sources(mu: &dyn Fn(f64) -> f64, params: &DeFtParams) -> Result<DeSources> {
    let transform = params.transform();
    let scale = params.scale();
    let prefactor = 2.0 * PI / params.zeta0;
    let m = params.m();
    let mut weights = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    for j in params.j_range() {
        let t = j as f64 * params.h;
        let p = transform.eval(t);
        let y = scale * p.value;
        let density = mu(y);
        if !density.is_finite() {
            return Err(Error::NonFiniteDensity {
                index: j,
                at: y,
                value: density,
            });
        }
        let theta = PI * p.hat / (2.0 * params.h);
        let (sin, cos) = theta.sin_cos();
        // -i e^{i theta} sin(theta) = sin(theta) (sin(theta) - i cos(theta))
        let amp = prefactor * density * p.derivative * sin;
        weights.push(Complex64::new(amp * sin, -amp * cos));
        points.push(y);
    }
    Ok(DeSources {
        weights,
        points,
        params: *params,
    })
}

/// One DE run of the two-`zeta0` splice together with the `k` range it serves.
#[derive(Debug, Clone, PartialEq)]
pub struct SpliceRun {
    pub params: DeFtParams,
    pub k_range: RangeInclusive<i64>,
}

/// Divisors of `N_gamma h~` giving `zeta0` for the low- and high-frequency runs.
pub const SPLICE_LOW_DIVISOR: f64 = 15.0;
pub const SPLICE_HIGH_DIVISOR: f64 = 1.8;

/// Two DE runs covering `k = 0..=n_gamma`: a small `zeta0 = N_gamma h~ / 15` for
/// `k <= floor(N_gamma / 8)` and a large `zeta0 = N_gamma h~ / 1.8` for the rest.
/// Both use `M = 2 N_gamma` nodes with the standard step.
pub fn splice_plan(n_gamma: usize, h_tilde: f64) -> Result<[SpliceRun; 2]> {
    if n_gamma < 8 {
        return Err(Error::InvalidParameter(format!(
            "splice plan needs n_gamma >= 8, got {n_gamma}"
        )));
    }
    if !(h_tilde > 0.0 && h_tilde.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "grid spacing must be > 0, got {h_tilde}"
        )));
    }
    let m = 2 * n_gamma;
    let width = n_gamma as f64 * h_tilde;
    let seam = (n_gamma / 8) as i64;
    let low = DeFtParams::for_nodes(width / SPLICE_LOW_DIVISOR, m)?;
    let high = DeFtParams::for_nodes(width / SPLICE_HIGH_DIVISOR, m)?;
    Ok([
        SpliceRun {
            params: low,
            k_range: 0..=seam,
        },
        SpliceRun {
            params: high,
            k_range: seam + 1..=n_gamma as i64,
        },
    ])
}
