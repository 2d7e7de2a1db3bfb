//! Inverse Fourier transform `(1/2pi) int f(w) e^{ixw} dw` by the trapezoidal
//! rule with the smooth cutoff `w(xi) = erfc(xi/p - q) / 2` (continuous Euler
//! transform). The output grid `x = n h^` is decoupled from `2pi/(N h~)`, so the
//! sum runs through a fractional FFT.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{erfc, ComplexSeries, FrftPlan, RealSeries};

/// Growth of `exp(t g)` above 1 tolerated before a warning is logged.
pub const GROWTH_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerParams {
    pub n: usize,
    pub h_tilde: f64,
    pub p: f64,
    pub q: f64,
    pub x_l: f64,
    pub x_u: f64,
    pub d: f64,
}

impl EulerParams {
    /// Step and cutoff tuned for accuracy on `x_l <= |x| <= x_u`.
    pub fn new(n: usize, x_l: f64, x_u: f64, d: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("N must be positive".into()));
        }
        if !(x_l > 0.0 && x_l < x_u && x_u.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < x_l < x_u, got x_l = {x_l}, x_u = {x_u}"
            )));
        }
        if x_l / x_u > 0.5 {
            return Err(Error::InvalidParameter(format!(
                "x_l / x_u must be at most 1/2, got {}",
                x_l / x_u
            )));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::InvalidParameter(format!("strip half-width d must be > 0, got {d}")));
        }
        let nf = n as f64;
        let h_tilde = (2.0 * PI * d * (x_l + x_u) / (x_l * x_l * nf)).sqrt();
        Ok(EulerParams {
            n,
            h_tilde,
            p: (nf * h_tilde / x_l).sqrt(),
            q: (x_l * nf * h_tilde / 4.0).sqrt(),
            x_l,
            x_u,
            d,
        })
    }

    /// Output spacing `x_u / N`.
    pub fn h_hat(&self) -> f64 {
        self.x_u / self.n as f64
    }

    pub fn weight(&self, xi: f64) -> f64 {
        weight(xi, self)
    }
}

/// `erfc(xi/p - q) / 2`.
pub fn weight(xi: f64, params: &EulerParams) -> f64 {
    0.5 * erfc(xi / params.p - params.q)
}

/// `(h~/2pi) sum_l w(|l h~|) e^{t g_l} e^{i x l h~}` at `x = n h^`, `n = -N+1..N`.
/// The real part is the density estimate.
pub fn inverse_ft(g: &RealSeries, t: f64, params: &EulerParams, h_hat: f64) -> Result<ComplexSeries> {
    let n = params.n as i64;
    if g.len() != 2 * params.n {
        return Err(Error::SampleCount {
            expected: 2 * params.n,
            got: g.len(),
        });
    }
    g.require(-n + 1, n)?;
    if !(h_hat > 0.0 && h_hat.is_finite()) {
        return Err(Error::InvalidParameter(format!("output spacing must be > 0, got {h_hat}")));
    }
    let h = params.h_tilde;
    let mut max_growth = 0.0f64;
    let mut coeffs = Vec::with_capacity(g.len());
    for (l, gl) in g.indexed() {
        let e = (t * gl).exp();
        if !e.is_finite() {
            return Err(Error::NonFinite {
                context: "exp(t g) in the inverse transform",
                index: l,
                value: e,
            });
        }
        max_growth = max_growth.max(e);
        coeffs.push(Complex64::new(weight((l as f64 * h).abs(), params) * e, 0.0));
    }
    if max_growth > 1.0 + GROWTH_WARNING {
        log::warn!("exp(t g) reaches {max_growth:.6e} > 1 at t = {t}; exponent has positive noise");
    }
    let plan = FrftPlan::new(coeffs.len(), h * h_hat)?;
    let scale = h / (2.0 * PI);
    let values = plan.execute(&coeffs).into_iter().map(|z| z * scale).collect();
    ComplexSeries::new(-n + 1, h_hat, values)
}
