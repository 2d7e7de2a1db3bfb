use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numkit::{bessel_k, gamma};

pub type Density = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Solution = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Symmetric Levy measure `nu(dx) = mu(|x|) / |x|^{gamma + 1} dx`.
#[derive(Clone)]
pub struct LevyModel {
    pub name: String,
    pub gamma: u8,
    pub mu: Density,
    pub exact_density: Option<Solution>,
    /// Closed-form characteristic exponent `G_gamma(w)`.
    pub exact_exponent: Option<Density>,
}

impl fmt::Debug for LevyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevyModel")
            .field("name", &self.name)
            .field("gamma", &self.gamma)
            .field("exact_density", &self.exact_density.is_some())
            .field("exact_exponent", &self.exact_exponent.is_some())
            .finish()
    }
}

impl LevyModel {
    pub fn new(name: impl Into<String>, gamma: u8, mu: Density) -> Result<Self> {
        if gamma != 1 && gamma != 2 {
            return Err(Error::InvalidParameter(format!("gamma must be 1 or 2, got {gamma}")));
        }
        Ok(LevyModel {
            name: name.into(),
            gamma,
            mu,
            exact_density: None,
            exact_exponent: None,
        })
    }

    pub fn with_exact_density(mut self, p: Solution) -> Self {
        self.exact_density = Some(p);
        self
    }

    pub fn with_exact_exponent(mut self, g: Density) -> Self {
        self.exact_exponent = Some(g);
        self
    }

    /// Variance gamma: `gamma = 1`, `mu(y) = e^{-y}`.
    pub fn vg() -> Self {
        LevyModel::new("vg", 1, Arc::new(|y: f64| (-y).exp()))
            .expect("valid gamma")
            .with_exact_density(Arc::new(|x, t| exact_vg(x, t).unwrap_or(f64::NAN)))
            .with_exact_exponent(Arc::new(|w: f64| -(w * w).ln_1p()))
    }

    /// Normal inverse Gaussian: `gamma = 2`, `mu(y) = y K_1(y) / pi`.
    pub fn nig() -> Self {
        LevyModel::new("nig", 2, Arc::new(nig_mu))
            .expect("valid gamma")
            .with_exact_density(Arc::new(|x, t| exact_nig(x, t).unwrap_or(f64::NAN)))
            .with_exact_exponent(Arc::new(|w: f64| 1.0 - w.hypot(1.0)))
    }
}

fn nig_mu(y: f64) -> f64 {
    // y K_1(y) -> 1 as y -> 0; K_1 underflows long before y = 745.
    if y < 1e-200 {
        1.0 / PI
    } else if y > 740.0 {
        0.0
    } else {
        y * bessel_k(1.0, y).unwrap_or(0.0) / PI
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what: "time", value: t })
    }
}

/// VG density `(|x|/2)^{t-1/2} K_{1/2-t}(|x|) / (sqrt(pi) Gamma(t))`.
/// At `x = 0` this is the limit, infinite for `t <= 1/2`.
pub fn exact_vg(x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let ax = x.abs();
    if ax == 0.0 {
        if t <= 0.5 {
            return Ok(f64::INFINITY);
        }
        return Ok(gamma(t - 0.5)? / (2.0 * PI.sqrt() * gamma(t)?));
    }
    let k = bessel_k(0.5 - t, ax)?;
    Ok((ax / 2.0).powf(t - 0.5) * k / (PI.sqrt() * gamma(t)?))
}

/// NIG density `t e^t K_1(s) / (pi s)` with `s = sqrt(x^2 + t^2)`.
pub fn exact_nig(x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let s = x.hypot(t);
    let k = bessel_k(1.0, s)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    Ok(t * (t + k.ln()).exp() / (PI * s))
}

pub fn gamma_fn(t: f64) -> Result<f64> {
    gamma(t)
}
