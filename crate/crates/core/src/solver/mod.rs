//! End-to-end density `p(x, t)` for a symmetric Levy model.

mod model;

pub use model::{exact_nig, exact_vg, gamma_fn, Density, LevyModel, Solution};

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::Serialize;

use crate::de_ft::{build_sources, splice_plan};
use crate::error::{Error, Result, Stage};
use crate::euler_ft::{inverse_ft, EulerParams};
use crate::numkit::{ComplexSeries, RealSeries};
use crate::nufft::{extend_conjugate, nufft_forward, NufftParams, NufftSettings};
use crate::sinc_gauss::{
    default_table_size, indefinite_integral, kernel_table, negative_extension, SincGaussConfig,
    Symmetry,
};

/// Grid sizes coupled to `N` and the model's `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub n: usize,
    pub x_max: f64,
    pub h_hat: f64,
    pub n_gamma: usize,
    pub m: usize,
    pub h_tilde: f64,
}

impl GridSpec {
    pub fn new(gamma: u8, euler: &EulerParams) -> Result<Self> {
        if gamma != 1 && gamma != 2 {
            return Err(Error::InvalidParameter(format!("gamma must be 1 or 2, got {gamma}")));
        }
        let n = euler.n;
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len: n });
        }
        let n_gamma = n << gamma;
        Ok(GridSpec {
            n,
            x_max: euler.x_u,
            h_hat: euler.h_hat(),
            n_gamma,
            m: 2 * n_gamma,
            h_tilde: euler.h_tilde,
        })
    }

    /// Grid for total size `M = 2^i`, i.e. `N = 2^(i - 1 - gamma)`.
    pub fn from_exponent(gamma: u8, i: u32, x_l: f64, x_u: f64, d: f64) -> Result<(Self, EulerParams)> {
        let shift = 1 + gamma as u32;
        if i <= shift || i >= 40 {
            return Err(Error::InvalidParameter(format!(
                "size exponent {i} out of range for gamma = {gamma}"
            )));
        }
        let euler = EulerParams::new(1usize << (i - shift), x_l, x_u, d)?;
        Ok((GridSpec::new(gamma, &euler)?, euler))
    }

    fn check(&self, gamma: u8) -> Result<()> {
        if self.n_gamma != self.n << gamma || self.m != 2 * self.n_gamma {
            return Err(Error::InvalidParameter(format!(
                "grid (N = {}, N_gamma = {}) inconsistent with gamma = {gamma}",
                self.n, self.n_gamma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolverOptions {
    pub nufft: NufftSettings,
}

/// `int_0^inf mu(y) e^{-i k h~ y} dy` for `k = -N_gamma+1..N_gamma`, from two
/// DE runs spliced at `k = floor(N_gamma/8)` and conjugate symmetry.
pub fn fourier_transform(
    mu: &dyn Fn(f64) -> f64,
    n_gamma: usize,
    h_tilde: f64,
    settings: NufftSettings,
) -> Result<ComplexSeries> {
    let m = 2 * n_gamma;
    let mut values = vec![Complex64::new(0.0, 0.0); n_gamma + 1];
    for run in splice_plan(n_gamma, h_tilde)? {
        let sources = build_sources(mu, &run.params)?;
        let params = NufftParams::new(settings, m, &sources.points, h_tilde)?;
        let out = nufft_forward(&sources, &params, h_tilde, n_gamma)?;
        for k in run.k_range {
            values[k as usize] = out.at(k);
        }
    }
    extend_conjugate(&ComplexSeries::new(0, h_tilde, values)?)
}

fn even_extension(pos: &RealSeries, n: i64) -> Result<RealSeries> {
    RealSeries::from_fn(-n + 1, n, pos.spacing(), |l| if l == 0 { 0.0 } else { pos.at(l.abs()) })
}

/// Integrates the transform once (`gamma = 1`) or twice (`gamma = 2`) and
/// returns the real, even exponent on `l = -N+1..N`.
pub fn exponent_from_transform(mu_hat: &ComplexSeries, gamma: u8, grid: &GridSpec) -> Result<RealSeries> {
    grid.check(gamma)?;
    let n = grid.n;
    let h = grid.h_tilde;
    let pass = |samples: &ComplexSeries, n_prime: usize| -> Result<ComplexSeries> {
        let cfg = SincGaussConfig::new(n_prime, h)?;
        let table = kernel_table(cfg.r, n_prime, default_table_size(n_prime))?;
        let np = n_prime as i64;
        indefinite_integral(&samples.slice(-np, 2 * np - 1)?, &cfg, &table)
    };
    let pos = match gamma {
        1 => pass(mu_hat, n)?.map(|z| 2.0 * z.im),
        _ => {
            let inner = pass(mu_hat, 2 * n)?;
            let inner = negative_extension(&inner, Symmetry::ConjugateOdd)?;
            pass(&inner, n)?.map(|z| -2.0 * z.re)
        }
    };
    even_extension(&pos, n as i64)
}

/// The exponent sampled from the model's closed form, skipping Steps 1-2.
pub fn exact_exponent_series(model: &LevyModel, grid: &GridSpec) -> Result<RealSeries> {
    let g = model.exact_exponent.as_ref().ok_or_else(|| {
        Error::InvalidParameter(format!("model {} has no closed-form exponent", model.name))
    })?;
    let n = grid.n as i64;
    RealSeries::from_fn(-n + 1, n, grid.h_tilde, |l| g(l as f64 * grid.h_tilde))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    #[serde(with = "secs")]
    pub step1: Duration,
    #[serde(with = "secs")]
    pub step2: Duration,
    #[serde(with = "secs")]
    pub step3: Duration,
    #[serde(with = "secs")]
    pub total: Duration,
}

mod secs {
    use serde::Serializer;
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }
}

/// Exponent for a model on a grid, with the Step 1/2 wall times.
#[derive(Debug, Clone)]
pub struct Exponent {
    pub g: RealSeries,
    pub step1: Duration,
    pub step2: Duration,
}

pub fn compute_exponent(model: &LevyModel, grid: &GridSpec, options: &SolverOptions) -> Result<Exponent> {
    grid.check(model.gamma)?;
    let start = Instant::now();
    let mu_hat = fourier_transform(model.mu.as_ref(), grid.n_gamma, grid.h_tilde, options.nufft)
        .map_err(|e| e.at(Stage::FourierTransform))?;
    let step1 = start.elapsed();
    let start = Instant::now();
    let g = exponent_from_transform(&mu_hat, model.gamma, grid)
        .map_err(|e| e.at(Stage::IndefiniteIntegral))?;
    Ok(Exponent {
        g,
        step1,
        step2: start.elapsed(),
    })
}

/// `G_gamma` on `l = -N+1..N` with default options.
pub fn g_gamma(model: &LevyModel, grid: &GridSpec) -> Result<RealSeries> {
    Ok(compute_exponent(model, grid, &SolverOptions::default())?.g)
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsEcho {
    pub model: String,
    pub gamma: u8,
    pub t: f64,
    pub grid: GridSpec,
    pub euler: EulerParams,
    pub options: SolverOptions,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub p_exact: Option<Vec<f64>>,
    pub abs_err: Option<Vec<f64>>,
    /// Largest `|Im|` of the inverse transform; roundoff for an even exponent.
    pub max_imag: f64,
    pub timings: Timings,
    pub params_echo: ParamsEcho,
}

impl SolveResult {
    /// Largest absolute error over `lo <= |x| <= hi`.
    pub fn max_error_on(&self, lo: f64, hi: f64) -> Option<f64> {
        let err = self.abs_err.as_ref()?;
        Some(
            self.x
                .iter()
                .zip(err)
                .filter(|(x, _)| (lo..=hi).contains(&x.abs()))
                .map(|(_, e)| *e)
                .fold(0.0, f64::max),
        )
    }

    pub fn max_error(&self) -> Option<f64> {
        self.abs_err.as_ref().map(|e| e.iter().copied().fold(0.0, f64::max))
    }
}

/// Density from a precomputed exponent (Step 3 only).
pub fn density_from_exponent(
    model: &LevyModel,
    g: &RealSeries,
    t: f64,
    grid: &GridSpec,
    euler: &EulerParams,
) -> Result<(SolveResult, Duration)> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain { what: "time", value: t });
    }
    if euler.n != grid.n || (euler.h_tilde - grid.h_tilde).abs() > 1e-15 * grid.h_tilde {
        return Err(Error::InvalidParameter("Euler parameters do not match the grid".into()));
    }
    let start = Instant::now();
    let out = inverse_ft(g, t, euler, grid.h_hat).map_err(|e| e.at(Stage::InverseTransform))?;
    let step3 = start.elapsed();
    let x: Vec<f64> = out.indexed().map(|(n, _)| n as f64 * grid.h_hat).collect();
    let p: Vec<f64> = out.values().iter().map(|z| z.re).collect();
    if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "density estimate",
            index: out.first_index() + i as i64,
            value: *v,
        }
        .at(Stage::InverseTransform));
    }
    let max_imag = out.values().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let p_exact = model
        .exact_density
        .as_ref()
        .map(|f| x.iter().map(|&xi| f(xi, t)).collect::<Vec<f64>>());
    let abs_err = p_exact
        .as_ref()
        .map(|e| e.iter().zip(&p).map(|(a, b)| (a - b).abs()).collect());
    let result = SolveResult {
        x,
        p,
        p_exact,
        abs_err,
        max_imag,
        timings: Timings {
            step3,
            ..Timings::default()
        },
        params_echo: ParamsEcho {
            model: model.name.clone(),
            gamma: model.gamma,
            t,
            grid: *grid,
            euler: *euler,
            options: SolverOptions::default(),
        },
    };
    Ok((result, step3))
}

/// Solver for one model and grid; the exponent is computed on first use and
/// shared by every later `t`.
#[derive(Debug)]
pub struct Solver {
    model: LevyModel,
    grid: GridSpec,
    euler: EulerParams,
    options: SolverOptions,
    exponent: OnceLock<Exponent>,
}

impl Solver {
    pub fn new(model: LevyModel, euler: EulerParams, options: SolverOptions) -> Result<Self> {
        let grid = GridSpec::new(model.gamma, &euler)?;
        Ok(Solver {
            model,
            grid,
            euler,
            options,
            exponent: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn exponent(&self) -> Result<&Exponent> {
        if let Some(e) = self.exponent.get() {
            return Ok(e);
        }
        let e = compute_exponent(&self.model, &self.grid, &self.options)?;
        Ok(self.exponent.get_or_init(|| e))
    }

    /// Density at time `t`. Step 1/2 timings are those of the (possibly
    /// earlier) exponent computation.
    pub fn solve(&self, t: f64) -> Result<SolveResult> {
        let start = Instant::now();
        let fresh = self.exponent.get().is_none();
        let exponent = self.exponent()?;
        let (mut result, step3) =
            density_from_exponent(&self.model, &exponent.g, t, &self.grid, &self.euler)?;
        let total = if fresh {
            start.elapsed()
        } else {
            exponent.step1 + exponent.step2 + step3
        };
        result.timings = Timings {
            step1: exponent.step1,
            step2: exponent.step2,
            step3,
            total,
        };
        result.params_echo.options = self.options;
        Ok(result)
    }
}

/// One-shot solve with default options.
pub fn solve(model: &LevyModel, grid: &GridSpec, t: f64, euler: &EulerParams) -> Result<SolveResult> {
    if GridSpec::new(model.gamma, euler)? != *grid {
        return Err(Error::InvalidParameter("grid does not match Euler parameters".into()));
    }
    Solver::new(model.clone(), *euler, SolverOptions::default())?.solve(t)
}
