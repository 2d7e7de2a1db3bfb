use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use levyft::de_ft::{DEFAULT_BETA, SPLICE_HIGH_DIVISOR, SPLICE_LOW_DIVISOR};
use levyft::euler_ft::EulerParams;
use levyft::solver::{GridSpec, SolveResult};
use serde::Serialize;

use crate::config::{RunConfig, SCHEMA_VERSION};

impl<'a> Manifest<'a> {
    pub fn new(command: &'static str, config: &'a RunConfig, gamma: u8) -> Self {
        Manifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            model_name: config.model.name(),
            gamma,
            config,
            rules: Rules::current(),
            runs: Vec::new(),
            fits: Vec::new(),
        }
    }
}

/// Fixed-width scientific notation, 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

pub fn solution_file(dir: &Path, model: &str, t: f64, i: u32) -> PathBuf {
    dir.join(format!("{model}_t{t}_i{i}.csv"))
}

/// `x, p_num, p_exact, abs_err`; the last two are blank without a closed form.
pub fn write_solution(path: &Path, res: &SolveResult) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["x", "p_num", "p_exact", "abs_err"])?;
    for (k, (&x, &p)) in res.x.iter().zip(&res.p).enumerate() {
        let exact = res.p_exact.as_ref().map(|v| v[k]);
        let err = res.abs_err.as_ref().map(|v| v[k]);
        w.write_record([num(x), num(p), opt(exact), opt(err)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergeRow {
    pub t: f64,
    pub i: u32,
    pub m: usize,
    pub max_err_full: f64,
    pub max_err_window: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fit {
    pub t: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn write_converge(path: &Path, rows: &[ConvergeRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "M", "max_err_full", "max_err_window"])?;
    for r in rows {
        w.write_record([r.t.to_string(), r.m.to_string(), num(r.max_err_full), num(r.max_err_window)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fits(path: &Path, fits: &[Fit]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["t", "slope_vs_sqrt_M", "intercept", "r_squared"])?;
    for f in fits {
        w.write_record([f.t.to_string(), num(f.slope), num(f.intercept), num(f.r_squared)])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub i: u32,
    pub m: usize,
    pub step1: f64,
    pub step2: f64,
    pub step3: f64,
    pub total: f64,
    /// `total / (M log2 M)`.
    pub normalized: f64,
    /// `normalized` over its smallest value in the table.
    pub ratio: f64,
}

pub fn write_bench(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "M",
        "step1_s",
        "step2_s",
        "step3_s",
        "total_s",
        "total_per_MlogM",
        "ratio",
    ])?;
    for r in rows {
        w.write_record([
            r.m.to_string(),
            num(r.step1),
            num(r.step2),
            num(r.step3),
            num(r.total),
            num(r.normalized),
            num(r.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rules that fix the numerics but are not plain numbers in the config.
#[derive(Debug, Clone, Serialize)]
pub struct Rules {
    pub zeta0_rule: String,
    pub de_step_rule: &'static str,
    pub de_beta: f64,
    pub de_alpha_rule: &'static str,
    pub nufft_tau_rule: &'static str,
    pub sinc_gauss_r_rule: &'static str,
    pub kernel_table_rule: &'static str,
    pub euler_step_rule: &'static str,
    pub euler_weight_rule: &'static str,
    pub grid_rule: &'static str,
}

impl Rules {
    pub fn current() -> Self {
        Rules {
            zeta0_rule: format!(
                "N_gamma h~ / {SPLICE_LOW_DIVISOR} for k <= N_gamma/8, N_gamma h~ / {SPLICE_HIGH_DIVISOR} otherwise"
            ),
            de_step_rule: "h = ln(1000 M) / M, M_minus = M_plus = M/2",
            de_beta: DEFAULT_BETA,
            de_alpha_rule: "alpha = beta / sqrt(1 + ln(1 + pi / (zeta0 h)) / (4 zeta0 h))",
            nufft_tau_rule: "tau = -ln(eps) / pi^2, a = 2 pi / M",
            sinc_gauss_r_rule: "r = sqrt(N' / pi)",
            kernel_table_rule: "midpoint rule on 2^ceil(log2 max(4 N', 64)) points",
            euler_step_rule: "h~ = sqrt(2 pi d (x_l + x_u) / (x_l^2 N)), h^ = x_u / N",
            euler_weight_rule: "w = erfc(xi/p - q)/2, p = sqrt(N h~ / x_l), q = sqrt(x_l N h~ / 4)",
            grid_rule: "M = 2^i, N = 2^(i - 1 - gamma), N_gamma = 2^gamma N",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunEntry {
    pub i: u32,
    pub grid: GridSpec,
    pub euler: EulerParams,
    pub files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub model_name: String,
    pub gamma: u8,
    pub config: &'a RunConfig,
    pub rules: Rules,
    pub runs: Vec<RunEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fits: Vec<Fit>,
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<PathBuf> {
    let path = dir.join(format!("manifest_{}.json", manifest.command));
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(&path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}
