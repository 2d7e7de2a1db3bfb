use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use levyft::de_ft::{build_sources, splice_plan};
use levyft::euler_ft::EulerParams;
use levyft::nufft::{nufft_forward, NufftParams, NufftSettings};
use levyft::numkit::FrftPlan;
use levyft::oracle;
use levyft::sinc_gauss::{default_r, default_table_size, kernel_table};
use levyft::solver::{fourier_transform, g_gamma, GridSpec, LevyModel, Solver, SolverOptions};
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::output::{self, BenchRow, ConvergeRow, Fit, Manifest, RunEntry};

fn euler_for(cfg: &RunConfig, gamma: u8, i: u32) -> Result<(GridSpec, EulerParams)> {
    GridSpec::from_exponent(gamma, i, cfg.x_l, cfg.x_u, cfg.d)
        .with_context(|| format!("grid for i = {i}"))
}

fn solver_for(cfg: &RunConfig, model: &LevyModel, i: u32) -> Result<(GridSpec, EulerParams, Solver)> {
    let (grid, euler) = euler_for(cfg, model.gamma, i)?;
    let solver = Solver::new(model.clone(), euler, SolverOptions { nufft: cfg.nufft })?;
    Ok((grid, euler, solver))
}

fn file_name(path: &std::path::Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// One CSV per `(t, i)` plus a manifest. Returns the paths written.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let model = cfg.model.build();
    output::ensure_dir(&cfg.output_dir)?;
    let mut manifest = Manifest::new("solve", cfg, model.gamma);
    let mut written = Vec::new();
    for &i in &cfg.exponent_i {
        let (grid, euler, solver) = solver_for(cfg, &model, i)?;
        let mut files = Vec::new();
        for &t in &cfg.t_values {
            let res = solver.solve(t).with_context(|| format!("solve at t = {t}, i = {i}"))?;
            let path = output::solution_file(&cfg.output_dir, &cfg.model.name(), t, i);
            output::write_solution(&path, &res)?;
            if let Some(e) = res.max_error_on(cfg.x_l, cfg.x_u) {
                log::info!("t = {t}, M = {}: max window error {e:.3e}", grid.m);
            }
            files.push(file_name(&path));
            written.push(path);
        }
        manifest.runs.push(RunEntry { i, grid, euler, files });
    }
    written.push(output::write_manifest(&cfg.output_dir, &manifest)?);
    Ok(written)
}

/// Least-squares `y = slope x + intercept`; returns `(slope, intercept, r^2)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

pub fn cmd_converge(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let model = cfg.model.build();
    if model.exact_density.is_none() {
        bail!("model {} has no closed-form density to measure errors against", model.name);
    }
    output::ensure_dir(&cfg.output_dir)?;
    let mut manifest = Manifest::new("converge", cfg, model.gamma);
    let mut rows = Vec::new();
    for &i in &cfg.exponent_i {
        let (grid, euler, solver) = solver_for(cfg, &model, i)?;
        for &t in &cfg.t_values {
            let res = solver.solve(t).with_context(|| format!("solve at t = {t}, i = {i}"))?;
            rows.push(ConvergeRow {
                t,
                i,
                m: grid.m,
                max_err_full: res.max_error().expect("exact density present"),
                max_err_window: res.max_error_on(cfg.x_l, cfg.x_u).expect("exact density present"),
            });
        }
        manifest.runs.push(RunEntry { i, grid, euler, files: Vec::new() });
    }
    rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.m.cmp(&b.m)));

    let fits: Vec<Fit> = cfg
        .t_values
        .iter()
        .map(|&t| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.t == t)
                .map(|r| ((r.m as f64).sqrt(), r.max_err_window.max(f64::MIN_POSITIVE).ln()))
                .collect();
            let (slope, intercept, r_squared) = linear_fit(&pts);
            log::info!("t = {t}: ln(window error) ~ {slope:.4} sqrt(M), R^2 = {r_squared:.4}");
            Fit {
                t,
                slope,
                intercept,
                r_squared,
            }
        })
        .collect();

    let name = cfg.model.name();
    let table = cfg.output_dir.join(format!("converge_{name}.csv"));
    let fit_file = cfg.output_dir.join(format!("converge_{name}_fit.csv"));
    output::write_converge(&table, &rows)?;
    output::write_fits(&fit_file, &fits)?;
    for run in &mut manifest.runs {
        run.files = vec![file_name(&table), file_name(&fit_file)];
    }
    manifest.fits = fits;
    let m = output::write_manifest(&cfg.output_dir, &manifest)?;
    Ok(vec![table, fit_file, m])
}

fn median(mut v: Vec<Duration>) -> f64 {
    v.sort();
    v[v.len() / 2].as_secs_f64()
}

/// Cold solves (fresh exponent each time) at the first `t`.
pub fn cmd_bench(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let model = cfg.model.build();
    if cfg.reps == 1 {
        log::warn!("a single repetition gives no median; timings will be noisy");
    }
    let t = cfg.t_values[0];
    output::ensure_dir(&cfg.output_dir)?;
    let mut manifest = Manifest::new("bench", cfg, model.gamma);
    let mut rows = Vec::new();
    for &i in &cfg.exponent_i {
        let (grid, euler) = euler_for(cfg, model.gamma, i)?;
        let mut steps: [Vec<Duration>; 4] = Default::default();
        for _ in 0..cfg.reps {
            let solver = Solver::new(model.clone(), euler, SolverOptions { nufft: cfg.nufft })?;
            let tm = solver.solve(t)?.timings;
            for (slot, d) in steps.iter_mut().zip([tm.step1, tm.step2, tm.step3, tm.total]) {
                slot.push(d);
            }
        }
        let [s1, s2, s3, total] = steps.map(median);
        let m = grid.m as f64;
        rows.push(BenchRow {
            i,
            m: grid.m,
            step1: s1,
            step2: s2,
            step3: s3,
            total,
            normalized: total / (m * m.log2()),
            ratio: 0.0,
        });
        manifest.runs.push(RunEntry { i, grid, euler, files: Vec::new() });
    }
    let floor = rows.iter().map(|r| r.normalized).fold(f64::INFINITY, f64::min);
    for r in &mut rows {
        r.ratio = r.normalized / floor;
    }
    let spread = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    log::info!("max/min of time/(M log2 M): {spread:.3}");

    let path = cfg.output_dir.join(format!("bench_{}_t{t}.csv", cfg.model.name()));
    output::write_bench(&path, &rows)?;
    for run in &mut manifest.runs {
        run.files = vec![file_name(&path)];
    }
    let m = output::write_manifest(&cfg.output_dir, &manifest)?;
    Ok(vec![path, m])
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub error: f64,
    pub tolerance: f64,
    pub elapsed: Duration,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error <= self.tolerance
    }
}

fn timed(name: &'static str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Result<Check> {
    let start = Instant::now();
    let error = f()?;
    Ok(Check {
        name,
        // A NaN error must fail.
        error: if error.is_nan() { f64::INFINITY } else { error },
        tolerance,
        elapsed: start.elapsed(),
    })
}

/// Small-size oracle checks. `kernel_offset` is added to every kernel-table
/// entry before comparison; it exists to prove the check can fail.
pub fn selftest(kernel_offset: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    checks.push(timed("NUFFT vs direct sum", 1e-8, || {
        let m = 512usize;
        let n_gamma = m / 2;
        let h = (7.0 * PI / n_gamma as f64).sqrt();
        let mut worst = 0.0f64;
        for run in splice_plan(n_gamma, h)? {
            let src = build_sources(&|y: f64| (-y).exp(), &run.params)?;
            let params = NufftParams::new(NufftSettings::default(), m, &src.points, h)?;
            for (k, z) in nufft_forward(&src, &params, h, n_gamma)?.indexed() {
                let direct = oracle::exponential_sum(&src.weights, &src.points, k as f64 * h);
                worst = worst.max((z - direct).norm());
            }
        }
        Ok(worst)
    })?);

    checks.push(timed("fractional FFT vs direct sum", 1e-10, || {
        let len = 128usize;
        let c: Vec<Complex64> = (0..len)
            .map(|j| {
                let x = j as f64;
                Complex64::new((0.7 * x).sin(), (1.3 * x).cos() / (1.0 + 0.01 * x))
            })
            .collect();
        let mut worst = 0.0f64;
        for delta in [0.05, 0.3, 2.0 * PI / len as f64] {
            let fast = FrftPlan::new(len, delta)?.execute(&c);
            let slow = oracle::fractional_dft(&c, delta);
            for (a, b) in fast.iter().zip(&slow) {
                worst = worst.max((a - b).norm());
            }
        }
        Ok(worst)
    })?);

    checks.push(timed("kernel table G_r vs quadrature", 1e-9, || {
        let n = 64usize;
        let r = default_r(n);
        let table = kernel_table(r, n, default_table_size(n))?;
        let reference = oracle::sinc_gauss_integrals(r, n);
        Ok(table
            .g
            .iter()
            .zip(&reference)
            .map(|(a, b)| (a + kernel_offset - b).abs())
            .fold(0.0, f64::max))
    })?);

    checks.push(timed("DE transform vs 1/(1+i w)", 1e-6, || {
        let n_gamma = 256usize;
        let h = (14.0 * PI / (2 * n_gamma) as f64).sqrt();
        let mu_hat = fourier_transform(&|y: f64| (-y).exp(), n_gamma, h, NufftSettings::default())?;
        Ok(mu_hat
            .indexed()
            .map(|(k, z)| (z - Complex64::new(1.0, k as f64 * h).inv()).norm())
            .fold(0.0, f64::max))
    })?);

    for (name, model, tol) in [
        ("VG exponent vs closed form", LevyModel::vg(), 1e-6),
        ("NIG exponent vs closed form", LevyModel::nig(), 1e-5),
    ] {
        checks.push(timed(name, tol, || {
            let (grid, _) = GridSpec::from_exponent(model.gamma, 11, 2.0, 5.0, 1.0)?;
            let exact = model.exact_exponent.clone().expect("built-in model");
            Ok(g_gamma(&model, &grid)?
                .indexed()
                .map(|(l, v)| (v - exact(l as f64 * grid.h_tilde)).abs())
                .fold(0.0, f64::max))
        })?);
    }
    Ok(checks)
}

pub fn format_checks(checks: &[Check]) -> String {
    let mut out = format!(
        "{:<32} {:>10} {:>10} {:>10}  result\n",
        "check", "error", "tolerance", "time"
    );
    for c in checks {
        out += &format!(
            "{:<32} {:>10.2e} {:>10.0e} {:>10.2?}  {}\n",
            c.name,
            c.error,
            c.tolerance,
            c.elapsed,
            if c.passed() { "PASS" } else { "FAIL" }
        );
    }
    out
}
