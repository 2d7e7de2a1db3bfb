//! Acceptance suite. Runs every check, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use levyft::de_ft::{build_sources, splice_plan};
use levyft::euler_ft::EulerParams;
use levyft::numkit::{bessel_k, ComplexSeries, FrftPlan, RealSeries};
use levyft::nufft::{nufft_forward, NufftParams, NufftSettings};
use levyft::oracle;
use levyft::sinc_gauss::{
    default_r, default_table_size, indefinite_integral, indefinite_integral_direct, kernel_table,
    SincGaussConfig,
};
use levyft::solver::{
    density_from_exponent, exact_exponent_series, fourier_transform, g_gamma, GridSpec, LevyModel,
    SolveResult, Solver, SolverOptions,
};

const X_L: f64 = 2.0;
const X_U: f64 = 5.0;
const D: f64 = 1.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn grid(gamma: u8, i: u32) -> (GridSpec, EulerParams) {
    GridSpec::from_exponent(gamma, i, X_L, X_U, D).unwrap()
}

fn model(gamma: u8) -> LevyModel {
    if gamma == 1 {
        LevyModel::vg()
    } else {
        LevyModel::nig()
    }
}

fn solve_at(gamma: u8, i: u32, t: f64) -> SolveResult {
    let (_, euler) = grid(gamma, i);
    Solver::new(model(gamma), euler, SolverOptions::default())
        .unwrap()
        .solve(t)
        .unwrap()
}

/// Least-squares line through `(x, y)`; returns `(slope, r^2)`.
fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, sxy * sxy / (sxx * syy))
}

fn nufft_matches_direct_sum() -> Outcome {
    let m = 1usize << 9;
    let n_gamma = m / 2;
    let (_, euler) = grid(1, 9);
    let h = euler.h_tilde;
    let mut worst = 0.0f64;
    let mut times = Vec::new();
    for run in splice_plan(n_gamma, h).unwrap() {
        let src = build_sources(&|y: f64| (-y).exp(), &run.params).unwrap();
        let mut out = None;
        for _ in 0..7 {
            let start = Instant::now();
            let params = NufftParams::new(NufftSettings::default(), m, &src.points, h).unwrap();
            out = Some(nufft_forward(&src, &params, h, n_gamma).unwrap());
            times.push(start.elapsed());
        }
        for (k, z) in out.unwrap().indexed() {
            let direct = oracle::exponential_sum(&src.weights, &src.points, k as f64 * h);
            worst = worst.max((z - direct).norm());
        }
    }
    let t = median(times);
    outcome(
        worst <= 1e-8 && t <= Duration::from_millis(50),
        format!("max |fast - direct| = {worst:.2e} (<= 1e-8), median time {t:.2?} (<= 50 ms)"),
    )
}

fn frft_matches_direct_sum() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for log_len in 1..=10u32 {
        let len = 1usize << log_len;
        let c: Vec<Complex64> = (0..len)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for delta in [0.05, 0.3, 2.0 * PI / len as f64] {
            let fast = FrftPlan::new(len, delta).unwrap().execute(&c);
            let slow = oracle::fractional_dft(&c, delta);
            for (a, b) in fast.iter().zip(&slow) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    outcome(worst <= 1e-10, format!("max error {worst:.2e} over 2N = 2..1024 (<= 1e-10)"))
}

fn spliced_transform_closed_form() -> Outcome {
    let n_gamma = 1usize << 10;
    let h = (14.0 * PI / (2 * n_gamma) as f64).sqrt();
    let [low, high] = splice_plan(n_gamma, h).unwrap();
    let mu_hat = fourier_transform(&|y: f64| (-y).exp(), n_gamma, h, NufftSettings::default()).unwrap();
    let err = |k: i64| (mu_hat.at(k) - Complex64::new(1.0, k as f64 * h).inv()).norm();
    let e_low = low.k_range.clone().map(err).fold(0.0, f64::max);
    let e_high = high.k_range.clone().map(err).fold(0.0, f64::max);
    outcome(
        e_low.max(e_high) <= 1e-6,
        format!(
            "zeta0 = {:.1} run: {e_low:.2e}, zeta0 = {:.1} run: {e_high:.2e} (<= 1e-6)",
            low.params.zeta0, high.params.zeta0
        ),
    )
}

fn kernel_table_matches_quadrature() -> Outcome {
    let n = 512usize;
    let r = default_r(n);
    let table = kernel_table(r, n, default_table_size(n)).unwrap();
    let reference = oracle::sinc_gauss_integrals(r, n);
    let worst = table
        .g
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-9, format!("max |G_r(k) - quadrature| = {worst:.2e}, k <= 512 (<= 1e-9)"))
}

fn lorentz_samples(cfg: &SincGaussConfig) -> ComplexSeries {
    let n = cfg.n_prime as i64;
    ComplexSeries::from_fn(-n, 2 * n - 1, cfg.h_tilde, |k| {
        let z = k as f64 * cfg.h_tilde;
        Complex64::new(1.0 / (1.0 + z * z), 0.0)
    })
    .unwrap()
}

fn indefinite_integration_converges() -> Outcome {
    let mut errs = Vec::new();
    for n in [64usize, 128, 256, 512] {
        let h = (3.5 * PI / n as f64).sqrt();
        let cfg = SincGaussConfig::new(n, h).unwrap();
        let table = kernel_table(cfg.r, n, default_table_size(n)).unwrap();
        let out = indefinite_integral(&lorentz_samples(&cfg), &cfg, &table).unwrap();
        let e = out
            .indexed()
            .map(|(l, z)| (z - Complex64::new((l as f64 * h).atan(), 0.0)).norm())
            .fold(0.0, f64::max);
        errs.push(e);
    }
    let gain = errs[0] / errs[3];

    let n = 512usize;
    let cfg = SincGaussConfig::new(n, 0.1).unwrap();
    let table = kernel_table(cfg.r, n, default_table_size(n)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let s = ComplexSeries::from_fn(-(n as i64), 2 * n as i64 - 1, 0.1, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
    .unwrap();
    let scale = s.values().iter().map(|z| z.norm()).fold(0.0, f64::max) * cfg.h_tilde;
    let fast = indefinite_integral(&s, &cfg, &table).unwrap();
    let slow = indefinite_integral_direct(&s, &cfg, &table).unwrap();
    let diff = fast
        .values()
        .iter()
        .zip(slow.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
        / scale;
    outcome(
        gain >= 100.0 && diff <= 1e-11,
        format!(
            "errors N'=64..512: {:.1e} {:.1e} {:.1e} {:.1e} (gain {gain:.1e} >= 1e2); FFT vs direct {diff:.1e} (<= 1e-11)",
            errs[0], errs[1], errs[2], errs[3]
        ),
    )
}

/// `-2 int_0^inf mu(y) (1 - cos(w y)) / y^gamma dy` by adaptive quadrature.
fn exponent_by_quadrature(mu: &dyn Fn(f64) -> f64, gamma: i32, w: f64) -> f64 {
    let f = |y: f64| {
        if y == 0.0 {
            0.0
        } else {
            let s = (0.5 * w * y).sin();
            mu(y) * 2.0 * s * s / y.powi(gamma)
        }
    };
    let mut acc = 0.0;
    for j in 0..80 {
        acc += oracle::integrate(&f, j as f64 * 0.5, (j + 1) as f64 * 0.5, 1e-14);
    }
    -2.0 * acc
}

fn exponent_oracles() -> Outcome {
    // The closed forms themselves, against the integral definitions.
    let vg_mu = |y: f64| (-y).exp();
    let nig_mu = |y: f64| y * bessel_k(1.0, y).unwrap() / PI;
    let mut closed = 0.0f64;
    for w in [0.3, 1.0, 2.5, 5.0] {
        closed = closed.max((exponent_by_quadrature(&vg_mu, 1, w) + (w * w).ln_1p()).abs());
        closed = closed.max((exponent_by_quadrature(&nig_mu, 2, w) - (1.0 - w.hypot(1.0))).abs());
    }
    let mut errs = [0.0f64; 2];
    for gamma in [1u8, 2] {
        let (g, _) = grid(gamma, 11);
        let m = model(gamma);
        let exact = m.exact_exponent.clone().unwrap();
        let series = g_gamma(&m, &g).unwrap();
        errs[gamma as usize - 1] = series
            .indexed()
            .map(|(l, v)| (v - exact(l as f64 * g.h_tilde)).abs())
            .fold(0.0, f64::max);
    }
    outcome(
        closed <= 1e-9 && errs[0] <= 1e-6 && errs[1] <= 1e-5,
        format!(
            "M = 2^11: VG {:.2e} (<= 1e-6), NIG {:.2e} (<= 1e-5); closed forms vs quadrature {closed:.1e}",
            errs[0], errs[1]
        ),
    )
}

fn vg_end_to_end() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    let mut slowest = Duration::ZERO;
    for t in [1.0, 2.0, 3.0] {
        let mut pts = Vec::new();
        let mut window = Vec::new();
        for i in 7..=12u32 {
            let start = Instant::now();
            let res = solve_at(1, i, t);
            if i == 12 {
                slowest = slowest.max(start.elapsed());
            }
            let e = res.max_error_on(X_L, X_U).unwrap();
            window.push(e);
            pts.push((((1u64 << i) as f64).sqrt(), e.ln()));
        }
        let ratio = window[5] / window[0];
        let (slope, r2) = linear_fit(&pts);
        pass &= ratio <= 1e-3 && window[5] <= 1e-6 && slope < 0.0 && r2 >= 0.9;
        detail.push(format!(
            "t={t}: err(2^12) {:.1e}, ratio {ratio:.1e}, slope {slope:.2} R^2 {r2:.3}",
            window[5]
        ));
    }
    pass &= slowest <= Duration::from_secs(2);
    detail.push(format!("slowest solve at 2^12 {slowest:.2?}"));
    outcome(pass, detail.join("; "))
}

fn nig_end_to_end() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for t in [1.0, 2.0, 3.0] {
        let coarse = solve_at(2, 7, t);
        let fine = solve_at(2, 12, t);
        let full = fine.max_error().unwrap() / coarse.max_error().unwrap();
        let win = fine.max_error_on(X_L, X_U).unwrap() / coarse.max_error_on(X_L, X_U).unwrap();
        pass &= full <= 1e-3 && win <= 1e-3;
        detail.push(format!("t={t}: full ratio {full:.1e}, window ratio {win:.1e}"));
    }
    outcome(pass, detail.join("; ") + " (<= 1e-3)")
}

fn vg_cusp() -> Outcome {
    let res = solve_at(1, 11, 1.0);
    let full = res.max_error().unwrap();
    let win = res.max_error_on(X_L, X_U).unwrap();
    outcome(
        full >= 10.0 * win,
        format!("full {full:.2e} vs window {win:.2e} (full/window {:.1e} >= 10)", full / win),
    )
}

fn complexity() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for gamma in [1u8, 2] {
        let mut norm = Vec::new();
        for i in 7..=12u32 {
            let (_, euler) = grid(gamma, i);
            let mut times = Vec::new();
            for _ in 0..7 {
                let solver = Solver::new(model(gamma), euler, SolverOptions::default()).unwrap();
                times.push(solver.solve(3.0).unwrap().timings.total);
            }
            let m = (1u64 << i) as f64;
            norm.push(median(times).as_secs_f64() / (m * m.log2()));
        }
        let hi = norm.iter().copied().fold(0.0, f64::max);
        let lo = norm.iter().copied().fold(f64::INFINITY, f64::min);
        pass &= hi / lo <= 3.0;
        detail.push(format!("{}: max/min {:.2}", model(gamma).name, hi / lo));
    }
    outcome(pass, detail.join(", ") + " (<= 3)")
}

fn trapezoid(h: f64, v: &[f64]) -> f64 {
    h * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

fn invariants() -> Outcome {
    let mut failures = Vec::new();
    for gamma in [1u8, 2] {
        let m = model(gamma);
        let (g, euler) = grid(gamma, 11);
        let series = g_gamma(&m, &g).unwrap();
        let n = g.n as i64;
        let even = (1..n).all(|l| series.at(l) == series.at(-l));
        let finite = series.values().iter().all(|v| v.is_finite());
        let nonpositive = series.values().iter().all(|&v| v <= 1e-6);
        if !(even && finite && nonpositive && series.at(0) == 0.0) {
            failures.push(format!("{} exponent not real/even/nonpositive", m.name));
        }

        let solver = Solver::new(m.clone(), euler, SolverOptions::default()).unwrap();
        for t in [1.0, 2.0, 3.0] {
            let res = solver.solve(t).unwrap();
            let scale = res.p.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for k in 1..n {
                let a = res.p[(n - 1 + k) as usize];
                let b = res.p[(n - 1 - k) as usize];
                if (a - b).abs() > 1e-9 * scale {
                    failures.push(format!("{} t={t} asymmetric at k={k}", m.name));
                    break;
                }
            }
            let mass = trapezoid(g.h_hat, &res.p);
            let mass_exact = trapezoid(g.h_hat, res.p_exact.as_ref().unwrap());
            if (mass - mass_exact).abs() > 1e-3 {
                failures.push(format!("{} t={t} mass {mass:.6} vs {mass_exact:.6}", m.name));
            }
            if res.max_imag > 1e-10 * scale {
                failures.push(format!("{} t={t} imaginary residue {:.1e}", m.name, res.max_imag));
            }
        }

        let a = solve_at(gamma, 10, 2.0);
        let b = solve_at(gamma, 10, 2.0);
        let same = a.p.iter().zip(&b.p).all(|(x, y)| x.to_bits() == y.to_bits());
        if !same {
            failures.push(format!("{} not deterministic", m.name));
        }
    }

    // VG at fixed N: every t matches on the window, and the cusp-dominated
    // full-interval error does not grow with t.
    let mut full = Vec::new();
    for t in [1.0, 2.0, 3.0] {
        let res = solve_at(1, 11, t);
        if res.max_error_on(X_L, X_U).unwrap() > 1e-6 {
            failures.push(format!("VG t={t} window error too large"));
        }
        full.push(res.max_error().unwrap());
    }
    if !(full[1] <= full[0] && full[2] <= full[1]) {
        failures.push(format!("VG full-interval error grows with t: {full:?}"));
    }

    // Step 3 alone on the closed-form exponent.
    let (g, euler) = grid(1, 11);
    let vg = LevyModel::vg();
    let exact = exact_exponent_series(&vg, &g).unwrap();
    let (bypass, _) = density_from_exponent(&vg, &exact, 1.0, &g, &euler).unwrap();
    let bypass_err = bypass.max_error_on(X_L, X_U).unwrap();
    if bypass_err > 1e-8 {
        failures.push(format!("closed-form exponent gives window error {bypass_err:.1e}"));
    }
    let zero = RealSeries::from_fn(-(g.n as i64) + 1, g.n as i64, g.h_tilde, |_| 0.0).unwrap();
    if density_from_exponent(&vg, &zero, 1.0, &g, &euler).is_err() {
        failures.push("zero exponent rejected".into());
    }

    if failures.is_empty() {
        outcome(
            true,
            "exponent even/real/nonpositive, symmetry, mass, realness, determinism, t-consistency, closed-form bypass",
        )
    } else {
        outcome(false, failures.join("; "))
    }
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("NUFFT vs direct exponential sum", nufft_matches_direct_sum),
        ("fractional FFT vs direct sum", frft_matches_direct_sum),
        ("spliced DE transform vs 1/(1+i w)", spliced_transform_closed_form),
        ("kernel table vs quadrature", kernel_table_matches_quadrature),
        ("indefinite integration convergence", indefinite_integration_converges),
        ("characteristic exponents vs closed forms", exponent_oracles),
        ("VG end-to-end convergence", vg_end_to_end),
        ("NIG end-to-end convergence", nig_end_to_end),
        ("VG cusp at the origin", vg_cusp),
        ("O(M log M) timing", complexity),
        ("invariant suite", invariants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let result = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
