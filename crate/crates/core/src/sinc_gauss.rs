//! Sinc-Gauss sampling on the grid `k h~` and the indefinite-integration
//! formula built from it:
//!
//! ```text
//! int_0^{l h~} f ~ sum_{k=-N'+1}^{N'} f~_{l-k} G(k) - sum_{k=-N'+1}^{N'} f~_k G(-k) + H_l
//! ```
//!
//! with `f~_k = h~ f(k h~)`, `G(nu) = int_0^nu sinc(eta) e^{-eta^2/2r^2} d eta` and
//! the boundary correction `H_l = G(N') (sum_{k=N'+1}^{N'+l-1} f~_k + sum_{k=-N'+1}^{-N'+l-1} f~_k)`.
//! The first term is a convolution done with one FFT pair of length `4N'`.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numkit::{erf, erfc, sinc, ComplexSeries, FftPlan, FrftPlan};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SincGaussConfig {
    pub n_prime: usize,
    pub h_tilde: f64,
    pub r: f64,
}

impl SincGaussConfig {
    /// Uses the default Gaussian width `r = sqrt(N'/pi)`.
    pub fn new(n_prime: usize, h_tilde: f64) -> Result<Self> {
        Self::with_r(n_prime, h_tilde, default_r(n_prime))
    }

    pub fn with_r(n_prime: usize, h_tilde: f64, r: f64) -> Result<Self> {
        if n_prime < 2 {
            return Err(Error::InvalidParameter(format!("N' must be >= 2, got {n_prime}")));
        }
        if !(h_tilde > 0.0 && h_tilde.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be > 0, got {h_tilde}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("Gaussian width must be > 0, got {r}")));
        }
        Ok(SincGaussConfig { n_prime, h_tilde, r })
    }

    fn window(&self, x: f64) -> f64 {
        sinc(x) * (-x * x / (2.0 * self.r * self.r)).exp()
    }
}

pub fn default_r(n_prime: usize) -> f64 {
    (n_prime as f64 / PI).sqrt()
}

/// Default table resolution `4N'` (at least 64). The increments alias at
/// distance `m_table/2 - k >= N'`, where the Gaussian factor is `e^{-pi N'/2}`.
pub fn default_table_size(n_prime: usize) -> usize {
    (4 * n_prime).next_power_of_two().max(64)
}

/// `G_r(k)` for `k = 0..=N'`; negative arguments follow from oddness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelTable {
    pub g: Vec<f64>,
    pub r: f64,
}

impl KernelTable {
    pub fn n_prime(&self) -> usize {
        self.g.len() - 1
    }

    /// `G_r(k)` for `|k| <= N'`.
    pub fn at(&self, k: i64) -> f64 {
        let v = self.g[k.unsigned_abs() as usize];
        if k < 0 {
            -v
        } else {
            v
        }
    }

    fn check(&self, cfg: &SincGaussConfig) -> Result<()> {
        let same_r = (self.r - cfg.r).abs() <= 1e-12 * cfg.r;
        if !same_r || self.n_prime() != cfg.n_prime {
            return Err(Error::TableMismatch {
                table_r: self.r,
                table_n: self.n_prime(),
                cfg_r: cfg.r,
                cfg_n: cfg.n_prime,
            });
        }
        Ok(())
    }
}

/// Fourier transform of the kernel, `(erf(r(w+pi)/sqrt2) - erf(r(w-pi)/sqrt2)) / 2`.
/// Away from the passband the erfc form avoids cancellation.
pub fn kernel_spectrum(r: f64, omega: f64) -> f64 {
    let w = omega.abs();
    let a = r * (w + PI) / SQRT_2;
    let b = r * (w - PI) / SQRT_2;
    if b > 0.0 {
        0.5 * (erfc(b) - erfc(a))
    } else {
        0.5 * (erf(a) - erf(b))
    }
}

/// Builds `G_r(0..=N')` from the spectral form of the increments
/// `G(k+1) - G(k) = (1/2pi) int F(w) sinc(w/2pi) e^{iw/2} e^{ikw} dw`,
/// discretised by the midpoint rule on `l' h'`, `l' = -M+1..M`, `h' = 2pi/M`,
/// `M = m_table / 2`, and summed by one fractional FFT.
pub fn kernel_table(r: f64, n_prime: usize, m_table: usize) -> Result<KernelTable> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("Gaussian width must be > 0, got {r}")));
    }
    if m_table < 2 || !m_table.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len: m_table });
    }
    let m = (m_table / 2) as i64;
    if (m as usize) < n_prime {
        return Err(Error::TableSize { m_table, n_prime });
    }
    let h = 2.0 * PI / m as f64;
    let samples: Vec<Complex64> = (-m + 1..=m)
        .map(|l| {
            let w = l as f64 * h;
            let amp = h / (2.0 * PI) * kernel_spectrum(r, w) * sinc(w / (2.0 * PI));
            Complex64::from_polar(amp, w / 2.0)
        })
        .collect();
    let increments = FrftPlan::new(m_table, h)?.execute(&samples);
    // Output index i holds k = i - M + 1.
    let zero = (m - 1) as usize;
    let mut g = Vec::with_capacity(n_prime + 1);
    let mut acc = 0.0;
    g.push(acc);
    for d in &increments[zero..zero + n_prime] {
        acc += d.re;
        g.push(acc);
    }
    Ok(KernelTable { g, r })
}

/// `sum_k f(k h~) sinc(zeta/h~ - k) e^{-(zeta/h~ - k)^2 / 2r^2}` over the `2N'`
/// nearest grid points.
pub fn sg_interpolate(samples: &ComplexSeries, cfg: &SincGaussConfig, zeta: f64) -> Result<Complex64> {
    let x = zeta / cfg.h_tilde;
    let base = x.floor() as i64;
    let n = cfg.n_prime as i64;
    samples.require(base - n + 1, base + n)?;
    Ok((base - n + 1..=base + n)
        .map(|k| samples.at(k) * cfg.window(x - k as f64))
        .sum())
}

fn check_samples(samples: &ComplexSeries, cfg: &SincGaussConfig) -> Result<()> {
    let n = cfg.n_prime as i64;
    if samples.len() != 3 * cfg.n_prime {
        return Err(Error::SampleCount {
            expected: 3 * cfg.n_prime,
            got: samples.len(),
        });
    }
    samples.require(-n, 2 * n - 1)
}

/// `H_l` for `l = 1..=N'` by running sums over the two tails.
fn boundary_terms(f: &dyn Fn(i64) -> Complex64, n: i64, g_end: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n as usize);
    let mut tail = Complex64::new(0.0, 0.0);
    out.push(tail);
    for l in 2..=n {
        tail += f(n + l - 1) + f(-n + l - 1);
        out.push(tail * g_end);
    }
    out
}

/// Approximates `int_0^{l h~} f` for `l = 1..=N'` from samples `f(l h~)`,
/// `l = -N'..2N'-1`. The sample at `-N'` is accepted but never used.
pub fn indefinite_integral(
    samples: &ComplexSeries,
    cfg: &SincGaussConfig,
    table: &KernelTable,
) -> Result<ComplexSeries> {
    check_samples(samples, cfg)?;
    table.check(cfg)?;
    let n = cfg.n_prime as i64;
    let len = 4 * cfg.n_prime;
    let h = cfg.h_tilde;
    let f = |k: i64| samples.at(k) * h;

    let plan = FftPlan::new(len)?;
    let wrap = |k: i64| k.rem_euclid(len as i64) as usize;
    let mut fb = vec![Complex64::new(0.0, 0.0); len];
    for k in -n + 1..2 * n {
        fb[wrap(k)] = f(k);
    }
    let mut gb = vec![Complex64::new(0.0, 0.0); len];
    for k in -n + 1..=n {
        gb[wrap(k)] = Complex64::new(table.at(k), 0.0);
    }
    plan.forward(&mut fb);
    plan.forward(&mut gb);
    for (a, b) in fb.iter_mut().zip(&gb) {
        *a *= b;
    }
    plan.inverse(&mut fb);

    let offset: Complex64 = (-n + 1..=n).map(|k| f(k) * table.at(-k)).sum();
    let corr = boundary_terms(&f, n, table.at(n));
    let values = (1..=n)
        .map(|l| fb[wrap(l)] - offset + corr[(l - 1) as usize])
        .collect();
    ComplexSeries::new(1, h, values)
}

/// Same quantity as [`indefinite_integral`] from the three partial sums
/// `S_1 + S_2 + S_3` of the rearranged double sum, each evaluated directly.
/// `O(N'^2)`.
pub fn indefinite_integral_direct(
    samples: &ComplexSeries,
    cfg: &SincGaussConfig,
    table: &KernelTable,
) -> Result<ComplexSeries> {
    check_samples(samples, cfg)?;
    table.check(cfg)?;
    let n = cfg.n_prime as i64;
    let h = cfg.h_tilde;
    let f = |k: i64| samples.at(k) * h;
    let d = |a: i64, b: i64| table.at(b) - table.at(a);
    let values = (1..=n)
        .map(|l| {
            let s1: Complex64 = (n + 1..=n + l - 1).map(|k| f(k) * d(-n, l - k)).sum();
            let s2: Complex64 = (-n + l..=n).map(|k| f(k) * d(-k, l - k)).sum();
            let s3: Complex64 = (-n + 1..=-n + l - 1).map(|k| f(k) * d(-k, n)).sum();
            s1 + s2 + s3
        })
        .collect();
    ComplexSeries::new(1, h, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    /// `v(-l) = -conj(v(l))`, as for integrals of a Hermitian integrand.
    ConjugateOdd,
    /// `v(-l) = v(l)`.
    Even,
}

/// Extends values at `l = 1..N'` to `l = -N'+1..N'`. The value at `l = 0` is 0
/// for both kinds: every series extended here is an integral from the origin.
pub fn negative_extension(values: &ComplexSeries, kind: Symmetry) -> Result<ComplexSeries> {
    if values.first_index() != 1 {
        return Err(Error::InvalidParameter(format!(
            "negative extension expects values from l = 1, got {}",
            values.first_index()
        )));
    }
    let n = values.last_index();
    ComplexSeries::from_fn(-n + 1, n, values.spacing(), |l| match l {
        0 => Complex64::new(0.0, 0.0),
        l if l > 0 => values.at(l),
        l => match kind {
            Symmetry::ConjugateOdd => -values.at(-l).conj(),
            Symmetry::Even => values.at(-l),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table_for(n: usize) -> KernelTable {
        kernel_table(default_r(n), n, default_table_size(n)).unwrap()
    }

    fn sampled(cfg: &SincGaussConfig, mut f: impl FnMut(f64) -> Complex64) -> ComplexSeries {
        let n = cfg.n_prime as i64;
        ComplexSeries::from_fn(-n, 2 * n - 1, cfg.h_tilde, |k| f(k as f64 * cfg.h_tilde)).unwrap()
    }

    fn lorentz(z: f64) -> Complex64 {
        Complex64::new(1.0 / (1.0 + z * z), 0.0)
    }

    #[test]
    fn spectrum_matches_erf_form() {
        let r = 3.0;
        for &w in &[0.0, 1.0, 3.0, PI, 4.0, -2.5] {
            let direct = 0.5 * (erf(r * (w + PI) / SQRT_2) - erf(r * (w - PI) / SQRT_2));
            assert!((kernel_spectrum(r, w) - direct).abs() < 1e-15);
        }
        // Tail keeps relative accuracy where the erf difference would be 0.
        let tail = kernel_spectrum(r, 2.0 * PI);
        assert!(tail > 0.0 && tail < 1e-18);
    }

    #[test]
    fn table_starts_at_zero_and_stays_bounded() {
        let t = table_for(64);
        assert_eq!(t.g[0], 0.0);
        assert_eq!(t.g.len(), 65);
        assert!(t.g.iter().all(|v| v.abs() <= 0.6));
        assert_eq!(t.at(-5), -t.at(5));
    }

    #[test]
    fn table_matches_quadrature() {
        for &n in &[32usize, 64, 128] {
            let t = table_for(n);
            for k in 0..=n as i64 {
                let want = oracle::sinc_gauss_integral(t.r, k as f64);
                assert!((t.at(k) - want).abs() <= 1e-9, "N' = {n}, k = {k}");
            }
        }
        let t = kernel_table((32.0 / PI).sqrt(), 32, 1024).unwrap();
        assert!((t.at(1) - 0.584_563_733_334_091_4).abs() < 1e-12);
    }

    #[test]
    fn wide_gaussian_tends_to_sine_integral() {
        let coarse = kernel_table(1e6, 4, 1 << 10).unwrap();
        assert!((coarse.at(1) - 0.589_489_872_236_083_6).abs() < 1e-4);
        let fine = kernel_table(1e6, 4, 1 << 16).unwrap();
        assert!((fine.at(1) - 0.589_489_872_236_083_6).abs() < 1e-8);
    }

    #[test]
    fn table_errors() {
        assert!(matches!(
            kernel_table(2.0, 64, 64),
            Err(Error::TableSize { m_table: 64, n_prime: 64 })
        ));
        assert!(kernel_table(2.0, 8, 48).is_err());
        assert!(kernel_table(0.0, 8, 64).is_err());
        assert_eq!(default_table_size(64), 256);
        assert_eq!(default_table_size(2), 64);
        assert_eq!(default_table_size(512), 2048);
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let cfg = SincGaussConfig::new(16, 0.25).unwrap();
        let s = ComplexSeries::from_fn(-40, 40, 0.25, |k| Complex64::new(k as f64, -1.0)).unwrap();
        for k in -3..=5 {
            let v = sg_interpolate(&s, &cfg, k as f64 * 0.25).unwrap();
            assert!((v - s.at(k)).norm() < 1e-13);
        }
        let zero = s.map(|_| Complex64::new(0.0, 0.0));
        assert_eq!(sg_interpolate(&zero, &cfg, 0.3).unwrap(), Complex64::new(0.0, 0.0));
        match sg_interpolate(&s, &cfg, 7.0) {
            Err(Error::InsufficientCoverage { missing_lo, missing_hi }) => {
                assert_eq!((missing_lo, missing_hi), (41, 44))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn interpolation_accuracy_on_lorentzian() {
        let cfg = SincGaussConfig::new(64, 0.125).unwrap();
        let s = ComplexSeries::from_fn(-70, 70, 0.125, |k| lorentz(k as f64 * 0.125)).unwrap();
        let v = sg_interpolate(&s, &cfg, 0.06).unwrap();
        assert!((v - lorentz(0.06)).norm() <= 1e-6);
    }

    #[test]
    fn integral_of_zero_and_constant() {
        let h = (7.0 * PI / 512.0).sqrt();
        let cfg = SincGaussConfig::new(256, h).unwrap();
        let t = table_for(256);
        let zero = indefinite_integral(&sampled(&cfg, |_| Complex64::new(0.0, 0.0)), &cfg, &t).unwrap();
        assert!(zero.values().iter().all(|z| z.norm() == 0.0));
        let one = indefinite_integral(&sampled(&cfg, |_| Complex64::new(1.0, 0.0)), &cfg, &t).unwrap();
        for (l, v) in one.indexed() {
            assert!((v - Complex64::new(l as f64 * h, 0.0)).norm() <= 1e-6, "l = {l}");
        }
    }

    #[test]
    fn integral_of_lorentzian_is_arctan() {
        let cfg = SincGaussConfig::new(256, 0.125).unwrap();
        let t = table_for(256);
        let out = indefinite_integral(&sampled(&cfg, lorentz), &cfg, &t).unwrap();
        for (l, v) in out.indexed() {
            let want = (l as f64 * 0.125).atan();
            assert!((v.re - want).abs() <= 1e-8 && v.im.abs() <= 1e-8, "l = {l}");
        }
    }

    #[test]
    fn matches_unrearranged_double_sum() {
        let n = 16usize;
        let cfg = SincGaussConfig::new(n, 0.3).unwrap();
        let t = table_for(n);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = sampled(&cfg, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let fast = indefinite_integral(&s, &cfg, &t).unwrap();
        // m - k and m + 1 - k stay within -N'..=N' over the whole index set.
        let f = |k: i64| s.at(k) * cfg.h_tilde;
        let g = |k: i64| t.at(k);
        let raw = oracle::indefinite_double_sum(&f, &g, n as i64);
        for (a, b) in fast.values().iter().zip(&raw) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn partition_covers_index_set_exactly_once() {
        for n in 2..=16i64 {
            for l in 1..=n {
                let mut full: Vec<(i64, i64)> = (0..l)
                    .flat_map(|m| (m - n + 1..=m + n).map(move |k| (m, k)))
                    .collect();
                let mut parts: Vec<(i64, i64)> = Vec::new();
                for k in n + 1..=n + l - 1 {
                    parts.extend((k - n..=l - 1).map(|m| (m, k)));
                }
                for k in -n + l..=n {
                    parts.extend((0..=l - 1).map(|m| (m, k)));
                }
                for k in -n + 1..=-n + l - 1 {
                    parts.extend((0..=k + n - 1).map(|m| (m, k)));
                }
                let before = parts.len();
                full.sort_unstable();
                parts.sort_unstable();
                parts.dedup();
                assert_eq!(before, parts.len(), "overlap at N' = {n}, l = {l}");
                assert_eq!(full, parts, "N' = {n}, l = {l}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = SincGaussConfig::new(8, 0.5).unwrap();
        let t = table_for(8);
        let short = ComplexSeries::from_fn(-8, 14, 0.5, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            indefinite_integral(&short, &cfg, &t),
            Err(Error::SampleCount { expected: 24, got: 23 })
        ));
        let shifted = ComplexSeries::from_fn(-7, 16, 0.5, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(indefinite_integral(&shifted, &cfg, &t).is_err());
        let other = table_for(16);
        let ok = sampled(&cfg, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(
            indefinite_integral(&ok, &cfg, &other),
            Err(Error::TableMismatch { .. })
        ));
        let wrong_r = SincGaussConfig::with_r(8, 0.5, 3.0).unwrap();
        assert!(indefinite_integral(&ok, &wrong_r, &t).is_err());
        assert!(SincGaussConfig::new(1, 0.5).is_err());
        assert!(SincGaussConfig::with_r(8, 0.5, -1.0).is_err());
    }

    #[test]
    fn extension_rules() {
        let i = ComplexSeries::new(1, 0.1, vec![Complex64::new(0.0, 1.0)]).unwrap();
        let odd = negative_extension(&i, Symmetry::ConjugateOdd).unwrap();
        assert_eq!(odd.first_index(), 0);
        assert_eq!(odd.at(0), Complex64::new(0.0, 0.0));

        let v = ComplexSeries::new(1, 0.1, vec![Complex64::new(0.0, 1.0), Complex64::new(3.0, 0.5)])
            .unwrap();
        let odd = negative_extension(&v, Symmetry::ConjugateOdd).unwrap();
        assert_eq!(odd.at(-1), Complex64::new(0.0, 1.0));
        assert_eq!(odd.at(0), Complex64::new(0.0, 0.0));
        let w = ComplexSeries::new(1, 0.1, vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)])
            .unwrap();
        let even = negative_extension(&w, Symmetry::Even).unwrap();
        assert_eq!(even.at(-1), Complex64::new(3.0, 0.0));
        assert_eq!(even.first_index(), -1);
        assert_eq!(even.last_index(), 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn fft_path_equals_partitioned_sum(seed in any::<u64>(), log_n in 1u32..=7, h in 0.05f64..1.0) {
            let n = 1usize << log_n;
            let n = n.max(2);
            let cfg = SincGaussConfig::new(n, h).unwrap();
            let t = table_for(n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = sampled(&cfg, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let scale = s.values().iter().map(|z| z.norm()).fold(0.0, f64::max) * h;
            let fast = indefinite_integral(&s, &cfg, &t).unwrap();
            let slow = indefinite_integral_direct(&s, &cfg, &t).unwrap();
            for (a, b) in fast.values().iter().zip(slow.values()) {
                prop_assert!((a - b).norm() <= 1e-11 * scale);
            }
        }

        #[test]
        fn conjugate_odd_extension_is_involutive(re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let v = ComplexSeries::new(1, 0.2, vec![Complex64::new(re, im); 4]).unwrap();
            let e = negative_extension(&v, Symmetry::ConjugateOdd).unwrap();
            for l in 1..=3 {
                prop_assert_eq!(e.at(-l), -e.at(l).conj());
            }
        }
    }
}
