//! Fractional FFT: `S_n = sum_{l=-N+1}^{N} c_l e^{i delta l n}` for `n = -N+1..N`
//! and arbitrary `delta`, via the chirp identity
//! `l n = (l^2 + n^2 - (n - l)^2) / 2` and one circular convolution of length `4N`.

use num_complex::Complex64;

use super::fft::FftPlan;
use super::series::ComplexSeries;
use crate::error::{Error, Result};

const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `e^{i a k}` with the phase reduced mod 2pi before rounding. The chirp
/// phases reach ~1e5 rad, where the naive product loses ~1e-11.
fn cis_scaled(a: f64, k: i64) -> Complex64 {
    let kf = k as f64;
    let hi = a * kf;
    let lo = a.mul_add(kf, -hi);
    let turns = (hi / TWO_PI_HI).round();
    let r = turns.mul_add(-TWO_PI_HI, hi) - turns * TWO_PI_LO + lo;
    Complex64::from_polar(1.0, r)
}

#[derive(Debug, Clone)]
pub struct FrftPlan {
    len: usize,
    delta: f64,
    /// `e^{i delta l^2 / 2}` for `l = -N+1..N`; used on both input and output.
    chirp: Vec<Complex64>,
    /// Forward FFT of the wrapped kernel `e^{-i delta m^2 / 2}`, `|m| < 2N`.
    kernel_hat: Vec<Complex64>,
    fft: FftPlan,
}

impl FrftPlan {
    /// `len` is the full input length `2N`.
    pub fn new(len: usize, delta: f64) -> Result<Self> {
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "fractional FFT delta must be finite, got {delta}"
            )));
        }
        let half = (len / 2) as i64;
        let chirp = (-half + 1..=half)
            .map(|l| cis_scaled(0.5 * delta, l * l))
            .collect();
        let conv_len = 2 * len;
        let fft = FftPlan::new(conv_len)?;
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); conv_len];
        let span = len as i64;
        for m in -span + 1..span {
            let idx = m.rem_euclid(conv_len as i64) as usize;
            kernel_hat[idx] = cis_scaled(-0.5 * delta, m * m);
        }
        fft.forward(&mut kernel_hat);
        Ok(FrftPlan {
            len,
            delta,
            chirp,
            kernel_hat,
            fft,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `input[i]` is `c_{i-N+1}`; `output[i]` is `S_{i-N+1}`.
    pub fn execute(&self, input: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(input.len(), self.len, "input length does not match plan");
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * self.len];
        for ((slot, &c), &w) in buf.iter_mut().zip(input).zip(&self.chirp) {
            *slot = c * w;
        }
        self.fft.forward(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.fft.inverse(&mut buf);
        buf.truncate(self.len);
        for (b, &w) in buf.iter_mut().zip(&self.chirp) {
            *b *= w;
        }
        buf
    }
}

/// Series form of the fractional FFT. `c` must cover `l = -N+1..N`; the result
/// covers `n = -N+1..N` with spacing `delta / c.spacing()`, so that
/// `delta l n = (l * c.spacing()) * (n * out_spacing)`.
pub fn frft(c: &ComplexSeries, delta: f64) -> Result<ComplexSeries> {
    let len = c.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { len });
    }
    let half = (len / 2) as i64;
    if c.first_index() != -half + 1 {
        return Err(Error::InvalidParameter(format!(
            "fractional FFT input must start at index {}, starts at {}",
            -half + 1,
            c.first_index()
        )));
    }
    let plan = FrftPlan::new(len, delta)?;
    let out = plan.execute(c.values());
    ComplexSeries::new(-half + 1, (delta / c.spacing()).abs().max(f64::MIN_POSITIVE), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::fft::Direction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn direct(c: &[Complex64], delta: f64) -> Vec<Complex64> {
        let half = (c.len() / 2) as i64;
        (-half + 1..=half)
            .map(|n| {
                c.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let l = i as i64 - half + 1;
                        v * Complex64::from_polar(1.0, delta * (l * n) as f64)
                    })
                    .sum()
            })
            .collect()
    }

    fn unit_random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI)))
            .collect()
    }

    #[test]
    fn matches_direct_sum() {
        let c = unit_random(128, 3);
        let plan = FrftPlan::new(128, 0.3).unwrap();
        let got = plan.execute(&c);
        let want = direct(&c, 0.3);
        let err = got
            .iter()
            .zip(&want)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-11, "max error {err}");
    }

    #[test]
    fn nyquist_delta_is_recentred_dft() {
        let n2 = 32usize;
        let half = (n2 / 2) as i64;
        let c = unit_random(n2, 11);
        let delta = 2.0 * PI / n2 as f64;
        let got = FrftPlan::new(n2, delta).unwrap().execute(&c);
        // Reorder input so that index (l mod 2N) holds c_l and take an inverse
        // FFT without normalisation: S_n = sum_l c_l e^{+2 pi i l n / 2N}.
        let mut wrapped = vec![Complex64::new(0.0, 0.0); n2];
        for (i, &v) in c.iter().enumerate() {
            let l = i as i64 - half + 1;
            wrapped[l.rem_euclid(n2 as i64) as usize] = v;
        }
        let s = ComplexSeries::new(0, 1.0, wrapped).unwrap();
        let inv = crate::numkit::fft::fft(&s, Direction::Inverse).unwrap();
        for (i, g) in got.iter().enumerate() {
            let n = i as i64 - half + 1;
            let want = inv.values()[n.rem_euclid(n2 as i64) as usize] * n2 as f64;
            assert!((g - want).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let c = vec![Complex64::new(0.0, 0.0); 64];
        let out = FrftPlan::new(64, 0.77).unwrap().execute(&c);
        assert!(out.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn linearity() {
        let a = unit_random(256, 1);
        let b = unit_random(256, 2);
        let (alpha, beta) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
        let plan = FrftPlan::new(256, 0.05).unwrap();
        let mix: Vec<_> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        let fa = plan.execute(&a);
        let fb = plan.execute(&b);
        let fm = plan.execute(&mix);
        for i in 0..256 {
            assert!((fm[i] - (alpha * fa[i] + beta * fb[i])).norm() < 1e-12 * 256.0);
        }
    }

    #[test]
    fn series_wrapper_checks_layout() {
        let v = vec![Complex64::new(1.0, 0.0); 8];
        let bad = ComplexSeries::new(0, 0.5, v.clone()).unwrap();
        assert!(frft(&bad, 0.1).is_err());
        let good = ComplexSeries::new(-3, 0.5, v).unwrap();
        let out = frft(&good, 0.1).unwrap();
        assert_eq!(out.first_index(), -3);
        assert!((out.spacing() - 0.2).abs() < 1e-15);
        let odd = ComplexSeries::new(-2, 0.5, vec![Complex64::new(1.0, 0.0); 6]).unwrap();
        assert!(matches!(frft(&odd, 0.1), Err(Error::NotPowerOfTwo { .. })));
    }
}
