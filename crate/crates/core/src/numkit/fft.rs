//! Radix-2 complex FFT.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::series::ComplexSeries;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_m = sum_k x_k e^{-2 pi i k m / n}`
    Forward,
    /// `x_k = (1/n) sum_m X_m e^{+2 pi i k m / n}`
    Inverse,
}

/// Precomputed twiddle factors and bit-reversal permutation for one length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        let twiddles = (0..len / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        let bits = len.trailing_zeros();
        let bitrev = (0..len)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        Ok(FftPlan {
            len,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place transform. `data.len()` must equal the plan length.
    pub fn process(&self, data: &mut [Complex64], direction: Direction) {
        assert_eq!(data.len(), self.len, "buffer length does not match plan");
        let n = self.len;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let conj = direction == Direction::Inverse;
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if conj {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
        if conj {
            let scale = 1.0 / n as f64;
            for x in data.iter_mut() {
                *x *= scale;
            }
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.process(data, Direction::Forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.process(data, Direction::Inverse);
    }
}

/// Transforms a series; element `i` of the result is frequency index `i`.
/// The returned series keeps the input spacing and starts at offset 0.
pub fn fft(x: &ComplexSeries, direction: Direction) -> Result<ComplexSeries> {
    let plan = FftPlan::new(x.len())?;
    let mut data = x.values().to_vec();
    plan.process(&mut data, direction);
    ComplexSeries::new(0, x.spacing(), data)
}
