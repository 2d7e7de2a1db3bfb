//! Gaussian-gridding nonuniform FFT for the DE sums
//! `mu_k = sum_j Phi_j e^{-i k h~ y_j}`, `k = 0..N_gamma`.
//!
//! Each source is spread onto the integer lattice `l` with the kernel
//! `e^{-(l - v_j)^2 / 4 tau}` (`v_j = h~ y_j / a`, `a = 2 pi / M`), truncated
//! to `|l - v_j| <= b`. The lattice sum is one length-`M` FFT, and the Gaussian
//! is divided out afterwards. Frequencies are shifted by `floor(N_gamma/2)`
//! so the deconvolution factor `e^{tau (a k')^2}` stays bounded by `e^{tau pi^2/4}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::de_ft::DeSources;
use crate::error::{Error, Result};
use crate::numkit::{ComplexSeries, FftPlan};

pub const DEFAULT_EPSILON: f64 = 1e-10;
pub const DEFAULT_HALF_WIDTH: f64 = 20.0;

/// User-facing knobs; everything else is derived in [`NufftParams::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NufftSettings {
    pub epsilon: f64,
    pub b: f64,
}

impl Default for NufftSettings {
    fn default() -> Self {
        NufftSettings {
            epsilon: DEFAULT_EPSILON,
            b: DEFAULT_HALF_WIDTH,
        }
    }
}

impl NufftSettings {
    /// Smallest admissible window half-width `-(2/pi) log eps`.
    pub fn min_half_width(epsilon: f64) -> f64 {
        -2.0 / PI * epsilon.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NufftParams {
    pub epsilon: f64,
    pub b: f64,
    pub tau: f64,
    pub a: f64,
    pub h_check: f64,
    pub l_minus: i64,
    pub l_plus: i64,
}

impl NufftParams {
    /// Resolves the gridding constants for `m` sources at `points`.
    pub fn new(settings: NufftSettings, m: usize, points: &[f64], h_tilde: f64) -> Result<Self> {
        let NufftSettings { epsilon, b } = settings;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "NUFFT epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        let b_min = NufftSettings::min_half_width(epsilon);
        if !(b.is_finite() && b >= b_min * (1.0 - 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "NUFFT half-width b = {b} below -(2/pi) log eps = {b_min}"
            )));
        }
        if m < 2 || !m.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len: m });
        }
        let a = 2.0 * PI / m as f64;
        let h_check = 1.0;
        let v_min = points
            .iter()
            .map(|&y| h_tilde * y / a)
            .fold(f64::INFINITY, f64::min);
        let v_min = if v_min.is_finite() { v_min } else { 0.0 };
        let l_minus = b.ceil() as i64 - v_min.floor() as i64;
        let l_plus = -l_minus + m as i64 - 1;
        Ok(NufftParams {
            epsilon,
            b,
            tau: -epsilon.ln() / (PI * PI),
            a,
            h_check,
            l_minus,
            l_plus,
        })
    }

    pub fn lattice_len(&self) -> usize {
        (self.l_plus + self.l_minus + 1) as usize
    }
}

/// Augmented index windows `[j_min(l), j_max(l)]`, `l = -L_-..L_+`.
/// An empty window has `j_max = j_min - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexWindows {
    pub l_first: i64,
    pub j_min: Vec<i64>,
    pub j_max: Vec<i64>,
}

impl IndexWindows {
    pub fn window(&self, l: i64) -> (i64, i64) {
        let i = (l - self.l_first) as usize;
        (self.j_min[i], self.j_max[i])
    }

    pub fn l_last(&self) -> i64 {
        self.l_first + self.j_min.len() as i64 - 1
    }
}

/// Resumable forward scans over the monotone lattice coordinates `v_j`:
/// `j_min(l) = max{j | l >= ceil((v_j + b)/c)}` and
/// `j_max(l) = max{j | l >= floor((v_j - b)/c)}`. Total work is `O(M + L)`.
///
/// `coords[i]` is `v_j` for `j = first_j + i` and must be nondecreasing.
pub fn build_windows(coords: &[f64], first_j: i64, params: &NufftParams) -> IndexWindows {
    let n = coords.len();
    let b = params.b;
    let c = params.h_check;
    let enter = |i: usize| ((coords[i] - b) / c).floor();
    let leave = |i: usize| ((coords[i] + b) / c).ceil();
    let mut j_min = Vec::with_capacity(params.lattice_len());
    let mut j_max = Vec::with_capacity(params.lattice_len());
    // Positions into `coords`; `hi` counts entered sources, `lo` is the last left one.
    let mut lo = 0usize;
    let mut hi = 0usize;
    for l in -params.l_minus..=params.l_plus {
        let lf = l as f64;
        while lo + 1 < n && lf >= leave(lo + 1) {
            lo += 1;
        }
        while hi < n && lf >= enter(hi) {
            hi += 1;
        }
        j_min.push(first_j + lo as i64);
        j_max.push(first_j + hi as i64 - 1);
    }
    IndexWindows {
        l_first: -params.l_minus,
        j_min,
        j_max,
    }
}

/// Lattice coefficients `c_l = sum_{j in J~(l)} w_j e^{-(l c - v_j)^2 / 4 tau}`.
pub fn spread(
    weights: &[Complex64],
    coords: &[f64],
    windows: &IndexWindows,
    first_j: i64,
    params: &NufftParams,
) -> Vec<Complex64> {
    let inv4tau = 1.0 / (4.0 * params.tau);
    (windows.l_first..=windows.l_last())
        .map(|l| {
            let (lo, hi) = windows.window(l);
            let x = l as f64 * params.h_check;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in lo..=hi {
                let i = (j - first_j) as usize;
                let d = x - coords[i];
                acc += weights[i] * (-d * d * inv4tau).exp();
            }
            acc
        })
        .collect()
}

/// Evaluates `mu~_k` for `k = 0..=n_gamma` from the DE sources.
pub fn nufft_forward(
    sources: &DeSources,
    params: &NufftParams,
    h_tilde: f64,
    n_gamma: usize,
) -> Result<ComplexSeries> {
    let m = sources.params.m();
    if m != 2 * n_gamma {
        return Err(Error::InvalidParameter(format!(
            "NUFFT needs M = 2 N_gamma, got M = {m}, N_gamma = {n_gamma}"
        )));
    }
    if params.lattice_len() != m {
        return Err(Error::InvalidParameter(format!(
            "lattice length {} does not match M = {m}",
            params.lattice_len()
        )));
    }
    let shift = (n_gamma / 2) as i64;
    let first_j = sources.first_j();
    let coords: Vec<f64> = sources.points.iter().map(|&y| h_tilde * y / params.a).collect();
    let shifted: Vec<Complex64> = sources
        .weights
        .iter()
        .zip(&sources.points)
        .map(|(&w, &y)| w * Complex64::from_polar(1.0, -(shift as f64) * h_tilde * y))
        .collect();
    let windows = build_windows(&coords, first_j, params);
    let lattice = spread(&shifted, &coords, &windows, first_j, params);

    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (i, c) in lattice.into_iter().enumerate() {
        let l = windows.l_first + i as i64;
        buf[l.rem_euclid(m as i64) as usize] = c;
    }
    FftPlan::new(m)?.forward(&mut buf);

    let scale = (PI / params.tau).sqrt() * params.h_check / (2.0 * PI);
    let values = (0..=n_gamma as i64)
        .map(|k| {
            let kp = k - shift;
            let ak = params.a * kp as f64;
            buf[kp.rem_euclid(m as i64) as usize] * (scale * (params.tau * ak * ak).exp())
        })
        .collect();
    ComplexSeries::new(0, h_tilde, values)
}

/// Extends values at `k = 0..N` to `k = -N+1..N` using `mu(-k) = conj(mu(k))`.
pub fn extend_conjugate(series: &ComplexSeries) -> Result<ComplexSeries> {
    if series.first_index() != 0 {
        return Err(Error::InvalidParameter(format!(
            "conjugate extension expects a series starting at k = 0, got {}",
            series.first_index()
        )));
    }
    let n = series.last_index();
    if n == 0 {
        return Ok(series.clone());
    }
    ComplexSeries::from_fn(-n + 1, n, series.spacing(), |k| {
        if k >= 0 {
            series.at(k)
        } else {
            series.at(-k).conj()
        }
    })
}
