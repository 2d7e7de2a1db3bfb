//! Slow reference implementations used by tests and the CLI self-check.
//! None of these share code with the fast paths they check.

use num_complex::Complex64;

use crate::numkit::sinc;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss 7-point weights for the odd-indexed Kronrod nodes (and the centre).
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * GK_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        kronrod += GK_WEIGHTS[i] * s;
        if i % 2 == 1 {
            gauss += G7_WEIGHTS[i / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut stack = vec![(a, b, tol, 0u32)];
    while let Some((lo, hi, eps, depth)) = stack.pop() {
        let (val, err) = gk15(f, lo, hi);
        // Below a few ulps of the panel value the estimate is pure roundoff.
        if err <= eps.max(64.0 * f64::EPSILON * val.abs()) || depth >= 30 {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * eps, depth + 1));
            stack.push((mid, hi, 0.5 * eps, depth + 1));
        }
    }
    total
}

/// `int_0^nu sinc(eta) e^{-eta^2 / 2 r^2} d eta`, integrated one unit cell at a time.
pub fn sinc_gauss_integral(r: f64, nu: f64) -> f64 {
    if nu < 0.0 {
        return -sinc_gauss_integral(r, -nu);
    }
    let kernel = move |x: f64| sinc(x) * (-x * x / (2.0 * r * r)).exp();
    let cells = nu.floor() as i64;
    let mut acc = 0.0;
    for j in 0..cells {
        acc += integrate(&kernel, j as f64, (j + 1) as f64, 1e-15);
    }
    if nu > cells as f64 {
        acc += integrate(&kernel, cells as f64, nu, 1e-15);
    }
    acc
}

/// `G_r(k)` for `k = 0..=n` by accumulating unit-cell quadratures.
pub fn sinc_gauss_integrals(r: f64, n: usize) -> Vec<f64> {
    let kernel = move |x: f64| sinc(x) * (-x * x / (2.0 * r * r)).exp();
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(acc);
    for j in 0..n {
        acc += integrate(&kernel, j as f64, (j + 1) as f64, 1e-15);
        out.push(acc);
    }
    out
}

/// `sum_j w_j e^{-i zeta y_j}` evaluated term by term.
pub fn exponential_sum(weights: &[Complex64], points: &[f64], zeta: f64) -> Complex64 {
    weights
        .iter()
        .zip(points)
        .map(|(&w, &y)| w * Complex64::from_polar(1.0, -zeta * y))
        .sum()
}

/// `e^{i delta k}`, phase reduced mod 2pi in double-double.
fn exact_phase(delta: f64, k: i64) -> Complex64 {
    const TWO_PI: (f64, f64) = (std::f64::consts::TAU, 2.449_293_598_294_706_4e-16);
    let kf = k as f64;
    let p = delta * kf;
    let p_err = delta.mul_add(kf, -p);
    let turns = (p / TWO_PI.0).round();
    let reduced = (p - turns * TWO_PI.0) + turns.mul_add(-TWO_PI.0, turns * TWO_PI.0);
    Complex64::from_polar(1.0, reduced - turns * TWO_PI.1 + p_err)
}

/// `S_n = sum_{l=-N+1}^{N} c_l e^{i delta l n}` for `n = -N+1..N`; `c[i]` is `c_{i-N+1}`.
pub fn fractional_dft(c: &[Complex64], delta: f64) -> Vec<Complex64> {
    let half = (c.len() / 2) as i64;
    (-half + 1..=half)
        .map(|n| {
            c.iter()
                .enumerate()
                .map(|(i, &v)| {
                    let l = i as i64 - half + 1;
                    v * exact_phase(delta, l * n)
                })
                .sum()
        })
        .collect()
}

/// Unrearranged double sum `sum_{m=0}^{l-1} sum_{k=m-N'+1}^{m+N'} f_k (G(m+1-k) - G(m-k))`
/// for `l = 1..=n_prime`. `f(k)` must already include the factor `h~`,
/// and `g(k)` is the kernel integral for any integer `k` (odd in `k`).
pub fn indefinite_double_sum(
    f: &dyn Fn(i64) -> Complex64,
    g: &dyn Fn(i64) -> f64,
    n_prime: i64,
) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_prime as usize);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..n_prime {
        for k in m - n_prime + 1..=m + n_prime {
            acc += f(k) * (g(m + 1 - k) - g(m - k));
        }
        out.push(acc);
    }
    out
}
