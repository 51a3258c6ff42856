//! Scalar numerics shared by the other modules.
//!
//! Reductions here have a fixed association order that depends only on the
//! input length, so results do not change with evaluation order or thread
//! count.

use core::f64::consts::PI;

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Round half to even.
pub(crate) fn round_ties_even(x: f64) -> f64 {
    libm::rint(x)
}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation of `f(x)` over `xs`.
pub fn pairwise_sum_by<T, F>(xs: &[T], f: &F) -> f64
where
    F: Fn(&T) -> f64,
{
    if xs.len() <= PAIRWISE_BLOCK {
        xs.iter().fold(0.0, |acc, x| acc + f(x))
    } else {
        let mid = xs.len() / 2;
        pairwise_sum_by(&xs[..mid], f) + pairwise_sum_by(&xs[mid..], f)
    }
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_sum_by(xs, &|x| *x)
}

/// `ln(sum(exp(x)))` with the maximum factored out. Returns `-inf` for an
/// empty slice or one made only of `-inf`.
pub fn log_sum_exp(log_terms: &[f64]) -> f64 {
    let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + ln(pairwise_sum_by(log_terms, &|x| exp(*x - max)))
}

/// `ln(m!) - ln(sqrt(2 pi m) (m/e)^m)` for integer `m <= 15`.
const STIRLING_ERROR: [f64; 16] = [
    0.0,
    0.08106146679532726,
    0.0413406959554093,
    0.02767792568499834,
    0.020790672103765093,
    0.016644691189821193,
    0.013876128823070748,
    0.01189670994589177,
    0.010411265261972096,
    0.009255462182712733,
    0.00833056343336287,
    0.007573675487951841,
    0.00694284010720953,
    0.006408994188004207,
    0.0059513701127588475,
    0.005554733551962801,
];

/// Error of Stirling's formula for `ln(m!)`.
pub fn stirling_error(m: u64) -> f64 {
    if m < STIRLING_ERROR.len() as u64 {
        return STIRLING_ERROR[m as usize];
    }
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let m = m as f64;
    let mm = m * m;
    if m > 500.0 {
        (S0 - S1 / mm) / m
    } else if m > 80.0 {
        (S0 - (S1 - S2 / mm) / mm) / m
    } else if m > 35.0 {
        (S0 - (S1 - (S2 - S3 / mm) / mm) / mm) / m
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / mm) / mm) / mm) / mm) / m
    }
}

/// Deviance term `x ln(x/mean) + mean - x`, evaluated without cancellation
/// when `x` is close to `mean`.
pub fn deviance_term(x: f64, mean: f64) -> f64 {
    if abs(x - mean) < 0.1 * (x + mean) {
        let mut v = (x - mean) / (x + mean);
        let mut s = (x - mean) * v;
        let mut ej = 2.0 * x * v;
        v *= v;
        for j in 1..1000 {
            ej *= v;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * ln(x / mean) + mean - x
    }
}

/// `ln(m!)`.
pub fn ln_factorial(m: u64) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let mf = m as f64;
    stirling_error(m) + (mf + 0.5) * ln(mf) - mf + 0.5 * ln(2.0 * PI)
}

/// `ln(C(n, k) p^k (1 - p)^(n-k))`, the binomial log-pmf.
///
/// Interior terms use the saddle-point form (Stirling error plus deviance),
/// which keeps the relative error of the result near machine precision even
/// for `n` in the millions, where differencing `ln Gamma` values would lose
/// about `log10(n)` digits. The rounding of the means `np` and `n(1 - p)` is
/// recovered with FMA and fed back to first order.
pub fn ln_binomial_pmf(k: u64, n: u64, p: f64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if p == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if p == 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    let nf = n as f64;
    if k == 0 {
        return nf * ln_1p(-p);
    }
    if k == n {
        return nf * ln(p);
    }
    let kf = k as f64;
    let rest = (n - k) as f64;

    let mean_up = nf * p;
    let err_up = libm::fma(nf, p, -mean_up);
    let mean_down = nf - mean_up;
    let err_down = ((nf - mean_down) - mean_up) - err_up;

    let lc = stirling_error(n) - stirling_error(k) - stirling_error(n - k)
        - deviance_term(kf, mean_up)
        - deviance_term(rest, mean_down)
        - (1.0 - kf / mean_up) * err_up
        - (1.0 - rest / mean_down) * err_down;
    let lf = ln(2.0 * PI) + ln(kf) + ln_1p(-kf / nf);
    lc - 0.5 * lf
}
