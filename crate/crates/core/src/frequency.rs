//! Relative-frequency norm densities of `N`-fold repeated two-level states.
//!
//! For `|Psi>_N = (a|up> + b|down>)^N` the squared norm splits by the
//! number of up factors `n`:
//!
//! ```text
//! rho(N, n) = C(N, n) |a|^(2n) |b|^(2(N - n))
//! ```
//!
//! Every table here stores natural logarithms. Plain doubles underflow for
//! `N` around a thousand, and the interesting questions (how fast the tails
//! vanish) live far below that.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{
    exp, ln, ln_binomial_pmf, ln_factorial, log_sum_exp, pairwise_sum_by, powf,
    round_ties_even, sqrt,
};
use crate::state::{Amplitude, TwoLevelAmplitudes};
use crate::{Error, Result};

/// Largest multinomial table `multistate_density` will build.
pub const MULTISTATE_CAPACITY: usize = 1_000_000;

const NORM_TOLERANCE: f64 = 1e-12;

/// A table of `N + 1` log-weights indexed by `n = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogTable {
    log_values: Vec<f64>,
}

impl LogTable {
    fn binomial(n: u64, p: f64) -> Self {
        LogTable {
            log_values: (0..=n).map(|k| ln_binomial_pmf(k, n, p)).collect(),
        }
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    /// `exp` of entry `k`; underflows to `0.0` far in the tails.
    pub fn value(&self, k: usize) -> f64 {
        exp(self.log_values[k])
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_values.iter().map(|&l| exp(l)).collect()
    }

    pub fn total(&self) -> f64 {
        pairwise_sum_by(&self.log_values, &|l| exp(*l))
    }

    pub fn log_total(&self) -> f64 {
        log_sum_exp(&self.log_values)
    }

    /// Running sums of the linear values, left to right.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.log_values
            .iter()
            .map(|&l| {
                acc += exp(l);
                acc
            })
            .collect()
    }

    /// Index of the largest entry; the first one on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (k, &l) in self.log_values.iter().enumerate() {
            if l > self.log_values[best] {
                best = k;
            }
        }
        best
    }
}

/// `ln rho(N, n)` for `n = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyDensity {
    trials: u64,
    spec: TwoLevelAmplitudes,
    table: LogTable,
}

impl FrequencyDensity {
    /// `N`, the number of repeated factors.
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn spec(&self) -> &TwoLevelAmplitudes {
        &self.spec
    }

    pub fn table(&self) -> &LogTable {
        &self.table
    }

    pub fn log_rho(&self) -> &[f64] {
        self.table.log_values()
    }

    pub fn rho(&self, n: usize) -> f64 {
        self.table.value(n)
    }

    /// Relative frequency `n / N` of the largest entry.
    pub fn argmax_frequency(&self) -> f64 {
        self.table.argmax() as f64 / self.trials as f64
    }
}

fn require_trials(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::param("N", "must be at least 1"))
    } else {
        Ok(())
    }
}

/// `ln rho(N, n)` for a single `n`, without building the table.
pub fn ln_density_at(spec: &TwoLevelAmplitudes, n_trials: u64, n: u64) -> f64 {
    ln_binomial_pmf(n, n_trials, spec.up_weight())
}

pub fn density(spec: &TwoLevelAmplitudes, n: u64) -> Result<FrequencyDensity> {
    require_trials(n)?;
    Ok(FrequencyDensity {
        trials: n,
        spec: *spec,
        table: LogTable::binomial(n, spec.up_weight()),
    })
}

/// `N rho(N, n)` sampled at the grid point `n/N` nearest to `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledDensitySample {
    /// Requested frequency.
    pub r: f64,
    /// Grid index `n = round(r N)`, ties to even.
    pub n: u64,
    pub value: f64,
}

impl ScaledDensitySample {
    pub fn grid_r(&self, trials: u64) -> f64 {
        self.n as f64 / trials as f64
    }
}

pub fn scaled_density(spec: &TwoLevelAmplitudes, n: u64, r: f64) -> Result<ScaledDensitySample> {
    require_trials(n)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::param("r", "must lie in (0, 1)"));
    }
    let k = round_ties_even(r * n as f64) as u64;
    Ok(ScaledDensitySample {
        r,
        n: k,
        value: n as f64 * exp(ln_density_at(spec, n, k)),
    })
}

/// Trapezoid rule for `int N rho(N, rN) dr` over the grid `r = n/N`.
pub fn scaled_integral(spec: &TwoLevelAmplitudes, n: u64) -> Result<f64> {
    let d = density(spec, n)?;
    let ends = 0.5 * (d.rho(0) + d.rho(n as usize));
    Ok(d.table.total() - ends)
}

fn standard_deviation(spec: &TwoLevelAmplitudes, n: u64) -> f64 {
    sqrt(spec.up_weight() * spec.down_weight() / n as f64)
}

/// Unit-area Gaussian with mean `|a|^2` and variance `|ab|^2 / N`.
pub fn gaussian_approx(spec: &TwoLevelAmplitudes, n: u64, r: f64) -> Result<f64> {
    require_trials(n)?;
    if spec.is_degenerate() {
        return Err(Error::Degenerate);
    }
    let sigma = standard_deviation(spec, n);
    let z = (r - spec.up_weight()) / sigma;
    Ok(exp(-0.5 * z * z) / (sigma * sqrt(2.0 * PI)))
}

/// Width of the Gaussian approximation, `|ab| / sqrt(N)`.
pub fn gaussian_sigma(spec: &TwoLevelAmplitudes, n: u64) -> Result<f64> {
    require_trials(n)?;
    Ok(standard_deviation(spec, n))
}

/// `ln` of the norm mass with `|n/N - |a|^2| > epsilon`.
pub fn ln_tail_mass(spec: &TwoLevelAmplitudes, n: u64, epsilon: f64) -> Result<f64> {
    require_trials(n)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::param("epsilon", "must be positive and finite"));
    }
    let nf = n as f64;
    let centre = nf * spec.up_weight();
    let half_width = nf * epsilon;
    let tail: Vec<f64> = (0..=n)
        .filter(|&k| crate::math::abs(k as f64 - centre) > half_width)
        .map(|k| ln_density_at(spec, n, k))
        .collect();
    Ok(log_sum_exp(&tail))
}

pub fn tail_mass(spec: &TwoLevelAmplitudes, n: u64, epsilon: f64) -> Result<f64> {
    Ok(exp(ln_tail_mass(spec, n, epsilon)?))
}

/// Magnitudes `(|a|, |b|)` normalized in the `p`-norm instead of the 2-norm.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PNormSpec {
    a_mag: f64,
    b_mag: f64,
    p: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    weight: f64,
}

impl PNormSpec {
    pub fn new(a_mag: f64, b_mag: f64, p: f64) -> Result<Self> {
        if !(a_mag.is_finite() && b_mag.is_finite() && p.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(a_mag > 0.0 && b_mag > 0.0 && p > 0.0) {
            return Err(Error::param("pnorm", "a_mag, b_mag and p must be positive"));
        }
        let (up, down) = (pow(a_mag, p), pow(b_mag, p));
        let norm = up + down;
        if crate::math::abs(norm - 1.0) > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr: norm });
        }
        Ok(PNormSpec {
            a_mag,
            b_mag,
            p,
            weight: up / norm,
        })
    }

    /// Magnitudes chosen so that `a_mag^p = weight`.
    pub fn from_weight(weight: f64, p: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::param("weight", "a_mag^p must lie in (0, 1)"));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::param("p", "must be positive and finite"));
        }
        let spec = Self::new(powf(weight, 1.0 / p), powf(1.0 - weight, 1.0 / p), p)?;
        Ok(PNormSpec { weight, ..spec })
    }

    pub fn a_mag(&self) -> f64 {
        self.a_mag
    }

    pub fn b_mag(&self) -> f64 {
        self.b_mag
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `a_mag^p`.
    pub fn up_weight(&self) -> f64 {
        self.weight
    }

    /// `b_mag^p`, as `1 - a_mag^p`.
    pub fn down_weight(&self) -> f64 {
        1.0 - self.weight
    }
}

// x*x matches |a|^2 from the 2-norm path bit for bit
fn pow(x: f64, p: f64) -> f64 {
    if p == 2.0 {
        x * x
    } else {
        powf(x, p)
    }
}

/// `ln(C(N, n) |a^n b^(N-n)|^p)` for `n = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PNormDensity {
    trials: u64,
    spec: PNormSpec,
    table: LogTable,
}

impl PNormDensity {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn spec(&self) -> &PNormSpec {
        &self.spec
    }

    pub fn table(&self) -> &LogTable {
        &self.table
    }

    pub fn argmax_frequency(&self) -> f64 {
        self.table.argmax() as f64 / self.trials as f64
    }
}

pub fn pnorm_density(spec: &PNormSpec, n: u64) -> Result<PNormDensity> {
    require_trials(n)?;
    Ok(PNormDensity {
        trials: n,
        spec: *spec,
        table: LogTable::binomial(n, spec.up_weight()),
    })
}

/// Relative frequency `R(n)` of the record "n ups in N measurements" over
/// unboundedly many repetitions of the `N`-measurement run.
#[derive(Clone, Debug, PartialEq)]
pub struct RecordDistribution {
    trials: u64,
    repetitions: Option<u64>,
    spec: TwoLevelAmplitudes,
    table: LogTable,
}

impl RecordDistribution {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn spec(&self) -> &TwoLevelAmplitudes {
        &self.spec
    }

    pub fn table(&self) -> &LogTable {
        &self.table
    }

    pub fn log_r(&self) -> &[f64] {
        self.table.log_values()
    }

    pub fn repetitions(&self) -> Option<u64> {
        self.repetitions
    }

    /// `M R(n)` for a finite number `M` of repetitions.
    pub fn expected_count(&self, n: usize) -> Option<f64> {
        self.repetitions.map(|m| m as f64 * self.table.value(n))
    }
}

/// The record table of `N` particle-apparatus pairs. Its coefficients are
/// those of the plain repeated state, so the numbers equal [`density`].
/// `repetitions` is the optional finite number `M` of runs used for
/// expected counts.
pub fn record_distribution(
    spec: &TwoLevelAmplitudes,
    n: u64,
    repetitions: Option<u64>,
) -> Result<RecordDistribution> {
    let d = density(spec, n)?;
    Ok(RecordDistribution {
        trials: n,
        repetitions,
        spec: *spec,
        table: d.table,
    })
}

/// Multinomial norm table over compositions `(n_1, .., n_k)` of `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultinomialTable {
    trials: u64,
    outcomes: usize,
    parts: Vec<u32>,
    log_mass: Vec<f64>,
}

impl MultinomialTable {
    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn len(&self) -> usize {
        self.log_mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_mass.is_empty()
    }

    pub fn composition(&self, i: usize) -> &[u32] {
        &self.parts[i * self.outcomes..(i + 1) * self.outcomes]
    }

    pub fn log_mass(&self) -> &[f64] {
        &self.log_mass
    }

    /// Position of a composition, if it sums to `N` and has `k` parts.
    pub fn position(&self, composition: &[u32]) -> Option<usize> {
        (0..self.len()).find(|&i| self.composition(i) == composition)
    }

    pub fn total(&self) -> f64 {
        pairwise_sum_by(&self.log_mass, &|l| exp(*l))
    }

    /// `ln` of the mass with outcome `which` occurring `n` times, `n = 0..=N`.
    pub fn marginal(&self, which: usize) -> Result<Vec<f64>> {
        if which >= self.outcomes {
            return Err(Error::IndexOutOfRange {
                index: which,
                len: self.outcomes,
            });
        }
        let mut bins: Vec<Vec<f64>> = (0..=self.trials).map(|_| Vec::new()).collect();
        for i in 0..self.len() {
            bins[self.composition(i)[which] as usize].push(self.log_mass[i]);
        }
        Ok(bins.iter().map(|b| log_sum_exp(b)).collect())
    }
}

fn composition_count(n: u64, k: usize) -> u128 {
    // C(n + k - 1, k - 1), saturating
    let mut c: u128 = 1;
    for i in 1..k as u128 {
        c = c.saturating_mul(n as u128 + i) / i;
        if c > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    c
}

/// Generalization of [`density`] to `k` outcomes with amplitudes `amps`.
pub fn multistate_density(amps: &[Amplitude], n: u64) -> Result<MultinomialTable> {
    multistate_density_with_capacity(amps, n, MULTISTATE_CAPACITY)
}

pub fn multistate_density_with_capacity(
    amps: &[Amplitude],
    n: u64,
    cap: usize,
) -> Result<MultinomialTable> {
    require_trials(n)?;
    if amps.is_empty() {
        return Err(Error::param("amps", "needs at least one outcome"));
    }
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let weights: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let norm = pairwise_sum_by(&weights, &|w| *w);
    if crate::math::abs(norm - 1.0) > NORM_TOLERANCE {
        return Err(Error::NotNormalized { norm_sqr: norm });
    }
    let k = amps.len();
    let count = composition_count(n, k);
    if count > cap as u128 {
        return Err(Error::Capacity {
            requested: count,
            cap: cap as u128,
        });
    }
    let ln_weights: Vec<f64> = weights.iter().map(|&w| ln(w)).collect();
    let ln_n_fact = ln_factorial(n);

    let count = count as usize;
    let mut parts = Vec::with_capacity(count * k);
    let mut log_mass = Vec::with_capacity(count);
    // lexicographically descending in n_1, starting from (N, 0, .., 0)
    let mut current: Vec<u32> = alloc::vec![0; k];
    current[0] = n as u32;
    loop {
        let mut lm = ln_n_fact;
        for (&m, &lw) in current.iter().zip(&ln_weights) {
            lm -= ln_factorial(u64::from(m));
            if m > 0 {
                lm += f64::from(m) * lw;
            }
        }
        parts.extend_from_slice(&current);
        log_mass.push(lm);
        if !next_composition(&mut current) {
            break;
        }
    }
    Ok(MultinomialTable {
        trials: n,
        outcomes: k,
        parts,
        log_mass,
    })
}

// Steps to the next composition in reverse-lexicographic order.
fn next_composition(c: &mut [u32]) -> bool {
    let k = c.len();
    if k < 2 {
        return false;
    }
    // rightmost non-zero position before the last slot
    let Some(i) = (0..k - 1).rev().find(|&i| c[i] > 0) else {
        return false;
    };
    let tail = c[k - 1];
    c[k - 1] = 0;
    c[i] -= 1;
    c[i + 1] = tail + 1;
    true
}
