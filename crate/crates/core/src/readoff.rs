//! Reading determinate values off a state.
//!
//! The squared norm of a state is marginalised onto one discrete variable
//! `q`, giving a [`NormDensity`]. If all of that mass sits on a single value
//! `q0` then `q` has the value `q0` in the state. Finite computations never
//! produce exact zeros in the tails, so [`read_off`] takes an explicit
//! tolerance and reports it back in the result.
//!
//! Variables are label functions over basis labels (a tensor factor, the
//! number of up factors, a binning of something else), not operator
//! spectra.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::frequency::{FrequencyDensity, LogTable};
use crate::math::{exp, pairwise_sum};
use crate::state::{StateVector, UP};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct NormDensity<L> {
    labels: Vec<L>,
    mass: Vec<f64>,
    total: f64,
}

impl<L: Ord + Clone> NormDensity<L> {
    /// Labels must be distinct; masses non-negative and finite.
    pub fn new(labels: Vec<L>, mass: Vec<f64>) -> Result<Self> {
        let total = pairwise_sum(&mass);
        Self::with_total(labels, mass, total)
    }

    /// As [`NormDensity::new`] but with the total given, e.g. the squared norm
    /// of the state the masses came from.
    pub fn with_total(labels: Vec<L>, mass: Vec<f64>, total: f64) -> Result<Self> {
        if labels.len() != mass.len() {
            return Err(Error::ShapeMismatch {
                expected: labels.len(),
                found: mass.len(),
            });
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::param("mass", "must be finite and non-negative"));
        }
        let mut sorted: Vec<&L> = labels.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param("labels", "must be distinct"));
        }
        Ok(NormDensity {
            labels,
            mass,
            total,
        })
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// Squared norm of the source state.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn mass_of(&self, label: &L) -> Option<f64> {
        self.labels.iter().position(|l| l == label).map(|i| self.mass[i])
    }

    /// `mass / total` per label; zeros when the total is zero.
    pub fn fractions(&self) -> Vec<f64> {
        self.mass
            .iter()
            .map(|m| if self.total > 0.0 { m / self.total } else { 0.0 })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.labels.iter().zip(self.mass.iter().copied())
    }
}

impl NormDensity<u64> {
    /// The relative-frequency table as a density over the up-count `n`.
    pub fn from_frequency(density: &FrequencyDensity) -> Self {
        Self::from_log_table(density.table())
    }

    pub fn from_log_table(table: &LogTable) -> Self {
        let labels = (0..table.len() as u64).collect();
        let mass: Vec<f64> = table.log_values().iter().map(|&l| exp(l)).collect();
        let total = table.total();
        NormDensity {
            labels,
            mass,
            total,
        }
    }
}

/// `mass[q] = sum over labels with q(label) = q of |amp|^2`.
///
/// `codomain` lists the values the variable may take, in output order.
pub fn marginal_density<L, F>(psi: &StateVector, codomain: Vec<L>, variable: F) -> Result<NormDensity<L>>
where
    L: Ord + Clone,
    F: Fn(&[usize]) -> L,
{
    marginal_with_mask(psi, codomain, variable, |_| true)
}

fn marginal_with_mask<L, F, M>(
    psi: &StateVector,
    codomain: Vec<L>,
    variable: F,
    keep: M,
) -> Result<NormDensity<L>>
where
    L: Ord + Clone,
    F: Fn(&[usize]) -> L,
    M: Fn(&[usize]) -> bool,
{
    let slot: BTreeMap<L, usize> = codomain.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
    if slot.len() != codomain.len() {
        return Err(Error::param("codomain", "must be distinct"));
    }
    let mut bins: Vec<Vec<f64>> = codomain.iter().map(|_| Vec::new()).collect();
    let mut kept = Vec::with_capacity(psi.len());
    let mut outside = false;
    psi.for_each_label(|label, amp| {
        if !keep(label) {
            return;
        }
        let w = amp.norm_sqr();
        kept.push(w);
        match slot.get(&variable(label)) {
            Some(&i) => bins[i].push(w),
            None => outside = true,
        }
    });
    if outside {
        return Err(Error::OutsideCodomain);
    }
    let mass = bins.iter().map(|b| pairwise_sum(b)).collect();
    NormDensity::with_total(codomain, mass, pairwise_sum(&kept))
}

/// Marginal over the label of one tensor factor.
pub fn marginal_factor(psi: &StateVector, factor: usize) -> Result<NormDensity<usize>> {
    let dim = factor_dim(psi, factor)?;
    marginal_density(psi, (0..dim).collect(), |label| label[factor])
}

/// Marginal over the number of [`UP`] factors, `0..=N`. Every factor must be
/// two-level.
pub fn marginal_up_count(psi: &StateVector) -> Result<NormDensity<usize>> {
    for factor in 0..psi.num_factors() {
        psi.require_two_level(factor)?;
    }
    marginal_density(psi, (0..=psi.num_factors()).collect(), up_count)
}

/// Number of factors labeled [`UP`].
pub fn up_count(label: &[usize]) -> usize {
    label.iter().filter(|&&l| l == UP).count()
}

fn factor_dim(psi: &StateVector, factor: usize) -> Result<usize> {
    psi.dims().get(factor).copied().ok_or(Error::IndexOutOfRange {
        index: factor,
        len: psi.num_factors(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ReadOff<L> {
    /// All mass off `value` is within tolerance.
    Determined { value: L },
    /// Labels carrying more than `tolerance * total`.
    Indeterminate { support: Vec<(L, f64)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReadOffResult<L> {
    pub outcome: ReadOff<L>,
    pub tolerance_used: f64,
}

impl<L> ReadOffResult<L> {
    pub fn is_determined(&self) -> bool {
        matches!(self.outcome, ReadOff::Determined { .. })
    }

    pub fn value(&self) -> Option<&L> {
        match &self.outcome {
            ReadOff::Determined { value } => Some(value),
            ReadOff::Indeterminate { .. } => None,
        }
    }
}

/// Determined at `q0` iff the mass away from `q0` is at most
/// `tolerance * total`. The candidate `q0` is the heaviest label (first on
/// ties), so raising the tolerance never changes a determined value.
pub fn read_off<L: Ord + Clone>(rho: &NormDensity<L>, tolerance: f64) -> Result<ReadOffResult<L>> {
    if !(tolerance >= 0.0) || !tolerance.is_finite() {
        return Err(Error::param("tolerance", "must be finite and non-negative"));
    }
    if !(rho.total > 0.0) || rho.labels.is_empty() {
        return Err(Error::EmptyState);
    }
    let mut best = 0;
    for (i, &m) in rho.mass.iter().enumerate() {
        if m > rho.mass[best] {
            best = i;
        }
    }
    let off: Vec<f64> = rho
        .mass
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &m)| m)
        .collect();
    let threshold = tolerance * rho.total;
    let outcome = if pairwise_sum(&off) <= threshold {
        ReadOff::Determined {
            value: rho.labels[best].clone(),
        }
    } else {
        ReadOff::Indeterminate {
            support: rho
                .iter()
                .filter(|&(_, m)| m > threshold)
                .map(|(l, m)| (l.clone(), m))
                .collect(),
        }
    };
    Ok(ReadOffResult {
        outcome,
        tolerance_used: tolerance,
    })
}

/// Table from fine labels `q` to coarse labels `q'`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseMap<L, M> {
    table: BTreeMap<L, M>,
}

impl<L: Ord + Clone, M: Ord + Clone> CoarseMap<L, M> {
    pub fn new(table: BTreeMap<L, M>) -> Self {
        CoarseMap { table }
    }

    pub fn from_fn<F: Fn(&L) -> M>(labels: &[L], f: F) -> Self {
        CoarseMap {
            table: labels.iter().map(|l| (l.clone(), f(l))).collect(),
        }
    }

    pub fn get(&self, label: &L) -> Option<&M> {
        self.table.get(label)
    }
}

impl<L: Ord + Clone> CoarseMap<L, L> {
    pub fn identity(labels: &[L]) -> Self {
        Self::from_fn(labels, |l| l.clone())
    }

    /// Sends every label in `merged` to `target`, everything else to itself.
    pub fn merge(labels: &[L], merged: &[L], target: L) -> Self {
        Self::from_fn(labels, |l| {
            if merged.contains(l) {
                target.clone()
            } else {
                l.clone()
            }
        })
    }
}

impl CoarseMap<u64, i64> {
    /// Bins the up-count `n` of an `N`-trial table into cells of width
    /// `width` in `r = n/N`, centred on multiples of `width`: cell `j`
    /// holds `r` in `[(j - 1/2) width, (j + 1/2) width)`.
    pub fn frequency_cells(trials: u64, width: f64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::param("N", "must be at least 1"));
        }
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::param("width", "must be positive and finite"));
        }
        let labels: Vec<u64> = (0..=trials).collect();
        Ok(Self::from_fn(&labels, |&n| {
            libm::floor(n as f64 / trials as f64 / width + 0.5) as i64
        }))
    }
}

/// Push-forward of `rho` along `map`. The total is carried over unchanged.
pub fn coarse_grain<L, M>(rho: &NormDensity<L>, map: &CoarseMap<L, M>) -> Result<NormDensity<M>>
where
    L: Ord + Clone,
    M: Ord + Clone,
{
    let mut bins: BTreeMap<M, Vec<f64>> = BTreeMap::new();
    for (label, m) in rho.iter() {
        let target = map.get(label).ok_or(Error::MapNotTotal)?;
        bins.entry(target.clone()).or_default().push(m);
    }
    let (labels, mass) = bins.into_iter().map(|(l, ms)| (l, pairwise_sum(&ms))).unzip();
    NormDensity::with_total(labels, mass, rho.total)
}

/// Marginal of the slice of `psi` where `cond_factor` has label
/// `cond_value`; the slice's own squared norm is the total.
pub fn conditional_density<L, F>(
    psi: &StateVector,
    cond_factor: usize,
    cond_value: usize,
    codomain: Vec<L>,
    variable: F,
) -> Result<NormDensity<L>>
where
    L: Ord + Clone,
    F: Fn(&[usize]) -> L,
{
    let dim = factor_dim(psi, cond_factor)?;
    if cond_value >= dim {
        return Err(Error::IndexOutOfRange {
            index: cond_value,
            len: dim,
        });
    }
    marginal_with_mask(psi, codomain, variable, |label| label[cond_factor] == cond_value)
}

/// Read-off of `q_factor` in the slice where `cond_factor = cond_value`.
pub fn conditional_readoff(
    psi: &StateVector,
    cond_factor: usize,
    cond_value: usize,
    q_factor: usize,
    tolerance: f64,
) -> Result<ReadOffResult<usize>> {
    let dim = factor_dim(psi, q_factor)?;
    let rho = conditional_density(psi, cond_factor, cond_value, (0..dim).collect(), |l| l[q_factor])?;
    read_off(&rho, tolerance)
}
