//! Dense state vectors over labeled tensor factors.
//!
//! Basis labels are mixed-radix numbers with factor 0 as the most
//! significant digit, so the amplitude array is in lexicographic label
//! order. Two-level factors use label [`UP`] = 0 and [`DOWN`] = 1.
//!
//! Nothing in this module normalizes behind the caller's back: squared
//! norms are meaningful quantities downstream.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{abs, pairwise_sum_by, sqrt};
use crate::{Error, Result};

pub type Amplitude = Complex64;

/// Label of the "up" (alpha) state of a two-level factor.
pub const UP: usize = 0;
/// Label of the "down" (beta) state of a two-level factor.
pub const DOWN: usize = 1;

/// Default cap on the number of amplitudes a state may hold.
pub const DEFAULT_CAPACITY: usize = 1 << 24;

const NORM_TOLERANCE: f64 = 1e-12;

/// Per-factor labels of one basis ket.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel(pub Vec<usize>);

impl BasisLabel {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Number of factors carrying the [`UP`] label.
    pub fn up_count(&self) -> usize {
        self.0.iter().filter(|&&l| l == UP).count()
    }
}

impl From<Vec<usize>> for BasisLabel {
    fn from(v: Vec<usize>) -> Self {
        BasisLabel(v)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(try_from = "RawState", into = "RawState")
)]
pub struct StateVector {
    dims: Vec<usize>,
    amps: Vec<Amplitude>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    dims: Vec<usize>,
    amps: Vec<Amplitude>,
}

#[cfg(feature = "serde")]
impl TryFrom<RawState> for StateVector {
    type Error = Error;

    fn try_from(raw: RawState) -> Result<Self> {
        StateVector::new(raw.dims, raw.amps)
    }
}

#[cfg(feature = "serde")]
impl From<StateVector> for RawState {
    fn from(s: StateVector) -> Self {
        RawState {
            dims: s.dims,
            amps: s.amps,
        }
    }
}

fn checked_size(dims: &[usize], cap: usize) -> Result<usize> {
    let mut size: u128 = 1;
    for &d in dims {
        if d == 0 {
            return Err(Error::param("dims", "every factor needs dimension >= 1"));
        }
        size = size.saturating_mul(d as u128);
        if size > cap as u128 {
            return Err(Error::Capacity {
                requested: size,
                cap: cap as u128,
            });
        }
    }
    Ok(size as usize)
}

impl StateVector {
    pub fn new(dims: Vec<usize>, amps: Vec<Amplitude>) -> Result<Self> {
        let size = checked_size(&dims, DEFAULT_CAPACITY)?;
        if amps.len() != size {
            return Err(Error::ShapeMismatch {
                expected: size,
                found: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(StateVector { dims, amps })
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let size = checked_size(&dims, DEFAULT_CAPACITY)?;
        Ok(StateVector {
            dims,
            amps: vec![Amplitude::new(0.0, 0.0); size],
        })
    }

    /// The basis ket with the given label and unit amplitude.
    pub fn basis(dims: Vec<usize>, label: &[usize]) -> Result<Self> {
        let mut s = Self::zeros(dims)?;
        let idx = s.index_of(label)?;
        s.amps[idx] = Amplitude::new(1.0, 0.0);
        Ok(s)
    }

    /// Sum of `amp * |label>` terms. Repeated labels accumulate.
    pub fn from_terms(dims: Vec<usize>, terms: &[(&[usize], Amplitude)]) -> Result<Self> {
        let mut s = Self::zeros(dims)?;
        for (label, amp) in terms {
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFinite);
            }
            let idx = s.index_of(label)?;
            s.amps[idx] += *amp;
        }
        Ok(s)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn num_factors(&self) -> usize {
        self.dims.len()
    }

    pub fn amp(&self, label: &[usize]) -> Result<Amplitude> {
        Ok(self.amps[self.index_of(label)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        pairwise_sum_by(&self.amps, &|a| a.norm_sqr())
    }

    /// Advisory check, never enforced by operations.
    pub fn is_normalized(&self) -> bool {
        abs(self.norm_sqr() - 1.0) <= NORM_TOLERANCE
    }

    /// Position of `label` in the amplitude array.
    pub fn index_of(&self, label: &[usize]) -> Result<usize> {
        if label.len() != self.dims.len() {
            return Err(Error::ShapeMismatch {
                expected: self.dims.len(),
                found: label.len(),
            });
        }
        let mut idx = 0usize;
        for (&l, &d) in label.iter().zip(&self.dims) {
            if l >= d {
                return Err(Error::IndexOutOfRange { index: l, len: d });
            }
            idx = idx * d + l;
        }
        Ok(idx)
    }

    pub fn label_of(&self, mut index: usize) -> BasisLabel {
        let mut label = vec![0; self.dims.len()];
        for (slot, &d) in label.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        BasisLabel(label)
    }

    /// Visit every `(label, amplitude)` pair in label order without
    /// allocating a label per entry.
    pub fn for_each_label<F: FnMut(&[usize], Amplitude)>(&self, mut f: F) {
        let mut digits = vec![0usize; self.dims.len()];
        for &amp in &self.amps {
            f(&digits, amp);
            for (digit, &d) in digits.iter_mut().zip(&self.dims).rev() {
                *digit += 1;
                if *digit < d {
                    break;
                }
                *digit = 0;
            }
        }
    }

    /// Amplitude-wise map that keeps the shape; `f` gets the label too.
    pub fn map_labels<F: FnMut(&[usize], Amplitude) -> Amplitude>(&self, mut f: F) -> Self {
        let mut amps = Vec::with_capacity(self.amps.len());
        self.for_each_label(|label, a| amps.push(f(label, a)));
        StateVector {
            dims: self.dims.clone(),
            amps,
        }
    }

    pub fn scale(&self, c: Amplitude) -> Self {
        StateVector {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimsMismatch);
        }
        Ok(StateVector {
            dims: self.dims.clone(),
            amps: self.amps.iter().zip(&other.amps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Amplitude::new(-1.0, 0.0)))
    }

    /// Errors unless `factor` exists and has dimension 2.
    pub fn require_two_level(&self, factor: usize) -> Result<()> {
        match self.dims.get(factor) {
            None => Err(Error::IndexOutOfRange {
                index: factor,
                len: self.dims.len(),
            }),
            Some(&2) => Ok(()),
            Some(&dim) => Err(Error::NotTwoLevel { factor, dim }),
        }
    }
}

/// The two-level state `a|up> + b|down>` with `|a|^2 + |b|^2 = 1`.
///
/// The up-weight is stored alongside the amplitudes. When the state is built
/// from a probability `p` it is `p` itself rather than `sqrt(p)^2`, which can
/// be off by an ulp and would shift exact boundaries such as `|n - Np| > N eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TwoLevelAmplitudes {
    a: Amplitude,
    b: Amplitude,
    #[cfg_attr(feature = "serde", serde(skip))]
    p_up: f64,
}

impl TwoLevelAmplitudes {
    pub fn new(a: Amplitude, b: Amplitude) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sqr = a.norm_sqr() + b.norm_sqr();
        if abs(norm_sqr - 1.0) > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(TwoLevelAmplitudes {
            a,
            b,
            p_up: a.norm_sqr() / norm_sqr,
        })
    }

    /// Real amplitudes `a = sqrt(p)`, `b = sqrt(1 - p)`.
    pub fn from_up_probability(p_up: f64) -> Result<Self> {
        Self::with_phase(p_up, 0.0)
    }

    /// `a = sqrt(p)`, `b = sqrt(1 - p) e^{i phase}`.
    pub fn with_phase(p_up: f64, phase: f64) -> Result<Self> {
        if !p_up.is_finite() || !phase.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(0.0..=1.0).contains(&p_up) {
            return Err(Error::param("a2", "must lie in [0, 1]"));
        }
        let b = Amplitude::from_polar(sqrt(1.0 - p_up), phase);
        let spec = Self::new(Amplitude::new(sqrt(p_up), 0.0), b)?;
        Ok(TwoLevelAmplitudes { p_up, ..spec })
    }

    pub fn a(&self) -> Amplitude {
        self.a
    }

    pub fn b(&self) -> Amplitude {
        self.b
    }

    /// `|a|^2`.
    pub fn up_weight(&self) -> f64 {
        self.p_up
    }

    /// `|b|^2`, as `1 - |a|^2`.
    pub fn down_weight(&self) -> f64 {
        1.0 - self.p_up
    }

    pub fn is_degenerate(&self) -> bool {
        self.p_up == 0.0 || self.p_up == 1.0
    }

    /// The one-factor state.
    pub fn to_state(&self) -> StateVector {
        StateVector {
            dims: vec![2],
            amps: vec![self.a, self.b],
        }
    }
}

/// `<phi|psi>`, conjugate-linear in `phi`.
pub fn inner_product(phi: &StateVector, psi: &StateVector) -> Result<Amplitude> {
    if phi.dims != psi.dims {
        return Err(Error::DimsMismatch);
    }
    let pairs: Vec<(Amplitude, Amplitude)> =
        phi.amps.iter().copied().zip(psi.amps.iter().copied()).collect();
    let re = pairwise_sum_by(&pairs, &|(p, q)| (p.conj() * q).re);
    let im = pairwise_sum_by(&pairs, &|(p, q)| (p.conj() * q).im);
    Ok(Amplitude::new(re, im))
}

pub fn tensor(phi: &StateVector, psi: &StateVector) -> Result<StateVector> {
    tensor_with_capacity(phi, psi, DEFAULT_CAPACITY)
}

pub fn tensor_with_capacity(
    phi: &StateVector,
    psi: &StateVector,
    cap: usize,
) -> Result<StateVector> {
    let mut dims = phi.dims.clone();
    dims.extend_from_slice(&psi.dims);
    checked_size(&dims, cap)?;
    let mut amps = Vec::with_capacity(phi.len() * psi.len());
    for p in &phi.amps {
        amps.extend(psi.amps.iter().map(|q| p * q));
    }
    Ok(StateVector { dims, amps })
}

/// `|psi,1>|psi,2>...|psi,N>` as an explicit `N`-fold tensor product.
pub fn repeat_state(spec: &TwoLevelAmplitudes, n: usize) -> Result<StateVector> {
    repeat_state_with_capacity(spec, n, DEFAULT_CAPACITY)
}

pub fn repeat_state_with_capacity(
    spec: &TwoLevelAmplitudes,
    n: usize,
    cap: usize,
) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::param("N", "must be at least 1"));
    }
    checked_size(&vec![2; n], cap)?;
    let single = spec.to_state();
    let mut out = single.clone();
    for _ in 1..n {
        out = tensor_with_capacity(&out, &single, cap)?;
    }
    Ok(out)
}

/// `P_i`: keep only the components whose factor `i` is [`UP`].
pub fn project_up(psi: &StateVector, factor: usize) -> Result<StateVector> {
    psi.require_two_level(factor)?;
    Ok(psi.map_labels(|label, a| {
        if label[factor] == UP {
            a
        } else {
            Amplitude::new(0.0, 0.0)
        }
    }))
}

/// `F_N = (1/N) sum_i P_i`. A label with `n` up-factors is scaled by `n/N`.
pub fn frequency_apply(psi: &StateVector) -> Result<StateVector> {
    for factor in 0..psi.num_factors() {
        psi.require_two_level(factor)?;
    }
    let n = psi.num_factors();
    if n == 0 {
        return Err(Error::param("psi", "needs at least one factor"));
    }
    Ok(psi.map_labels(|label, a| {
        let ups = label.iter().filter(|&&l| l == UP).count();
        a * (ups as f64 / n as f64)
    }))
}

/// `||(F_N - |a|^2) Psi_N||^2`, evaluated on the explicit `N`-fold state.
pub fn freq_deviation_norm(spec: &TwoLevelAmplitudes, n: usize) -> Result<f64> {
    let psi = repeat_state(spec, n)?;
    let shifted = frequency_apply(&psi)?.sub(&psi.scale(Amplitude::new(spec.up_weight(), 0.0)))?;
    Ok(shifted.norm_sqr())
}
