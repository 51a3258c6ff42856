//! Environment overlaps and components.
//!
//! An interference term between two branches is multiplied by the overlap
//! of every environment factor the branches disagree on. The product is
//! kept as a log-modulus plus a phase so that very long environments do not
//! underflow and appending a factor adds exactly its own log-modulus.

use alloc::vec::Vec;

use crate::math::{abs, exp, ln};
use crate::state::{inner_product, Amplitude, StateVector};
use crate::{Error, Result};

/// Per-factor overlaps `<E1_j|E2_j>` between two environment configurations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnvironmentModel {
    factor_overlaps: Vec<Amplitude>,
}

impl EnvironmentModel {
    pub fn new(factor_overlaps: Vec<Amplitude>) -> Result<Self> {
        for o in &factor_overlaps {
            if !o.re.is_finite() || !o.im.is_finite() {
                return Err(Error::NonFinite);
            }
            if o.norm() > 1.0 + 1e-12 {
                return Err(Error::param("factor_overlaps", "moduli must not exceed 1"));
            }
        }
        Ok(EnvironmentModel { factor_overlaps })
    }

    /// `m` identical real overlaps.
    pub fn uniform(overlap: f64, m: usize) -> Result<Self> {
        Self::new(alloc::vec![Amplitude::new(overlap, 0.0); m])
    }

    pub fn factor_overlaps(&self) -> &[Amplitude] {
        &self.factor_overlaps
    }

    pub fn len(&self) -> usize {
        self.factor_overlaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factor_overlaps.is_empty()
    }

    /// The same environment with one more factor.
    pub fn with_factor(&self, overlap: Amplitude) -> Result<Self> {
        let mut v = self.factor_overlaps.clone();
        v.push(overlap);
        Self::new(v)
    }
}

/// `prod_j <E1_j|E2_j>` as `exp(log_modulus) * exp(i phase)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Suppression {
    /// `sum_j ln|overlap_j|`, `-inf` once any factor is zero.
    pub log_modulus: f64,
    pub phase: f64,
}

impl Suppression {
    pub fn modulus(&self) -> f64 {
        exp(self.log_modulus)
    }

    pub fn value(&self) -> Amplitude {
        if self.log_modulus == f64::NEG_INFINITY {
            return Amplitude::new(0.0, 0.0);
        }
        Amplitude::from_polar(self.modulus(), self.phase)
    }
}

pub fn environment_suppression(env: &EnvironmentModel) -> Suppression {
    env.factor_overlaps.iter().fold(
        Suppression {
            log_modulus: 0.0,
            phase: 0.0,
        },
        |acc, o| Suppression {
            log_modulus: acc.log_modulus + ln(o.norm()),
            phase: acc.phase + o.arg(),
        },
    )
}

/// Thresholds for deciding components on a finite truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComponentCriteria {
    /// Below this overlap-product modulus the states count as macroscopically
    /// different.
    pub threshold: f64,
    /// At most this many differing factors still count as one component.
    pub max_finite_differences: usize,
}

impl Default for ComponentCriteria {
    fn default() -> Self {
        ComponentCriteria {
            threshold: 1e-10,
            max_finite_differences: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComponentVerdict {
    SameComponent { differing: usize },
    MacroscopicallyDifferent { overlap_modulus: f64 },
    /// More differing factors than allowed, but not enough suppression.
    Ambiguous { differing: usize, overlap_modulus: f64 },
}

// |<a|b>| this close to 1 is taken as the same factor state
const SAME_FACTOR_TOLERANCE: f64 = 1e-12;

/// Compares two product states factor by factor.
pub fn classify_components(
    s1: &[StateVector],
    s2: &[StateVector],
    criteria: &ComponentCriteria,
) -> Result<ComponentVerdict> {
    if s1.len() != s2.len() {
        return Err(Error::ShapeMismatch {
            expected: s1.len(),
            found: s2.len(),
        });
    }
    if !(criteria.threshold >= 0.0) {
        return Err(Error::param("threshold", "must be non-negative"));
    }
    let mut overlaps = Vec::with_capacity(s1.len());
    let mut differing = 0;
    for (a, b) in s1.iter().zip(s2) {
        let o = inner_product(a, b)?;
        if a != b && abs(o.re - 1.0) + abs(o.im) > SAME_FACTOR_TOLERANCE {
            differing += 1;
        }
        overlaps.push(o);
    }
    if differing <= criteria.max_finite_differences {
        return Ok(ComponentVerdict::SameComponent { differing });
    }
    let env = EnvironmentModel { factor_overlaps: overlaps };
    let overlap_modulus = environment_suppression(&env).modulus();
    if overlap_modulus < criteria.threshold {
        Ok(ComponentVerdict::MacroscopicallyDifferent { overlap_modulus })
    } else {
        Ok(ComponentVerdict::Ambiguous {
            differing,
            overlap_modulus,
        })
    }
}
