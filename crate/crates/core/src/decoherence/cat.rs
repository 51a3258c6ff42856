//! The nucleus-cat state and its two expansions.
//!
//! Basis: nucleus `{not decayed = 0, decayed = 1}` times cat
//! `{alive = 0, dead = 1}`. The state is
//!
//! ```text
//! Psi = a|nd>|alive> + b|d>|dead>                                      (standard)
//!     = 1/2 (|nd> + |d>)(a|alive> + b|dead>)
//!     + 1/2 (|nd> - |d>)(a|alive> - b|dead>)                            (rewritten)
//! ```
//!
//! The factor 1/2 in the rewritten form makes both sums equal `Psi` itself.
//! Probing either expansion term by term shows where an amplitude vanishes
//! per term and where it vanishes only because two terms cancel.

use alloc::vec;

use crate::state::{inner_product, tensor, Amplitude, StateVector, TwoLevelAmplitudes};
use crate::Result;

pub const NOT_DECAYED: usize = 0;
pub const DECAYED: usize = 1;
pub const ALIVE: usize = 0;
pub const DEAD: usize = 1;

/// `<probe|term>` for each term of both expansions, and `<probe|Psi>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpansionAmplitudes {
    pub standard_terms: [Amplitude; 2],
    pub rewritten_terms: [Amplitude; 2],
    pub direct: Amplitude,
}

impl ExpansionAmplitudes {
    pub fn standard_total(&self) -> Amplitude {
        self.standard_terms[0] + self.standard_terms[1]
    }

    pub fn rewritten_total(&self) -> Amplitude {
        self.rewritten_terms[0] + self.rewritten_terms[1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatReport {
    pub state: StateVector,
    /// Probe `|decayed>|alive>`.
    pub decayed_alive: ExpansionAmplitudes,
    /// Probe `(|nd> - |d>)(b|alive> + a|dead>)`.
    pub rotated_probe: ExpansionAmplitudes,
}

fn c(re: f64) -> Amplitude {
    Amplitude::new(re, 0.0)
}

fn ket(x: Amplitude, y: Amplitude) -> Result<StateVector> {
    StateVector::new(vec![2], vec![x, y])
}

fn probe(p: &StateVector, standard: &[StateVector; 2], rewritten: &[StateVector; 2], whole: &StateVector) -> Result<ExpansionAmplitudes> {
    Ok(ExpansionAmplitudes {
        standard_terms: [inner_product(p, &standard[0])?, inner_product(p, &standard[1])?],
        rewritten_terms: [inner_product(p, &rewritten[0])?, inner_product(p, &rewritten[1])?],
        direct: inner_product(p, whole)?,
    })
}

pub fn cat_analysis(spec: &TwoLevelAmplitudes) -> Result<CatReport> {
    let (a, b) = (spec.a(), spec.b());
    let zero = c(0.0);
    let one = c(1.0);
    let nd = ket(one, zero)?;
    let d = ket(zero, one)?;
    let alive = ket(one, zero)?;
    let dead = ket(zero, one)?;

    let standard = [
        tensor(&nd, &alive)?.scale(a),
        tensor(&d, &dead)?.scale(b),
    ];
    let rewritten = [
        tensor(&ket(one, one)?, &ket(a, b)?)?.scale(c(0.5)),
        tensor(&ket(one, -one)?, &ket(a, -b)?)?.scale(c(0.5)),
    ];
    let state = standard[0].add(&standard[1])?;

    let decayed_alive = tensor(&d, &alive)?;
    let rotated = tensor(&ket(one, -one)?, &ket(b, a)?)?;

    Ok(CatReport {
        decayed_alive: probe(&decayed_alive, &standard, &rewritten, &state)?,
        rotated_probe: probe(&rotated, &standard, &rewritten, &state)?,
        state,
    })
}
