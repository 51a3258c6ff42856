use alloc::vec::Vec;

use crate::decoherence::environment::{environment_suppression, EnvironmentModel};
use crate::math::pairwise_sum;
use crate::readoff::marginal_factor;
use crate::state::{Amplitude, StateVector};
use crate::{Error, Result};

/// The part of a state carrying one pointer reading.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub pointer: usize,
    pub weight: f64,
    /// Same shape as the parent; components with other readings are zero.
    pub state: StateVector,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchSet {
    pub pointer_factor: usize,
    pub branches: Vec<Branch>,
    /// Interference factor between branches `i` and `j` after the
    /// environment is taken into account; 1 on the diagonal.
    pub cross_overlaps: Vec<Vec<Amplitude>>,
}

impl BranchSet {
    pub fn total_weight(&self) -> f64 {
        let w: Vec<f64> = self.branches.iter().map(|b| b.weight).collect();
        pairwise_sum(&w)
    }

    pub fn weights(&self) -> Vec<(usize, f64)> {
        self.branches.iter().map(|b| (b.pointer, b.weight)).collect()
    }
}

/// Groups `psi` by the label of `pointer_factor`. Readings with zero weight
/// are dropped.
pub fn branch_decompose(
    psi: &StateVector,
    pointer_factor: usize,
    env: &EnvironmentModel,
) -> Result<BranchSet> {
    if pointer_factor >= psi.num_factors() {
        return Err(Error::IndexOutOfRange {
            index: pointer_factor,
            len: psi.num_factors(),
        });
    }
    let weights = marginal_factor(psi, pointer_factor)?;
    let branches: Vec<Branch> = weights
        .iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(&pointer, weight)| Branch {
            pointer,
            weight,
            state: psi.map_labels(|label, a| {
                if label[pointer_factor] == pointer {
                    a
                } else {
                    Amplitude::new(0.0, 0.0)
                }
            }),
        })
        .collect();
    let off_diagonal = environment_suppression(env).value();
    let n = branches.len();
    let cross_overlaps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Amplitude::new(1.0, 0.0) } else { off_diagonal })
                .collect()
        })
        .collect();
    Ok(BranchSet {
        pointer_factor,
        branches,
        cross_overlaps,
    })
}
