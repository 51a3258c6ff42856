#![allow(dead_code)]

use nocollapse_core::readoff::up_count;
use nocollapse_core::state::repeat_state;
use nocollapse_core::{Amplitude, StateVector, TwoLevelAmplitudes};
use rand::Rng;

/// `|amplitude|^2` summed by up-count over all `2^N` labels of the explicit
/// tensor power.
pub fn brute_force_grouping(spec: &TwoLevelAmplitudes, n: usize) -> Vec<f64> {
    let psi = repeat_state(spec, n).unwrap();
    let mut groups = vec![0.0; n + 1];
    psi.for_each_label(|label, a| groups[up_count(label)] += a.norm_sqr());
    groups
}

/// Haar-ish random unitary: Gram-Schmidt on a matrix of complex normals.
/// Rows are the new basis vectors.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<Amplitude>> {
    let mut rows: Vec<Vec<Amplitude>> = Vec::with_capacity(n);
    while rows.len() < n {
        let mut v: Vec<Amplitude> = (0..n).map(|_| Amplitude::new(normal(rng), normal(rng))).collect();
        for _ in 0..2 {
            for r in &rows {
                let proj: Amplitude = r.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi -= proj * ri;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        rows.push(v.into_iter().map(|x| x / norm).collect());
    }
    rows
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Applies `u` to the second factor of a two-factor state, separately for
/// each value of the first factor (one unitary per value).
pub fn rotate_within(psi: &StateVector, unitaries: &[Vec<Vec<Amplitude>>]) -> StateVector {
    let (q_dim, k_dim) = (psi.dims()[0], psi.dims()[1]);
    let mut amps = Vec::with_capacity(psi.len());
    for (q, u) in unitaries.iter().enumerate().take(q_dim) {
        let block = &psi.amps()[q * k_dim..(q + 1) * k_dim];
        for row in u {
            amps.push(row.iter().zip(block).map(|(u, a)| u * a).sum());
        }
    }
    StateVector::new(psi.dims().to_vec(), amps).unwrap()
}
