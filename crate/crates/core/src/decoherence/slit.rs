//! Two-slit screen amplitudes.
//!
//! Each slit contributes a Gaussian packet centred on the slit position with
//! a far-field phase that is linear in the screen coordinate:
//!
//! ```text
//! <x|i> = (2 pi w^2)^(-1/4) exp(-(x - c_i)^2 / (4 w^2)) exp(i k (c_i - m)(x - m))
//! ```
//!
//! where `m` is the midpoint between the slits. `|<x|i>|^2` is a unit-mass
//! normal density of width `w`. There is no propagation; only the amplitude
//! structure `<x|1> + <x|2>` matters here.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::math::{abs, exp, sqrt};
use crate::state::Amplitude;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SlitModel {
    slit_centers: [f64; 2],
    packet_width: f64,
    wavenumber: f64,
    screen_grid: Vec<f64>,
}

impl SlitModel {
    pub fn new(
        slit_centers: [f64; 2],
        packet_width: f64,
        wavenumber: f64,
        screen_grid: Vec<f64>,
    ) -> Result<Self> {
        if !(slit_centers.iter().all(|c| c.is_finite()) && wavenumber.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(packet_width > 0.0) || !packet_width.is_finite() {
            return Err(Error::param("packet_width", "must be positive and finite"));
        }
        if screen_grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        if screen_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("screen_grid", "must be strictly increasing"));
        }
        Ok(SlitModel {
            slit_centers,
            packet_width,
            wavenumber,
            screen_grid,
        })
    }

    /// `points` evenly spaced screen positions from `lo` to `hi` inclusive.
    pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
        if points < 2 || !(hi > lo) {
            return Err(Error::param("screen_grid", "needs hi > lo and at least two points"));
        }
        let step = (hi - lo) / (points - 1) as f64;
        Ok((0..points)
            .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
            .collect())
    }

    pub fn slit_centers(&self) -> [f64; 2] {
        self.slit_centers
    }

    pub fn packet_width(&self) -> f64 {
        self.packet_width
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn screen_grid(&self) -> &[f64] {
        &self.screen_grid
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.slit_centers[0] + self.slit_centers[1])
    }

    fn grid_center(&self) -> Option<f64> {
        let first = *self.screen_grid.first()?;
        let last = *self.screen_grid.last()?;
        Some(0.5 * (first + last))
    }

    fn packet(&self, slit: usize, x: f64) -> Amplitude {
        let w = self.packet_width;
        let c = self.slit_centers[slit];
        let m = self.midpoint();
        let norm = 1.0 / sqrt(sqrt(2.0 * PI * w * w));
        let envelope = norm * exp(-(x - c) * (x - c) / (4.0 * w * w));
        Amplitude::from_polar(envelope, self.wavenumber * (c - m) * (x - m))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreenAmplitude {
    pub amp1: Amplitude,
    pub amp2: Amplitude,
    pub total: Amplitude,
}

impl ScreenAmplitude {
    pub fn intensity(&self) -> f64 {
        self.total.norm_sqr()
    }

    /// `2 Re(<x|1>* <x|2>)`, the part of the intensity that is not a sum of
    /// single-slit terms.
    pub fn cross_term(&self) -> f64 {
        2.0 * (self.amp1.conj() * self.amp2).re
    }
}

/// `<x|1>`, `<x|2>` and `<x|psi> = <x|1> + <x|2>`.
pub fn screen_amplitude(model: &SlitModel, x: f64) -> ScreenAmplitude {
    let amp1 = model.packet(0, x);
    let amp2 = model.packet(1, x);
    ScreenAmplitude {
        amp1,
        amp2,
        total: amp1 + amp2,
    }
}

/// `<x|(<D1| - <D2|)|psi,D> = <x|1> - <x|2>`.
pub fn rotated_detector_amplitude(model: &SlitModel, x: f64) -> Amplitude {
    model.packet(0, x) - model.packet(1, x)
}

/// Which-path detector states, described by `<D1|D2>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorState {
    overlap: Amplitude,
}

impl DetectorState {
    pub fn new(overlap: Amplitude) -> Result<Self> {
        if !overlap.re.is_finite() || !overlap.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if overlap.norm() > 1.0 + 1e-12 {
            return Err(Error::param("overlap", "|<D1|D2>| must not exceed 1"));
        }
        Ok(DetectorState { overlap })
    }

    pub fn real(overlap: f64) -> Result<Self> {
        Self::new(Amplitude::new(overlap, 0.0))
    }

    /// No detector at all: both paths leave the same record.
    pub fn absent() -> Self {
        DetectorState {
            overlap: Amplitude::new(1.0, 0.0),
        }
    }

    pub fn overlap(&self) -> Amplitude {
        self.overlap
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternPoint {
    pub x: f64,
    pub amp1: Amplitude,
    pub amp2: Amplitude,
    pub intensity: f64,
}

/// Screen intensity of `|1>|D1> + |2>|D2>` traced over the detector:
/// `|<x|1>|^2 + |<x|2>|^2 + 2 Re(<x|1>* <x|2> <D1|D2>)`.
pub fn detector_pattern(model: &SlitModel, det: &DetectorState) -> Vec<PatternPoint> {
    model
        .screen_grid
        .iter()
        .map(|&x| {
            let amp1 = model.packet(0, x);
            let amp2 = model.packet(1, x);
            let cross = 2.0 * (amp1.conj() * amp2 * det.overlap).re;
            PatternPoint {
                x,
                amp1,
                amp2,
                intensity: amp1.norm_sqr() + amp2.norm_sqr() + cross,
            }
        })
        .collect()
}

/// `(Imax - Imin) / (Imax + Imin)` over grid points within one packet width
/// of the grid centre.
pub fn visibility(model: &SlitModel, intensity: &[f64]) -> Result<f64> {
    if intensity.len() != model.screen_grid.len() {
        return Err(Error::ShapeMismatch {
            expected: model.screen_grid.len(),
            found: intensity.len(),
        });
    }
    let centre = model.grid_center().ok_or(Error::UndefinedVisibility)?;
    let region: Vec<f64> = model
        .screen_grid
        .iter()
        .zip(intensity)
        .filter(|(x, _)| abs(**x - centre) <= model.packet_width)
        .map(|(_, &i)| i)
        .collect();
    if region.iter().any(|i| !i.is_finite()) {
        return Err(Error::NonFinite);
    }
    let max = region.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = region.iter().copied().fold(f64::INFINITY, f64::min);
    if region.is_empty() || !(max > 0.0) {
        return Err(Error::UndefinedVisibility);
    }
    // rounding can leave a perfectly dark fringe a hair below zero
    if min < -1e-12 * max {
        return Err(Error::param("intensity", "must be non-negative"));
    }
    let min = min.max(0.0);
    Ok((max - min) / (max + min))
}
