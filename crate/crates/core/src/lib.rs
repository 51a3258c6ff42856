//! Amplitude bookkeeping for no-collapse quantum states.
//!
//! The crate is split along the lines of what is being computed:
//!
//! * [`state`] holds small composite states as dense amplitude arrays. It is
//!   exact and slow, and every other module is cross-checked against it.
//! * [`frequency`] works with the relative-frequency norm density of an
//!   `N`-fold repeated two-level state entirely in log space, so `N` can go
//!   to `10^6` and beyond.
//! * [`readoff`] marginalises squared norms onto a single discrete variable
//!   and decides whether that variable has a determinate value.
//! * [`decoherence`] covers which-path detectors, environment overlap
//!   suppression, component classification and branch decomposition.
//!
//! Everything here is `no_std` with `alloc`; file formats and the command
//! line live in the `nocollapse` crate.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod decoherence;
mod error;
pub mod frequency;
pub mod math;
pub mod readoff;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use state::{Amplitude, BasisLabel, StateVector, TwoLevelAmplitudes};
