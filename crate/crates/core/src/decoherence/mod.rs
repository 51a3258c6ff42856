//! Branching and interference bookkeeping.
//!
//! * [`slit`]: two-slit amplitudes with and without a which-path detector.
//! * [`environment`]: overlap suppression by environment factors and the
//!   component classification of long product states.
//! * [`cat`]: the nucleus-cat state in two different expansions.
//! * [`branch`]: splitting a state into pointer-labeled branches.

pub mod branch;
pub mod cat;
pub mod environment;
pub mod slit;

pub use branch::{branch_decompose, Branch, BranchSet};
pub use cat::{cat_analysis, CatReport, ExpansionAmplitudes};
pub use environment::{
    classify_components, environment_suppression, ComponentCriteria, ComponentVerdict,
    EnvironmentModel, Suppression,
};
pub use slit::{
    detector_pattern, rotated_detector_amplitude, screen_amplitude, visibility, DetectorState,
    PatternPoint, ScreenAmplitude, SlitModel,
};
