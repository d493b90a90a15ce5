//! Exact-arithmetic laboratory for rank-one cutting-and-stacking
//! transformations.
//!
//! The [`engine`] builds columns with rational level measures and evaluates
//! the dynamics at finite depth; [`presets`] names the classical
//! constructions; [`properties`] implements the finite checks behind
//! recurrence, weak double ergodicity and ratio sets; [`spectral`] scans the
//! eigenvalue and rigidity sums over height sequences.

pub mod engine;
pub mod error;
pub mod presets;
pub mod properties;
pub mod rational;
pub mod spectral;

pub use engine::{build_tower, CocycleValue, LevelSet, ShiftResult, StageRule, Tower, TransformationSpec};
pub use error::{Error, Result};
pub use presets::{preset, PresetId};
