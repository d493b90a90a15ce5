//! Exact cutting-and-stacking: columns with rational level measures, the
//! level-set algebra, finite-depth dynamics and Radon–Nikodym cocycles.

pub mod dynamics;
pub mod level_set;
pub mod spec;
pub mod tower;

pub use dynamics::{CocycleValue, RnDerivative, RnPart, ShiftPiece, ShiftPieces, ShiftResult};
pub use level_set::LevelSet;
pub use spec::{RuleSource, StageRule, TransformationSpec};
pub use tower::{build_tower, Column, ColumnSummary, LevelProvenance, Tower, DEFAULT_LEVEL_CAP};
