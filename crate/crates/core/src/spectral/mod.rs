//! Eigenvalue and rigidity sums over height sequences, the covering-gap
//! check and circle-valued factor maps.

pub mod eigen;
pub mod factor_map;
pub mod gap;
pub mod heights;
pub mod rigidity;
pub mod theta;

pub use eigen::{aana_sum, eigenvalue_scan, EigenCandidate, ScanReport};
pub use factor_map::{factor_map_build, FactorMapReport, FactorMapStage};
pub use gap::{gap_lemma_check, GapReport, DEFAULT_GAP_CAP};
pub use heights::HeightSequence;
pub use rigidity::{rigidity_sum, RigidityReport};
pub use theta::Theta;
