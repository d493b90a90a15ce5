//! Finite-depth checks behind recurrence, weak double ergodicity and the
//! ratio set.

pub mod index_sets;
pub mod ratio_set;
pub mod returns;
pub mod wde;

pub use index_sets::{
    index_set, is_hk_family_through, non_wde_recursion, recursion_inclusion_check, witness_pair,
    InclusionReport, IndexSet, RecursionReport, RecursionStage,
};
pub use ratio_set::{ratio_set_probe, RatioHit, RatioProbeReport};
pub use returns::{level_return, level_return_ratio, level_returns, LevelReturn, ReturnRatioReport};
pub use wde::{wde_witness_search, Verdict, WdeMode, WdeReport, Witness};
