//! Level-wise approximations `f_k` of an equivariant map from the tower with
//! heights `q` onto the rotation by `θ`: level `j` of `C_k` goes to `S^j y`,
//! `y = 0`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::engine::{build_tower, LevelProvenance, Tower};
use crate::error::{Error, Result};
use crate::presets::{preset, PresetId};
use crate::spectral::heights::HeightSequence;
use crate::spectral::theta::{chord, Theta};

#[derive(Debug, Clone, PartialEq)]
pub struct FactorMapStage {
    pub stage: usize,
    pub height: usize,
    /// `sup_x d(f_{k+1}(x), f_k(x))` over `C_k`.
    pub delta_sup: f64,
    /// `d(S^{q_k} y, y)`.
    pub bound: f64,
}

impl FactorMapStage {
    pub fn holds(&self, tol: f64) -> bool {
        self.delta_sup <= self.bound + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorMapReport {
    pub theta: Theta,
    pub stages: Vec<FactorMapStage>,
    /// `max d(f_k(level j+1), S f_k(level j))` over non-top levels of every built column.
    pub equivariance_residual: f64,
}

/// Distance between `S^a y` and `S^b y`.
fn point_distance(theta: &Theta, a: usize, b: usize) -> f64 {
    chord(theta.frac_mul(&BigUint::from(a.abs_diff(b))))
}

/// Angle of level `j`: `frac(jθ)`.
pub fn assignment(theta: &Theta, j: usize) -> f64 {
    theta.frac_mul(&BigUint::from(j))
}

fn stage_delta(tower: &Tower, theta: &Theta, k: usize) -> f64 {
    let next = &tower.columns()[k + 1];
    let mut memo: BTreeMap<usize, f64> = BTreeMap::new();
    let mut sup = 0.0f64;
    for (level, prov) in next.provenance.iter().enumerate() {
        if let LevelProvenance::FromParent { parent_level, .. } = prov {
            let diff = level - parent_level;
            let d = *memo
                .entry(diff)
                .or_insert_with(|| point_distance(theta, level, *parent_level));
            sup = sup.max(d);
        }
    }
    sup
}

/// Builds the tower with heights `q` (starting at `q_0 = 1`) to `depth` and
/// compares consecutive level assignments.
pub fn factor_map_build(q: &HeightSequence, theta: &Theta, depth: usize) -> Result<FactorMapReport> {
    if !q.is_doubling() {
        return Err(Error::Spec("factor map needs q_{i+1} >= 2 q_i".into()));
    }
    if depth + 1 > q.len() {
        return Err(Error::Spec(format!(
            "depth {depth} needs at least {} heights",
            depth + 1
        )));
    }
    let spec = preset(PresetId::TowerFromHeights(q.values().to_vec()))?;
    let tower = build_tower(&spec, depth)?;
    let stages = (0..depth)
        .map(|k| FactorMapStage {
            stage: k,
            height: tower.columns()[k].height,
            delta_sup: stage_delta(&tower, theta, k),
            bound: chord(theta.frac_mul(&q.values()[k])),
        })
        .collect();
    let mut residual = 0.0f64;
    for col in tower.columns() {
        for j in 0..col.height.saturating_sub(1) {
            // f(level j+1) = S^{j+1} y against S(f(level j)) = S^{j+1} y
            residual = residual.max(point_distance(theta, j + 1, j + 1));
        }
    }
    Ok(FactorMapReport {
        theta: theta.clone(),
        stages,
        equivariance_residual: residual,
    })
}

impl Serialize for FactorMapStage {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FactorMapStage", 4)?;
        st.serialize_field("stage", &self.stage)?;
        st.serialize_field("height", &self.height)?;
        st.serialize_field("delta_sup", &self.delta_sup.to_string())?;
        st.serialize_field("bound", &self.bound.to_string())?;
        st.end()
    }
}

impl Serialize for FactorMapReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FactorMapReport", 4)?;
        st.serialize_field("theta", &self.theta.decimal())?;
        st.serialize_field("theta_exact", &self.theta.exact())?;
        st.serialize_field("stages", &self.stages)?;
        st.serialize_field("equivariance_residual", &self.equivariance_residual.to_string())?;
        st.end()
    }
}
