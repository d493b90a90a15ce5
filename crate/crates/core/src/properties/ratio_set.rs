//! Probing the ratio set: positive-measure parts of `A ∩ T^{-n} A` on which
//! `ω_n` comes close to a target value.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{CocycleValue, LevelSet, Tower};
use crate::error::{Error, Result};
use crate::rational::serde_rat;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioHit {
    pub n: i64,
    /// Part of `A ∩ T^{-n} A` where `ω_n = omega`.
    pub levels: LevelSet,
    #[serde(with = "serde_rat")]
    pub measure: BigRational,
    pub omega: CocycleValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatioProbeReport {
    #[serde(with = "serde_rat")]
    pub target: BigRational,
    #[serde(with = "serde_rat")]
    pub epsilon: BigRational,
    pub searched_range: i64,
    pub max_stage: usize,
    pub hits: Vec<RatioHit>,
    /// Every value of `ω_n` seen on `A ∩ T^{-n} A`, `1 ≤ n ≤ N`.
    pub observed_values: BTreeSet<CocycleValue>,
    /// Some mass of `A` was unresolved at `max_stage` for some `n`.
    pub inconclusive: bool,
}

struct Scan {
    hits: Vec<RatioHit>,
    values: Vec<CocycleValue>,
    unresolved: bool,
}

fn scan_one(
    tower: &Tower,
    a: &LevelSet,
    n: i64,
    max_stage: usize,
    target: &BigRational,
    epsilon: &BigRational,
    bases: Option<&[BigRational]>,
) -> Result<Scan> {
    let pieces = tower.shift_pieces(a, n, max_stage)?;
    let stage = pieces.working_stage(a.stage);
    let mut groups: BTreeMap<BigRational, Vec<(usize, usize)>> = BTreeMap::new();
    for p in &pieces.pieces {
        let returns = tower
            .ancestor(p.stage, p.target, a.stage)
            .is_some_and(|j| a.contains(j));
        if returns {
            groups
                .entry(tower.piece_omega(p))
                .or_default()
                .push((p.stage, p.source));
        }
    }
    let mut hits = Vec::new();
    let mut values = Vec::new();
    for (omega, items) in groups {
        let value = CocycleValue::new(omega.clone(), bases);
        if (&omega - target).abs() < *epsilon {
            let levels = tower.collect_at(items, stage)?;
            hits.push(RatioHit {
                n,
                measure: tower.measure(&levels)?,
                levels,
                omega: value.clone(),
            });
        }
        values.push(value);
    }
    Ok(Scan {
        hits,
        values,
        unresolved: !pieces.unresolved.is_empty(),
    })
}

/// Scans `n = 1..=n_max` for sublevels of `A ∩ T^{-n} A` with `|ω_n − t| < ε`.
pub fn ratio_set_probe(
    tower: &Tower,
    a: &LevelSet,
    target: &BigRational,
    epsilon: &BigRational,
    n_max: i64,
    max_stage: usize,
) -> Result<RatioProbeReport> {
    if target.is_negative() {
        return Err(Error::Spec("ratio-set target must be nonnegative".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::Spec("epsilon must be positive".into()));
    }
    tower.validate(a)?;
    tower.check_stage(max_stage)?;
    let bases = tower.factorisation_bases();
    let scans = (1..=n_max)
        .into_par_iter()
        .map(|n| scan_one(tower, a, n, max_stage, target, epsilon, bases.as_deref()))
        .collect::<Result<Vec<_>>>()?;
    let mut report = RatioProbeReport {
        target: target.clone(),
        epsilon: epsilon.clone(),
        searched_range: n_max,
        max_stage,
        hits: Vec::new(),
        observed_values: BTreeSet::new(),
        inconclusive: false,
    };
    for s in scans {
        report.hits.extend(s.hits);
        report.observed_values.extend(s.values);
        report.inconclusive |= s.unresolved;
    }
    Ok(report)
}
