//! Return of a column's levels to themselves after one column height.

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{LevelSet, Tower};
use crate::error::Result;
use crate::rational::serde_rat;

/// Exact return data for one level `L` of `C_n`, resolved at `C_{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelReturn {
    pub level: usize,
    /// `μ(T^{h_n} L ∩ L) / μ(L)`, measured on the image side.
    #[serde(with = "serde_rat")]
    pub image_ratio: BigRational,
    /// `μ(L ∩ T^{-h_n} L) / μ(L)`, the returning mass measured at the source.
    #[serde(with = "serde_rat")]
    pub source_ratio: BigRational,
    /// Part of `L` whose image leaves `C_{n+1}`, relative to `μ(L)`.
    #[serde(with = "serde_rat")]
    pub unresolved_ratio: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReturnRatioReport {
    pub n: usize,
    pub height: usize,
    /// Minimum of `image_ratio` over the levels of `C_n`.
    #[serde(with = "serde_rat")]
    pub ratio: BigRational,
    /// First level achieving `ratio`.
    pub achieved_level: usize,
    #[serde(with = "serde_rat")]
    pub source_ratio: BigRational,
    pub source_level: usize,
    /// Largest unresolved fraction; when positive the ratios are lower bounds.
    #[serde(with = "serde_rat")]
    pub max_unresolved_ratio: BigRational,
}

/// `T^{h_n}` on one level of `C_n`, evaluated at `C_{n+1}`.
pub fn level_return(tower: &Tower, n: usize, level: usize) -> Result<LevelReturn> {
    tower.check_stage(n + 1)?;
    let h = tower.height(n)?;
    let l = LevelSet::level(n, level);
    let mass = tower.measure(&l)?;
    let pieces = tower.shift_pieces(&l, h as i64, n + 1)?;
    let mut image = BigRational::zero();
    let mut source = BigRational::zero();
    for p in &pieces.pieces {
        if tower.ancestor(p.stage, p.target, n) == Some(level) {
            let ms = &tower.columns()[p.stage].level_measures;
            image += &ms[p.target];
            source += &ms[p.source];
        }
    }
    let unresolved = pieces
        .unresolved
        .iter()
        .fold(BigRational::zero(), |acc, &(s, j)| {
            acc + &tower.columns()[s].level_measures[j]
        });
    Ok(LevelReturn {
        level,
        image_ratio: image / &mass,
        source_ratio: source / &mass,
        unresolved_ratio: unresolved / &mass,
    })
}

/// All levels of `C_n`, in order.
pub fn level_returns(tower: &Tower, n: usize) -> Result<Vec<LevelReturn>> {
    tower.check_stage(n + 1)?;
    (0..tower.height(n)?)
        .into_par_iter()
        .map(|j| level_return(tower, n, j))
        .collect()
}

/// Minimum over levels `L` of `C_n` of `μ(T^{h_n} L ∩ L) / μ(L)`.
pub fn level_return_ratio(tower: &Tower, n: usize) -> Result<ReturnRatioReport> {
    let all = level_returns(tower, n)?;
    let mut img = &all[0];
    let mut src = &all[0];
    let mut max_unresolved = BigRational::zero();
    for r in &all {
        if r.image_ratio < img.image_ratio {
            img = r;
        }
        if r.source_ratio < src.source_ratio {
            src = r;
        }
        if r.unresolved_ratio > max_unresolved {
            max_unresolved = r.unresolved_ratio.clone();
        }
    }
    Ok(ReturnRatioReport {
        n,
        height: all.len(),
        ratio: img.image_ratio.clone(),
        achieved_level: img.level,
        source_ratio: src.source_ratio.clone(),
        source_level: src.level,
        max_unresolved_ratio: max_unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::build_tower;
    use crate::presets::{preset, PresetId};
    use crate::rational::parse_rational;

    fn q(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn hk_half() {
        let t = build_tower(&preset(PresetId::HkPlus1).unwrap(), 4).unwrap();
        for n in 0..=3 {
            let r = level_return_ratio(&t, n).unwrap();
            assert_eq!(r.ratio, q("1/2"));
            assert_eq!(r.source_ratio, q("1/2"));
            assert!(r.max_unresolved_ratio.is_zero());
        }
    }

    #[test]
    fn lambda_sides_differ() {
        let t = build_tower(&preset(PresetId::HkPlus1Lambda(q("1/2"))).unwrap(), 3).unwrap();
        let r = level_return_ratio(&t, 2).unwrap();
        assert_eq!(r.ratio, q("1/3"));
        assert_eq!(r.source_ratio, q("2/3"));
    }

    #[test]
    fn kakutani_lower_bound() {
        let t = build_tower(&preset(PresetId::Kakutani).unwrap(), 4).unwrap();
        let r = level_return_ratio(&t, 3).unwrap();
        assert_eq!(r.ratio, q("1/2"));
        assert_eq!(r.max_unresolved_ratio, q("1/2"));
    }

    #[test]
    fn needs_next_stage() {
        let t = build_tower(&preset(PresetId::HkPlus1).unwrap(), 2).unwrap();
        assert!(level_return_ratio(&t, 2).is_err());
    }
}
