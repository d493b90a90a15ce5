//! Named constructions: Chacón, Kakutani, Hajian–Kakutani, HK(+1), its
//! nonsingular λ-cut variant, the alternating two-ratio variant, and tower
//! transformations with prescribed heights.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::engine::spec::{parse_count, RuleSource, StageRule, TransformationSpec};
use crate::error::{Error, Result};
use crate::rational::{format_rational, multiplicatively_independent, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PresetId {
    /// Three equal cuts, one spacer over the middle subcolumn.
    Chacon,
    /// Two equal cuts, no spacers.
    Kakutani,
    /// Two equal cuts, `2 h_k` spacers over the right subcolumn.
    HajianKakutani,
    /// Two equal cuts, `2 h_k + 1` spacers over the right subcolumn.
    HkPlus1,
    /// HK(+1) spacers, cut so that right/left = λ.
    HkPlus1Lambda(BigRational),
    /// HK(+1) spacers, ratio λ1 at even stages and λ2 at odd stages.
    TypeIii1(BigRational, BigRational),
    /// Tower transformation with column heights `q_0 = 1, q_1, ...`.
    TowerFromHeights(Vec<BigUint>),
}

impl PresetId {
    pub const NAMES: [&'static str; 7] = [
        "chacon",
        "kakutani",
        "hajian_kakutani",
        "hk_plus1",
        "hk_plus1_lambda",
        "type_iii1",
        "tower_from_heights",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PresetId::Chacon => "chacon",
            PresetId::Kakutani => "kakutani",
            PresetId::HajianKakutani => "hajian_kakutani",
            PresetId::HkPlus1 => "hk_plus1",
            PresetId::HkPlus1Lambda(_) => "hk_plus1_lambda",
            PresetId::TypeIii1(..) => "type_iii1",
            PresetId::TowerFromHeights(_) => "tower_from_heights",
        }
    }

    pub fn params_json(&self) -> Map<String, Value> {
        let mut m = Map::new();
        match self {
            PresetId::HkPlus1Lambda(l) => {
                m.insert("lambda".into(), json!(format_rational(l)));
            }
            PresetId::TypeIii1(l1, l2) => {
                m.insert("lambda1".into(), json!(format_rational(l1)));
                m.insert("lambda2".into(), json!(format_rational(l2)));
            }
            PresetId::TowerFromHeights(q) => {
                m.insert(
                    "q".into(),
                    Value::Array(q.iter().map(|x| json!(x.to_string())).collect()),
                );
            }
            _ => {}
        }
        m
    }

    pub fn from_name_params(name: &str, params: &Map<String, Value>) -> Result<Self> {
        let rat = |key: &str| -> Result<BigRational> {
            match params.get(key) {
                Some(Value::String(s)) => parse_rational(s),
                Some(other) => Err(Error::Spec(format!(
                    "parameter {key} must be a \"p/q\" string, got {other}"
                ))),
                None => Err(Error::Spec(format!("preset {name} needs parameter {key}"))),
            }
        };
        let id = match name {
            "chacon" => PresetId::Chacon,
            "kakutani" => PresetId::Kakutani,
            "hajian_kakutani" => PresetId::HajianKakutani,
            "hk_plus1" => PresetId::HkPlus1,
            "hk_plus1_lambda" => PresetId::HkPlus1Lambda(rat("lambda")?),
            "type_iii1" => PresetId::TypeIii1(rat("lambda1")?, rat("lambda2")?),
            "tower_from_heights" => match params.get("q") {
                Some(Value::Array(items)) => PresetId::TowerFromHeights(
                    items.iter().map(parse_count).collect::<Result<Vec<_>>>()?,
                ),
                _ => {
                    return Err(Error::Spec(
                        "preset tower_from_heights needs an array parameter q".into(),
                    ))
                }
            },
            other => {
                return Err(Error::Spec(format!(
                    "unknown preset {other:?}; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        };
        id.validate()?;
        Ok(id)
    }

    pub fn validate(&self) -> Result<()> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        match self {
            // λ = 1 is accepted and degenerates to the equal-halves HK(+1).
            PresetId::HkPlus1Lambda(l) if *l <= zero || *l > one => Err(Error::Spec(format!(
                "lambda must lie in (0,1], got {}",
                format_rational(l)
            ))),
            PresetId::TypeIii1(l1, l2) => {
                for l in [l1, l2] {
                    if *l <= zero || *l >= one {
                        return Err(Error::Spec(format!(
                            "lambda1, lambda2 must lie in (0,1), got {}",
                            format_rational(l)
                        )));
                    }
                }
                if !multiplicatively_independent(&[l1.clone(), l2.clone()]) {
                    return Err(Error::Spec(format!(
                        "log({})/log({}) is rational; the two ratios must be multiplicatively independent",
                        format_rational(l1),
                        format_rational(l2)
                    )));
                }
                Ok(())
            }
            PresetId::TowerFromHeights(q) => {
                if q.is_empty() || !q[0].is_one() {
                    return Err(Error::Spec("tower heights must start with q_0 = 1".into()));
                }
                for (k, w) in q.windows(2).enumerate() {
                    if w[1] < &w[0] * 2u32 {
                        return Err(Error::Spec(format!(
                            "q_{} = {} < 2 q_{} = {}: negative spacer count",
                            k + 1,
                            w[1],
                            k,
                            &w[0] * 2u32
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// True for the presets cut in two with `2 h_k + 1` spacers on the right.
    pub fn is_hk_family(&self) -> bool {
        matches!(
            self,
            PresetId::HkPlus1 | PresetId::HkPlus1Lambda(_) | PresetId::TypeIii1(..)
        )
    }
}

/// Builds the spec for a named preset.
pub fn preset(id: PresetId) -> Result<TransformationSpec> {
    id.validate()?;
    Ok(TransformationSpec {
        base_measure: BigRational::one(),
        rules: RuleSource::Preset(id),
    })
}

/// Left piece `1/(1+λ)`, right piece `λ/(1+λ)`.
pub fn lambda_fractions(lambda: &BigRational) -> Vec<BigRational> {
    let one = BigRational::one();
    let denom = &one + lambda;
    vec![&one / &denom, lambda / &denom]
}

fn n(x: u64) -> BigUint {
    BigUint::from(x)
}

pub(crate) fn stage_rule(id: &PresetId, stage: usize, height: &BigUint) -> Result<StageRule> {
    let hk_spacers = || vec![BigUint::zero(), height * 2u32 + 1u32];
    match id {
        PresetId::Chacon => StageRule::uniform(3, vec![n(0), n(1), n(0)]),
        PresetId::Kakutani => StageRule::uniform(2, vec![n(0), n(0)]),
        PresetId::HajianKakutani => StageRule::uniform(2, vec![n(0), height * 2u32]),
        PresetId::HkPlus1 => StageRule::uniform(2, hk_spacers()),
        PresetId::HkPlus1Lambda(l) => StageRule::new(lambda_fractions(l), hk_spacers()),
        PresetId::TypeIii1(l1, l2) => {
            let l = if stage.is_multiple_of(2) { l1 } else { l2 };
            StageRule::new(lambda_fractions(l), hk_spacers())
        }
        PresetId::TowerFromHeights(q) => {
            let (Some(cur), Some(next)) = (q.get(stage), q.get(stage + 1)) else {
                return Err(Error::Spec(format!(
                    "tower_from_heights has {} heights; no rule for stage {stage}",
                    q.len()
                )));
            };
            if cur != height {
                return Err(Error::Spec(format!(
                    "height mismatch at stage {stage}: column has {height}, q gives {cur}"
                )));
            }
            StageRule::uniform(2, vec![BigUint::zero(), next - cur * 2u32])
        }
    }
}

/// Heights `h_0..=h_stages` of a preset, by integer recursion only.
pub fn height_sequence(id: &PresetId, stages: usize) -> Result<Vec<BigUint>> {
    preset(id.clone())?.heights(stages)
}

/// Convenience for small integer heights in tests and reports.
pub fn heights_u64(id: &PresetId, stages: usize) -> Result<Vec<u64>> {
    height_sequence(id, stages)?
        .iter()
        .map(|h| {
            h.to_u64().ok_or_else(|| Error::Resource {
                what: format!("height {h} does not fit in 64 bits"),
                cap: u64::MAX,
            })
        })
        .collect()
}
