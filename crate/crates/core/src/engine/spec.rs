use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::presets::{self, PresetId};
use crate::rational::{format_rational, parse_rational};

/// How one stage cuts every level of the current column and where it adds spacers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRule {
    /// Measure fraction of each subinterval of a level, left to right.
    pub cut_fractions: Vec<BigRational>,
    /// Spacers stacked over each subcolumn before stacking.
    pub spacer_counts: Vec<BigUint>,
}

impl StageRule {
    pub fn new(cut_fractions: Vec<BigRational>, spacer_counts: Vec<BigUint>) -> Result<Self> {
        if cut_fractions.len() < 2 {
            return Err(Error::Spec(format!(
                "a stage needs at least 2 cuts, got {}",
                cut_fractions.len()
            )));
        }
        if spacer_counts.len() != cut_fractions.len() {
            return Err(Error::Spec(format!(
                "{} cut fractions but {} spacer counts",
                cut_fractions.len(),
                spacer_counts.len()
            )));
        }
        if let Some(f) = cut_fractions.iter().find(|f| **f <= BigRational::zero()) {
            return Err(Error::Spec(format!(
                "cut fraction {} is not positive",
                format_rational(f)
            )));
        }
        let total: BigRational = cut_fractions.iter().sum();
        if !total.is_one() {
            return Err(Error::Spec(format!(
                "cut fractions sum to {}, not 1",
                format_rational(&total)
            )));
        }
        Ok(StageRule {
            cut_fractions,
            spacer_counts,
        })
    }

    /// Equal cuts into `num_cuts` pieces.
    pub fn uniform(num_cuts: usize, spacer_counts: Vec<BigUint>) -> Result<Self> {
        let f = BigRational::new(1.into(), num_cuts.max(1).into());
        Self::new(vec![f; num_cuts], spacer_counts)
    }

    pub fn num_cuts(&self) -> usize {
        self.cut_fractions.len()
    }

    pub fn total_spacers(&self) -> BigUint {
        self.spacer_counts.iter().sum()
    }

    /// `h_{k+1} = r_k * h_k + sum_i s(k,i)`.
    pub fn next_height(&self, height: &BigUint) -> BigUint {
        height * BigUint::from(self.num_cuts()) + self.total_spacers()
    }

    fn to_json(&self) -> Value {
        let spacers: Vec<Value> = self
            .spacer_counts
            .iter()
            .map(|s| match s.to_u64() {
                Some(v) => json!(v),
                None => json!(s.to_string()),
            })
            .collect();
        json!({
            "cuts": self.num_cuts(),
            "fractions": self.cut_fractions.iter().map(format_rational).collect::<Vec<_>>(),
            "spacers": spacers,
        })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Spec("stage rule must be an object".into()))?;
        let cuts = obj
            .get("cuts")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Spec("stage rule needs integer \"cuts\"".into()))?
            as usize;
        let fractions = match obj.get("fractions") {
            Some(Value::Array(items)) => items
                .iter()
                .map(|x| match x {
                    Value::String(s) => parse_rational(s),
                    other => Err(Error::Spec(format!("fraction must be a \"p/q\" string, got {other}"))),
                })
                .collect::<Result<Vec<_>>>()?,
            None => vec![BigRational::new(1.into(), cuts.max(1).into()); cuts],
            Some(_) => return Err(Error::Spec("\"fractions\" must be an array".into())),
        };
        let spacers = match obj.get("spacers") {
            Some(Value::Array(items)) => items.iter().map(parse_count).collect::<Result<Vec<_>>>()?,
            None => vec![BigUint::zero(); cuts],
            Some(_) => return Err(Error::Spec("\"spacers\" must be an array".into())),
        };
        if fractions.len() != cuts {
            return Err(Error::Spec(format!(
                "\"cuts\" is {cuts} but {} fractions given",
                fractions.len()
            )));
        }
        StageRule::new(fractions, spacers)
    }
}

pub(crate) fn parse_count(v: &Value) -> Result<BigUint> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| Error::Spec(format!("expected a nonnegative integer, got {n}"))),
        Value::String(s) => s
            .trim()
            .parse::<BigUint>()
            .map_err(|_| Error::Spec(format!("expected a decimal integer string, got {s:?}"))),
        other => Err(Error::Spec(format!("expected an integer, got {other}"))),
    }
}

/// Where the per-stage rules come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleSource {
    /// Finite list; stages past the end reuse `rules[tail]` forever, or are
    /// undefined when `tail` is `None`.
    Explicit {
        rules: Vec<StageRule>,
        tail: Option<usize>,
    },
    Preset(PresetId),
}

/// A complete rank-one construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformationSpec {
    pub base_measure: BigRational,
    pub rules: RuleSource,
}

impl TransformationSpec {
    pub fn explicit(rules: Vec<StageRule>, tail: Option<usize>) -> Result<Self> {
        if let Some(t) = tail {
            if t >= rules.len() {
                return Err(Error::Spec(format!(
                    "tail index {t} out of range for {} rules",
                    rules.len()
                )));
            }
        }
        Ok(TransformationSpec {
            base_measure: BigRational::one(),
            rules: RuleSource::Explicit { rules, tail },
        })
    }

    pub fn with_base_measure(mut self, base_measure: BigRational) -> Result<Self> {
        if base_measure <= BigRational::zero() {
            return Err(Error::Spec("base measure must be positive".into()));
        }
        self.base_measure = base_measure;
        Ok(self)
    }

    pub fn preset_id(&self) -> Option<&PresetId> {
        match &self.rules {
            RuleSource::Preset(id) => Some(id),
            RuleSource::Explicit { .. } => None,
        }
    }

    /// The rule that turns `C_stage` (of the given height) into `C_{stage+1}`.
    pub fn rule_at(&self, stage: usize, height: &BigUint) -> Result<StageRule> {
        match &self.rules {
            RuleSource::Explicit { rules, tail } => {
                if let Some(rule) = rules.get(stage) {
                    Ok(rule.clone())
                } else if let Some(t) = tail {
                    Ok(rules[*t].clone())
                } else {
                    Err(Error::Spec(format!(
                        "no rule for stage {stage}: {} explicit rules and no tail",
                        rules.len()
                    )))
                }
            }
            RuleSource::Preset(id) => presets::stage_rule(id, stage, height),
        }
    }

    /// Column heights `h_0..=h_stages` by integer recursion, without building columns.
    pub fn heights(&self, stages: usize) -> Result<Vec<BigUint>> {
        let mut out = Vec::with_capacity(stages + 1);
        let mut h = BigUint::one();
        out.push(h.clone());
        for k in 0..stages {
            h = self.rule_at(k, &h)?.next_height(&h);
            out.push(h.clone());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert(
            "base_measure".into(),
            Value::String(format_rational(&self.base_measure)),
        );
        match &self.rules {
            RuleSource::Explicit { rules, tail } => {
                obj.insert(
                    "rules".into(),
                    Value::Array(rules.iter().map(StageRule::to_json).collect()),
                );
                obj.insert(
                    "tail".into(),
                    tail.map(|t| json!(t)).unwrap_or(Value::Null),
                );
            }
            RuleSource::Preset(id) => {
                obj.insert("preset".into(), Value::String(id.name().into()));
                obj.insert("params".into(), Value::Object(id.params_json()));
            }
        }
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Spec("spec must be a JSON object".into()))?;
        let base_measure = match obj.get("base_measure") {
            None | Some(Value::Null) => BigRational::one(),
            Some(Value::String(s)) => parse_rational(s)?,
            Some(other) => {
                return Err(Error::Spec(format!(
                    "base_measure must be a \"p/q\" string, got {other}"
                )))
            }
        };
        let spec = if let Some(name) = obj.get("preset") {
            let name = name
                .as_str()
                .ok_or_else(|| Error::Spec("\"preset\" must be a string".into()))?;
            let empty = Map::new();
            let params = match obj.get("params") {
                None | Some(Value::Null) => &empty,
                Some(Value::Object(m)) => m,
                Some(_) => return Err(Error::Spec("\"params\" must be an object".into())),
            };
            presets::preset(PresetId::from_name_params(name, params)?)?
        } else {
            let rules = match obj.get("rules") {
                Some(Value::Array(items)) => items
                    .iter()
                    .map(StageRule::from_json)
                    .collect::<Result<Vec<_>>>()?,
                _ => {
                    return Err(Error::Spec(
                        "spec needs either \"preset\" or a \"rules\" array".into(),
                    ))
                }
            };
            let tail = match obj.get("tail") {
                None | Some(Value::Null) => None,
                Some(t) => Some(
                    t.as_u64()
                        .ok_or_else(|| Error::Spec("\"tail\" must be an integer".into()))?
                        as usize,
                ),
            };
            TransformationSpec::explicit(rules, tail)?
        };
        spec.with_base_measure(base_measure)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("spec JSON: {e}")))?;
        Self::from_json(&v)
    }
}

impl Serialize for TransformationSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TransformationSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        TransformationSpec::from_json(&v).map_err(serde::de::Error::custom)
    }
}
