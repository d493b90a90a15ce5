use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::engine::spec::parse_count;
use crate::error::{Error, Result};
use crate::presets::{height_sequence, PresetId};
use crate::rational::format_rational;

/// A strictly increasing sequence of positive integers (column heights or
/// rigidity times), indexed from 1 in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightSequence {
    values: Vec<BigUint>,
    doubling: bool,
    max_ratio: Option<BigRational>,
}

impl HeightSequence {
    pub fn new(values: Vec<BigUint>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Spec("height sequence is empty".into()));
        }
        if values[0].is_zero() {
            return Err(Error::Spec("heights must be positive".into()));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Spec(format!(
                "heights must be strictly increasing (entries {} and {})",
                i + 1,
                i + 2
            )));
        }
        let doubling = values.windows(2).all(|w| w[1] >= &w[0] * 2u32);
        let max_ratio = values
            .windows(2)
            .map(|w| BigRational::new(BigInt::from(w[1].clone()), BigInt::from(w[0].clone())))
            .max();
        Ok(HeightSequence {
            values,
            doubling,
            max_ratio,
        })
    }

    pub fn from_u64(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| BigUint::from(v)).collect())
    }

    /// `h_1, ..., h_n` of a preset.
    pub fn from_preset(id: &PresetId, n: usize) -> Result<Self> {
        let mut hs = height_sequence(id, n)?;
        hs.remove(0);
        Self::new(hs)
    }

    /// Accepts a JSON array of decimal strings (or small integers).
    pub fn from_json(v: &Value) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Parse("height sequence must be a JSON array".into()))?;
        Self::new(items.iter().map(parse_count).collect::<Result<_>>()?)
    }

    /// Comma-separated decimal integers.
    pub fn parse_list(text: &str) -> Result<Self> {
        let values = text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<BigUint>()
                    .map_err(|_| Error::Parse(format!("bad height {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `h_{i+1} ≥ 2 h_i` throughout.
    pub fn is_doubling(&self) -> bool {
        self.doubling
    }

    /// Largest consecutive ratio (absent for a single entry).
    pub fn max_ratio(&self) -> Option<&BigRational> {
        self.max_ratio.as_ref()
    }

    /// Doubling with every consecutive ratio at most `k`.
    pub fn bounded_by(&self, k: &BigRational) -> bool {
        self.doubling && self.max_ratio.as_ref().is_none_or(|r| r <= k)
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if n > self.len() {
            Err(Error::Spec(format!(
                "requested {n} terms from a sequence of length {}",
                self.len()
            )))
        } else {
            Ok(())
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.values.iter().map(|v| Value::String(v.to_string())).collect())
    }
}

impl Serialize for HeightSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HeightSequence", 3)?;
        let values: Vec<String> = self.values.iter().map(ToString::to_string).collect();
        st.serialize_field("values", &values)?;
        st.serialize_field("doubling", &self.doubling)?;
        st.serialize_field("max_ratio", &self.max_ratio.as_ref().map(format_rational))?;
        st.end()
    }
}
