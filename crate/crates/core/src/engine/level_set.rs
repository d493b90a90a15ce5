use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::engine::tower::Tower;
use crate::error::{Error, Result};

/// A union of levels of `C_stage`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LevelSet {
    pub stage: usize,
    indices: Vec<usize>,
}

impl LevelSet {
    /// Sorts and deduplicates `indices`; range is checked against a tower on use.
    pub fn new(stage: usize, mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        LevelSet { stage, indices }
    }

    pub fn empty(stage: usize) -> Self {
        LevelSet {
            stage,
            indices: Vec::new(),
        }
    }

    pub fn level(stage: usize, index: usize) -> Self {
        LevelSet {
            stage,
            indices: vec![index],
        }
    }

    pub(crate) fn from_sorted(stage: usize, indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        LevelSet { stage, indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }
}

impl fmt::Display for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}@C_{}", idx.join(","), self.stage)
    }
}

/// Parses `"stage:i,j,k"` (e.g. `1:3` for level 3 of `C_1`).
impl FromStr for LevelSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (stage, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("level set {s:?}: expected stage:i,j,...")))?;
        let stage = stage
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("level set {s:?}: bad stage")))?;
        let indices = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("level set {s:?}: bad index {t:?}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        Ok(LevelSet::new(stage, indices))
    }
}

fn merge_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn merge_intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn merge_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j >= b.len() || b[j] != x {
            out.push(x);
        }
    }
    out
}

impl Tower {
    /// Checks that every index lies in `[0, h_stage)`.
    pub fn validate(&self, set: &LevelSet) -> Result<()> {
        let h = self.height(set.stage)?;
        if let Some(&bad) = set.indices.iter().find(|&&j| j >= h) {
            return Err(Error::Spec(format!(
                "level {bad} out of range for C_{} of height {h}",
                set.stage
            )));
        }
        Ok(())
    }

    /// Every level of `C_stage`.
    pub fn full(&self, stage: usize) -> Result<LevelSet> {
        Ok(LevelSet::from_sorted(stage, (0..self.height(stage)?).collect()))
    }

    /// The same set expressed as levels of `C_m`.
    pub fn refine(&self, set: &LevelSet, m: usize) -> Result<LevelSet> {
        self.check_stage(m)?;
        self.validate(set)?;
        if m < set.stage {
            return Err(Error::Spec(format!(
                "cannot refine a stage-{} set down to stage {m}",
                set.stage
            )));
        }
        let mut cur = set.indices.clone();
        for s in set.stage..m {
            let offsets = &self.columns()[s + 1].subcolumn_offsets;
            let mut next = Vec::with_capacity(cur.len() * offsets.len());
            for &off in offsets {
                next.extend(cur.iter().map(|&j| off + j));
            }
            cur = next;
        }
        Ok(LevelSet::from_sorted(m, cur))
    }

    pub fn measure(&self, set: &LevelSet) -> Result<BigRational> {
        self.validate(set)?;
        let col = self.column(set.stage)?;
        Ok(set
            .indices
            .iter()
            .fold(BigRational::zero(), |acc, &j| acc + &col.level_measures[j]))
    }

    fn common(&self, a: &LevelSet, b: &LevelSet) -> Result<(LevelSet, LevelSet)> {
        let m = a.stage.max(b.stage);
        Ok((self.refine(a, m)?, self.refine(b, m)?))
    }

    pub fn union(&self, a: &LevelSet, b: &LevelSet) -> Result<LevelSet> {
        let (a, b) = self.common(a, b)?;
        Ok(LevelSet::from_sorted(a.stage, merge_union(&a.indices, &b.indices)))
    }

    pub fn intersect(&self, a: &LevelSet, b: &LevelSet) -> Result<LevelSet> {
        let (a, b) = self.common(a, b)?;
        Ok(LevelSet::from_sorted(a.stage, merge_intersect(&a.indices, &b.indices)))
    }

    pub fn difference(&self, a: &LevelSet, b: &LevelSet) -> Result<LevelSet> {
        let (a, b) = self.common(a, b)?;
        Ok(LevelSet::from_sorted(a.stage, merge_difference(&a.indices, &b.indices)))
    }

    /// Set equality up to refinement.
    pub fn same_set(&self, a: &LevelSet, b: &LevelSet) -> Result<bool> {
        let (a, b) = self.common(a, b)?;
        Ok(a.indices == b.indices)
    }
}
