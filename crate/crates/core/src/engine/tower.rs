use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::engine::spec::{StageRule, TransformationSpec};
use crate::error::{Error, Result};
use crate::rational::{multiplicatively_independent, serde_rat};

/// Where a level of `C_k` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelProvenance {
    /// The `cut_slot`-th piece of level `parent_level` of `C_{k-1}`.
    FromParent { parent_level: usize, cut_slot: usize },
    /// A spacer first appearing in column `birth_stage`, stacked over
    /// subcolumn `subcolumn`; `slot` counts up from the subcolumn's top.
    Spacer {
        birth_stage: usize,
        subcolumn: usize,
        slot: usize,
    },
}

/// The stage-`k` tower `C_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub stage: usize,
    pub height: usize,
    pub level_measures: Vec<BigRational>,
    pub provenance: Vec<LevelProvenance>,
    /// Index in this column of the bottom of each subcolumn `C_{k-1,i}`.
    /// Empty for `C_0`.
    pub subcolumn_offsets: Vec<usize>,
}

impl Column {
    /// `w(C_k)`: the largest level measure.
    pub fn width(&self) -> &BigRational {
        self.level_measures
            .iter()
            .max()
            .expect("a column has at least one level")
    }

    pub fn total_measure(&self) -> BigRational {
        self.level_measures.iter().sum()
    }

    pub fn spacer_count(&self) -> usize {
        self.provenance
            .iter()
            .filter(|p| matches!(p, LevelProvenance::Spacer { .. }))
            .count()
    }
}

/// Default bound on the number of levels of a single column.
pub const DEFAULT_LEVEL_CAP: usize = 1 << 22;

/// Columns `C_0..=C_depth` of a rank-one construction, memoised.
#[derive(Debug, Clone)]
pub struct Tower {
    spec: TransformationSpec,
    columns: Vec<Column>,
    /// `rules[k]` built `C_{k+1}` from `C_k`.
    rules: Vec<StageRule>,
    level_cap: usize,
}

/// Builds `C_0..=C_depth` for `spec`.
pub fn build_tower(spec: &TransformationSpec, depth: usize) -> Result<Tower> {
    let mut tower = Tower::new(spec.clone());
    tower.extend_to(depth)?;
    Ok(tower)
}

impl Tower {
    pub fn new(spec: TransformationSpec) -> Self {
        Self::with_level_cap(spec, DEFAULT_LEVEL_CAP)
    }

    pub fn with_level_cap(spec: TransformationSpec, level_cap: usize) -> Self {
        let base = Column {
            stage: 0,
            height: 1,
            level_measures: vec![spec.base_measure.clone()],
            provenance: vec![LevelProvenance::FromParent {
                parent_level: 0,
                cut_slot: 0,
            }],
            subcolumn_offsets: Vec::new(),
        };
        Tower {
            spec,
            columns: vec![base],
            rules: Vec::new(),
            level_cap,
        }
    }

    pub fn spec(&self) -> &TransformationSpec {
        &self.spec
    }

    /// Index of the deepest built column.
    pub fn depth(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, stage: usize) -> Result<&Column> {
        self.columns
            .get(stage)
            .ok_or_else(|| Error::depth(stage, self.depth()))
    }

    pub fn height(&self, stage: usize) -> Result<usize> {
        Ok(self.column(stage)?.height)
    }

    pub fn heights(&self) -> Vec<usize> {
        self.columns.iter().map(|c| c.height).collect()
    }

    /// Rule used to build `C_{stage+1}`.
    pub fn rule(&self, stage: usize) -> Result<&StageRule> {
        self.rules
            .get(stage)
            .ok_or_else(|| Error::depth(stage + 1, self.depth()))
    }

    pub(crate) fn check_stage(&self, stage: usize) -> Result<()> {
        if stage > self.depth() {
            Err(Error::depth(stage, self.depth()))
        } else {
            Ok(())
        }
    }

    /// Builds further columns until `C_depth` exists.
    pub fn extend_to(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            self.push_column()?;
        }
        Ok(())
    }

    fn push_column(&mut self) -> Result<()> {
        let prev = self.columns.last().expect("C_0 always present");
        let k = prev.stage;
        let rule = self.spec.rule_at(k, &BigUint::from(prev.height))?;
        let next_height = rule.next_height(&BigUint::from(prev.height));
        let height = next_height
            .to_usize()
            .filter(|&h| h <= self.level_cap)
            .ok_or_else(|| Error::Resource {
                what: format!("column C_{} would have {next_height} levels", k + 1),
                cap: self.level_cap as u64,
            })?;
        let top_measure = prev.level_measures[prev.height - 1].clone();
        let mut level_measures = Vec::with_capacity(height);
        let mut provenance = Vec::with_capacity(height);
        let mut subcolumn_offsets = Vec::with_capacity(rule.num_cuts());
        for (slot, (fraction, spacers)) in rule
            .cut_fractions
            .iter()
            .zip(&rule.spacer_counts)
            .enumerate()
        {
            subcolumn_offsets.push(level_measures.len());
            for (j, m) in prev.level_measures.iter().enumerate() {
                level_measures.push(fraction * m);
                provenance.push(LevelProvenance::FromParent {
                    parent_level: j,
                    cut_slot: slot,
                });
            }
            // Spacers copy the width of the level beneath them, so T is a pure
            // translation along every spacer step.
            let spacer_measure = fraction * &top_measure;
            let spacers = spacers.to_usize().expect("bounded by the height check");
            for s in 0..spacers {
                level_measures.push(spacer_measure.clone());
                provenance.push(LevelProvenance::Spacer {
                    birth_stage: k + 1,
                    subcolumn: slot,
                    slot: s,
                });
            }
        }
        debug_assert_eq!(level_measures.len(), height);
        self.columns.push(Column {
            stage: k + 1,
            height,
            level_measures,
            provenance,
            subcolumn_offsets,
        });
        self.rules.push(rule);
        Ok(())
    }

    /// Indices in `C_{stage+1}` of the pieces of level `index` of `C_stage`.
    pub fn children(&self, stage: usize, index: usize) -> Result<Vec<usize>> {
        let next = self.column(stage + 1)?;
        Ok(next.subcolumn_offsets.iter().map(|o| o + index).collect())
    }

    /// Parent level in `C_{stage-1}`, or `None` for spacers born at `stage`.
    pub fn parent(&self, stage: usize, index: usize) -> Option<usize> {
        if stage == 0 {
            return None;
        }
        match self.columns.get(stage)?.provenance.get(index)? {
            LevelProvenance::FromParent { parent_level, .. } => Some(*parent_level),
            LevelProvenance::Spacer { .. } => None,
        }
    }

    /// The level of `C_target` containing level `index` of `C_stage`, if any.
    pub fn ancestor(&self, stage: usize, index: usize, target: usize) -> Option<usize> {
        let mut idx = index;
        let mut s = stage;
        while s > target {
            idx = self.parent(s, idx)?;
            s -= 1;
        }
        (s == target).then_some(idx)
    }

    /// Distinct cut ratios `f_i / f_0` (other than 1) over all built stages.
    ///
    /// Every cocycle value is a product of integer powers of these.
    pub fn ratio_bases(&self) -> Vec<BigRational> {
        let mut bases: Vec<BigRational> = Vec::new();
        for rule in &self.rules {
            let f0 = &rule.cut_fractions[0];
            for f in &rule.cut_fractions[1..] {
                let r = f / f0;
                if !r.is_one() && !bases.contains(&r) {
                    bases.push(r);
                }
            }
        }
        bases
    }

    /// Ratio bases, when they admit unique integer factorisations.
    pub fn factorisation_bases(&self) -> Option<Vec<BigRational>> {
        let bases = self.ratio_bases();
        (bases.is_empty() || multiplicatively_independent(&bases)).then_some(bases)
    }
}

/// Column summary used in reports.
#[derive(Debug, Clone, Serialize)]
pub struct ColumnSummary {
    pub stage: usize,
    pub height: usize,
    pub spacers: usize,
    #[serde(with = "serde_rat")]
    pub total_measure: BigRational,
    #[serde(with = "serde_rat")]
    pub width: BigRational,
}

impl From<&Column> for ColumnSummary {
    fn from(c: &Column) -> Self {
        ColumnSummary {
            stage: c.stage,
            height: c.height,
            spacers: c.spacer_count(),
            total_measure: c.total_measure(),
            width: c.width().clone(),
        }
    }
}
