//! The limit map `T` evaluated at finite depth, the cyclic column maps `R_n`,
//! and Radon–Nikodym cocycles `ω_i = d(μ∘T^i)/dμ`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::engine::level_set::LevelSet;
use crate::engine::tower::Tower;
use crate::error::{Error, Result};
use crate::rational::{factor_over, format_rational, serde_rat};

/// One resolved piece of `T^i`: level `source` of `C_stage` maps onto level `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftPiece {
    pub stage: usize,
    pub source: usize,
    pub target: usize,
}

/// `T^i A` split into resolved pieces and levels left unresolved at `max_stage`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftPieces {
    pub shift: i64,
    pub pieces: Vec<ShiftPiece>,
    /// `(stage, index)` of source levels whose image leaves the column at every
    /// stage up to `max_stage`.
    pub unresolved: Vec<(usize, usize)>,
}

impl ShiftPieces {
    /// Highest stage at which something was resolved (or `floor` if nothing was).
    pub fn working_stage(&self, floor: usize) -> usize {
        self.pieces.iter().map(|p| p.stage).max().unwrap_or(floor).max(floor)
    }
}

/// `T^i A` at finite depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftResult {
    pub image: LevelSet,
    #[serde(with = "serde_rat")]
    pub unresolved_measure: BigRational,
    pub working_stage: usize,
}

impl ShiftResult {
    pub fn is_resolved(&self) -> bool {
        self.unresolved_measure.is_zero()
    }
}

/// Exact value of `ω_i` on a piece, with its factorisation over the cut ratios.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CocycleValue {
    pub value: BigRational,
    /// `(base, exponent)` pairs with `value = prod base^exponent`; empty for a
    /// measure-preserving tower, `None` if no integer factorisation exists.
    pub exponents: Option<Vec<(BigRational, i64)>>,
}

impl CocycleValue {
    pub fn new(value: BigRational, bases: Option<&[BigRational]>) -> Self {
        let exponents = bases.and_then(|b| {
            factor_over(&value, b).map(|e| {
                b.iter()
                    .cloned()
                    .zip(e)
                    .filter(|(_, e)| *e != 0)
                    .collect::<Vec<_>>()
            })
        });
        CocycleValue { value, exponents }
    }

    /// Exponent of `base` in the factorisation (0 if absent).
    pub fn exponent_of(&self, base: &BigRational) -> Option<i64> {
        self.exponents.as_ref().map(|ex| {
            ex.iter()
                .find(|(b, _)| b == base)
                .map(|(_, e)| *e)
                .unwrap_or(0)
        })
    }
}

impl Serialize for CocycleValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Factor {
            base: String,
            exponent: i64,
        }
        let mut st = s.serialize_struct("CocycleValue", 2)?;
        st.serialize_field("value", &format_rational(&self.value))?;
        let ex = self.exponents.as_ref().map(|ex| {
            ex.iter()
                .map(|(b, e)| Factor {
                    base: format_rational(b),
                    exponent: *e,
                })
                .collect::<Vec<_>>()
        });
        st.serialize_field("exponents", &ex)?;
        st.end()
    }
}

/// `ω_i` on the resolved part of `A`, grouped by value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RnDerivative {
    pub shift: i64,
    pub parts: Vec<RnPart>,
    #[serde(with = "serde_rat")]
    pub unresolved_measure: BigRational,
    pub working_stage: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RnPart {
    pub levels: LevelSet,
    pub omega: CocycleValue,
}

impl Tower {
    /// Resolves `T^i` on `A` level by level, refining up to `max_stage`.
    pub fn shift_pieces(&self, a: &LevelSet, i: i64, max_stage: usize) -> Result<ShiftPieces> {
        self.validate(a)?;
        self.check_stage(max_stage)?;
        let mut pieces = Vec::new();
        let mut unresolved = Vec::new();
        let mut frontier: Vec<usize> = a.indices().to_vec();
        let mut stage = a.stage;
        loop {
            let h = self.height(stage)? as i64;
            let mut pending = Vec::new();
            for &j in &frontier {
                let t = j as i64 + i;
                if (0..h).contains(&t) {
                    pieces.push(ShiftPiece {
                        stage,
                        source: j,
                        target: t as usize,
                    });
                } else {
                    pending.push(j);
                }
            }
            if pending.is_empty() {
                break;
            }
            if stage >= max_stage {
                unresolved.extend(pending.into_iter().map(|j| (stage, j)));
                break;
            }
            let offsets = &self.columns()[stage + 1].subcolumn_offsets;
            frontier = offsets
                .iter()
                .flat_map(|&o| pending.iter().map(move |&j| o + j))
                .collect();
            stage += 1;
        }
        Ok(ShiftPieces {
            shift: i,
            pieces,
            unresolved,
        })
    }

    fn unresolved_measure(&self, pieces: &ShiftPieces) -> BigRational {
        pieces
            .unresolved
            .iter()
            .fold(BigRational::zero(), |acc, &(s, j)| {
                acc + &self.columns()[s].level_measures[j]
            })
    }

    /// Collects `(stage, index)` pairs into one set at stage `at`.
    pub(crate) fn collect_at(
        &self,
        items: impl IntoIterator<Item = (usize, usize)>,
        at: usize,
    ) -> Result<LevelSet> {
        let mut by_stage: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (s, j) in items {
            by_stage.entry(s).or_default().push(j);
        }
        let mut out = Vec::new();
        for (s, idx) in by_stage {
            out.extend_from_slice(self.refine(&LevelSet::new(s, idx), at)?.indices());
        }
        Ok(LevelSet::new(at, out))
    }

    /// `T^i A`, refining up to `max_stage`; mass whose image never lands inside
    /// a column is reported in `unresolved_measure`.
    pub fn shift(&self, a: &LevelSet, i: i64, max_stage: usize) -> Result<ShiftResult> {
        let pieces = self.shift_pieces(a, i, max_stage)?;
        let stage = pieces.working_stage(a.stage);
        let image = self.collect_at(pieces.pieces.iter().map(|p| (p.stage, p.target)), stage)?;
        Ok(ShiftResult {
            image,
            unresolved_measure: self.unresolved_measure(&pieces),
            working_stage: stage,
        })
    }

    /// As [`Tower::shift`], but unresolved mass is an error.
    pub fn shift_strict(&self, a: &LevelSet, i: i64, max_stage: usize) -> Result<ShiftResult> {
        let r = self.shift(a, i, max_stage)?;
        if r.is_resolved() {
            Ok(r)
        } else {
            Err(Error::Unresolved {
                measure: format_rational(&r.unresolved_measure),
                stage: r.working_stage,
            })
        }
    }

    /// `R_n^i A` for `A` at stage `n`: indices move by `i` modulo `h_n`.
    pub fn cyclic_shift(&self, a: &LevelSet, i: i64) -> Result<LevelSet> {
        self.validate(a)?;
        let h = self.height(a.stage)? as i64;
        let r = i.rem_euclid(h);
        let idx = a
            .indices()
            .iter()
            .map(|&j| ((j as i64 + r) % h) as usize)
            .collect();
        Ok(LevelSet::new(a.stage, idx))
    }

    /// `S^i A` taken as `R_n^i A` at the first stage `n` where it agrees with
    /// `R_{n+1}^i A`.
    pub fn stabilized_shift(&self, a: &LevelSet, i: i64) -> Result<LevelSet> {
        self.validate(a)?;
        if i == 0 {
            return Ok(a.clone());
        }
        let mut n = a.stage;
        let mut current = self.cyclic_shift(a, i)?;
        while n < self.depth() {
            let next = self.cyclic_shift(&self.refine(a, n + 1)?, i)?;
            if self.refine(&current, n + 1)? == next {
                return Ok(current);
            }
            current = next;
            n += 1;
        }
        Err(Error::Depth {
            requested: n + 1,
            built: self.depth(),
            diagnostic: Some(format!(
                "R_n^{i} {a} did not stabilise between consecutive stages up to C_{}",
                self.depth()
            )),
        })
    }

    /// `ω_i` on the resolved part of `A`, partitioned into level sets of
    /// constant value and expressed at the working stage.
    pub fn rn_derivative(&self, a: &LevelSet, i: i64, max_stage: usize) -> Result<RnDerivative> {
        let pieces = self.shift_pieces(a, i, max_stage)?;
        let stage = pieces.working_stage(a.stage);
        let bases = self.factorisation_bases();
        let mut groups: BTreeMap<BigRational, Vec<(usize, usize)>> = BTreeMap::new();
        for p in &pieces.pieces {
            groups
                .entry(self.piece_omega(p))
                .or_default()
                .push((p.stage, p.source));
        }
        let parts = groups
            .into_iter()
            .map(|(value, items)| {
                Ok(RnPart {
                    levels: self.collect_at(items, stage)?,
                    omega: CocycleValue::new(value, bases.as_deref()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RnDerivative {
            shift: i,
            parts,
            unresolved_measure: self.unresolved_measure(&pieces),
            working_stage: stage,
        })
    }

    /// `μ(target level) / μ(source level)`.
    pub fn piece_omega(&self, p: &ShiftPiece) -> BigRational {
        let ms = &self.columns()[p.stage].level_measures;
        if p.source == p.target {
            return BigRational::one();
        }
        &ms[p.target] / &ms[p.source]
    }
}
