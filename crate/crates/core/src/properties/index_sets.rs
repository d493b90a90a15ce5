//! Index sets `I_n(A, L)` of the cyclic column maps and the four-translate
//! recursion for tower transformations with spacers `(0, 2h+1)`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;

use crate::engine::{LevelSet, Tower};
use crate::error::{Error, Result};

/// `I_n(A, L) = { i in [0, h_n) : μ(R_n^i A ∩ L) > 0 }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSet {
    pub stage: usize,
    pub source: LevelSet,
    pub target: LevelSet,
    pub members: BTreeSet<usize>,
}

impl IndexSet {
    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn intersection(&self, other: &IndexSet) -> BTreeSet<usize> {
        self.members.intersection(&other.members).copied().collect()
    }
}

/// Every level has positive measure, so `R_n^i A` meets `L` exactly when
/// `i ≡ l − a (mod h_n)` for some levels `a ∈ A`, `l ∈ L` of `C_n`.
pub fn index_set(tower: &Tower, a: &LevelSet, l: &LevelSet, n: usize) -> Result<IndexSet> {
    tower.check_stage(n)?;
    let an = tower.refine(a, n)?;
    let ln = tower.refine(l, n)?;
    let h = tower.height(n)?;
    let mut members = BTreeSet::new();
    for &x in an.indices() {
        for &y in ln.indices() {
            members.insert((y + h - x) % h);
        }
    }
    Ok(IndexSet {
        stage: n,
        source: a.clone(),
        target: l.clone(),
        members,
    })
}

/// Whether stages `1..=through` were built with two cuts and spacers `(0, 2h_k + 1)`.
pub fn is_hk_family_through(tower: &Tower, through: usize) -> Result<bool> {
    tower.check_stage(through)?;
    for k in 0..through {
        let rule = tower.rule(k)?;
        let h = BigUint::from(tower.height(k)?);
        let expected = [BigUint::from(0u32), h * 2u32 + 1u32];
        if rule.num_cuts() != 2 || rule.spacer_counts != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionReport {
    pub n: usize,
    pub holds: bool,
    /// Members of `I_{n+1}(A, L)` outside all four translates.
    pub violations: Vec<usize>,
}

/// Checks `I_{n+1}(A,L) ⊆ ⋃_{t ∈ {0, h_n, 2h_n+1, 3h_n+1}} (I_n(A,L) + t)`,
/// translates taken mod `h_{n+1}`.
pub fn recursion_inclusion_check(
    tower: &Tower,
    a: &LevelSet,
    l: &LevelSet,
    n: usize,
) -> Result<InclusionReport> {
    tower.check_stage(n + 1)?;
    if !is_hk_family_through(tower, n + 1)? {
        return Err(Error::Unsupported(format!(
            "the four-translate inclusion needs two cuts with spacers (0, 2h+1) through C_{}",
            n + 1
        )));
    }
    let cur = index_set(tower, a, l, n)?;
    let next = index_set(tower, a, l, n + 1)?;
    let h = tower.height(n)?;
    let h1 = tower.height(n + 1)?;
    let allowed: BTreeSet<usize> = [0, h, 2 * h + 1, 3 * h + 1]
        .iter()
        .flat_map(|&t| cur.members.iter().map(move |&i| (i + t) % h1))
        .collect();
    let violations: Vec<usize> = next.members.difference(&allowed).copied().collect();
    Ok(InclusionReport {
        n,
        holds: violations.is_empty(),
        violations,
    })
}

/// The pair `B` = top level of `C_1`, `A = S^{-1} B` = the level beneath it.
pub fn witness_pair(tower: &Tower) -> Result<(LevelSet, LevelSet)> {
    let h = tower.height(1)?;
    if h < 2 {
        return Err(Error::Spec("C_1 needs at least two levels".into()));
    }
    Ok((LevelSet::level(1, h - 2), LevelSet::level(1, h - 1)))
}

/// One stage of the index-set induction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursionStage {
    pub n: usize,
    pub i_aa: BTreeSet<usize>,
    pub i_ab: BTreeSet<usize>,
    pub intersection: BTreeSet<usize>,
    /// Four-translate inclusion from stage `n - 1` (absent at the first stage).
    pub inclusion_aa: Option<InclusionReport>,
    pub inclusion_ab: Option<InclusionReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecursionReport {
    pub a: LevelSet,
    pub b: LevelSet,
    pub stages: Vec<RecursionStage>,
    /// `I_1(A, B)`; nonempty for the top pair even though `I_1` itself is empty.
    pub i1_ab: BTreeSet<usize>,
    pub all_empty: bool,
    pub all_inclusions_hold: bool,
}

/// Runs the induction `I_n = I_n(A,A) ∩ I_n(A,B) = ∅` for `n = 1..=max_n`.
pub fn non_wde_recursion(
    tower: &Tower,
    a: &LevelSet,
    b: &LevelSet,
    max_n: usize,
) -> Result<RecursionReport> {
    let mut stages = Vec::new();
    for n in 1..=max_n {
        let aa = index_set(tower, a, a, n)?;
        let ab = index_set(tower, a, b, n)?;
        let (inclusion_aa, inclusion_ab) = if n > 1 {
            (
                Some(recursion_inclusion_check(tower, a, a, n - 1)?),
                Some(recursion_inclusion_check(tower, a, b, n - 1)?),
            )
        } else {
            (None, None)
        };
        stages.push(RecursionStage {
            n,
            intersection: aa.intersection(&ab),
            i_aa: aa.members,
            i_ab: ab.members,
            inclusion_aa,
            inclusion_ab,
        });
    }
    let i1_ab = stages.first().map(|s| s.i_ab.clone()).unwrap_or_default();
    let all_empty = stages.iter().all(|s| s.intersection.is_empty());
    let all_inclusions_hold = stages.iter().all(|s| {
        s.inclusion_aa.as_ref().is_none_or(|r| r.holds)
            && s.inclusion_ab.as_ref().is_none_or(|r| r.holds)
    });
    Ok(RecursionReport {
        a: a.clone(),
        b: b.clone(),
        stages,
        i1_ab,
        all_empty,
        all_inclusions_hold,
    })
}
