//! Geometric reference model: every level is a half-open interval of the real
//! line with rational endpoints, and the map sends each non-top level
//! affinely onto the one stacked above it. Nothing here uses the engine's
//! index bookkeeping.

#![allow(dead_code)]

pub mod laws;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(s: &str) -> Q {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    Q::new(n.trim().parse::<BigInt>().unwrap(), d.trim().parse::<BigInt>().unwrap())
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn len(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains_point(&self, x: &Q) -> bool {
        &self.lo <= x && x < &self.hi
    }

    pub fn contains(&self, o: &Interval) -> bool {
        self.lo <= o.lo && o.hi <= self.hi
    }

    pub fn overlap(&self, o: &Interval) -> Q {
        let lo = if self.lo > o.lo { &self.lo } else { &o.lo };
        let hi = if self.hi < o.hi { &self.hi } else { &o.hi };
        if lo < hi {
            hi - lo
        } else {
            Q::zero()
        }
    }
}

/// Stage rule as plain data: cut fractions and spacer counts.
pub type Rule = (Vec<Q>, Vec<usize>);

pub struct Geo {
    /// `columns[k][j]` is level `j` of `C_k`, bottom to top.
    pub columns: Vec<Vec<Interval>>,
    /// Per column: level indices sorted by left endpoint.
    sorted: Vec<Vec<usize>>,
}

impl Geo {
    /// Cuts and stacks `depth` times; spacers are taken from fresh line to
    /// the right and copy the width of the interval they are stacked on.
    pub fn build(base: Q, depth: usize, rule: impl Fn(usize, usize) -> Rule) -> Geo {
        let mut columns = vec![vec![Interval {
            lo: Q::zero(),
            hi: base.clone(),
        }]];
        let mut free = base;
        for k in 0..depth {
            let prev = columns.last().unwrap().clone();
            let (fracs, spacers) = rule(k, prev.len());
            let mut next = Vec::new();
            let mut cum = Q::zero();
            for (f, &s) in fracs.iter().zip(&spacers) {
                for lvl in &prev {
                    let w = lvl.len();
                    let lo = &lvl.lo + &cum * &w;
                    let hi = &lo + f * &w;
                    next.push(Interval { lo, hi });
                }
                for _ in 0..s {
                    let w = next.last().unwrap().len();
                    let lo = free.clone();
                    free = &free + &w;
                    next.push(Interval { lo, hi: free.clone() });
                }
                cum += f;
            }
            columns.push(next);
        }
        let sorted = columns
            .iter()
            .map(|c| {
                let mut idx: Vec<usize> = (0..c.len()).collect();
                idx.sort_by(|&a, &b| c[a].lo.cmp(&c[b].lo));
                idx
            })
            .collect();
        Geo { columns, sorted }
    }

    pub fn depth(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn heights(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }

    /// Level of `C_s` containing the point `x`.
    pub fn level_of(&self, s: usize, x: &Q) -> Option<usize> {
        let col = &self.columns[s];
        let idx = &self.sorted[s];
        let pos = idx.partition_point(|&j| &col[j].lo <= x);
        if pos == 0 {
            return None;
        }
        let j = idx[pos - 1];
        col[j].contains_point(x).then_some(j)
    }

    /// Level of `C_s` containing the whole interval.
    pub fn level_containing(&self, s: usize, iv: &Interval) -> Option<usize> {
        let j = self.level_of(s, &iv.lo)?;
        self.columns[s][j].contains(iv).then_some(j)
    }

    /// Levels of `C_s` inside `iv`.
    pub fn levels_inside(&self, s: usize, iv: &Interval) -> Vec<usize> {
        let col = &self.columns[s];
        let idx = &self.sorted[s];
        let from = idx.partition_point(|&j| col[j].lo < iv.lo);
        let to = idx.partition_point(|&j| col[j].lo < iv.hi);
        let mut out: Vec<usize> = idx[from..to]
            .iter()
            .copied()
            .filter(|&j| iv.contains(&col[j]))
            .collect();
        out.sort_unstable();
        out
    }

    /// The affine map from level `j` onto level `t` of `C_s`, applied to `x`.
    pub fn carry(&self, s: usize, j: usize, t: usize, x: &Q) -> Q {
        let a = &self.columns[s][j];
        let b = &self.columns[s][t];
        &b.lo + (x - &a.lo) * b.len() / a.len()
    }

    /// One step of the map at `x`, found at the first stage where `x` is not
    /// on the top level; `None` if that needs more than the built depth.
    pub fn step(&self, x: &Q) -> Option<Q> {
        for s in 0..=self.depth() {
            if let Some(j) = self.level_of(s, x) {
                if j + 1 < self.columns[s].len() {
                    return Some(self.carry(s, j, j + 1, x));
                }
            }
        }
        None
    }

    pub fn orbit(&self, x: &Q, n: usize) -> Option<Q> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.step(&y)?;
        }
        Some(y)
    }

    /// Image of a level-aligned interval under `T^i` as `(source, image)`
    /// pieces, each mapped whole within some column up to `max_stage`, plus
    /// the measure left over.
    pub fn image(&self, iv: &Interval, i: i64, max_stage: usize) -> (Vec<(Interval, Interval)>, Q) {
        let mut out = Vec::new();
        let mut lost = Q::zero();
        let mut work = vec![iv.clone()];
        for s in 0..=max_stage {
            let mut pending = Vec::new();
            for piece in work {
                let Some(j) = self.level_containing(s, &piece) else {
                    pending.push(piece);
                    continue;
                };
                let t = j as i64 + i;
                if (0..self.columns[s].len() as i64).contains(&t) {
                    let t = t as usize;
                    let img = Interval {
                        lo: self.carry(s, j, t, &piece.lo),
                        hi: self.carry(s, j, t, &piece.hi),
                    };
                    out.push((piece, img));
                } else if s < max_stage {
                    if self.columns[s][j] == piece {
                        // split along the next column
                        for c in self.levels_inside(s + 1, &piece) {
                            pending.push(self.columns[s + 1][c].clone());
                        }
                    } else {
                        pending.push(piece);
                    }
                } else {
                    lost += piece.len();
                }
            }
            work = pending;
        }
        for piece in work {
            lost += piece.len();
        }
        (out, lost)
    }

    pub fn level(&self, s: usize, j: usize) -> Interval {
        self.columns[s][j].clone()
    }

    pub fn set(&self, s: usize, idx: &[usize]) -> Vec<Interval> {
        idx.iter().map(|&j| self.level(s, j)).collect()
    }
}

pub fn images(pairs: &[(Interval, Interval)]) -> Vec<Interval> {
    pairs.iter().map(|(_, b)| b.clone()).collect()
}

/// Measure of the set of source points whose image lands in `target`.
pub fn returning_source(pairs: &[(Interval, Interval)], target: &[Interval]) -> Q {
    let mut sum = Q::zero();
    for (src, dst) in pairs {
        let hit = overlap(std::slice::from_ref(dst), target);
        sum += hit * src.len() / dst.len();
    }
    sum
}

pub fn total(ivs: &[Interval]) -> Q {
    ivs.iter().fold(Q::zero(), |acc, iv| acc + iv.len())
}

/// Lebesgue measure of `A ∩ B` for two disjoint-within unions.
pub fn overlap(a: &[Interval], b: &[Interval]) -> Q {
    let mut sum = Q::zero();
    for x in a {
        for y in b {
            sum += x.overlap(y);
        }
    }
    sum
}

// Preset rules written out directly.

pub fn two(f: Q) -> Vec<Q> {
    vec![f.clone(), Q::one() - f]
}

pub fn hk_plus1_lambda(lambda: Q) -> impl Fn(usize, usize) -> Rule {
    move |_, h| {
        let left = Q::one() / (Q::one() + &lambda);
        (two(left), vec![0, 2 * h + 1])
    }
}

pub fn hk_plus1() -> impl Fn(usize, usize) -> Rule {
    hk_plus1_lambda(Q::one())
}

pub fn kakutani() -> impl Fn(usize, usize) -> Rule {
    |_, _| (two(q("1/2")), vec![0, 0])
}

pub fn hajian_kakutani() -> impl Fn(usize, usize) -> Rule {
    |_, h| (two(q("1/2")), vec![0, 2 * h])
}

pub fn chacon() -> impl Fn(usize, usize) -> Rule {
    |_, _| (vec![q("1/3"); 3], vec![0, 1, 0])
}

pub fn type_iii1(l1: Q, l2: Q) -> impl Fn(usize, usize) -> Rule {
    move |k, h| {
        let l = if k % 2 == 0 { &l1 } else { &l2 };
        (two(Q::one() / (Q::one() + l)), vec![0, 2 * h + 1])
    }
}
