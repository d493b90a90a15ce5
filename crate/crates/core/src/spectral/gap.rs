//! Gaps in the set of sums `Σ_{j=L..M} a_j q_j`, `0 ≤ a_j ≤ ⌊q_{j+1}/q_j⌋`.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::heights::HeightSequence;

pub const DEFAULT_GAP_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapReport {
    /// 1-based, inclusive.
    pub l: usize,
    pub m: usize,
    /// Digit bounds `⌊q_{j+1}/q_j⌋` for `j = L..=M` (1 for `j = M` at the end
    /// of the sequence).
    pub caps: Vec<u64>,
    pub set_size: u64,
    pub max_gap: u128,
    pub q_l: u128,
    /// `max_gap ≤ q_L`.
    pub holds: bool,
}

fn small(q: &HeightSequence, j: usize) -> Result<u128> {
    q.values()[j].to_u128().ok_or_else(|| Error::Resource {
        what: format!("q_{} does not fit in 128 bits", j + 1),
        cap: 128,
    })
}

/// Enumerates the sums and returns the largest gap between consecutive ones.
pub fn gap_lemma_check(q: &HeightSequence, l: usize, m: usize, cap: u64) -> Result<GapReport> {
    if l < 1 || l > m || m > q.len() {
        return Err(Error::Spec(format!(
            "need 1 <= L <= M <= {}, got L = {l}, M = {m}",
            q.len()
        )));
    }
    let mut caps = Vec::with_capacity(m - l + 1);
    let mut size: u64 = 1;
    for j in (l - 1)..m {
        let c = if j + 1 < q.len() {
            (small(q, j + 1)? / small(q, j)?) as u64
        } else {
            1
        };
        size = size
            .checked_mul(c + 1)
            .filter(|&s| s <= cap)
            .ok_or_else(|| Error::Resource {
                what: format!("gap enumeration for L = {l}, M = {m}"),
                cap,
            })?;
        caps.push(c);
    }
    let mut sums: Vec<u128> = vec![0];
    for (off, &c) in caps.iter().enumerate() {
        let qj = small(q, l - 1 + off)?;
        let mut next = Vec::with_capacity(sums.len() * (c as usize + 1));
        for a in 0..=c as u128 {
            next.extend(sums.iter().map(|s| s + a * qj));
        }
        sums = next;
    }
    sums.sort_unstable();
    sums.dedup();
    let max_gap = sums.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
    let q_l = small(q, l - 1)?;
    Ok(GapReport {
        l,
        m,
        caps,
        set_size: size,
        max_gap,
        q_l,
        holds: max_gap <= q_l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[u64]) -> HeightSequence {
        HeightSequence::from_u64(v).unwrap()
    }

    #[test]
    fn powers_of_two_cover_a_segment() {
        let r = gap_lemma_check(&seq(&[1, 2, 4, 8, 16]), 1, 4, DEFAULT_GAP_CAP).unwrap();
        assert_eq!(r.caps, vec![2, 2, 2, 2]);
        assert_eq!(r.max_gap, 1);
        assert!(r.holds);
    }

    #[test]
    fn powers_of_three() {
        let r = gap_lemma_check(&seq(&[1, 3, 9, 27]), 2, 3, DEFAULT_GAP_CAP).unwrap();
        assert!(r.max_gap <= 3);
        assert!(r.holds);
    }

    #[test]
    fn single_index_is_a_progression() {
        let r = gap_lemma_check(&seq(&[1, 3, 7, 20]), 2, 2, DEFAULT_GAP_CAP).unwrap();
        assert_eq!(r.caps, vec![2]);
        assert_eq!(r.max_gap, 3);
        assert!(r.holds);
    }

    #[test]
    fn bounds_and_cap() {
        let q = seq(&[1, 4, 16, 64, 256]);
        assert!(matches!(gap_lemma_check(&q, 0, 2, 100), Err(Error::Spec(_))));
        assert!(matches!(gap_lemma_check(&q, 3, 2, 100), Err(Error::Spec(_))));
        assert!(matches!(
            gap_lemma_check(&q, 1, 5, 100),
            Err(Error::Resource { cap: 100, .. })
        ));
    }
}
