//! Partial sums `Φ_N(θ) = Σ_{i ≤ N} |e^{2πiθh_i} − 1|²` and a grid scan for
//! near-eigenvalues.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectral::heights::HeightSequence;
use crate::spectral::theta::{grid_point, squared_chord, Theta};

pub const REFINE_STEPS: u32 = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCandidate {
    pub theta: Theta,
    pub partial_sum: f64,
    /// `|λ^{h_i} − 1|²` for `i = 1..=N`.
    pub tail_profile: Vec<f64>,
}

impl Serialize for EigenCandidate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EigenCandidate", 4)?;
        st.serialize_field("theta", &self.theta.decimal())?;
        st.serialize_field("theta_exact", &self.theta.exact())?;
        st.serialize_field("partial_sum", &self.partial_sum.to_string())?;
        let profile: Vec<String> = self.tail_profile.iter().map(f64::to_string).collect();
        st.serialize_field("tail_profile", &profile)?;
        st.end()
    }
}

/// `Φ_N(θ)` over the first `n` heights.
pub fn aana_sum(heights: &HeightSequence, theta: &Theta, n: usize) -> Result<EigenCandidate> {
    heights.check_len(n)?;
    let tail_profile: Vec<f64> = heights.values()[..n]
        .iter()
        .map(|h| squared_chord(theta.frac_mul(h)))
        .collect();
    Ok(EigenCandidate {
        theta: theta.clone(),
        partial_sum: tail_profile.iter().sum(),
        tail_profile,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub grid_size: u64,
    pub terms: usize,
    pub threshold: f64,
    /// Local minima of the grid below `threshold`, refined, ascending.
    pub candidates: Vec<EigenCandidate>,
    /// Smallest grid value over `θ = k/grid`, `k ≠ 0`.
    pub grid_minimum: EigenCandidate,
    /// `grid_minimum` after refinement.
    pub refined_minimum: EigenCandidate,
}

/// `Φ_N(k/g)` from the residues `h_i mod g`.
fn grid_value(residues: &[u64], k: u64, g: u64) -> f64 {
    residues
        .iter()
        .map(|&r| {
            let m = (k as u128 * r as u128 % g as u128) as f64;
            squared_chord(m / g as f64)
        })
        .sum()
}

/// Iterated grid-halving around `k/g`.
fn refine(heights: &HeightSequence, n: usize, k: u64, g: u64) -> Result<EigenCandidate> {
    let mut best = aana_sum(heights, &grid_point(k, g), n)?;
    let mut centre = BigRational::new(BigInt::from(k), BigInt::from(g));
    let mut step = BigRational::new(BigInt::one(), BigInt::from(g));
    let two = BigRational::from_integer(BigInt::from(2));
    for _ in 0..REFINE_STEPS {
        step /= &two;
        let mut moved = None;
        for c in [&centre - &step, &centre + &step] {
            let cand = aana_sum(heights, &Theta::rational(c.clone()), n)?;
            if cand.partial_sum < best.partial_sum {
                best = cand;
                moved = Some(c);
            }
        }
        if let Some(c) = moved {
            centre = c;
        }
    }
    Ok(best)
}

/// Evaluates `Φ_N` on `θ = k/grid`, `1 ≤ k < grid`, and refines every grid
/// local minimum below `threshold`.
///
/// `θ = 0` is left out: `λ = 1` is always an eigenvalue.
pub fn eigenvalue_scan(
    heights: &HeightSequence,
    grid_size: u64,
    n: usize,
    threshold: f64,
) -> Result<ScanReport> {
    if grid_size < 2 {
        return Err(Error::Spec("grid size must be at least 2".into()));
    }
    heights.check_len(n)?;
    let g = BigUint::from(grid_size);
    let residues: Vec<u64> = heights.values()[..n]
        .iter()
        .map(|h| (h % &g).to_u64().expect("below grid size"))
        .collect();
    let values: Vec<f64> = (1..grid_size)
        .into_par_iter()
        .map(|k| grid_value(&residues, k, grid_size))
        .collect();
    let at = |k: u64| values[(k - 1) as usize];
    let (mut min_k, mut min_v) = (1, at(1));
    for k in 2..grid_size {
        if at(k) < min_v {
            min_k = k;
            min_v = at(k);
        }
    }
    let local_minima: Vec<u64> = (1..grid_size)
        .filter(|&k| {
            let v = at(k);
            let left = if k > 1 { at(k - 1) } else { f64::INFINITY };
            let right = if k + 1 < grid_size { at(k + 1) } else { f64::INFINITY };
            v < threshold && v < left && v <= right
        })
        .collect();
    let mut candidates = local_minima
        .par_iter()
        .map(|&k| refine(heights, n, k, grid_size))
        .collect::<Result<Vec<_>>>()?;
    candidates.sort_by(|a, b| a.partial_sum.total_cmp(&b.partial_sum));
    Ok(ScanReport {
        grid_size,
        terms: n,
        threshold,
        candidates,
        grid_minimum: aana_sum(heights, &grid_point(min_k, grid_size), n)?,
        refined_minimum: refine(heights, n, min_k, grid_size)?,
    })
}
