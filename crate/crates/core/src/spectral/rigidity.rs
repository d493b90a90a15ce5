use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spectral::heights::HeightSequence;
use crate::spectral::theta::{chord, Theta};

/// `Σ_{i ≤ N} d(S^{q_i} y, y)^p` for the rotation by `θ`, `d` the chord distance.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidityReport {
    pub theta: Theta,
    pub exponent: u32,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// Sum of the last quarter of the terms.
    pub last_quartile: f64,
    /// `last_quartile` fell below the caller's tolerance.
    pub converged_looking: bool,
}

impl RigidityReport {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

impl Serialize for RigidityReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>();
        let mut st = s.serialize_struct("RigidityReport", 7)?;
        st.serialize_field("theta", &self.theta.decimal())?;
        st.serialize_field("theta_exact", &self.theta.exact())?;
        st.serialize_field("exponent", &self.exponent)?;
        st.serialize_field("terms", &strings(&self.terms))?;
        st.serialize_field("partial_sums", &strings(&self.partial_sums))?;
        st.serialize_field("last_quartile", &self.last_quartile.to_string())?;
        st.serialize_field("converged_looking", &self.converged_looking)?;
        st.end()
    }
}

pub fn rigidity_sum(
    q: &HeightSequence,
    theta: &Theta,
    n: usize,
    exponent: u32,
    tolerance: f64,
) -> Result<RigidityReport> {
    if !matches!(exponent, 1 | 2) {
        return Err(Error::Spec(format!("exponent must be 1 or 2, got {exponent}")));
    }
    q.check_len(n)?;
    let terms: Vec<f64> = q.values()[..n]
        .iter()
        .map(|v| chord(theta.frac_mul(v)).powi(exponent as i32))
        .collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let last_quartile: f64 = terms[n - n / 4..].iter().sum();
    Ok(RigidityReport {
        theta: theta.clone(),
        exponent,
        terms,
        partial_sums,
        last_quartile,
        converged_looking: last_quartile < tolerance,
    })
}
