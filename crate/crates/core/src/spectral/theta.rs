//! Rotation numbers with exact reduction of `θ·h mod 1` for very large `h`.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{decimal_string, format_rational, frac, parse_rational};

/// A point of the circle `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Theta {
    Rational(BigRational),
    /// `(√5 − 1)/2`, the fractional part of the golden ratio.
    GoldenConjugate,
}

const TWO_POW_64: f64 = 18446744073709551616.0;

/// `floor(2^bits · (√5 − 1)/2)`, up to one unit in the last place.
fn golden_fixed(bits: u64) -> BigUint {
    let one = BigUint::one() << bits;
    let root5 = (BigUint::from(5u32) << (2 * bits)).sqrt();
    (root5 - one) >> 1u32
}

impl Theta {
    /// Reduces a rational into `[0, 1)`.
    pub fn rational(r: BigRational) -> Self {
        Theta::Rational(frac(&r))
    }

    pub fn zero() -> Self {
        Theta::Rational(BigRational::zero())
    }

    /// `frac(θ · h)` as a float, with the reduction done in integers.
    pub fn frac_mul(&self, h: &BigUint) -> f64 {
        match self {
            Theta::Rational(r) => {
                let p = r.numer().magnitude();
                let q = r.denom().magnitude();
                let rem = (p * h) % q;
                let scaled = (rem << 64u32) / q;
                scaled.to_f64().unwrap_or(0.0) / TWO_POW_64
            }
            Theta::GoldenConjugate => {
                let bits = h.bits() + 64;
                let t = golden_fixed(bits);
                let mask = (BigUint::one() << bits) - 1u32;
                let rem = (t * h) & mask;
                let top = rem >> (bits - 64);
                top.to_f64().unwrap_or(0.0) / TWO_POW_64
            }
        }
    }

    /// Rational approximation (exact for `Rational`).
    pub fn approx(&self, bits: u64) -> BigRational {
        match self {
            Theta::Rational(r) => r.clone(),
            Theta::GoldenConjugate => BigRational::new(
                BigInt::from(golden_fixed(bits)),
                BigInt::from(BigUint::one() << bits),
            ),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.frac_mul(&BigUint::one())
    }

    /// Decimal expansion with 30 significant digits.
    pub fn decimal(&self) -> String {
        decimal_string(&self.approx(160), 30)
    }

    /// `"p/q"` or `"golden"`.
    pub fn exact(&self) -> String {
        match self {
            Theta::Rational(r) => format_rational(r),
            Theta::GoldenConjugate => "golden".to_string(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Theta::Rational(r) if r.is_zero())
    }
}

impl FromStr for Theta {
    type Err = Error;

    /// Accepts `"p/q"`, a decimal, or `"golden"`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("golden") {
            return Ok(Theta::GoldenConjugate);
        }
        let r = parse_rational(t)?;
        if r.is_negative() {
            return Err(Error::Parse(format!("theta {s:?} must be nonnegative")));
        }
        Ok(Theta::rational(r))
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.exact())
    }
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.exact())
    }
}

/// `4 sin²(π f) = |e^{2πif} − 1|²`.
pub fn squared_chord(f: f64) -> f64 {
    let s = (std::f64::consts::PI * f.min(1.0 - f)).sin();
    4.0 * s * s
}

/// `|e^{2πif} − 1|`.
pub fn chord(f: f64) -> f64 {
    2.0 * (std::f64::consts::PI * f.min(1.0 - f)).sin().abs()
}

/// `k/g` reduced, as a circle point.
pub fn grid_point(k: u64, g: u64) -> Theta {
    let d = k.gcd(&g);
    Theta::Rational(BigRational::new(
        BigInt::from(k / d),
        BigInt::from(g / d),
    ))
}
