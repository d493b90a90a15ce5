//! Exact rational helpers: `"p/q"` text form, decimal rendering, and
//! factorisation of a rational over a set of rational bases.

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.125"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {text:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {text:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac.is_empty())
        {
            return Err(Error::Parse(format!("bad decimal {text:?}")));
        }
        let digits = format!("{int_digits}{frac}");
        let mut numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| Error::Parse(format!("bad decimal {text:?}")))?
        };
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(BigRational::new(numer, denom));
    }
    let p: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {text:?}")))?;
    Ok(BigRational::from_integer(p))
}

/// Renders a rational as `"p/q"` in lowest terms; integers keep the `/1`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal expansion truncated to `sig` significant digits, plain notation.
pub fn decimal_string(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sig = sig.max(1);
    let negative = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().clone();
    // Find the decimal exponent e with 10^e <= |r| < 10^(e+1).
    let ten = BigInt::from(10u32);
    let mut e: i64 = n.to_string().len() as i64 - d.to_string().len() as i64;
    let pow10 = |k: i64| num_traits::pow(ten.clone(), k.unsigned_abs() as usize);
    loop {
        let (lo_n, lo_d) = if e >= 0 {
            (n.clone(), &d * pow10(e))
        } else {
            (&n * pow10(e), d.clone())
        };
        if lo_n < lo_d {
            e -= 1;
            continue;
        }
        if lo_n >= &lo_d * &ten {
            e += 1;
            continue;
        }
        break;
    }
    // digits = floor(|r| * 10^(sig-1-e))
    let shift = sig as i64 - 1 - e;
    let digits = if shift >= 0 {
        (&n * pow10(shift)) / &d
    } else {
        n.clone() / (&d * pow10(shift))
    };
    let mut digits = digits.to_string();
    debug_assert_eq!(digits.len(), sig);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if e < 0 {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        let int_len = (e + 1) as usize;
        if int_len >= digits.len() {
            for _ in digits.len()..int_len {
                digits.push('0');
            }
            out.push_str(&digits);
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

/// Exact conversion of a finite `f64` to a rational.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite value {x}")))
}

const TRIAL_LIMIT: u64 = 1 << 20;

fn atoms_of(n: &BigUint, out: &mut Vec<BigUint>) {
    let mut n = n.clone();
    let mut p = 2u64;
    while p < TRIAL_LIMIT && BigUint::from(p * p) <= n {
        let bp = BigUint::from(p);
        if (&n % &bp).is_zero() {
            out.push(bp.clone());
            while (&n % &bp).is_zero() {
                n /= &bp;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() {
        out.push(n);
    }
}

fn valuation(n: &BigUint, atom: &BigUint) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && (&n % atom).is_zero() {
        n /= atom;
        v += 1;
    }
    v
}

fn signed_valuation(r: &BigRational, atom: &BigUint) -> i64 {
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    valuation(num, atom) - valuation(den, atom)
}

fn atoms_for(values: &[&BigRational]) -> Vec<BigUint> {
    let mut atoms = Vec::new();
    for v in values {
        atoms_of(v.numer().magnitude(), &mut atoms);
        atoms_of(v.denom().magnitude(), &mut atoms);
    }
    atoms.sort();
    atoms.dedup();
    atoms
}

/// Row-reduces `m` (rows x cols) in place and returns the pivot columns.
fn row_reduce(m: &mut [Vec<BigRational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// True when no nontrivial integer relation `prod b_i^{e_i} = 1` exists.
///
/// For two bases in (0,1) this is exactly "log(b1)/log(b2) is irrational".
pub fn multiplicatively_independent(bases: &[BigRational]) -> bool {
    if bases.iter().any(|b| !b.is_positive() || b.is_one()) {
        return false;
    }
    let refs: Vec<&BigRational> = bases.iter().collect();
    let atoms = atoms_for(&refs);
    let mut m: Vec<Vec<BigRational>> = atoms
        .iter()
        .map(|a| {
            bases
                .iter()
                .map(|b| BigRational::from_integer(signed_valuation(b, a).into()))
                .collect()
        })
        .collect();
    row_reduce(&mut m, bases.len()).len() == bases.len()
}

/// Writes `value = prod bases[i]^e[i]` with integer exponents, when possible.
///
/// Returns `None` when no such integer factorisation exists or the bases are
/// multiplicatively dependent. Every returned factorisation is verified exactly.
pub fn factor_over(value: &BigRational, bases: &[BigRational]) -> Option<Vec<i64>> {
    if !value.is_positive() {
        return None;
    }
    if bases.is_empty() {
        return value.is_one().then(Vec::new);
    }
    let mut refs: Vec<&BigRational> = bases.iter().collect();
    refs.push(value);
    let atoms = atoms_for(&refs);
    let cols = bases.len();
    let mut m: Vec<Vec<BigRational>> = atoms
        .iter()
        .map(|a| {
            let mut row: Vec<BigRational> = bases
                .iter()
                .map(|b| BigRational::from_integer(signed_valuation(b, a).into()))
                .collect();
            row.push(BigRational::from_integer(signed_valuation(value, a).into()));
            row
        })
        .collect();
    if m.is_empty() {
        // value and all bases are 1
        return None;
    }
    let pivots = row_reduce(&mut m, cols);
    if pivots.len() != cols {
        return None;
    }
    // Inconsistent rows: zero coefficients with nonzero rhs.
    for row in m.iter().skip(cols) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut exps = vec![0i64; cols];
    for (r, &c) in pivots.iter().enumerate() {
        let x = &m[r][cols];
        if !x.is_integer() {
            return None;
        }
        exps[c] = x.to_integer().to_i64()?;
    }
    let mut prod = BigRational::one();
    for (b, &e) in bases.iter().zip(&exps) {
        prod *= b.pow(i32::try_from(e).ok()?);
    }
    (prod == *value).then_some(exps)
}

/// `floor(r)` as a `BigInt`.
pub fn floor(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &BigRational) -> BigRational {
    r - BigRational::from_integer(floor(r))
}

/// Converts a rational in `[0, 1)` to `f64` with 64 bits of exact precision
/// before the final rounding.
pub fn unit_to_f64(r: &BigRational) -> f64 {
    let scaled = (r.numer() << 64usize) / r.denom();
    let (sign, mag) = scaled.into_parts();
    let v = mag.to_f64().unwrap_or(f64::INFINITY) / 18446744073709551616.0;
    if sign == Sign::Minus {
        -v
    } else {
        v
    }
}

/// `serde(with)` adapter: rational as `"p/q"`.
pub mod serde_rat {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// `serde(with)` adapter: list of rationals as `"p/q"` strings.
pub mod serde_rat_vec {
    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}
