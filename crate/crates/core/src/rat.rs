//! Exact rational helpers.
//!
//! Every number the engine reasons about is a [`Rat`], an arbitrary
//! precision rational kept in lowest terms with a positive denominator.
//! Square roots only appear through [`sqrt_enclosure`], which brackets
//! the true value between two dyadic rationals.

use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

/// Always `p/q`, including `q = 1`.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Round-to-nearest double; used only for plotting columns.
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

/// Fractional part in `[0, 1)`.
pub fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

pub fn is_nonneg(r: &Rat) -> bool {
    r.numer().sign() != Sign::Minus
}

/// Closed rational interval known to contain some exact quantity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "rat_str")]
    pub lo: Rat,
    #[serde(with = "rat_str")]
    pub hi: Rat,
}

impl Enclosure {
    pub fn exact(x: Rat) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    /// Valid for nonnegative enclosures.
    pub fn sqrt(&self, bits: u32) -> Enclosure {
        Enclosure::new(sqrt_enclosure(&self.lo, bits).lo, sqrt_enclosure(&self.hi, bits).hi)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", fmt_rat(&self.lo), fmt_rat(&self.hi))
    }
}

/// Encloses `sqrt(x)` for `x >= 0` with width at most `2^-bits`.
///
/// Perfect squares come back as a degenerate enclosure.
pub fn sqrt_enclosure(x: &Rat, bits: u32) -> Enclosure {
    assert!(is_nonneg(x), "sqrt of a negative rational");
    let (p, q) = (x.numer(), x.denom());
    let (sp, sq) = (p.sqrt(), q.sqrt());
    if &(&sp * &sp) == p && &(&sq * &sq) == q {
        return Enclosure::exact(Rat::new(sp, sq));
    }
    // sqrt(p/q) = sqrt(p q 4^bits) / (q 2^bits)
    let scale = pow2(bits);
    let radicand = p * q * &scale * &scale;
    let root = radicand.sqrt();
    let den = q * &scale;
    Enclosure::new(Rat::new(root.clone(), den.clone()), Rat::new(root + 1, den))
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

pub mod rat_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(fmt_rat).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
