//! Exact rational scalar type and its text forms.
//!
//! Probabilities, correlators and LP data are all `Rat`, an
//! arbitrary-precision rational. The canonical text form is `p/q` with the
//! sign on the numerator and the fraction reduced (`3/4`, `-1/2`, `2`);
//! decimal literals such as `0.25` are accepted on input and converted
//! exactly.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rat = num_rational::BigRational;

/// Shorthand for `n/d` used pervasively in tests and constructions.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a decimal literal, exactly.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse("empty rational literal".to_string()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
        let w: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole
                .parse()
                .map_err(|_| Error::parse(format!("bad decimal in {s:?}")))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(format!("bad decimal in {s:?}")));
        }
        let f: BigInt = frac
            .parse()
            .map_err(|_| Error::parse(format!("bad decimal in {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let numer = w.abs() * &scale + f;
        return Ok(Rat::new(numer * BigInt::from(sign), scale));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::parse(format!("bad rational literal {s:?}")))?;
    Ok(Rat::from_integer(n))
}

/// Canonical text form: reduced `p/q`, or just `p` for integers.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders `r` as a decimal with `sig` significant digits (correctly rounded,
/// ties away from zero). Only meant for magnitudes in human scale; very small
/// or large values fall back to zero-padded plain notation.
pub fn decimal_str(r: &Rat, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // e = floor(log10(a)) by exact search.
    let ten = Rat::from_integer(BigInt::from(10u32));
    let mut e: i64 = 0;
    let mut probe = Rat::one();
    if a >= Rat::one() {
        while &probe * &ten <= a {
            probe *= &ten;
            e += 1;
        }
    } else {
        while probe > a {
            probe /= &ten;
            e -= 1;
        }
    }
    // Round a / 10^(e+1-sig) to an integer of sig digits.
    let shift = sig as i64 - 1 - e;
    let scaled = if shift >= 0 {
        a * Rat::from_integer(BigInt::from(10u32).pow(shift as u32))
    } else {
        a / Rat::from_integer(BigInt::from(10u32).pow((-shift) as u32))
    };
    let mut digits = (scaled + rat(1, 2)).floor().to_integer();
    let cap = BigInt::from(10u32).pow(sig as u32);
    let mut e = e;
    if digits >= cap {
        digits /= BigInt::from(10u32);
        e += 1;
    }
    let ds = digits.to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= 0 {
        let ip = e as usize + 1;
        if ip >= ds.len() {
            out.push_str(&ds);
            out.push_str(&"0".repeat(ip - ds.len()));
        } else {
            out.push_str(&ds[..ip]);
            out.push('.');
            out.push_str(&ds[ip..]);
        }
    } else {
        out.push_str("0.");
        out.push_str(&"0".repeat((-e as usize) - 1));
        out.push_str(&ds);
    }
    out
}

pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}

/// Serde adapter: rationals travel as canonical strings; integers are also
/// accepted on input. Floats are rejected so no value is silently rounded.
pub mod rat_serde {
    use super::*;
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rat, D::Error> {
        struct V;
        impl<'de> de::Visitor<'de> for V {
            type Value = Rat;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                write!(f, "a rational as a string like \"3/4\" or \"0.25\", or an integer")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Rat, E> {
                parse_rat(s).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
                Ok(int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
                Ok(Rat::from_integer(BigInt::from(v)))
            }
            fn visit_f64<E: de::Error>(self, _: f64) -> std::result::Result<Rat, E> {
                Err(E::custom(
                    "floating point literal: write the value as a string (\"1/3\", \"0.25\") to keep it exact",
                ))
            }
        }
        de.deserialize_any(V)
    }
}
