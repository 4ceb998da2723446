//! Exact integer and rational arithmetic, deterministic primality, the
//! qualifying-prime search and p-adic valuations.
//!
//! Integers are [`num_bigint::BigInt`] and rationals are
//! [`num_rational::BigRational`]; `BigRational` is always kept in lowest terms
//! with a positive denominator, which is the canonical form every other module
//! relies on.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Signed integer of unbounded magnitude.
pub type ExactInteger = BigInt;

/// Reduced fraction of unbounded magnitude.
pub type ExactRational = BigRational;

/// Miller-Rabin witnesses; deterministic for every n < 3.3 * 10^24.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test.
pub fn is_prime(n: &ExactInteger) -> bool {
    if n.is_negative() {
        return false;
    }
    match n.to_u64() {
        Some(small) => is_prime_u64(small),
        None => is_prime_big(n),
    }
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let (d, s) = odd_part(n - 1);
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn odd_part(mut d: u64) -> (u64, u32) {
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    (d, s)
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_big(n: &BigInt) -> bool {
    for &p in &WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n_minus_one = n - &one;
    let mut d = n_minus_one.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `p > lower_bound` that does not divide `forbidden_lcm`.
pub fn next_qualifying_prime(
    lower_bound: &ExactInteger,
    forbidden_lcm: &ExactInteger,
) -> Result<ExactInteger> {
    if lower_bound < &BigInt::from(2) {
        return Err(Error::invalid(format!(
            "prime search lower bound must be at least 2, got {lower_bound}"
        )));
    }
    if !forbidden_lcm.is_positive() {
        return Err(Error::invalid(format!(
            "forbidden lcm must be positive, got {forbidden_lcm}"
        )));
    }
    let mut candidate = lower_bound + 1u32;
    loop {
        if is_prime(&candidate) && !(forbidden_lcm % &candidate).is_zero() {
            return Ok(candidate);
        }
        candidate += 1u32;
    }
}

/// A p-adic valuation; zero has valuation infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(j) => write!(f, "{j}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// The exponent of `p` in `q`, i.e. `j` with `q = p^j * a/b` and `p` dividing
/// neither `a` nor `b`.
pub fn padic_valuation(p: &ExactInteger, q: &ExactRational) -> Result<Valuation> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    if q.is_zero() {
        return Ok(Valuation::Infinite);
    }
    let count = |mut x: BigInt| {
        let mut j = 0i64;
        while (&x % p).is_zero() {
            x /= p;
            j += 1;
        }
        j
    };
    Ok(Valuation::Finite(
        count(q.numer().abs()) - count(q.denom().clone()),
    ))
}

/// The part of `q` coprime to `p`, so that `q = p^v * unit_part(p, q)`.
pub fn unit_part(p: &ExactInteger, q: &ExactRational) -> Result<ExactRational> {
    match padic_valuation(p, q)? {
        Valuation::Infinite => Ok(BigRational::zero()),
        Valuation::Finite(j) => Ok(q / pow_rational(p, j)),
    }
}

/// `p^j` for a possibly negative exponent.
pub fn pow_rational(p: &ExactInteger, j: i64) -> ExactRational {
    let magnitude = num_traits::pow(p.clone(), j.unsigned_abs() as usize);
    if j >= 0 {
        BigRational::from_integer(magnitude)
    } else {
        BigRational::new(BigInt::one(), magnitude)
    }
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a ExactInteger>) -> ExactInteger {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v))
}

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a ExactInteger>) -> ExactInteger {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// Canonical text form: decimal for integers, `n/d` in lowest terms otherwise.
pub fn format_rational(q: &ExactRational) -> String {
    q.to_string()
}

/// Parses `n` or `n/d`, rejecting anything that is not already canonical so
/// that formatting the result reproduces the input byte for byte.
pub fn parse_rational(text: &str) -> Result<ExactRational> {
    let parsed = match text.split_once('/') {
        Some((n, d)) => {
            let n = parse_integer(n)?;
            let d = parse_integer(d)?;
            if !d.is_positive() {
                return Err(Error::parse(format!("non-positive denominator in {text:?}")));
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(parse_integer(text)?),
    };
    if format_rational(&parsed) != text {
        return Err(Error::parse(format!("rational {text:?} is not in lowest terms")));
    }
    Ok(parsed)
}

pub fn parse_integer(text: &str) -> Result<ExactInteger> {
    let parsed = BigInt::from_str(text)
        .map_err(|_| Error::parse(format!("invalid integer {text:?}")))?;
    if parsed.to_string() != text {
        return Err(Error::parse(format!("integer {text:?} is not canonical")));
    }
    Ok(parsed)
}

/// Serde adapters writing exact numbers as canonical strings.
pub mod serde_str {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub mod integer {
        use super::*;

        pub fn serialize<S: Serializer>(v: &ExactInteger, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactInteger, D::Error> {
            let text = String::deserialize(d)?;
            parse_integer(&text).map_err(D::Error::custom)
        }
    }

    pub mod integers {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[ExactInteger], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ExactInteger>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_integer(t).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod rational {
        use super::*;

        pub fn serialize<S: Serializer>(v: &ExactRational, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.serialize_str(&format_rational(v))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactRational, D::Error> {
            let text = String::deserialize(d)?;
            parse_rational(&text).map_err(D::Error::custom)
        }
    }

    pub mod rationals {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[ExactRational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ExactRational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|t| parse_rational(t).map_err(D::Error::custom))
                .collect()
        }
    }
}
