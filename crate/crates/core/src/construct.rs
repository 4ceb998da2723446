//! Recursive construction of a monoid in which 1 has a prescribed length
//! profile, and its transfer to a numerical monoid.
//!
//! Each level `k` contributes `k` new atoms `(p + c_i) / (k p)` summing to 1,
//! where `c` is a coefficient vector with zero sum and `p` is a prime above
//! `(k + 1) k^(k - 1)` that divides none of the denominators already present.
//! Every level adds exactly one factorization of 1, of length `k`, and leaves
//! the factorizations of elements below 1 unchanged.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, ExactInteger, ExactRational};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::monoid::{NumericalMonoid, PuiseuxMonoid, ScalingResult};

/// Largest level accepted unless overridden.
pub const DEFAULT_MAX_LEVEL: u64 = 12;

/// `c_i = k^(i-1)` for `i < k`, and `c_k` makes the sum zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    pub k: u64,
    pub coefficients: Vec<ExactInteger>,
}

pub fn coefficients(k: u64) -> Result<CoefficientVector> {
    if k < 2 {
        return Err(Error::invalid(format!("level must be at least 2, got {k}")));
    }
    let base = BigInt::from(k);
    let mut coefficients: Vec<BigInt> = Vec::with_capacity(k as usize);
    let mut power = BigInt::one();
    for _ in 1..k {
        coefficients.push(power.clone());
        power *= &base;
    }
    let last = -coefficients.iter().sum::<BigInt>();
    coefficients.push(last);
    Ok(CoefficientVector { k, coefficients })
}

/// `(k + 1) k^(k - 1)`, the bound every level prime must exceed.
pub fn level_bound(k: u64) -> ExactInteger {
    BigInt::from(k + 1) * num_traits::pow(BigInt::from(k), (k - 1) as usize)
}

/// The `k` atoms `(p + c_i) / (k p)`, in coefficient order.
pub fn level_atoms(k: u64, p: &ExactInteger) -> Result<Vec<ExactRational>> {
    let c = coefficients(k)?;
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let bound = level_bound(k);
    if p <= &bound {
        return Err(Error::invalid(format!(
            "prime {p} does not exceed the level-{k} bound {bound}"
        )));
    }
    let denominator = BigInt::from(k) * p;
    Ok(c.coefficients
        .iter()
        .map(|ci| BigRational::new(p + ci, denominator.clone()))
        .collect())
}

/// One level of the construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStep {
    pub k: u64,
    #[serde(with = "arith::serde_str::integer")]
    pub prime: ExactInteger,
    #[serde(with = "arith::serde_str::integers")]
    pub coefficients: Vec<ExactInteger>,
    #[serde(with = "arith::serde_str::rationals")]
    pub atoms: Vec<ExactRational>,
}

impl LevelStep {
    fn build(k: u64, forbidden_lcm: &ExactInteger) -> Result<Self> {
        let prime = arith::next_qualifying_prime(&level_bound(k), forbidden_lcm)?;
        let atoms = level_atoms(k, &prime)?;
        Ok(LevelStep {
            k,
            prime,
            coefficients: coefficients(k)?.coefficients,
            atoms,
        })
    }

    pub fn coefficient_vector(&self) -> CoefficientVector {
        CoefficientVector {
            k: self.k,
            coefficients: self.coefficients.clone(),
        }
    }
}

/// First level: the monoid generated by the level atoms alone.
pub fn base_monoid(k: u64) -> Result<(LevelStep, PuiseuxMonoid)> {
    let step = LevelStep::build(k, &BigInt::one())?;
    let h = PuiseuxMonoid::new(step.atoms.iter().cloned())?;
    Ok((step, h))
}

/// Adds one level to `h`, choosing a prime that avoids every denominator of
/// `h` so the new atoms are disjoint from the old ones.
pub fn extend(h: &PuiseuxMonoid, k: u64) -> Result<(LevelStep, PuiseuxMonoid)> {
    let step = LevelStep::build(k, &h.denominator_lcm())?;
    let extended = h.with_generators(&step.atoms)?;
    if extended.len() != h.len() + step.atoms.len() {
        return Err(Error::invalid(format!(
            "level {k} atoms with prime {} collide with existing generators",
            step.prime
        )));
    }
    Ok((step, extended))
}

/// Complete record of one realization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationTrace {
    pub lengths: BTreeSet<u64>,
    pub counts: BTreeMap<u64, u64>,
    pub steps: Vec<LevelStep>,
    #[serde(with = "arith::serde_str::rationals")]
    pub puiseux_generators: Vec<ExactRational>,
    #[serde(with = "arith::serde_str::integer")]
    pub scale: ExactInteger,
    #[serde(with = "arith::serde_str::integer")]
    pub normalization_gcd: ExactInteger,
    #[serde(with = "arith::serde_str::integers")]
    pub numerical_generators: Vec<ExactInteger>,
    #[serde(with = "arith::serde_str::integer")]
    pub target: ExactInteger,
}

impl RealizationTrace {
    /// Canonical single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn puiseux(&self) -> Result<PuiseuxMonoid> {
        PuiseuxMonoid::new(self.puiseux_generators.iter().cloned())
    }

    pub fn numerical(&self) -> Result<NumericalMonoid> {
        NumericalMonoid::new(self.numerical_generators.iter().cloned())
    }

    /// Largest level used, which bounds the length of any factorization of 1.
    pub fn max_level(&self) -> Option<u64> {
        self.steps.iter().map(|s| s.k).max()
    }

    pub fn primes(&self) -> Vec<ExactInteger> {
        self.steps.iter().map(|s| s.prime.clone()).collect()
    }
}

/// Drives the construction under a level ceiling.
#[derive(Debug, Clone, Copy)]
pub struct Realizer {
    pub engine: Engine,
    pub max_level: u64,
}

impl Default for Realizer {
    fn default() -> Self {
        Realizer {
            engine: Engine::default(),
            max_level: DEFAULT_MAX_LEVEL,
        }
    }
}

impl Realizer {
    pub fn new(engine: Engine, max_level: u64) -> Self {
        Realizer { engine, max_level }
    }

    /// Builds a numerical monoid and element whose set of lengths is
    /// `lengths` with `counts[k]` factorizations of each length `k`.
    pub fn realize(&self, lengths: &BTreeSet<u64>, counts: &BTreeMap<u64, u64>) -> Result<RealizationTrace> {
        if lengths.is_empty() {
            return Err(Error::invalid("length set must be nonempty"));
        }
        if lengths.iter().any(|&k| k < 2) {
            return Err(Error::invalid("lengths must be ≥ 2"));
        }
        if let Some(k) = lengths.iter().find(|&&k| k > self.max_level) {
            return Err(Error::invalid(format!(
                "length {k} exceeds the maximum level {}",
                self.max_level
            )));
        }
        if !counts.keys().eq(lengths.iter()) {
            return Err(Error::invalid("counts must be given for exactly the requested lengths"));
        }
        if counts.values().any(|&c| c == 0) {
            return Err(Error::invalid("counts must be ≥ 1"));
        }

        let mut levels = counts
            .iter()
            .flat_map(|(&k, &n)| std::iter::repeat_n(k, n as usize));
        let first = levels.next().expect("nonempty length set");
        let (step, mut h) = base_monoid(first)?;
        let mut steps = vec![step];
        for k in levels {
            let (step, next) = extend(&h, k)?;
            steps.push(step);
            h = next;
        }

        let scaling = h.scale_to_numerical(&self.engine)?;
        let target = scaling
            .image_of_one()
            .ok_or_else(|| Error::invalid("scaled monoid does not contain the image of 1"))?;
        let ScalingResult {
            monoid,
            scale,
            normalization_gcd,
        } = scaling;
        Ok(RealizationTrace {
            lengths: lengths.clone(),
            counts: counts.clone(),
            steps,
            puiseux_generators: h.generators().to_vec(),
            scale,
            normalization_gcd,
            numerical_generators: monoid.generators().to_vec(),
            target,
        })
    }

    /// Realizes `{2, 2 + d_1, 2 + d_1 + d_2, ...}` with one factorization per
    /// length, so that the delta set of the target's lengths is `distances`.
    pub fn realize_delta_superset(&self, distances: &BTreeSet<u64>) -> Result<RealizationTrace> {
        let lengths = delta_lengths(distances)?;
        let counts = lengths.iter().map(|&k| (k, 1)).collect();
        self.realize(&lengths, &counts)
    }
}

/// Partial sums `2, 2 + d_1, ...` over the ascending distances.
pub fn delta_lengths(distances: &BTreeSet<u64>) -> Result<BTreeSet<u64>> {
    if distances.is_empty() {
        return Err(Error::invalid("distance set must be nonempty"));
    }
    if distances.contains(&0) {
        return Err(Error::invalid("distances must be positive"));
    }
    let mut lengths = BTreeSet::from([2u64]);
    let mut current = 2u64;
    for &d in distances {
        current = current
            .checked_add(d)
            .ok_or_else(|| Error::invalid("distances overflow"))?;
        lengths.insert(current);
    }
    Ok(lengths)
}

pub fn realize(lengths: &BTreeSet<u64>, counts: &BTreeMap<u64, u64>) -> Result<RealizationTrace> {
    Realizer::default().realize(lengths, counts)
}

pub fn realize_delta_superset(distances: &BTreeSet<u64>) -> Result<RealizationTrace> {
    Realizer::default().realize_delta_superset(distances)
}

/// Sum of a slice of rationals.
pub(crate) fn rational_sum(values: &[ExactRational]) -> ExactRational {
    values.iter().fold(BigRational::zero(), |acc, q| acc + q)
}
