//! Finitely generated Puiseux monoids, numerical monoids, and the scaling map
//! that turns the former into the latter.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, ExactInteger, ExactRational};
use crate::engine::Engine;
use crate::error::{Error, Result};

/// Submonoid of `(Q>=0, +)` generated by finitely many rationals in `(0, 1)`.
///
/// Generators are reduced, strictly ascending and duplicate-free; every
/// exponent vector in the crate indexes them in this order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PuiseuxMonoid {
    #[serde(rename = "puiseux_generators", with = "arith::serde_str::rationals")]
    generators: Vec<ExactRational>,
}

impl PuiseuxMonoid {
    pub fn new(raw: impl IntoIterator<Item = ExactRational>) -> Result<Self> {
        let mut generators: Vec<ExactRational> = raw.into_iter().collect();
        if generators.is_empty() {
            return Err(Error::invalid("a Puiseux monoid needs at least one generator"));
        }
        if let Some(bad) = generators
            .iter()
            .find(|g| !g.is_positive() || **g >= BigRational::one())
        {
            return Err(Error::invalid(format!(
                "generator {bad} is outside the open interval (0, 1)"
            )));
        }
        generators.sort();
        generators.dedup();
        Ok(PuiseuxMonoid { generators })
    }

    pub fn generators(&self) -> &[ExactRational] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn min_generator(&self) -> &ExactRational {
        &self.generators[0]
    }

    /// Position of `g` in the ascending generator list.
    pub fn index_of(&self, g: &ExactRational) -> Option<usize> {
        self.generators.binary_search(g).ok()
    }

    /// Lcm of the lowest-terms denominators.
    pub fn denominator_lcm(&self) -> ExactInteger {
        arith::lcm_all(self.generators.iter().map(|g| g.denom()))
    }

    /// A monoid with the same generators plus `extra`.
    pub fn with_generators(&self, extra: &[ExactRational]) -> Result<Self> {
        PuiseuxMonoid::new(self.generators.iter().chain(extra).cloned())
    }

    /// Maps the monoid onto an isomorphic numerical monoid: multiply by the
    /// denominator lcm, then divide by the gcd of the resulting integers.
    pub fn scale_to_numerical(&self, engine: &Engine) -> Result<ScalingResult> {
        let atoms = engine.atoms_of(self)?;
        if atoms.len() != self.generators.len() {
            let redundant: Vec<String> = self
                .generators
                .iter()
                .filter(|g| !atoms.contains(g))
                .map(arith::format_rational)
                .collect();
            return Err(Error::NotMinimal(format!(
                "generators {} are sums of other generators",
                redundant.join(", ")
            )));
        }
        let scale = self.denominator_lcm();
        let images: Vec<BigInt> = self
            .generators
            .iter()
            .map(|g| (g * &scale).to_integer())
            .collect();
        let normalization_gcd = arith::gcd_all(&images);
        let generators: Vec<BigInt> = images.into_iter().map(|x| x / &normalization_gcd).collect();
        Ok(ScalingResult {
            monoid: NumericalMonoid {
                generators,
            },
            scale,
            normalization_gcd,
        })
    }
}

impl<'de> Deserialize<'de> for PuiseuxMonoid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(with = "arith::serde_str::rationals")]
            puiseux_generators: Vec<ExactRational>,
        }
        let raw = Raw::deserialize(d)?;
        PuiseuxMonoid::new(raw.puiseux_generators).map_err(serde::de::Error::custom)
    }
}

/// Submonoid of `(N0, +)` with finite complement, given by its minimal
/// generating set in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct NumericalMonoid {
    #[serde(rename = "numerical_generators", with = "arith::serde_str::integers")]
    generators: Vec<ExactInteger>,
}

impl NumericalMonoid {
    /// Builds a numerical monoid from its atoms. Fails if the list is empty,
    /// contains a non-positive entry, has gcd other than 1, or if some entry is
    /// a combination of the others.
    pub fn new(raw: impl IntoIterator<Item = ExactInteger>) -> Result<Self> {
        let generators = Self::checked_sorted(raw)?;
        let engine = Engine::default();
        for (i, g) in generators.iter().enumerate() {
            if engine.is_combination(&generators[..i], g)? {
                return Err(Error::NotMinimal(format!(
                    "{g} is a combination of smaller generators"
                )));
            }
        }
        Ok(NumericalMonoid { generators })
    }

    /// The numerical monoid generated by `raw`, keeping only its atoms.
    pub fn generated_by(raw: impl IntoIterator<Item = ExactInteger>) -> Result<Self> {
        let all = Self::checked_sorted(raw)?;
        let engine = Engine::default();
        let mut generators: Vec<ExactInteger> = Vec::with_capacity(all.len());
        for g in all {
            if !engine.is_combination(&generators, &g)? {
                generators.push(g);
            }
        }
        Ok(NumericalMonoid { generators })
    }

    fn checked_sorted(raw: impl IntoIterator<Item = ExactInteger>) -> Result<Vec<ExactInteger>> {
        let mut generators: Vec<ExactInteger> = raw.into_iter().collect();
        if generators.is_empty() {
            return Err(Error::invalid("a numerical monoid needs at least one generator"));
        }
        if let Some(bad) = generators.iter().find(|g| !g.is_positive()) {
            return Err(Error::invalid(format!("generator {bad} is not positive")));
        }
        generators.sort();
        generators.dedup();
        let gcd = arith::gcd_all(&generators);
        if !gcd.is_one() {
            return Err(Error::invalid(format!(
                "generators have gcd {gcd}, so they do not generate a numerical monoid"
            )));
        }
        Ok(generators)
    }

    pub fn generators(&self) -> &[ExactInteger] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn multiplicity(&self) -> &ExactInteger {
        &self.generators[0]
    }
}

/// A numerical monoid together with the map that produced it from a Puiseux
/// monoid: `g -> scale * g / normalization_gcd`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalingResult {
    #[serde(flatten)]
    pub monoid: NumericalMonoid,
    #[serde(with = "arith::serde_str::integer")]
    pub scale: ExactInteger,
    #[serde(with = "arith::serde_str::integer")]
    pub normalization_gcd: ExactInteger,
}

impl ScalingResult {
    /// Image of a rational under the scaling map, if it is an integer.
    pub fn image(&self, q: &ExactRational) -> Option<ExactInteger> {
        let scaled = q * &self.scale / BigRational::from_integer(self.normalization_gcd.clone());
        scaled.is_integer().then(|| scaled.to_integer())
    }

    /// Image of the rational 1; `None` when the normalization gcd does not
    /// divide the scale.
    pub fn image_of_one(&self) -> Option<ExactInteger> {
        let (q, r) = self.scale.div_rem(&self.normalization_gcd);
        r.is_zero().then_some(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn level_two_three() -> PuiseuxMonoid {
        PuiseuxMonoid::new([rat(3, 7), rat(4, 7), rat(11, 37), rat(38, 111), rat(40, 111)]).unwrap()
    }

    #[test]
    fn make_puiseux_examples() {
        let h = PuiseuxMonoid::new([rat(4, 7), rat(3, 7)]).unwrap();
        assert_eq!(h.generators(), &[rat(3, 7), rat(4, 7)]);
        let h = PuiseuxMonoid::new([rat(33, 111)]).unwrap();
        assert_eq!(h.generators(), &[rat(11, 37)]);
        let h = PuiseuxMonoid::new([rat(1, 2), rat(2, 4)]).unwrap();
        assert_eq!(h.generators(), &[rat(1, 2)]);
    }

    #[test]
    fn make_puiseux_rejects_out_of_range() {
        assert!(PuiseuxMonoid::new([]).is_err());
        assert!(PuiseuxMonoid::new([rat(0, 1)]).is_err());
        assert!(PuiseuxMonoid::new([rat(1, 1)]).is_err());
        assert!(PuiseuxMonoid::new([rat(1, 2), rat(3, 2)]).is_err());
        assert!(PuiseuxMonoid::new([rat(-1, 2)]).is_err());
    }

    #[test]
    fn make_puiseux_is_idempotent() {
        let h = level_two_three();
        assert_eq!(PuiseuxMonoid::new(h.generators().to_vec()).unwrap(), h);
    }

    #[test]
    fn denominator_lcm_examples() {
        assert_eq!(PuiseuxMonoid::new([rat(3, 7), rat(4, 7)]).unwrap().denominator_lcm(), 7.into());
        assert_eq!(level_two_three().denominator_lcm(), 777.into());
        assert_eq!(PuiseuxMonoid::new([rat(1, 2)]).unwrap().denominator_lcm(), 2.into());
    }

    #[test]
    fn scale_examples() {
        let engine = Engine::default();
        let s = PuiseuxMonoid::new([rat(3, 7), rat(4, 7)])
            .unwrap()
            .scale_to_numerical(&engine)
            .unwrap();
        assert_eq!(s.monoid.generators(), ints(&[3, 4]).as_slice());
        assert_eq!(s.scale, 7.into());
        assert_eq!(s.normalization_gcd, 1.into());
        assert_eq!(s.image_of_one(), Some(7.into()));

        let s = PuiseuxMonoid::new([rat(11, 37), rat(38, 111), rat(40, 111)])
            .unwrap()
            .scale_to_numerical(&engine)
            .unwrap();
        assert_eq!(s.monoid.generators(), ints(&[33, 38, 40]).as_slice());
        assert_eq!(s.scale, 111.into());
        assert_eq!(s.normalization_gcd, 1.into());

        let s = level_two_three().scale_to_numerical(&engine).unwrap();
        assert_eq!(s.monoid.generators(), ints(&[231, 266, 280, 333, 444]).as_slice());
        assert_eq!(s.scale, 777.into());
        assert_eq!(s.normalization_gcd, 1.into());
        assert_eq!(s.image_of_one(), Some(777.into()));
        for (g, n) in level_two_three().generators().iter().zip(s.monoid.generators()) {
            assert_eq!(&s.image(g).unwrap(), n);
        }
    }

    #[test]
    fn scale_normalizes_common_factor() {
        let s = PuiseuxMonoid::new([rat(2, 5), rat(3, 5)])
            .unwrap()
            .scale_to_numerical(&Engine::default())
            .unwrap();
        assert_eq!(s.monoid.generators(), ints(&[2, 3]).as_slice());
        assert_eq!(s.scale, 5.into());
        assert_eq!(s.normalization_gcd, 1.into());

        let s = PuiseuxMonoid::new([rat(2, 3), rat(4, 9), rat(8, 9)]);
        // 8/9 = 4/9 + 4/9, so this list is rejected before scaling
        assert!(matches!(
            s.unwrap().scale_to_numerical(&Engine::default()),
            Err(Error::NotMinimal(_))
        ));

        // lcm 9 gives images {4, 6}; gcd 2 leaves {2, 3}
        let s = PuiseuxMonoid::new([rat(4, 9), rat(6, 9)])
            .unwrap()
            .scale_to_numerical(&Engine::default())
            .unwrap();
        assert_eq!(s.scale, 9.into());
        assert_eq!(s.normalization_gcd, 2.into());
        assert_eq!(s.monoid.generators(), ints(&[2, 3]).as_slice());
        assert_eq!(s.image_of_one(), None);
        assert_eq!(s.image(&rat(4, 9)), Some(2.into()));
    }

    #[test]
    fn scale_rejects_non_atomic_list() {
        let h = PuiseuxMonoid::new([rat(1, 4), rat(1, 2)]).unwrap();
        assert!(matches!(h.scale_to_numerical(&Engine::default()), Err(Error::NotMinimal(_))));
    }

    #[test]
    fn numerical_monoid_validation() {
        assert_eq!(NumericalMonoid::new(ints(&[4, 3])).unwrap().generators(), ints(&[3, 4]).as_slice());
        assert!(NumericalMonoid::new(ints(&[2, 4])).is_err());
        assert!(NumericalMonoid::new(ints(&[])).is_err());
        assert!(NumericalMonoid::new(ints(&[0, 1])).is_err());
        assert!(matches!(NumericalMonoid::new(ints(&[2, 3, 5])), Err(Error::NotMinimal(_))));
        let m = NumericalMonoid::generated_by(ints(&[2, 3, 5, 7, 4])).unwrap();
        assert_eq!(m.generators(), ints(&[2, 3]).as_slice());
    }

    #[test]
    fn json_forms() {
        let h = PuiseuxMonoid::new([rat(4, 7), rat(3, 7)]).unwrap();
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(text, r#"{"puiseux_generators":["3/7","4/7"]}"#);
        assert_eq!(serde_json::from_str::<PuiseuxMonoid>(&text).unwrap(), h);
        assert!(serde_json::from_str::<PuiseuxMonoid>(r#"{"puiseux_generators":["3/2"]}"#).is_err());

        let s = h.scale_to_numerical(&Engine::default()).unwrap();
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"numerical_generators":["3","4"],"scale":"7","normalization_gcd":"1"}"#
        );
    }
}
