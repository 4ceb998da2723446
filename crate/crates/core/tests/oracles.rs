//! Cross-checks between the engine and the independent oracles.

use std::collections::{BTreeMap, BTreeSet};

use lengthforge::construct::{self, coefficients, level_bound};
use lengthforge::engine::{evaluate_integer, SquarefreeMode};
use lengthforge::verify::{check_prefix_stability, oracle_factorizations, oracle_squarefree, trichotomy_check, verify_realization};
use lengthforge::{Engine, NumericalMonoid};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn monoid() -> impl Strategy<Value = NumericalMonoid> {
    prop::collection::vec(2u32..=25, 1..=4)
        .prop_filter_map("gcd 1", |v| NumericalMonoid::generated_by(v.into_iter().map(BigInt::from)).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_matches_nested_loops(m in monoid(), a in 0u32..=250) {
        let a = BigInt::from(a);
        let e = Engine::default();
        let z = e.factorizations(&m, &a).unwrap();
        prop_assert_eq!(&z, &oracle_factorizations(&m, &a).unwrap());
        prop_assert_eq!(e.member_q(&m, &a).unwrap(), !z.is_empty());
        for v in &z.vectors {
            prop_assert_eq!(evaluate_integer(m.generators(), v), a.clone());
        }
    }

    #[test]
    fn squarefree_routes_agree(m in monoid(), a in 0u32..=120) {
        let a = BigInt::from(a);
        let e = Engine::default();
        for mode in [SquarefreeMode::PaperLiteral, SquarefreeMode::Strong] {
            prop_assert_eq!(
                e.squarefree_q(&m, &a, mode).unwrap(),
                oracle_squarefree(&e, &m, &a, mode).unwrap()
            );
        }
    }
}

#[test]
fn trichotomy_holds_with_smallest_primes() {
    for k in 2..=6u64 {
        let p = lengthforge::arith::next_qualifying_prime(&level_bound(k), &BigInt::from(1)).unwrap();
        assert!(trichotomy_check(k, &coefficients(k).unwrap(), &p).unwrap(), "k = {k}");
    }
}

#[test]
fn scaling_preserves_factorizations_of_atoms_and_sums() {
    // every element u of H below 2 that is a sum of at most two atoms has the
    // same exponent vectors as its image in the numerical monoid
    let e = Engine::default();
    let t = construct::realize(&BTreeSet::from([2, 3]), &BTreeMap::from([(2, 2), (3, 1)])).unwrap();
    let h = t.puiseux().unwrap();
    let m = t.numerical().unwrap();
    let scaling = h.scale_to_numerical(&e).unwrap();
    let g = h.generators();
    let mut samples: Vec<BigRational> = g.to_vec();
    for (i, a) in g.iter().enumerate() {
        for b in &g[i..] {
            samples.push(a + b);
        }
    }
    samples.push(BigRational::from_integer(1.into()));
    let bound = 2 * t.max_level().unwrap() + 2;
    for u in samples {
        let rational = e.factorizations_rational(&h, &u, bound).unwrap();
        let integer = e.factorizations(&m, &scaling.image(&u).unwrap()).unwrap();
        assert_eq!(rational.vectors, integer.vectors, "u = {u}");
    }
}

#[test]
fn prefix_stability_on_grid_samples() {
    let e = Engine::default();
    for pairs in [&[(2u64, 2u64)][..], &[(3, 1), (4, 1)], &[(2, 1), (5, 1)]] {
        let t = construct::realize(
            &pairs.iter().map(|p| p.0).collect(),
            &pairs.iter().copied().collect(),
        )
        .unwrap();
        assert!(check_prefix_stability(&e, &t).unwrap(), "{pairs:?}");
    }
}

#[test]
fn every_single_field_mutation_fails() {
    let e = Engine::default();
    let base = construct::realize(&BTreeSet::from([2, 3]), &BTreeMap::from([(2, 1), (3, 1)])).unwrap();
    assert!(verify_realization(&e, &base).passed);
    let odd = BigRational::new(5.into(), 13.into());

    for i in 0..base.puiseux_generators.len() {
        let mut t = base.clone();
        t.puiseux_generators[i] = odd.clone();
        assert!(!verify_realization(&e, &t).passed, "generator {i}");
        let mut t = base.clone();
        t.puiseux_generators.remove(i);
        assert!(!verify_realization(&e, &t).passed, "drop generator {i}");
    }
    for i in 0..base.numerical_generators.len() {
        let mut t = base.clone();
        t.numerical_generators[i] += 1;
        assert!(!verify_realization(&e, &t).passed, "numerical {i}");
    }
    for (s, step) in base.steps.iter().enumerate() {
        for i in 0..step.atoms.len() {
            let mut t = base.clone();
            t.steps[s].atoms[i] = odd.clone();
            assert!(!verify_realization(&e, &t).passed, "step {s} atom {i}");
        }
        let mut t = base.clone();
        t.steps[s].prime += 2;
        assert!(!verify_realization(&e, &t).passed, "step {s} prime");
    }
    for k in [2u64, 3] {
        let mut t = base.clone();
        t.counts.insert(k, 2);
        assert!(!verify_realization(&e, &t).passed, "count {k}");
    }
    let mut t = base.clone();
    t.lengths.insert(4);
    assert!(!verify_realization(&e, &t).passed, "lengths");
    let mut t = base.clone();
    t.scale += 1;
    assert!(!verify_realization(&e, &t).passed, "scale");
    let mut t = base.clone();
    t.target += 1;
    assert!(!verify_realization(&e, &t).passed, "target");
    let mut t = base.clone();
    t.steps.pop();
    assert!(!verify_realization(&e, &t).passed, "drop step");
}
