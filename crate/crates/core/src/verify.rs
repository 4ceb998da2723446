//! Independent oracles and the end-to-end certificate for a realization.
//!
//! Nothing here trusts the trace: every claim it makes is recomputed from the
//! generator lists, and the integer-level check re-enumerates from scratch in
//! the scaled numerical monoid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{self, ExactInteger, ExactRational};
use crate::construct::{self, RealizationTrace};
use crate::engine::{
    self, Engine, ExponentVector, FactorizationSet, LengthProfile, SquarefreeMode,
};
use crate::error::{Error, Result};
use crate::monoid::{NumericalMonoid, PuiseuxMonoid};

/// Iteration cap for the nested-loop oracle.
pub const ORACLE_LIMIT: u128 = 1_000_000_000;

/// Checks the mod-`p` trichotomy for every `l` with `sum(l) <= k`: whenever
/// `sum(l_i c_i) = 0 (mod p)`, `l` is all zeros or all ones. Vectors with
/// `sum(l) > k` satisfy the statement outright, so this enumeration is the
/// whole check.
///
/// The size bound on `p` is deliberately not enforced, so that a too-small
/// prime can be shown to fail.
pub fn trichotomy_check(k: u64, c: &construct::CoefficientVector, p: &ExactInteger) -> Result<bool> {
    if k < 2 {
        return Err(Error::invalid(format!("level must be at least 2, got {k}")));
    }
    if c.coefficients.len() as u64 != k {
        return Err(Error::invalid(format!(
            "expected {k} coefficients, got {}",
            c.coefficients.len()
        )));
    }
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let residues: Vec<BigInt> = c.coefficients.iter().map(|ci| ci.mod_floor(p)).collect();
    let mut l = vec![0u64; k as usize];
    Ok(trichotomy_walk(&residues, p, 0, k, &BigInt::zero(), &mut l))
}

fn trichotomy_walk(
    residues: &[BigInt],
    p: &BigInt,
    index: usize,
    remaining: u64,
    acc: &BigInt,
    l: &mut Vec<u64>,
) -> bool {
    if index == residues.len() {
        let vanishes = (acc % p).is_zero();
        let trivial = l.iter().all(|&x| x == 0) || l.iter().all(|&x| x == 1);
        return !vanishes || trivial;
    }
    for x in 0..=remaining {
        l[index] = x;
        let next = acc + &residues[index] * x;
        if !trichotomy_walk(residues, p, index + 1, remaining - x, &next, l) {
            return false;
        }
    }
    l[index] = 0;
    true
}

/// Plain nested loops over every exponent vector with `l_i <= a / g_i`.
pub fn oracle_factorizations(m: &NumericalMonoid, a: &ExactInteger) -> Result<FactorizationSet<ExactInteger>> {
    if a.is_negative() {
        return Err(Error::invalid(format!("{a} is negative")));
    }
    let target = a
        .to_u64()
        .ok_or_else(|| Error::budget("oracle target", a, u64::MAX))?;
    let gens: Vec<u64> = m
        .generators()
        .iter()
        .map(|g| g.to_u64().ok_or_else(|| Error::budget("oracle generator", g, u64::MAX)))
        .collect::<Result<_>>()?;
    let ranges: Vec<u64> = gens.iter().map(|g| target / g).collect();
    ranges
        .iter()
        .try_fold(1u128, |acc, r| acc.checked_mul(*r as u128 + 1))
        .filter(|&w| w <= ORACLE_LIMIT)
        .ok_or_else(|| Error::budget("oracle iterations", "more than the limit", ORACLE_LIMIT as u64))?;

    let mut vectors = Vec::new();
    let mut l = vec![0u64; gens.len()];
    'odometer: loop {
        let sum: u128 = l.iter().zip(&gens).map(|(&e, &g)| e as u128 * g as u128).sum();
        if sum == target as u128 {
            vectors.push(ExponentVector(l.clone()));
        }
        for i in (0..l.len()).rev() {
            if l[i] < ranges[i] {
                l[i] += 1;
                continue 'odometer;
            }
            l[i] = 0;
        }
        break;
    }
    vectors.sort();
    Ok(FactorizationSet {
        target: a.clone(),
        vectors,
    })
}

/// Direct squarefree test: scan `b` over members in `(0, a/2]` and test
/// whether `a - 2b` is a member (nonzero in paper-literal mode).
pub fn oracle_squarefree(
    engine: &Engine,
    m: &NumericalMonoid,
    a: &ExactInteger,
    mode: SquarefreeMode,
) -> Result<bool> {
    let limit = a
        .to_u64()
        .filter(|&v| v <= engine.budget())
        .ok_or_else(|| Error::budget("squarefree scan", a, engine.budget()))? as usize;
    let mut member = vec![false; limit + 1];
    member[0] = true;
    for x in 1..=limit {
        member[x] = m.generators().iter().any(|g| {
            g.to_usize().is_some_and(|g| g <= x && member[x - g])
        });
    }
    for b in 1..=limit / 2 {
        if !member[b] {
            continue;
        }
        let c = limit - 2 * b;
        let allowed = match mode {
            SquarefreeMode::PaperLiteral => c != 0,
            SquarefreeMode::Strong => true,
        };
        if allowed && member[c] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome and diagnostic of one named check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckDetail {
    pub check: &'static str,
    pub passed: bool,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub lengths_ok: bool,
    pub counts_ok: bool,
    pub squarefree_paper_literal: bool,
    pub squarefree_strong: bool,
    pub atoms_ok: bool,
    pub step_bijection_ok: bool,
    pub scaling_consistency_ok: bool,
    pub details: Vec<CheckDetail>,
}

impl VerificationReport {
    fn finish(mut self) -> Self {
        self.passed = self.lengths_ok
            && self.counts_ok
            && self.squarefree_paper_literal
            && self.atoms_ok
            && self.step_bijection_ok
            && self.scaling_consistency_ok;
        self
    }

    fn record(&mut self, check: &'static str, passed: bool, message: impl Into<String>) -> bool {
        self.details.push(CheckDetail {
            check,
            passed,
            message: message.into(),
        });
        passed
    }

    /// Names of the failed checks, in report order.
    pub fn failures(&self) -> Vec<&'static str> {
        self.details.iter().filter(|d| !d.passed).map(|d| d.check).collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.details {
            writeln!(f, "[{}] {}: {}", if d.passed { "ok" } else { "FAIL" }, d.check, d.message)?;
        }
        write!(f, "{}", if self.passed { "verified" } else { "verification failed" })
    }
}

/// Re-derives every claim of `trace` by exhaustive enumeration.
pub fn verify_realization(engine: &Engine, trace: &RealizationTrace) -> VerificationReport {
    let mut report = VerificationReport::default();

    let puiseux = match trace.puiseux() {
        Ok(h) if h.generators() == trace.puiseux_generators.as_slice() => Some(h),
        Ok(_) => {
            report.record("puiseux", false, "generator list is not strictly ascending");
            None
        }
        Err(e) => {
            report.record("puiseux", false, format!("invalid generator list: {e}"));
            None
        }
    };

    // (1) rational-level enumeration of Z(1)
    let bound = trace
        .max_level()
        .or_else(|| trace.lengths.iter().max().copied())
        .unwrap_or(1);
    let rational = puiseux
        .as_ref()
        .map(|h| engine.factorizations_of_one(h, bound));
    let rational = match rational {
        Some(Ok(z)) => Some(z),
        Some(Err(e)) => {
            report.record("enumerate_one", false, e.to_string());
            None
        }
        None => None,
    };
    let profile = rational.as_ref().map(|z| z.length_profile());
    report.lengths_ok = check_lengths(&mut report, trace, profile.as_ref());
    report.counts_ok = check_counts(&mut report, trace, profile.as_ref());

    // (2) each factorization of 1 is exactly one step's atoms
    report.step_bijection_ok = check_steps(&mut report, trace, puiseux.as_ref(), rational.as_ref());

    // (3) every generator is an atom
    report.atoms_ok = match &puiseux {
        Some(h) => match engine.atoms_of(h) {
            Ok(atoms) if atoms.len() == h.len() => report.record("atoms", true, format!("all {} generators are atoms", h.len())),
            Ok(atoms) => {
                let missing: Vec<String> = h
                    .generators()
                    .iter()
                    .filter(|g| !atoms.contains(g))
                    .map(arith::format_rational)
                    .collect();
                report.record("atoms", false, format!("not atoms: {}", missing.join(", ")))
            }
            Err(e) => report.record("atoms", false, e.to_string()),
        },
        None => report.record("atoms", false, "no valid generator list"),
    };

    // (4) scaling and integer-level re-enumeration, (5) squarefree
    let numerical = check_scaling(&mut report, engine, trace, puiseux.as_ref(), rational.as_ref());
    match numerical {
        Some((m, z)) => {
            report.squarefree_paper_literal = engine::squarefree_from_factorizations(&z, SquarefreeMode::PaperLiteral);
            report.squarefree_strong = engine::squarefree_from_factorizations(&z, SquarefreeMode::Strong);
            let paper = report.squarefree_paper_literal;
            let strong = report.squarefree_strong;
            report.record(
                "squarefree_paper_literal",
                paper,
                format!("{} in <{}>", trace.target, join(m.generators())),
            );
            report.record("squarefree_strong", strong, format!("{}", trace.target));
        }
        None => {
            report.record("squarefree_paper_literal", false, "no valid numerical monoid");
            report.record("squarefree_strong", false, "no valid numerical monoid");
        }
    }
    report.finish()
}

fn check_lengths(report: &mut VerificationReport, trace: &RealizationTrace, profile: Option<&LengthProfile>) -> bool {
    let Some(profile) = profile else {
        return report.record("lengths", false, "no enumeration of 1");
    };
    let found = profile.length_set();
    let ok = found == trace.lengths;
    report.record("lengths", ok, format!("L(1) = {found:?}, requested {:?}", trace.lengths))
}

fn check_counts(report: &mut VerificationReport, trace: &RealizationTrace, profile: Option<&LengthProfile>) -> bool {
    let Some(profile) = profile else {
        return report.record("counts", false, "no enumeration of 1");
    };
    let keys_ok = trace.counts.keys().eq(trace.lengths.iter());
    let ok = keys_ok && profile.counts == trace.counts;
    report.record(
        "counts",
        ok,
        format!("|Z_k(1)| = {:?}, requested {:?}", profile.counts, trace.counts),
    )
}

fn check_steps(
    report: &mut VerificationReport,
    trace: &RealizationTrace,
    puiseux: Option<&PuiseuxMonoid>,
    rational: Option<&FactorizationSet<ExactRational>>,
) -> bool {
    let (Some(h), Some(z)) = (puiseux, rational) else {
        return report.record("step_bijection", false, "no valid monoid or enumeration");
    };
    let mut problems = Vec::new();
    let mut multiset: BTreeMap<u64, u64> = BTreeMap::new();
    let mut indicators = BTreeSet::new();
    let mut all_atoms = Vec::new();
    for (i, step) in trace.steps.iter().enumerate() {
        *multiset.entry(step.k).or_insert(0) += 1;
        match construct::level_atoms(step.k, &step.prime) {
            Ok(expected) if expected == step.atoms => {}
            Ok(_) => problems.push(format!("step {i}: atoms differ from (p + c_i)/(kp)")),
            Err(e) => problems.push(format!("step {i}: {e}")),
        }
        match construct::coefficients(step.k) {
            Ok(c) if c.coefficients == step.coefficients => {}
            _ => problems.push(format!("step {i}: wrong coefficient vector")),
        }
        if construct::rational_sum(&step.atoms) != BigRational::one() {
            problems.push(format!("step {i}: atoms do not sum to 1"));
        }
        let positions: Option<Vec<usize>> = step.atoms.iter().map(|q| h.index_of(q)).collect();
        match positions {
            Some(pos) => {
                indicators.insert(ExponentVector::indicator(h.len(), pos));
            }
            None => problems.push(format!("step {i}: atoms missing from the generator list")),
        }
        all_atoms.extend(step.atoms.iter().cloned());
    }
    all_atoms.sort();
    if all_atoms != h.generators() {
        problems.push("generators are not the disjoint union of the step atoms".into());
    }
    if multiset != trace.counts {
        problems.push(format!("step levels {multiset:?} do not match counts {:?}", trace.counts));
    }
    let found: BTreeSet<ExponentVector> = z.vectors.iter().cloned().collect();
    if found != indicators {
        problems.push(format!(
            "{} factorizations of 1 against {} step indicators",
            found.len(),
            indicators.len()
        ));
    }
    if problems.is_empty() {
        report.record("step_bijection", true, format!("{} steps, one factorization each", trace.steps.len()))
    } else {
        report.record("step_bijection", false, problems.join("; "))
    }
}

fn check_scaling(
    report: &mut VerificationReport,
    engine: &Engine,
    trace: &RealizationTrace,
    puiseux: Option<&PuiseuxMonoid>,
    rational: Option<&FactorizationSet<ExactRational>>,
) -> Option<(NumericalMonoid, FactorizationSet<ExactInteger>)> {
    let mut problems = Vec::new();
    if let Some(h) = puiseux {
        let scale = h.denominator_lcm();
        let images: Vec<BigInt> = h.generators().iter().map(|g| (g * &scale).to_integer()).collect();
        let gcd = arith::gcd_all(&images);
        let expected: Vec<BigInt> = images.iter().map(|x| x / &gcd).collect();
        if scale != trace.scale {
            problems.push(format!("scale {} but denominator lcm is {scale}", trace.scale));
        }
        if gcd != trace.normalization_gcd {
            problems.push(format!("normalization gcd {} but recomputed {gcd}", trace.normalization_gcd));
        }
        if expected != trace.numerical_generators {
            problems.push("numerical generators are not the scaled Puiseux generators".into());
        }
    }
    if trace.normalization_gcd.is_zero() || &trace.normalization_gcd * &trace.target != trace.scale {
        problems.push(format!(
            "target {} is not scale / normalization gcd",
            trace.target
        ));
    }
    let numerical = match trace.numerical() {
        Ok(m) => Some(m),
        Err(e) => {
            problems.push(format!("numerical monoid invalid: {e}"));
            None
        }
    };
    let integer = numerical.as_ref().and_then(|m| match engine.factorizations(m, &trace.target) {
        Ok(z) => Some(z),
        Err(e) => {
            problems.push(format!("integer enumeration of {}: {e}", trace.target));
            None
        }
    });
    match (rational, &integer) {
        (Some(r), Some(i)) if r.vectors != i.vectors => problems.push(format!(
            "Z({}) has {} vectors, Z(1) has {}",
            trace.target,
            i.len(),
            r.len()
        )),
        (None, _) => problems.push("no rational enumeration to compare".into()),
        _ => {}
    }
    if problems.is_empty() {
        report.scaling_consistency_ok = true;
        let z = integer.as_ref().expect("integer enumeration present");
        report.record(
            "scaling_consistency",
            true,
            format!("Z({}) matches Z(1) vector for vector ({} vectors)", trace.target, z.len()),
        );
    } else {
        report.record("scaling_consistency", false, problems.join("; "));
    }
    numerical.zip(integer)
}

/// Delta set of the lengths of the target, enumerated in the numerical monoid.
pub fn delta_of_target(engine: &Engine, trace: &RealizationTrace) -> Result<engine::DeltaSet> {
    let m = trace.numerical()?;
    let z = engine.factorizations(&m, &trace.target)?;
    Ok(engine::delta_set(&z.length_profile().length_set()))
}

fn join(values: &[ExactInteger]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Spot check that adding each level leaves factorizations below 1 alone: for
/// every atom `u` of the monoid before the level, and every pairwise atom sum
/// `u < 1`, the factorizations of `u` are the same before and after.
pub fn check_prefix_stability(engine: &Engine, trace: &RealizationTrace) -> Result<bool> {
    let Some(bound) = trace.max_level() else {
        return Ok(true);
    };
    let one = BigRational::one();
    let mut before: Option<PuiseuxMonoid> = None;
    for step in &trace.steps {
        let after = match &before {
            Some(h) => h.with_generators(&step.atoms)?,
            None => PuiseuxMonoid::new(step.atoms.iter().cloned())?,
        };
        if let Some(h) = &before {
            let g = h.generators();
            let mut samples: BTreeSet<ExactRational> = g.iter().cloned().collect();
            for (i, a) in g.iter().enumerate() {
                for b in &g[i..] {
                    let s = a + b;
                    if s < one {
                        samples.insert(s);
                    }
                }
            }
            for u in &samples {
                let small = engine.factorizations_rational(h, u, bound)?;
                let large = engine.factorizations_rational(&after, u, bound)?;
                let lifted: Vec<ExponentVector> = small
                    .vectors
                    .iter()
                    .map(|v| {
                        let mut out = ExponentVector::zeros(after.len());
                        for (gi, &e) in g.iter().zip(&v.0) {
                            out.0[after.index_of(gi).expect("old generator kept")] = e;
                        }
                        out
                    })
                    .collect();
                let mut lifted = lifted;
                lifted.sort();
                if lifted != large.vectors {
                    return Ok(false);
                }
            }
        }
        before = Some(after);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{coefficients, level_bound, realize};

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn nm(v: &[i64]) -> NumericalMonoid {
        NumericalMonoid::new(v.iter().map(|&x| int(x))).unwrap()
    }

    fn vecs(v: &[&[u64]]) -> Vec<ExponentVector> {
        v.iter().map(|x| ExponentVector(x.to_vec())).collect()
    }

    fn two_three() -> RealizationTrace {
        realize(&BTreeSet::from([2, 3]), &BTreeMap::from([(2, 1), (3, 1)])).unwrap()
    }

    #[test]
    fn trichotomy_examples() {
        assert!(trichotomy_check(2, &coefficients(2).unwrap(), &int(7)).unwrap());
        assert!(trichotomy_check(3, &coefficients(3).unwrap(), &int(37)).unwrap());
        assert!(!trichotomy_check(2, &coefficients(2).unwrap(), &int(2)).unwrap());
        assert!(trichotomy_check(2, &coefficients(3).unwrap(), &int(7)).is_err());
        assert!(trichotomy_check(2, &coefficients(2).unwrap(), &int(8)).is_err());
    }

    #[test]
    fn trichotomy_fails_below_bound_for_some_prime() {
        // the bound is sufficient, not always necessary; p = 5 breaks k = 3
        // via (2, 1, 0): 2 + 3 = 5
        let c = coefficients(3).unwrap();
        assert!(!trichotomy_check(3, &c, &int(5)).unwrap());
        assert!(int(5) < level_bound(3));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(oracle_factorizations(&nm(&[3, 4]), &int(7)).unwrap().vectors, vecs(&[&[1, 1]]));
        assert_eq!(
            oracle_factorizations(&nm(&[2, 3]), &int(6)).unwrap().vectors,
            vecs(&[&[0, 2], &[3, 0]])
        );
        assert!(oracle_factorizations(&nm(&[5, 7]), &int(4)).unwrap().is_empty());
        assert!(matches!(
            oracle_factorizations(&nm(&[2, 3]), &int(10_000_000_000)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn oracle_squarefree_matches_engine() {
        let e = Engine::default();
        for gens in [&[2i64, 3][..], &[3, 4], &[3, 5, 7], &[4, 6, 9], &[5, 6, 13]] {
            let m = nm(gens);
            for a in 0..80i64 {
                for mode in [SquarefreeMode::PaperLiteral, SquarefreeMode::Strong] {
                    assert_eq!(
                        oracle_squarefree(&e, &m, &int(a), mode).unwrap(),
                        e.squarefree_q(&m, &int(a), mode).unwrap(),
                        "{gens:?} {a} {mode:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn verify_small_realizations() {
        let e = Engine::default();
        let t = realize(&BTreeSet::from([2]), &BTreeMap::from([(2, 1)])).unwrap();
        let r = verify_realization(&e, &t);
        assert!(r.passed, "{r}");
        assert!(r.squarefree_strong);

        let r = verify_realization(&e, &two_three());
        assert!(r.passed, "{r}");
        assert!(r.squarefree_paper_literal && r.squarefree_strong);
    }

    #[test]
    fn tampered_atom_fails() {
        let e = Engine::default();
        let mut t = two_three();
        t.puiseux_generators[1] = BigRational::new(int(5), int(13));
        let r = verify_realization(&e, &t);
        assert!(!r.passed);
        assert!(!r.counts_ok || !r.atoms_ok, "{r}");

        let mut t = two_three();
        t.steps[1].atoms[0] = BigRational::new(int(5), int(13));
        let r = verify_realization(&e, &t);
        assert!(!r.passed);
        assert!(!r.step_bijection_ok);
    }

    #[test]
    fn tampered_counts_and_generators_fail() {
        let e = Engine::default();
        let mut t = two_three();
        t.counts.insert(2, 2);
        let r = verify_realization(&e, &t);
        assert!(!r.counts_ok && !r.passed);

        let mut t = two_three();
        t.puiseux_generators.remove(2);
        let r = verify_realization(&e, &t);
        assert!(!r.lengths_ok && !r.passed);
        assert!(r.failures().contains(&"lengths"));

        let mut t = two_three();
        t.numerical_generators[0] = int(232);
        let r = verify_realization(&e, &t);
        assert!(!r.scaling_consistency_ok && !r.passed);

        let mut t = two_three();
        t.target = int(776);
        assert!(!verify_realization(&e, &t).passed);
    }

    #[test]
    fn budget_failures_are_reported() {
        let t = two_three();
        let r = verify_realization(&Engine::with_budget(3), &t);
        assert!(!r.passed);
        assert!(r.details.iter().any(|d| d.message.contains("budget")));
    }

    #[test]
    fn prefix_stability_on_small_traces() {
        let e = Engine::default();
        assert!(check_prefix_stability(&e, &two_three()).unwrap());
        let t = realize(&BTreeSet::from([2, 4]), &BTreeMap::from([(2, 2), (4, 1)])).unwrap();
        assert!(check_prefix_stability(&e, &t).unwrap());
    }
}
