//! Exhaustive factorization machinery.
//!
//! Integer-level enumeration works on a [`NumericalMonoid`]; rational-level
//! enumeration works directly on a [`PuiseuxMonoid`]. The two share no search
//! code, so their agreement on a scaled monoid is a genuine cross-check.
//!
//! All searches walk the generators from largest to smallest and the results
//! are re-sorted lexicographically, so output never depends on search order.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::arith::{ExactInteger, ExactRational};
use crate::error::{Error, Result};
use crate::monoid::{NumericalMonoid, PuiseuxMonoid};

/// Default limit on table entries and search nodes.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Exponents of a factorization, one per generator in ascending generator order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<u64>);

impl ExponentVector {
    pub fn zeros(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    /// Vector with a 1 at every listed position.
    pub fn indicator(n: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(n);
        for i in positions {
            v.0[i] += 1;
        }
        v
    }

    /// Total length `|z|`.
    pub fn length(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn max_exponent(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Complete set of factorizations of `target`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorizationSet<T> {
    pub target: T,
    pub vectors: Vec<ExponentVector>,
}

impl<T> FactorizationSet<T> {
    fn from_unsorted(target: T, mut vectors: Vec<ExponentVector>) -> Self {
        vectors.sort();
        vectors.dedup();
        FactorizationSet { target, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn length_profile(&self) -> LengthProfile {
        length_profile(self)
    }

    /// Factorizations of length exactly `k`.
    pub fn of_length(&self, k: u64) -> impl Iterator<Item = &ExponentVector> {
        self.vectors.iter().filter(move |z| z.length() == k)
    }

    /// Same vectors, different target label.
    pub fn relabel<U>(&self, target: U) -> FactorizationSet<U> {
        FactorizationSet {
            target,
            vectors: self.vectors.clone(),
        }
    }
}

impl<T: fmt::Display> Serialize for FactorizationSet<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("FactorizationSet", 2)?;
        st.serialize_field("target", &self.target.to_string())?;
        st.serialize_field("vectors", &self.vectors)?;
        st.end()
    }
}

/// Set of lengths together with the number of factorizations of each length.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LengthProfile {
    pub counts: BTreeMap<u64, u64>,
}

impl LengthProfile {
    pub fn length_set(&self) -> BTreeSet<u64> {
        self.counts.keys().copied().collect()
    }

    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

pub fn length_profile<T>(z: &FactorizationSet<T>) -> LengthProfile {
    let mut counts = BTreeMap::new();
    for v in &z.vectors {
        *counts.entry(v.length()).or_insert(0) += 1;
    }
    LengthProfile { counts }
}

/// Successive differences of a sorted integer set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DeltaSet(pub BTreeSet<u64>);

impl DeltaSet {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn delta_set(values: &BTreeSet<u64>) -> DeltaSet {
    DeltaSet(
        values
            .iter()
            .zip(values.iter().skip(1))
            .map(|(lo, hi)| hi - lo)
            .collect(),
    )
}

/// Which decompositions disqualify an element from being squarefree.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SquarefreeMode {
    /// No `a = b + b + c` with `b` and `c` both nonzero.
    #[default]
    PaperLiteral,
    /// Additionally no `a = b + b` with `b` nonzero.
    Strong,
}

impl FromStr for SquarefreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(SquarefreeMode::PaperLiteral),
            "strong" => Ok(SquarefreeMode::Strong),
            other => Err(Error::parse(format!("unknown squarefree mode {other:?}"))),
        }
    }
}

/// Squarefree test read off a complete factorization set.
///
/// In an atomic monoid `a = 2b + c` has a solution iff some factorization `z`
/// of `a` has an exponent of at least two; with `c` required nonzero, `z` must
/// moreover differ from `2 * e_i`.
pub fn squarefree_from_factorizations<T>(z: &FactorizationSet<T>, mode: SquarefreeMode) -> bool {
    !z.vectors.iter().any(|v| {
        v.0.iter().any(|&e| e >= 2)
            && match mode {
                SquarefreeMode::Strong => true,
                SquarefreeMode::PaperLiteral => v.length() > 2,
            }
    })
}

/// Factorization engine with a resource budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Engine {
    budget: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            budget: DEFAULT_BUDGET,
        }
    }
}

impl Engine {
    pub fn with_budget(budget: u64) -> Self {
        Engine { budget }
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// Whether `x` is an `N0`-combination of the generators of `m`.
    ///
    /// Uses the Apéry set of the multiplicity when it fits the budget, and a
    /// reachability table up to `x` otherwise.
    pub fn member_q(&self, m: &NumericalMonoid, x: &ExactInteger) -> Result<bool> {
        if x.is_negative() {
            return Err(Error::invalid(format!("{x} is negative")));
        }
        if x.is_zero() {
            return Ok(true);
        }
        if x < m.multiplicity() {
            return Ok(false);
        }
        let multiplicity = m.multiplicity().to_u64().filter(|&v| v <= self.budget);
        if let (Some(_), Some(gens)) = (multiplicity, to_u64s(m.generators())) {
            let apery = apery_set(&gens);
            let mult = BigInt::from(gens[0]);
            let residue = (x % &mult).to_usize().expect("residue below multiplicity");
            return Ok(BigInt::from(apery[residue]) <= *x);
        }
        let limit = x.to_u64().filter(|&v| v <= self.budget).ok_or_else(|| {
            Error::budget("membership table", x, self.budget)
        })?;
        let gens = to_u64s(m.generators()).unwrap_or_default();
        Ok(reachability(&gens, limit as usize)[limit as usize])
    }

    /// All factorizations of `a` in `m`.
    pub fn factorizations(&self, m: &NumericalMonoid, a: &ExactInteger) -> Result<FactorizationSet<ExactInteger>> {
        if a.is_negative() {
            return Err(Error::invalid(format!("{a} is negative")));
        }
        let gens = m.generators();
        let n = gens.len() as u64;
        let table_size = a.to_u64().and_then(|v| v.checked_add(1)).and_then(|v| v.checked_mul(n));
        let vectors = match (table_size, to_u64s(gens)) {
            (Some(size), Some(small)) if size <= self.budget => {
                table_factorizations(&small, a.to_usize().expect("fits in table"))
            }
            _ => {
                let mut out = Vec::new();
                self.integer_search(gens, a, |v| {
                    out.push(ExponentVector(v.to_vec()));
                    ControlFlow::Continue(())
                })?;
                out
            }
        };
        Ok(FactorizationSet::from_unsorted(a.clone(), vectors))
    }

    /// Whether `x` is a combination of `gens` (which need not be coprime).
    pub(crate) fn is_combination(&self, gens: &[ExactInteger], x: &ExactInteger) -> Result<bool> {
        if x.is_zero() {
            return Ok(true);
        }
        let mut found = false;
        self.integer_search(gens, x, |_| {
            found = true;
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    /// Depth-first search over exponent vectors, largest generator first,
    /// pruned by the gcd of the generators still available.
    fn integer_search(
        &self,
        gens: &[ExactInteger],
        target: &ExactInteger,
        mut visit: impl FnMut(&[u64]) -> ControlFlow<()>,
    ) -> Result<()> {
        if gens.is_empty() {
            if target.is_zero() {
                let _ = visit(&[]);
            }
            return Ok(());
        }
        let prefix_gcd: Vec<BigInt> = gens
            .iter()
            .scan(BigInt::zero(), |acc, g| {
                *acc = acc.gcd(g);
                Some(acc.clone())
            })
            .collect();
        let mut search = IntegerSearch {
            gens,
            prefix_gcd: &prefix_gcd,
            current: vec![0; gens.len()],
            nodes: 0,
            budget: self.budget,
            visit: &mut visit,
        };
        search.descend(gens.len() - 1, target.clone()).map(|_| ())
    }

    /// Factorizations of the rational 1 in `h` of length at most `length_bound`.
    ///
    /// Every generator must exceed `1 / (length_bound + 1)`, which makes the
    /// bound sound: any longer sum of generators is larger than 1.
    pub fn factorizations_of_one(
        &self,
        h: &PuiseuxMonoid,
        length_bound: u64,
    ) -> Result<FactorizationSet<ExactRational>> {
        self.factorizations_rational(h, &BigRational::one(), length_bound)
    }

    /// Factorizations of a nonnegative rational `target` in `h` of length at
    /// most `length_bound`; errors unless every generator exceeds
    /// `target / (length_bound + 1)`, so that no longer factorization exists.
    pub fn factorizations_rational(
        &self,
        h: &PuiseuxMonoid,
        target: &ExactRational,
        length_bound: u64,
    ) -> Result<FactorizationSet<ExactRational>> {
        if length_bound == 0 {
            return Err(Error::invalid("length bound must be at least 1"));
        }
        if target.is_negative() {
            return Err(Error::invalid(format!("{target} is negative")));
        }
        let floor = target / BigRational::from_integer(BigInt::from(length_bound) + 1);
        if let Some(g) = h.generators().iter().find(|g| **g <= floor) {
            return Err(Error::invalid(format!(
                "generator {g} is at most {floor}, so length bound {length_bound} is unsound for {target}"
            )));
        }
        let mut out = Vec::new();
        self.rational_search(h.generators(), target, length_bound, |v| {
            out.push(ExponentVector(v.to_vec()));
            ControlFlow::Continue(())
        })?;
        Ok(FactorizationSet::from_unsorted(target.clone(), out))
    }

    /// Generators of `h` that are not a sum of two or more generators.
    ///
    /// A representation of `g` uses at most `g / min_generator` terms, all
    /// strictly smaller than `g`, so the search is complete.
    pub fn atoms_of(&self, h: &PuiseuxMonoid) -> Result<Vec<ExactRational>> {
        let beta = h.min_generator();
        let mut atoms = Vec::with_capacity(h.len());
        for (i, g) in h.generators().iter().enumerate() {
            let smaller = &h.generators()[..i];
            let max_len = (g / beta).floor().to_integer().to_u64().unwrap_or(u64::MAX);
            let mut decomposable = false;
            if !smaller.is_empty() && max_len >= 2 {
                self.rational_search(smaller, g, max_len, |_| {
                    decomposable = true;
                    ControlFlow::Break(())
                })?;
            }
            if !decomposable {
                atoms.push(g.clone());
            }
        }
        Ok(atoms)
    }

    fn rational_search(
        &self,
        gens: &[ExactRational],
        target: &ExactRational,
        max_len: u64,
        mut visit: impl FnMut(&[u64]) -> ControlFlow<()>,
    ) -> Result<()> {
        if gens.is_empty() {
            if target.is_zero() {
                let _ = visit(&[]);
            }
            return Ok(());
        }
        let mut search = RationalSearch {
            gens,
            current: vec![0; gens.len()],
            nodes: 0,
            budget: self.budget,
            visit: &mut visit,
        };
        search.descend(gens.len() - 1, target.clone(), max_len).map(|_| ())
    }

    /// Squarefree test for `a` in `m`, decided from the full factorization set.
    pub fn squarefree_q(&self, m: &NumericalMonoid, a: &ExactInteger, mode: SquarefreeMode) -> Result<bool> {
        Ok(squarefree_from_factorizations(&self.factorizations(m, a)?, mode))
    }
}

struct IntegerSearch<'a, F> {
    gens: &'a [BigInt],
    prefix_gcd: &'a [BigInt],
    current: Vec<u64>,
    nodes: u64,
    budget: u64,
    visit: &'a mut F,
}

impl<F: FnMut(&[u64]) -> ControlFlow<()>> IntegerSearch<'_, F> {
    fn descend(&mut self, index: usize, residual: BigInt) -> Result<ControlFlow<()>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::budget("factorization search nodes", self.nodes, self.budget));
        }
        if !(&residual % &self.prefix_gcd[index]).is_zero() {
            return Ok(ControlFlow::Continue(()));
        }
        let g = &self.gens[index];
        let (max_count, rem) = residual.div_rem(g);
        if index == 0 {
            if rem.is_zero() {
                self.current[0] = max_count.to_u64().expect("exponent fits in u64");
                let flow = (self.visit)(&self.current);
                self.current[0] = 0;
                return Ok(flow);
            }
            return Ok(ControlFlow::Continue(()));
        }
        let max_count = max_count.to_u64().expect("exponent fits in u64");
        let mut next = residual - g * max_count;
        for count in (0..=max_count).rev() {
            self.current[index] = count;
            let flow = self.descend(index - 1, next.clone())?;
            if flow.is_break() {
                self.current[index] = 0;
                return Ok(flow);
            }
            next += g;
        }
        self.current[index] = 0;
        Ok(ControlFlow::Continue(()))
    }
}

struct RationalSearch<'a, F> {
    gens: &'a [BigRational],
    current: Vec<u64>,
    nodes: u64,
    budget: u64,
    visit: &'a mut F,
}

impl<F: FnMut(&[u64]) -> ControlFlow<()>> RationalSearch<'_, F> {
    fn descend(&mut self, index: usize, residual: BigRational, remaining: u64) -> Result<ControlFlow<()>> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::budget("rational search nodes", self.nodes, self.budget));
        }
        let g = &self.gens[index];
        let quotient = &residual / g;
        if index == 0 {
            if quotient.is_integer() {
                if let Some(count) = quotient.to_integer().to_u64().filter(|&c| c <= remaining) {
                    self.current[0] = count;
                    let flow = (self.visit)(&self.current);
                    self.current[0] = 0;
                    return Ok(flow);
                }
            }
            return Ok(ControlFlow::Continue(()));
        }
        let max_count = quotient
            .floor()
            .to_integer()
            .to_u64()
            .map_or(remaining, |c| c.min(remaining));
        let below = &self.gens[index - 1];
        for count in (0..=max_count).rev() {
            let next = &residual - g * BigInt::from(count);
            let left = remaining - count;
            // the rest can contribute at most `left` copies of the next generator
            if next > below * BigInt::from(left) {
                break;
            }
            self.current[index] = count;
            let flow = self.descend(index - 1, next, left)?;
            if flow.is_break() {
                self.current[index] = 0;
                return Ok(flow);
            }
        }
        self.current[index] = 0;
        Ok(ControlFlow::Continue(()))
    }
}

fn to_u64s(values: &[BigInt]) -> Option<Vec<u64>> {
    values.iter().map(|v| v.to_u64()).collect()
}

/// Smallest element of the monoid in each residue class modulo the smallest
/// generator, by shortest paths over the residues.
fn apery_set(gens: &[u64]) -> Vec<u128> {
    let m = gens[0] as usize;
    let mut dist = vec![u128::MAX; m];
    dist[0] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u128, 0usize)));
    while let Some(Reverse((d, r))) = heap.pop() {
        if d > dist[r] {
            continue;
        }
        for &g in &gens[1..] {
            let next = (r + (g % m as u64) as usize) % m;
            let nd = d + g as u128;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(Reverse((nd, next)));
            }
        }
    }
    dist
}

/// `reach[x]` iff `x` is a combination of `gens`, for `x <= limit`.
fn reachability(gens: &[u64], limit: usize) -> Vec<bool> {
    let mut reach = vec![false; limit + 1];
    reach[0] = true;
    for &g in gens {
        let g = g as usize;
        for x in g..=limit {
            if reach[x - g] {
                reach[x] = true;
            }
        }
    }
    reach
}

/// Enumeration with exact pruning: `prefix[i][x]` records whether `x` is a
/// combination of the `i + 1` smallest generators, so every branch taken
/// leads to at least one factorization.
fn table_factorizations(gens: &[u64], target: usize) -> Vec<ExponentVector> {
    let prefix: Vec<Vec<bool>> = (1..=gens.len())
        .map(|i| reachability(&gens[..i], target))
        .collect();
    let mut out = Vec::new();
    if !prefix[gens.len() - 1][target] {
        return out;
    }
    let mut current = vec![0u64; gens.len()];
    fn walk(
        gens: &[u64],
        prefix: &[Vec<bool>],
        index: usize,
        residual: usize,
        current: &mut Vec<u64>,
        out: &mut Vec<ExponentVector>,
    ) {
        let g = gens[index] as usize;
        if index == 0 {
            current[0] = (residual / g) as u64;
            out.push(ExponentVector(current.clone()));
            current[0] = 0;
            return;
        }
        for count in (0..=residual / g).rev() {
            let next = residual - count * g;
            if prefix[index - 1][next] {
                current[index] = count as u64;
                walk(gens, prefix, index - 1, next, current, out);
            }
        }
        current[index] = 0;
    }
    walk(gens, &prefix, gens.len() - 1, target, &mut current, &mut out);
    out
}

/// Dot product of an exponent vector with integer generators.
pub fn evaluate_integer(gens: &[ExactInteger], z: &ExponentVector) -> ExactInteger {
    gens.iter().zip(&z.0).map(|(g, &e)| g * e).sum()
}

/// Dot product of an exponent vector with rational generators.
pub fn evaluate_rational(gens: &[ExactRational], z: &ExponentVector) -> ExactRational {
    gens.iter()
        .zip(&z.0)
        .fold(BigRational::zero(), |acc, (g, &e)| acc + g * BigInt::from(e))
}
