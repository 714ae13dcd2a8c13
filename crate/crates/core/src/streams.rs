//! Finite representations of infinite objects.
//!
//! Functions `ℕ → [n]` are eventually periodic ([`EvPeriodic`]), infinite
//! sets are given by an eventually periodic characteristic function
//! ([`InfiniteSet`]), and sequences of set codes are generators tagged with
//! whatever guarantee their constructor can vouch for ([`CodeSequence`]).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{canon_code, parse_list, set_of, CodecError, FinSet, SeqCode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("the period of an eventually periodic function must be nonempty")]
    EmptyPeriod,
    #[error("value {value} exceeds the bound {bound}")]
    OutOfRange { value: u64, bound: u64 },
    #[error(
        "characteristic function of an infinite set must take values in {{0,1}} and repeat a 1"
    )]
    NotInfinite,
    #[error("expected \"prefix;period\", got {0:?}")]
    Format(String),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// An eventually periodic function `ℕ → [n]`:
/// `f(i) = prefix[i]` for `i < |prefix|`, else
/// `period[(i - |prefix|) mod |period|]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EvPeriodic {
    prefix: Vec<u64>,
    period: Vec<u64>,
    bound: u64,
}

impl EvPeriodic {
    pub fn new(prefix: Vec<u64>, period: Vec<u64>, bound: u64) -> Result<Self, StreamError> {
        if period.is_empty() {
            return Err(StreamError::EmptyPeriod);
        }
        if let Some(&value) = prefix.iter().chain(&period).find(|&&v| v > bound) {
            return Err(StreamError::OutOfRange { value, bound });
        }
        Ok(EvPeriodic {
            prefix,
            period,
            bound,
        })
    }

    /// Like [`EvPeriodic::new`] with the bound set to the largest value.
    pub fn tight(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self, StreamError> {
        let bound = prefix.iter().chain(&period).copied().max().unwrap_or(0);
        Self::new(prefix, period, bound)
    }

    pub fn constant(c: u64) -> Self {
        EvPeriodic {
            prefix: Vec::new(),
            period: vec![c],
            bound: c,
        }
    }

    pub fn zeros() -> Self {
        Self::constant(0)
    }

    /// Replaces the declared bound; fails if some value exceeds it.
    pub fn with_bound(self, bound: u64) -> Result<Self, StreamError> {
        Self::new(self.prefix, self.period, bound)
    }

    pub fn prefix(&self) -> &[u64] {
        &self.prefix
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// The `n` of `f : ℕ → [n]`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn eval(&self, i: u64) -> u64 {
        let p = self.prefix.len() as u64;
        if i < p {
            self.prefix[i as usize]
        } else {
            self.period[((i - p) % self.period.len() as u64) as usize]
        }
    }

    /// `⟨f(0), ..., f(m - 1)⟩` as a plain vector.
    pub fn take(&self, m: u64) -> Vec<u64> {
        (0..m).map(|i| self.eval(i)).collect()
    }

    /// Values taken infinitely often.
    pub fn recurring_values(&self) -> BTreeSet<u64> {
        self.period.iter().copied().collect()
    }

    /// Least index where `self` and `other` differ, decided exactly by
    /// comparing up to the longer prefix plus one common period.
    pub fn first_disagreement(&self, other: &EvPeriodic) -> Option<u64> {
        let start = self.prefix.len().max(other.prefix.len()) as u64;
        let span = (self.period.len() as u64).lcm(&(other.period.len() as u64));
        (0..start + span).find(|&i| self.eval(i) != other.eval(i))
    }
}

impl fmt::Display for EvPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u64]| xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{};{}", join(&self.prefix), join(&self.period))
    }
}

/// Parses `"prefix;period"`, e.g. `"1,0;0,1"` or `";0"`. The bound is the
/// largest value; use [`EvPeriodic::with_bound`] to widen it.
impl FromStr for EvPeriodic {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (prefix, period) = s
            .split_once(';')
            .ok_or_else(|| StreamError::Format(s.to_string()))?;
        EvPeriodic::tight(parse_list(prefix)?, parse_list(period)?)
    }
}

/// `f̄m`: the code of `⟨f(0), ..., f(m - 1)⟩`.
pub fn prefix_code(f: &EvPeriodic, m: u64) -> SeqCode {
    SeqCode::from_seq(f.take(m))
}

/// `s⌢o`: `s` followed by zeros.
pub fn extend_zero(s: &SeqCode) -> EvPeriodic {
    let bound = s.as_slice().iter().copied().max().unwrap_or(0);
    EvPeriodic {
        prefix: s.as_slice().to_vec(),
        period: vec![0],
        bound,
    }
}

/// An infinite set given by its characteristic function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct InfiniteSet {
    chi: EvPeriodic,
}

impl InfiniteSet {
    pub fn from_chi(chi: EvPeriodic) -> Result<Self, StreamError> {
        let binary = chi.prefix.iter().chain(&chi.period).all(|&v| v <= 1);
        if !binary || !chi.period.contains(&1) {
            return Err(StreamError::NotInfinite);
        }
        Ok(InfiniteSet {
            chi: chi.with_bound(1)?,
        })
    }

    /// The color class `f⁻¹(c)` of a coloring, if it is infinite.
    pub fn color_class(f: &EvPeriodic, c: u64) -> Result<Self, StreamError> {
        let indicator = |xs: &[u64]| xs.iter().map(|&v| u64::from(v == c)).collect();
        Self::from_chi(EvPeriodic::new(
            indicator(&f.prefix),
            indicator(&f.period),
            1,
        )?)
    }

    pub fn naturals() -> Self {
        InfiniteSet {
            chi: EvPeriodic::new(vec![], vec![1], 1).expect("valid"),
        }
    }

    pub fn evens() -> Self {
        InfiniteSet {
            chi: EvPeriodic::new(vec![], vec![1, 0], 1).expect("valid"),
        }
    }

    pub fn odds() -> Self {
        InfiniteSet {
            chi: EvPeriodic::new(vec![], vec![0, 1], 1).expect("valid"),
        }
    }

    pub fn chi(&self) -> &EvPeriodic {
        &self.chi
    }

    pub fn contains(&self, x: u64) -> bool {
        self.chi.eval(x) == 1
    }

    /// `A ∩ [m]`.
    pub fn up_to(&self, m: u64) -> FinSet {
        FinSet::from_sorted((0..=m).filter(|&x| self.contains(x)).collect())
    }

    /// `A ∩ B`.
    pub fn meet(&self, b: &FinSet) -> FinSet {
        FinSet::from_sorted(b.iter().filter(|&x| self.contains(x)).collect())
    }

    /// Least `j` with `|A ∩ [j - 1]| = i`, i.e. `A ∩ [j - 1]` holds exactly
    /// the first `i` elements of `A`.
    pub fn index_with_count(&self, i: u64) -> u64 {
        let mut count = 0;
        let mut j = 0;
        while count < i {
            if self.contains(j) {
                count += 1;
            }
            j += 1;
        }
        j
    }
}

impl FromStr for InfiniteSet {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InfiniteSet::from_chi(s.parse()?)
    }
}

impl fmt::Display for InfiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ={}", self.chi)
    }
}

/// `l_m` with `A_{l_m} = A ∩ [m]`.
pub fn canonical_chain(a: &InfiniteSet, m: u64) -> SeqCode {
    canon_code(&a.up_to(m))
}

type Generator = Arc<dyn Fn(u64) -> SeqCode + Send + Sync>;

/// A sequence `(l_m)` of set codes.
///
/// Only the constructors below can attach the nestedness or
/// weak-convergence guarantees; [`CodeSequence::raw`] attaches none.
#[derive(Clone)]
pub struct CodeSequence {
    generator: Generator,
    nested: bool,
    limit: Option<InfiniteSet>,
    label: String,
}

impl fmt::Debug for CodeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CodeSequence")
            .field("label", &self.label)
            .field("nested", &self.nested)
            .field("limit", &self.limit)
            .finish()
    }
}

impl CodeSequence {
    /// An arbitrary deterministic generator, with no guarantees.
    pub fn raw(
        label: impl Into<String>,
        generator: impl Fn(u64) -> SeqCode + Send + Sync + 'static,
    ) -> Self {
        CodeSequence {
            generator: Arc::new(generator),
            nested: false,
            limit: None,
            label: label.into(),
        }
    }

    /// `A_{l_m} = A ∩ [m]`: nested, with union `A`, weakly convergent to `A`.
    pub fn canonical(a: &InfiniteSet) -> Self {
        let set = a.clone();
        CodeSequence {
            generator: Arc::new(move |m| canonical_chain(&set, m)),
            nested: true,
            limit: Some(a.clone()),
            label: format!("canonical chain of {a}"),
        }
    }

    /// `A_{l_m} = D_0 ∪ ... ∪ D_m`: nested by construction, union unknown.
    pub fn cumulative(
        label: impl Into<String>,
        increments: impl Fn(u64) -> FinSet + Send + Sync + 'static,
    ) -> Self {
        CodeSequence {
            generator: Arc::new(move |m| {
                let mut acc = FinSet::empty();
                for i in 0..=m {
                    acc = acc.union(&increments(i));
                }
                canon_code(&acc)
            }),
            nested: true,
            limit: None,
            label: label.into(),
        }
    }

    /// `A_{l_m} = [m] ∪ {m + 2}`: weakly convergent to ℕ, not nested.
    pub fn shifted_segments() -> Self {
        CodeSequence {
            generator: Arc::new(|m| {
                let mut s: Vec<u64> = (0..=m).collect();
                s.push(m + 2);
                SeqCode::from_seq(s)
            }),
            nested: false,
            limit: Some(InfiniteSet::naturals()),
            label: "[m] ∪ {m+2}".to_string(),
        }
    }

    /// Even positions from `self`, odd positions from `other`. Weakly
    /// convergent when both converge to the same set.
    pub fn interleave(&self, other: &CodeSequence) -> Self {
        let (a, b) = (self.generator.clone(), other.generator.clone());
        let limit = match (&self.limit, &other.limit) {
            (Some(x), Some(y)) if x == y => Some(x.clone()),
            _ => None,
        };
        CodeSequence {
            generator: Arc::new(move |m| if m % 2 == 0 { a(m / 2) } else { b(m / 2) }),
            nested: false,
            limit,
            label: format!("interleave({}, {})", self.label, other.label),
        }
    }

    /// Attaches a weak-convergence guarantee. Used by constructors in
    /// sibling modules that prove convergence themselves.
    pub(crate) fn converging(
        label: impl Into<String>,
        limit: InfiniteSet,
        generator: impl Fn(u64) -> SeqCode + Send + Sync + 'static,
    ) -> Self {
        CodeSequence {
            generator: Arc::new(generator),
            nested: false,
            limit: Some(limit),
            label: label.into(),
        }
    }

    pub fn at(&self, m: u64) -> SeqCode {
        (self.generator)(m)
    }

    pub fn is_nested(&self) -> bool {
        self.nested
    }

    /// The set this sequence is guaranteed to converge to weakly.
    pub fn limit(&self) -> Option<&InfiniteSet> {
        self.limit.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "index")]
pub enum Convergence {
    /// `A_{l_j} ∩ B = A ∩ B` for every `i ≤ j ≤ budget`.
    ConvergedAt(u64),
    NoWitnessUpTo(u64),
}

/// Bounded certificate for `∃i ∀j ≥ i (A_{l_j} ∩ B = A ∩ B)`; returns the
/// least `i` that works up to `budget`.
pub fn weak_convergence_check(
    seq: &CodeSequence,
    a: &InfiniteSet,
    b: &FinSet,
    budget: u64,
) -> Convergence {
    let target = a.meet(b);
    let agrees = |j: u64| set_of(&seq.at(j)).intersection(b) == target;
    let mut i = budget + 1;
    while i > 0 && agrees(i - 1) {
        i -= 1;
    }
    if i == budget + 1 {
        Convergence::NoWitnessUpTo(budget)
    } else {
        Convergence::ConvergedAt(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "index")]
pub enum BaireDistance {
    /// `d(f, g) = 2^{-m}` with `m ≤ budget`.
    Disagree(u64),
    /// `d(f, g) ≤ 2^{-budget}`.
    AgreeUpTo(u64),
}

/// Baire distance as the exponent of the first disagreement.
pub fn baire_dist_exp(f: &EvPeriodic, g: &EvPeriodic, budget: u64) -> BaireDistance {
    match f.first_disagreement(g) {
        Some(m) if m <= budget => BaireDistance::Disagree(m),
        _ => BaireDistance::AgreeUpTo(budget),
    }
}

/// `d(a, b) = Σ_i 2^{-i} · |δ_i| / (1 + |δ_i|)` with
/// `δ_i = (a⌢o)(i) - (b⌢o)(i)`; exact, since only finitely many terms are
/// nonzero.
pub fn product_dist(a: &SeqCode, b: &SeqCode) -> BigRational {
    let len = a.len().max(b.len());
    let mut total = BigRational::zero();
    for i in 0..len {
        let x = a.get(i).unwrap_or(0);
        let y = b.get(i).unwrap_or(0);
        let delta = BigInt::from(x.abs_diff(y));
        if delta.is_zero() {
            continue;
        }
        let weight = BigInt::from(1u8) << i;
        total += BigRational::new(delta.clone(), (BigInt::from(1u8) + delta) * weight);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::encode_seq;
    use num_traits::One;
    use proptest::prelude::*;

    fn ev(s: &str) -> EvPeriodic {
        s.parse().unwrap()
    }

    #[test]
    fn evaluation() {
        let f = ev("1,0;0,1");
        assert_eq!(f.eval(0), 1);
        assert_eq!(f.eval(3), 1);
        assert_eq!(f.eval(2), 0);
        assert_eq!(ev(";0").eval(1_000_000), 0);
        assert_eq!(f.to_string(), "1,0;0,1");
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            EvPeriodic::new(vec![1], vec![], 3),
            Err(StreamError::EmptyPeriod)
        );
        assert_eq!(
            EvPeriodic::new(vec![4], vec![0], 3),
            Err(StreamError::OutOfRange { value: 4, bound: 3 })
        );
        assert!("1,2".parse::<EvPeriodic>().is_err());
        assert!(InfiniteSet::from_chi(ev("1,1;0")).is_err());
        assert!(InfiniteSet::from_chi(ev(";0,2")).is_err());
    }

    #[test]
    fn prefix_codes() {
        let f = ev("1,0;0,1");
        assert!(prefix_code(&f, 0).is_empty());
        assert_eq!(prefix_code(&f, 0).value(), num_bigint::BigUint::from(0u8));
        assert_eq!(
            prefix_code(&EvPeriodic::zeros(), 2).value(),
            encode_seq(&[0, 0])
        );
        assert_eq!(prefix_code(&ev(";0,1"), 3).value(), encode_seq(&[0, 1, 0]));
    }

    #[test]
    fn zero_extension() {
        let z = extend_zero(&SeqCode::empty());
        assert_eq!(z.first_disagreement(&EvPeriodic::zeros()), None);
        let s = SeqCode::from_seq(vec![2, 1]);
        let f = extend_zero(&s);
        assert_eq!((f.eval(0), f.eval(1), f.eval(2), f.eval(50)), (2, 1, 0, 0));
        assert_eq!(prefix_code(&f, s.len() as u64), s);
    }

    #[test]
    fn canonical_chains() {
        let evens = InfiniteSet::evens();
        assert_eq!(set_of(&canonical_chain(&evens, 4)), FinSet::new([0, 2, 4]));
        assert_eq!(set_of(&canonical_chain(&evens, 0)), FinSet::new([0]));
        assert_eq!(
            set_of(&canonical_chain(&InfiniteSet::odds(), 0)),
            FinSet::empty()
        );
    }

    #[test]
    fn weak_convergence_examples() {
        let evens = InfiniteSet::evens();
        let chain = CodeSequence::canonical(&evens);
        assert_eq!(
            weak_convergence_check(&chain, &evens, &FinSet::new([0, 1, 2]), 10),
            Convergence::ConvergedAt(2)
        );

        // [m] ∪ {m+2} agrees with ℕ on {5} at m = 3 and then from m = 5 on
        let shifted = CodeSequence::shifted_segments();
        assert_eq!(
            weak_convergence_check(&shifted, &InfiniteSet::naturals(), &FinSet::new([5]), 20),
            Convergence::ConvergedAt(5)
        );

        let alternating = CodeSequence::raw("∅/{0}", |m| {
            if m % 2 == 0 {
                SeqCode::empty()
            } else {
                SeqCode::from_seq(vec![0])
            }
        });
        assert_eq!(
            weak_convergence_check(&alternating, &evens, &FinSet::new([0]), 20),
            Convergence::NoWitnessUpTo(20)
        );
    }

    #[test]
    fn interleaving_keeps_common_limit() {
        let evens = InfiniteSet::evens();
        let both = CodeSequence::canonical(&evens).interleave(&CodeSequence::canonical(&evens));
        assert_eq!(both.limit(), Some(&evens));
        assert!(!both.is_nested());
        let mixed = CodeSequence::canonical(&evens).interleave(&CodeSequence::shifted_segments());
        assert_eq!(mixed.limit(), None);
    }

    #[test]
    fn baire_distance() {
        let f = ev(";0,1");
        assert_eq!(baire_dist_exp(&f, &f, 30), BaireDistance::AgreeUpTo(30));
        let g = extend_zero(&SeqCode::from_seq(vec![0, 1]));
        assert_eq!(
            baire_dist_exp(&EvPeriodic::zeros(), &g, 10),
            BaireDistance::Disagree(1)
        );
        // same function written with a doubled period
        assert_eq!(
            baire_dist_exp(&f, &ev(";0,1,0,1"), 5),
            BaireDistance::AgreeUpTo(5)
        );
        assert_eq!(f.first_disagreement(&ev(";0,1,0,1")), None);
        // disagreement past the budget is not reported
        let late = ev("0,1,0,1,0,1,0,1;1");
        assert_eq!(baire_dist_exp(&f, &late, 5), BaireDistance::AgreeUpTo(5));
        assert_eq!(baire_dist_exp(&f, &late, 9), BaireDistance::Disagree(8));
    }

    #[test]
    fn product_distance_examples() {
        let a = SeqCode::from_seq(vec![1, 2]);
        assert!(product_dist(&a, &a).is_zero());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        assert_eq!(
            product_dist(&SeqCode::from_seq(vec![1]), &SeqCode::from_seq(vec![0])),
            half
        );
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert_eq!(
            product_dist(
                &SeqCode::from_seq(vec![0, 2]),
                &SeqCode::from_seq(vec![0, 0])
            ),
            third
        );
        // trailing zeros are invisible to the zero extension
        assert!(product_dist(
            &SeqCode::from_seq(vec![3, 0, 0]),
            &SeqCode::from_seq(vec![3])
        )
        .is_zero());
    }

    #[test]
    fn color_classes_as_sets() {
        let f = ev("2;0,1");
        let zeros = InfiniteSet::color_class(&f, 0).unwrap();
        assert_eq!(zeros.up_to(6), FinSet::new([1, 3, 5]));
        assert!(InfiniteSet::color_class(&f, 2).is_err());
    }

    fn small_infinite_set() -> impl Strategy<Value = InfiniteSet> {
        (
            proptest::collection::vec(0u64..=1, 0..5),
            proptest::collection::vec(0u64..=1, 1..6),
            0usize..6,
        )
            .prop_map(|(prefix, mut period, pos)| {
                let idx = pos % period.len();
                period[idx] = 1;
                InfiniteSet::from_chi(EvPeriodic::new(prefix, period, 1).unwrap()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn canonical_chain_is_nested(a in small_infinite_set()) {
            for m in 0..40 {
                let now = set_of(&canonical_chain(&a, m));
                let next = set_of(&canonical_chain(&a, m + 1));
                prop_assert!(now.is_subset(&next));
            }
        }

        #[test]
        fn infinite_sets_reach_every_count(a in small_infinite_set()) {
            for i in 0..30u64 {
                let j = a.index_with_count(i);
                let below = if j == 0 { FinSet::empty() } else { a.up_to(j - 1) };
                prop_assert_eq!(below.card() as u64, i);
            }
        }

        #[test]
        fn metric_prefix_links(
            a in proptest::collection::vec(0u64..=3, 0..8),
            b in proptest::collection::vec(0u64..=3, 0..8),
            r in 0usize..10,
        ) {
            let (a, b) = (SeqCode::from_seq(a), SeqCode::from_seq(b));
            let d = product_dist(&a, &b);
            let pa = prefix_code(&extend_zero(&a), r as u64);
            let pb = prefix_code(&extend_zero(&b), r as u64);
            let two = BigInt::from(2);
            let pow = |e: usize| BigRational::new(BigInt::one(), two.pow(e as u32));
            if d < pow(r) {
                prop_assert_eq!(&pa, &pb);
            }
            if pa == pb {
                let bound = if r == 0 {
                    BigRational::from_integer(two.clone())
                } else {
                    pow(r - 1)
                };
                prop_assert!(d < bound);
            }
        }
    }
}
