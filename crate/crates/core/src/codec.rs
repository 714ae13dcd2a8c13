//! Numeric codes for pairs, finite sequences and finite sets.
//!
//! Pairing is the Cantor pairing `pair(i, j) = (i + j)(i + j + 1)/2 + i`.
//! Sequences use the cons-list bijection `0 ↦ ⟨⟩`, `n + 1 ↦ cons(unpair(n))`,
//! so `⟨a0, a1, ...⟩` has code `1 + pair(a0, code(⟨a1, ...⟩))` and every
//! natural number decodes to exactly one sequence.
//!
//! Codes roughly square with every element, so a [`SeqCode`] keeps the
//! decoded sequence and computes the numeric value only when asked.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    /// A decoded entry does not fit a machine word.
    #[error("sequence entry at position {position} has {bits} bits and does not fit in u64")]
    EntryOverflow { position: usize, bits: u64 },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// Cantor pairing on arbitrary-precision naturals.
pub fn pair(i: &BigUint, j: &BigUint) -> BigUint {
    let s = i + j;
    (&s * (&s + 1u32)) / 2u32 + i
}

/// Inverse of [`pair`].
pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    // w = floor((sqrt(8z + 1) - 1) / 2) is the diagonal holding z
    let disc: BigUint = z * 8u32 + 1u32;
    let w: BigUint = (disc.sqrt() - 1u32) / 2u32;
    let t = (&w * (&w + 1u32)) / 2u32;
    let i = z - t;
    let j = &w - &i;
    (i, j)
}

/// Cantor pairing on machine words; `None` on overflow.
pub fn pair_u64(i: u64, j: u64) -> Option<u64> {
    let s = (i as u128) + (j as u128);
    let v = s.checked_mul(s + 1)? / 2 + i as u128;
    u64::try_from(v).ok()
}

/// Inverse of [`pair_u64`]; total on `u64`.
pub fn unpair_u64(z: u64) -> (u64, u64) {
    let z = z as u128;
    let tri = |w: u128| w * (w + 1) / 2;
    let mut w = ((((8 * z + 1) as f64).sqrt() - 1.0) / 2.0) as u128;
    while tri(w) > z {
        w -= 1;
    }
    while tri(w + 1) <= z {
        w += 1;
    }
    let i = z - tri(w);
    let j = w - i;
    (i as u64, j as u64)
}

/// Code of a finite sequence of naturals.
///
/// Equality and ordering are those of the underlying sequence (lexicographic,
/// a proper prefix first). Since coding is a bijection, code equality is
/// sequence equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeqCode {
    seq: Vec<u64>,
}

impl SeqCode {
    /// The code of `⟨⟩`, numerically 0.
    pub fn empty() -> Self {
        SeqCode { seq: Vec::new() }
    }

    pub fn from_seq(seq: impl Into<Vec<u64>>) -> Self {
        SeqCode { seq: seq.into() }
    }

    /// Decodes a numeric code. Fails only when an entry exceeds `u64`.
    pub fn from_value(value: &BigUint) -> Result<Self, CodecError> {
        decode_seq(value).map(|seq| SeqCode { seq })
    }

    /// Numeric value of the code.
    pub fn value(&self) -> BigUint {
        encode_seq(&self.seq)
    }

    /// Numeric value, or `None` once it would exceed `max_bits` bits.
    pub fn value_within(&self, max_bits: u64) -> Option<BigUint> {
        let mut code = BigUint::zero();
        for &a in self.seq.iter().rev() {
            code = pair(&BigUint::from(a), &code) + 1u32;
            if code.bits() > max_bits {
                return None;
            }
        }
        Some(code)
    }

    /// `lh l`.
    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// `l(i)`.
    pub fn get(&self, i: usize) -> Option<u64> {
        self.seq.get(i).copied()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.seq
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.seq
    }

    /// `s ⊆ t` in the initial-segment sense.
    pub fn is_prefix_of(&self, other: &SeqCode) -> bool {
        other.seq.starts_with(&self.seq)
    }

    /// Code of the first `m` entries (all of them when `m ≥ lh`).
    pub fn truncate(&self, m: usize) -> SeqCode {
        SeqCode::from_seq(&self.seq[..m.min(self.seq.len())])
    }
}

impl From<Vec<u64>> for SeqCode {
    fn from(seq: Vec<u64>) -> Self {
        SeqCode { seq }
    }
}

impl fmt::Display for SeqCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", join(&self.seq))
    }
}

/// Numeric code of a sequence.
pub fn encode_seq(seq: &[u64]) -> BigUint {
    seq.iter().rev().fold(BigUint::zero(), |code, &a| {
        pair(&BigUint::from(a), &code) + 1u32
    })
}

/// Sequence with the given numeric code.
pub fn decode_seq(code: &BigUint) -> Result<Vec<u64>, CodecError> {
    let mut out = Vec::new();
    let mut rest = code.clone();
    while !rest.is_zero() {
        let (head, tail) = unpair(&(rest - BigUint::one()));
        let entry = head.to_u64().ok_or(CodecError::EntryOverflow {
            position: out.len(),
            bits: head.bits(),
        })?;
        out.push(entry);
        rest = tail;
    }
    Ok(out)
}

/// A finite set of naturals, kept as its strictly increasing enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FinSet {
    elems: Vec<u64>,
}

impl FinSet {
    pub fn empty() -> Self {
        FinSet { elems: Vec::new() }
    }

    /// Builds the set from arbitrary elements (sorted and deduplicated).
    pub fn new(elems: impl IntoIterator<Item = u64>) -> Self {
        let mut elems: Vec<u64> = elems.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        FinSet { elems }
    }

    /// Caller guarantees `elems` is strictly increasing.
    pub(crate) fn from_sorted(elems: Vec<u64>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        FinSet { elems }
    }

    pub fn elements(&self) -> &[u64] {
        &self.elems
    }

    /// `|A|`.
    pub fn card(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn min(&self) -> Option<u64> {
        self.elems.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elems.last().copied()
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    /// `A ∩ [k]`.
    pub fn restrict(&self, k: u64) -> FinSet {
        let end = self.elems.partition_point(|&x| x <= k);
        FinSet::from_sorted(self.elems[..end].to_vec())
    }

    pub fn intersection(&self, other: &FinSet) -> FinSet {
        FinSet::from_sorted(
            self.elems
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        )
    }

    pub fn union(&self, other: &FinSet) -> FinSet {
        FinSet::new(self.elems.iter().chain(other.elems.iter()).copied())
    }

    pub fn insert(&mut self, x: u64) {
        if let Err(pos) = self.elems.binary_search(&x) {
            self.elems.insert(pos, x);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elems.iter().copied()
    }
}

impl FromIterator<u64> for FinSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        FinSet::new(iter)
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", join(&self.elems))
    }
}

/// `A_l`: the set of entries of the sequence coded by `l`.
pub fn set_of(l: &SeqCode) -> FinSet {
    FinSet::new(l.as_slice().iter().copied())
}

/// The code of a set: the code of its increasing enumeration.
pub fn canon_code(a: &FinSet) -> SeqCode {
    SeqCode::from_seq(a.elements())
}

/// `|A|`.
pub fn card(a: &FinSet) -> usize {
    a.card()
}

/// Compares `|A_l|` with `m`.
pub fn card_cmp(l: &SeqCode, m: u64) -> Ordering {
    (set_of(l).card() as u64).cmp(&m)
}

/// `[i] = {0, ..., i}`; `None` stands for `[-1] = ∅`.
pub fn initial_segment(i: Option<u64>) -> FinSet {
    match i {
        Some(i) => FinSet::from_sorted((0..=i).collect()),
        None => FinSet::empty(),
    }
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Parses a comma-separated list of naturals, optionally wrapped in
/// `⟨⟩`, `<>`, `[]` or `{}`. The empty string is the empty list.
pub fn parse_list(text: &str) -> Result<Vec<u64>, CodecError> {
    let trimmed = text.trim();
    let inner = [('⟨', '⟩'), ('<', '>'), ('[', ']'), ('{', '}')]
        .iter()
        .find_map(|&(open, close)| {
            trimmed
                .strip_prefix(open)
                .and_then(|rest| rest.strip_suffix(close))
        })
        .unwrap_or(trimmed)
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|part| {
            part.trim().parse::<u64>().map_err(|e| CodecError::Parse {
                input: text.to_string(),
                reason: format!("{:?}: {e}", part.trim()),
            })
        })
        .collect()
}

impl FromStr for SeqCode {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_list(s).map(SeqCode::from_seq)
    }
}

impl FromStr for FinSet {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_list(s).map(FinSet::new)
    }
}
