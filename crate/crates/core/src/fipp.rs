//! Finite colorings and the finitary pigeonhole principles.
//!
//! `[k] = {0, ..., k}` throughout, so a coloring of `[k]` has `k + 1`
//! entries. A witness for FIPP₂ is a monochromatic `A ⊆ [k]` with
//! `|A| > F(A)`; for FIPP₃ it is a whole color class whose cylinder is big.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::codec::{canon_code, FinSet};
use crate::cub::{fan_bound, CubError, FanResult, Fipp2Secure};
use crate::setfn::{cylinder_bigness, parity_min_f, Cylinder, SetFunction};
use crate::streams::EvPeriodic;

/// Codes above this many bits are left out of reports.
pub const REPORT_CODE_BITS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FippError {
    #[error("a coloring of [k] needs at least one entry")]
    EmptyColoring,
    #[error("color {color} at position {position} exceeds n = {n}")]
    ColorOutOfRange { position: usize, color: u64, n: u64 },
    #[error("(n+1)^(k+1) colorings for n = {n}, k = {k} do not fit in a machine word")]
    TooManyColorings { n: u64, k: u64 },
    #[error("class {color} = {set} of the k = {k} counterexample coloring has |A| > F(A)")]
    Fipp1Violation { k: u64, color: u64, set: FinSet },
    #[error(transparent)]
    Cub(#[from] CubError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Coloring {
    values: Vec<u64>,
    n: u64,
}

impl Coloring {
    pub fn new(values: Vec<u64>, n: u64) -> Result<Self, FippError> {
        if values.is_empty() {
            return Err(FippError::EmptyColoring);
        }
        if let Some((position, &color)) = values.iter().enumerate().find(|(_, &c)| c > n) {
            return Err(FippError::ColorOutOfRange { position, color, n });
        }
        Ok(Coloring { values, n })
    }

    pub fn constant(k: u64, n: u64, c: u64) -> Result<Self, FippError> {
        Coloring::new(vec![c; k as usize + 1], n)
    }

    pub fn k(&self) -> u64 {
        self.values.len() as u64 - 1
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn color(&self, i: u64) -> u64 {
        self.values[i as usize]
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{i}↦{c}"))
            .collect();
        write!(f, "({})", cells.join(", "))
    }
}

/// The coloring of `[k]` that refutes FIPP₁ for the parity-minimum `F`:
/// odd numbers get 0 and even numbers 1, except that among the last two
/// numbers the odd one gets 1 and the even one 0.
pub fn tao_coloring(k: u64) -> Coloring {
    let last_two = if k <= 1 { [0, 1] } else { [k - 1, k] };
    let values = (0..=k)
        .map(|i| {
            let odd = i % 2 == 1;
            if last_two.contains(&i) {
                u64::from(odd)
            } else {
                u64::from(!odd)
            }
        })
        .collect();
    Coloring { values, n: 1 }
}

/// `c ↦ f⁻¹(c)` for every `c ≤ n`; classes may be empty.
pub fn color_classes(f: &Coloring) -> BTreeMap<u64, FinSet> {
    classes_of(f.values(), f.n())
}

fn classes_of(values: &[u64], n: u64) -> BTreeMap<u64, FinSet> {
    (0..=n)
        .map(|c| {
            let class = values
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v == c)
                .map(|(i, _)| i as u64);
            (c, FinSet::new(class))
        })
        .collect()
}

/// Colors of an eventually periodic coloring that occur infinitely often.
pub fn infinite_color_classes(f: &EvPeriodic) -> BTreeSet<u64> {
    f.recurring_values()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// The coloring, or the prefix of it that already contains the set.
    pub coloring: Vec<u64>,
    pub color: u64,
    pub set: FinSet,
}

/// Least big subset of `class` in the order of canonical codes.
fn least_big_subset(class: &[u64], f: &SetFunction) -> Option<FinSet> {
    fn go(chosen: &mut Vec<u64>, rest: &[u64], f: &SetFunction) -> bool {
        let p = FinSet::from_sorted(chosen.clone());
        if f.is_big(&p) {
            return true;
        }
        if !f.has_big_extension(&p, rest) {
            return false;
        }
        for (i, &x) in rest.iter().enumerate() {
            chosen.push(x);
            if go(chosen, &rest[i + 1..], f) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    go(&mut chosen, class, f).then(|| FinSet::from_sorted(chosen))
}

/// The monochromatic `A` with `|A| > F(A)` whose canonical code is least,
/// as `(color, A)`.
pub fn least_witness(values: &[u64], f: &SetFunction) -> Option<(u64, FinSet)> {
    let n = values.iter().copied().max().unwrap_or(0);
    classes_of(values, n)
        .into_iter()
        .filter_map(|(c, class)| least_big_subset(class.elements(), f).map(|a| (c, a)))
        .min_by(|a, b| canon_code(&a.1).cmp(&canon_code(&b.1)))
}

fn coloring_count(n: u64, k: u64) -> Result<u64, FippError> {
    (n + 1)
        .checked_pow(k as u32 + 1)
        .filter(|_| k < u32::MAX as u64)
        .ok_or(FippError::TooManyColorings { n, k })
}

/// The `idx`-th coloring of `[k]` into `[n]` in lexicographic order.
pub(crate) fn coloring_at(idx: u64, n: u64, k: u64) -> Vec<u64> {
    let mut values = vec![0; k as usize + 1];
    let mut rest = idx;
    for slot in values.iter_mut().rev() {
        *slot = rest % (n + 1);
        rest /= n + 1;
    }
    values
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Enumerate,
    Fan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fipp2Outcome {
    /// One witness per coloring (enumerate) or per secured prefix (fan).
    Holds(Vec<Witness>),
    Fails(Coloring),
}

impl Fipp2Outcome {
    pub fn holds(&self) -> bool {
        matches!(self, Fipp2Outcome::Holds(_))
    }
}

pub fn fipp2_check(n: u64, f: &SetFunction, k: u64) -> Result<Fipp2Outcome, FippError> {
    fipp2_check_with(n, f, k, Strategy::Enumerate)
}

pub fn fipp2_check_with(
    n: u64,
    f: &SetFunction,
    k: u64,
    strategy: Strategy,
) -> Result<Fipp2Outcome, FippError> {
    match strategy {
        Strategy::Enumerate => {
            let total = coloring_count(n, k)?;
            let found: Vec<Result<Witness, Vec<u64>>> = (0..total)
                .into_par_iter()
                .map(|idx| {
                    let values = coloring_at(idx, n, k);
                    match least_witness(&values, f) {
                        Some((color, set)) => Ok(Witness {
                            coloring: values,
                            color,
                            set,
                        }),
                        None => Err(values),
                    }
                })
                .collect();
            let mut witnesses = Vec::with_capacity(found.len());
            for r in found {
                match r {
                    Ok(w) => witnesses.push(w),
                    Err(values) => return Ok(Fipp2Outcome::Fails(Coloring::new(values, n)?)),
                }
            }
            Ok(Fipp2Outcome::Holds(witnesses))
        }
        Strategy::Fan => {
            let mut witnesses = Vec::new();
            let mut prefix = Vec::new();
            match fan_check(n, f, k, &mut prefix, &mut witnesses) {
                Some(bad) => Ok(Fipp2Outcome::Fails(Coloring::new(bad, n)?)),
                None => Ok(Fipp2Outcome::Holds(witnesses)),
            }
        }
    }
}

/// DFS over coloring prefixes; a prefix that already holds a witness
/// covers all its extensions.
fn fan_check(
    n: u64,
    f: &SetFunction,
    k: u64,
    prefix: &mut Vec<u64>,
    witnesses: &mut Vec<Witness>,
) -> Option<Vec<u64>> {
    if let Some((color, set)) = least_witness(prefix, f) {
        witnesses.push(Witness {
            coloring: prefix.clone(),
            color,
            set,
        });
        return None;
    }
    if prefix.len() as u64 == k + 1 {
        return Some(prefix.clone());
    }
    for a in 0..=n {
        prefix.push(a);
        let bad = fan_check(n, f, k, prefix, witnesses);
        prefix.pop();
        if bad.is_some() {
            return bad;
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "k")]
pub enum Threshold {
    Least(u64),
    NoneUpTo(u64),
    UnknownAt(u64),
}

/// Least `k ≤ k_max` at which FIPP₂ holds for `F` and `n + 1` colors.
pub fn fipp2_threshold(
    n: u64,
    f: &SetFunction,
    k_max: u64,
    strategy: Strategy,
) -> Result<Threshold, FippError> {
    match strategy {
        Strategy::Enumerate => {
            for k in 0..=k_max {
                let total = coloring_count(n, k)?;
                let bad = (0..total)
                    .into_par_iter()
                    .find_any(|&idx| least_witness(&coloring_at(idx, n, k), f).is_none());
                if bad.is_none() {
                    return Ok(Threshold::Least(k));
                }
            }
            Ok(Threshold::NoneUpTo(k_max))
        }
        Strategy::Fan => {
            let report = fan_bound(&Fipp2Secure::new(n, f.clone()), k_max + 1)?;
            Ok(match report.result {
                FanResult::AllSecured { z, .. } => Threshold::Least(z),
                FanResult::BudgetExceeded { .. } => Threshold::NoneUpTo(k_max),
            })
        }
    }
}

/// Color `c` of `[k]` whose class `S` has every `l` with `A_l ∩ [k] = S`
/// big, as `(c, S)`; the least such color. `Err` carries the per-color
/// verdicts when there is none.
pub fn fipp3_class(
    values: &[u64],
    n: u64,
    f: &SetFunction,
    budget: u64,
) -> Result<(u64, FinSet), Vec<(u64, Cylinder)>> {
    let k = values.len() as u64 - 1;
    let mut verdicts = Vec::new();
    for (c, class) in classes_of(values, n) {
        match cylinder_bigness(f, &class, k, budget) {
            Cylinder::AllBig => return Ok((c, class)),
            other => verdicts.push((c, other)),
        }
    }
    Err(verdicts)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fipp3Outcome {
    Holds(Vec<Witness>),
    Fails {
        coloring: Coloring,
        refutations: Vec<(u64, Cylinder)>,
    },
    Unknown(Coloring),
}

pub fn fipp3_check(
    n: u64,
    f: &SetFunction,
    k: u64,
    budget: u64,
) -> Result<Fipp3Outcome, FippError> {
    let total = coloring_count(n, k)?;
    let verdicts: Vec<_> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let values = coloring_at(idx, n, k);
            let v = fipp3_class(&values, n, f, budget);
            (values, v)
        })
        .collect();
    let refuted =
        |v: &[(u64, Cylinder)]| v.iter().all(|(_, c)| matches!(c, Cylinder::RefutedBy(_)));
    if let Some((values, Err(refutations))) = verdicts
        .iter()
        .find(|(_, v)| matches!(v, Err(r) if refuted(r)))
    {
        return Ok(Fipp3Outcome::Fails {
            coloring: Coloring::new(values.clone(), n)?,
            refutations: refutations.clone(),
        });
    }
    if let Some((values, _)) = verdicts.iter().find(|(_, v)| v.is_err()) {
        return Ok(Fipp3Outcome::Unknown(Coloring::new(values.clone(), n)?));
    }
    Ok(Fipp3Outcome::Holds(
        verdicts
            .into_iter()
            .map(|(values, v)| {
                let (color, set) = v.expect("all colorings hold");
                Witness {
                    coloring: values,
                    color,
                    set,
                }
            })
            .collect(),
    ))
}

pub fn fipp3_threshold(
    n: u64,
    f: &SetFunction,
    k_max: u64,
    budget: u64,
) -> Result<Threshold, FippError> {
    for k in 0..=k_max {
        match fipp3_check(n, f, k, budget)? {
            Fipp3Outcome::Holds(_) => return Ok(Threshold::Least(k)),
            Fipp3Outcome::Unknown(_) => return Ok(Threshold::UnknownAt(k)),
            Fipp3Outcome::Fails { .. } => {}
        }
    }
    Ok(Threshold::NoneUpTo(k_max))
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Principle {
    #[serde(rename = "FIPP1-CE")]
    Fipp1Ce,
    #[serde(rename = "FIPP2")]
    Fipp2,
    #[serde(rename = "FIPP3")]
    Fipp3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessEntry {
    pub k: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<u64>>,
    pub color: u64,
    pub set: Vec<u64>,
    pub card: u64,
    pub value: u64,
    /// Canonical code in decimal, or `null` above [`REPORT_CODE_BITS`].
    pub code: Option<String>,
}

impl WitnessEntry {
    fn new(k: u64, coloring: Option<Vec<u64>>, color: u64, set: &FinSet, f: &SetFunction) -> Self {
        WitnessEntry {
            k,
            coloring,
            color,
            set: set.elements().to_vec(),
            card: set.card() as u64,
            value: f.eval_set(set),
            code: canon_code(set)
                .value_within(REPORT_CODE_BITS)
                .map(|v| v.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FippReport {
    pub principle: Principle,
    pub n: u64,
    pub k: u64,
    pub setfn: String,
    pub verdict: String,
    pub witnesses: Vec<WitnessEntry>,
    pub counterexample: Option<Vec<u64>>,
    pub exhaustive: bool,
}

impl FippReport {
    /// `(F(class 0), F(class 1))` for each `k` of a FIPP₁ counterexample
    /// report.
    pub fn fipp1_pairs(&self) -> Vec<(u64, u64)> {
        self.witnesses
            .chunks(2)
            .map(|pair| (pair[0].value, pair[1].value))
            .collect()
    }

    pub fn fipp2(n: u64, f: &SetFunction, k: u64, outcome: &Fipp2Outcome) -> Self {
        let (verdict, witnesses, counterexample) = match outcome {
            Fipp2Outcome::Holds(ws) => (
                "holds",
                ws.iter()
                    .map(|w| WitnessEntry::new(k, Some(w.coloring.clone()), w.color, &w.set, f))
                    .collect(),
                None,
            ),
            Fipp2Outcome::Fails(c) => ("fails", Vec::new(), Some(c.values().to_vec())),
        };
        FippReport {
            principle: Principle::Fipp2,
            n,
            k,
            setfn: f.name(),
            verdict: verdict.to_string(),
            witnesses,
            counterexample,
            exhaustive: true,
        }
    }

    pub fn fipp3(n: u64, f: &SetFunction, k: u64, outcome: &Fipp3Outcome) -> Self {
        let (verdict, witnesses, counterexample, exhaustive) = match outcome {
            Fipp3Outcome::Holds(ws) => (
                "holds",
                ws.iter()
                    .map(|w| WitnessEntry::new(k, Some(w.coloring.clone()), w.color, &w.set, f))
                    .collect(),
                None,
                true,
            ),
            Fipp3Outcome::Fails { coloring, .. } => {
                ("fails", Vec::new(), Some(coloring.values().to_vec()), true)
            }
            Fipp3Outcome::Unknown(c) => ("unknown", Vec::new(), Some(c.values().to_vec()), false),
        };
        FippReport {
            principle: Principle::Fipp3,
            n,
            k,
            setfn: f.name(),
            verdict: verdict.to_string(),
            witnesses,
            counterexample,
            exhaustive,
        }
    }
}

/// Checks `|A| ≤ F(A)` for both classes of [`tao_coloring`]`(k)`, for every
/// `k ≤ k_max`. Witness entries list the classes in order `(k, color)`.
pub fn verify_fipp1_ce(k_max: u64) -> Result<FippReport, FippError> {
    let f = parity_min_f();
    let rows: Vec<Result<Vec<WitnessEntry>, FippError>> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            color_classes(&tao_coloring(k))
                .into_iter()
                .map(|(c, class)| {
                    if f.is_big(&class) {
                        return Err(FippError::Fipp1Violation {
                            k,
                            color: c,
                            set: class,
                        });
                    }
                    Ok(WitnessEntry::new(k, None, c, &class, &f))
                })
                .collect()
        })
        .collect();
    let mut witnesses = Vec::new();
    for row in rows {
        witnesses.extend(row?);
    }
    Ok(FippReport {
        principle: Principle::Fipp1Ce,
        n: 1,
        k: k_max,
        setfn: f.name(),
        verdict: "counterexample-verified".to_string(),
        witnesses,
        counterexample: None,
        exhaustive: true,
    })
}

#[cfg(test)]
mod tests {
    use super::Strategy;
    use super::*;
    use crate::setfn::const_f;
    use proptest::prelude::*;

    fn set(xs: &[u64]) -> FinSet {
        FinSet::new(xs.iter().copied())
    }

    #[test]
    fn tao_examples() {
        assert_eq!(tao_coloring(2).values(), &[1, 1, 0]);
        assert_eq!(tao_coloring(3).values(), &[1, 0, 0, 1]);
        assert_eq!(tao_coloring(0).values(), &[0]);
        assert_eq!(tao_coloring(1).values(), &[0, 1]);
        let classes = color_classes(&tao_coloring(2));
        assert_eq!(classes[&0], set(&[2]));
        assert_eq!(classes[&1], set(&[0, 1]));
        let classes = color_classes(&tao_coloring(3));
        assert_eq!(classes[&0], set(&[1, 2]));
        assert_eq!(classes[&1], set(&[0, 3]));
        let classes = color_classes(&Coloring::constant(3, 1, 0).unwrap());
        assert_eq!(classes[&0], set(&[0, 1, 2, 3]));
        assert!(classes[&1].is_empty());
    }

    #[test]
    fn coloring_validation() {
        assert_eq!(Coloring::new(vec![], 1), Err(FippError::EmptyColoring));
        assert!(matches!(
            Coloring::new(vec![0, 2], 1),
            Err(FippError::ColorOutOfRange { position: 1, .. })
        ));
    }

    #[test]
    fn golden_table() {
        let report = verify_fipp1_ce(7).unwrap();
        assert_eq!(
            report.fipp1_pairs(),
            vec![
                (2, 2),
                (2, 3),
                (4, 3),
                (5, 5),
                (7, 5),
                (7, 7),
                (9, 7),
                (9, 9)
            ]
        );
        let k2: Vec<(u64, u64)> = report.witnesses[4..6]
            .iter()
            .map(|w| (w.card, w.value))
            .collect();
        assert_eq!(k2, vec![(1, 4), (2, 3)]);
        assert!(verify_fipp1_ce(512).is_ok());
    }

    #[test]
    fn fipp2_examples() {
        assert!(fipp2_check(1, &const_f(0), 0).unwrap().holds());
        assert_eq!(
            fipp2_check(1, &const_f(1), 1).unwrap(),
            Fipp2Outcome::Fails(Coloring::new(vec![0, 1], 1).unwrap())
        );
        assert!(fipp2_check(1, &const_f(1), 2).unwrap().holds());
        for s in [Strategy::Enumerate, Strategy::Fan] {
            assert_eq!(
                fipp2_check_with(1, &const_f(1), 1, s).unwrap(),
                Fipp2Outcome::Fails(Coloring::new(vec![0, 1], 1).unwrap())
            );
        }
    }

    #[test]
    fn least_witness_tie_break() {
        // both {0,1} (color 0) and {2,3} (color 1) qualify for const 1
        assert_eq!(
            least_witness(&[0, 0, 1, 1], &const_f(1)),
            Some((0, set(&[0, 1])))
        );
        assert_eq!(
            least_witness(&[1, 0, 0, 1], &const_f(1)),
            Some((1, set(&[0, 3])))
        );
        // the parity function: {0,2,4} has F = 0 + 0 + 2
        assert_eq!(
            least_witness(&[0, 1, 0, 1, 0], &parity_min_f()),
            Some((0, set(&[0, 2, 4])))
        );
    }

    #[test]
    fn thresholds() {
        for c in 0..=4 {
            for s in [Strategy::Enumerate, Strategy::Fan] {
                assert_eq!(
                    fipp2_threshold(1, &const_f(c), 12, s).unwrap(),
                    Threshold::Least(2 * c)
                );
            }
        }
        assert_eq!(
            fipp2_threshold(2, &const_f(1), 6, Strategy::Enumerate).unwrap(),
            Threshold::Least(3)
        );
        let e = fipp2_threshold(1, &parity_min_f(), 30, Strategy::Enumerate).unwrap();
        let f = fipp2_threshold(1, &parity_min_f(), 30, Strategy::Fan).unwrap();
        assert_eq!(e, f);
        assert_eq!(e, Threshold::Least(14));
        assert_eq!(parity_oracle_threshold(14), Some(14));
    }

    /// Bitmask oracle: `reach[m]` says some submask of `m` is big; FIPP₂
    /// holds at `k` when every coloring has a class reaching a big set.
    fn parity_oracle_threshold(k_max: u32) -> Option<u32> {
        let f = parity_min_f();
        (0..=k_max).find(|&k| {
            let full = (1usize << (k + 1)) - 1;
            let mut reach: Vec<bool> = (0..=full)
                .map(|m| f.is_big(&FinSet::new((0..=k as u64).filter(|b| m >> b & 1 == 1))))
                .collect();
            for b in 0..=k {
                for m in 0..=full {
                    if m >> b & 1 == 1 && reach[m ^ (1 << b)] {
                        reach[m] = true;
                    }
                }
            }
            (0..=full).all(|c| reach[c] || reach[full ^ c])
        })
    }

    #[test]
    fn fipp3_examples() {
        assert!(matches!(
            fipp3_check(1, &const_f(0), 0, 4).unwrap(),
            Fipp3Outcome::Holds(_)
        ));
        match fipp3_check(1, &const_f(1), 1, 4).unwrap() {
            Fipp3Outcome::Fails {
                coloring,
                refutations,
            } => {
                assert_eq!(coloring.values(), &[0, 1]);
                assert_eq!(refutations.len(), 2);
            }
            other => panic!("{other:?}"),
        }
        // the counterexample coloring is refuted at every k
        assert!(matches!(
            fipp3_check(1, &parity_min_f(), 4, 4).unwrap(),
            Fipp3Outcome::Fails { .. }
        ));
        assert_eq!(
            fipp3_threshold(1, &parity_min_f(), 8, 4).unwrap(),
            Threshold::NoneUpTo(8)
        );
        assert_eq!(
            fipp3_threshold(1, &const_f(0), 4, 4).unwrap(),
            Threshold::Least(0)
        );
        assert_eq!(
            fipp3_threshold(2, &const_f(0), 4, 4).unwrap(),
            Threshold::Least(0)
        );
        assert_eq!(
            fipp3_threshold(1, &const_f(1), 6, 4).unwrap(),
            Threshold::Least(2)
        );
        let zero = SetFunction::custom("zero", |_| 0);
        assert_eq!(
            fipp3_threshold(1, &zero, 3, 3).unwrap(),
            Threshold::UnknownAt(0)
        );
    }

    #[test]
    fn infinite_classes() {
        let ev = |p: Vec<u64>, q: Vec<u64>, n| EvPeriodic::new(p, q, n).unwrap();
        assert_eq!(
            infinite_color_classes(&ev(vec![], vec![0, 1], 1)),
            [0, 1].into()
        );
        assert_eq!(
            infinite_color_classes(&ev(vec![1, 1, 1], vec![0], 1)),
            [0].into()
        );
        assert_eq!(infinite_color_classes(&ev(vec![], vec![2], 2)), [2].into());
    }

    fn brute_holds(n: u64, k: u64, f: &SetFunction) -> bool {
        // every coloring has a monochromatic subset with |A| > F(A)
        (0..(n + 1).pow(k as u32 + 1)).all(|idx| {
            let values = coloring_at(idx, n, k);
            (0u64..1 << (k + 1)).any(|mask| {
                let a: Vec<u64> = (0..=k).filter(|b| mask >> b & 1 == 1).collect();
                let mono = a
                    .windows(2)
                    .all(|w| values[w[0] as usize] == values[w[1] as usize]);
                mono && f.is_big(&FinSet::new(a))
            })
        })
    }

    #[test]
    fn strategies_match_bruteforce() {
        for n in 0..=2 {
            for f in [const_f(0), const_f(1), const_f(2), parity_min_f()] {
                let k_max = if n == 2 { 5 } else { 7 };
                let brute = (0..=k_max).find(|&k| brute_holds(n, k, &f));
                let expect = brute.map_or(Threshold::NoneUpTo(k_max), Threshold::Least);
                for s in [Strategy::Enumerate, Strategy::Fan] {
                    assert_eq!(
                        fipp2_threshold(n, &f, k_max, s).unwrap(),
                        expect,
                        "n={n} {f:?} {s:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn finite_pigeonhole() {
        for n in 0..=2u64 {
            for k in 0..=10u64 {
                let need = (k + 1).div_ceil(n + 1) as usize;
                for idx in 0..(n + 1).pow(k as u32 + 1) {
                    let c = Coloring::new(coloring_at(idx, n, k), n).unwrap();
                    assert!(color_classes(&c).values().any(|s| s.card() >= need));
                }
            }
        }
    }

    #[test]
    fn fipp3_implies_fipp2_for_const() {
        for n in 0..=2 {
            for c in 0..=2 {
                for k in 0..=5 {
                    if let Fipp3Outcome::Holds(_) = fipp3_check(n, &const_f(c), k, 3).unwrap() {
                        assert!(fipp2_check(n, &const_f(c), k).unwrap().holds());
                    }
                }
            }
        }
    }

    #[test]
    fn report_shape() {
        let f = const_f(1);
        let r = FippReport::fipp2(1, &f, 2, &fipp2_check(1, &f, 2).unwrap());
        assert_eq!(r.witnesses.len(), 8);
        assert_eq!(r.verdict, "holds");
        assert_eq!(r.witnesses[0].set, vec![0, 1]);
        assert_eq!(
            r.witnesses[0].code.as_deref(),
            Some(canon_code(&set(&[0, 1])).value().to_string().as_str())
        );
    }

    proptest! {
        #[test]
        fn witnesses_revalidate(values in proptest::collection::vec(0u64..=2, 1..9), c in 0u64..3) {
            for f in [const_f(c), parity_min_f()] {
                if let Some((color, a)) = least_witness(&values, &f) {
                    prop_assert!(a.iter().all(|x| values[x as usize] == color));
                    prop_assert!(f.is_big(&a));
                    prop_assert!(FinSet::max(&a).is_none_or(|m| m < values.len() as u64));
                }
            }
        }

        #[test]
        fn least_witness_is_least(values in proptest::collection::vec(0u64..=1, 1..8), c in 0u64..3) {
            let f = const_f(c);
            let k = values.len() as u64 - 1;
            let best = (1u64..1 << (k + 1))
                .map(|mask| FinSet::new((0..=k).filter(|b| mask >> b & 1 == 1)))
                .filter(|a| {
                    let cs: BTreeSet<u64> = a.iter().map(|x| values[x as usize]).collect();
                    cs.len() == 1 && f.is_big(a)
                })
                .map(|a| canon_code(&a))
                .min();
            prop_assert_eq!(least_witness(&values, &f).map(|(_, a)| canon_code(&a)), best);
        }
    }
}
