//! Extensional set functions and their stability probes.
//!
//! A [`SetFunction`] is evaluated on a code `l` through `A_l = set_of(l)`,
//! which makes every function here extensional by construction. The three
//! library families (constant, the parity-minimum counterexample, and the
//! coloring function) carry exact cylinder oracles; custom functions fall
//! back to bounded search.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::codec::{canon_code, set_of, FinSet, SeqCode};
use crate::streams::{CodeSequence, EvPeriodic, InfiniteSet, StreamError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetFnError {
    #[error("sequence {0:?} carries no nestedness guarantee")]
    NotNested(String),
    #[error("sequence {0:?} carries no weak-convergence guarantee")]
    NotConvergent(String),
    #[error("bad set-function spec {spec:?}: {reason}")]
    Spec { spec: String, reason: String },
    #[error(transparent)]
    Stream(#[from] StreamError),
}

type Evaluator = Arc<dyn Fn(&FinSet) -> u64 + Send + Sync>;

#[derive(Clone)]
pub enum SetFunction {
    Const(u64),
    /// `min(A ∩ odd) + min(A ∩ even) + 2` with `min ∅ = 0`.
    ParityMin,
    /// `|A|` when the coloring is constant on `A`, else `0`.
    Coloring(EvPeriodic),
    Custom {
        name: String,
        eval: Evaluator,
    },
}

impl fmt::Debug for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFunction({})", self.name())
    }
}

pub fn const_f(c: u64) -> SetFunction {
    SetFunction::Const(c)
}

pub fn parity_min_f() -> SetFunction {
    SetFunction::ParityMin
}

pub fn coloring_f(f: EvPeriodic) -> SetFunction {
    SetFunction::Coloring(f)
}

/// Verdict of the cylinder question: does every `l` with
/// `A_l ∩ [k] = S` satisfy `|A_l| > F(l)`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "code")]
pub enum Cylinder {
    AllBig,
    RefutedBy(SeqCode),
    Unknown,
}

fn min_of_parity(a: &FinSet, odd: bool) -> Option<u64> {
    a.iter().find(|x| (x % 2 == 1) == odd)
}

fn parity_value(min_odd: Option<u64>, min_even: Option<u64>) -> u64 {
    min_odd.unwrap_or(0) + min_even.unwrap_or(0) + 2
}

impl SetFunction {
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(&FinSet) -> u64 + Send + Sync + 'static,
    ) -> Self {
        SetFunction::Custom {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    /// Spec string as accepted by [`FromStr`](std::str::FromStr).
    pub fn name(&self) -> String {
        match self {
            SetFunction::Const(c) => format!("const:{c}"),
            SetFunction::ParityMin => "parity".to_string(),
            SetFunction::Coloring(f) => format!("coloring:{f}:{}", f.bound()),
            SetFunction::Custom { name, .. } => name.clone(),
        }
    }

    pub fn eval_set(&self, a: &FinSet) -> u64 {
        match self {
            SetFunction::Const(c) => *c,
            SetFunction::ParityMin => parity_value(min_of_parity(a, true), min_of_parity(a, false)),
            SetFunction::Coloring(f) => {
                let mut colors = a.iter().map(|x| f.eval(x));
                match colors.next() {
                    Some(c0) if colors.all(|c| c == c0) => a.card() as u64,
                    Some(_) => 0,
                    None => 0,
                }
            }
            SetFunction::Custom { eval, .. } => eval(a),
        }
    }

    /// `F(l) = F(A_l)`.
    pub fn eval(&self, l: &SeqCode) -> u64 {
        self.eval_set(&set_of(l))
    }

    pub fn is_big(&self, a: &FinSet) -> bool {
        a.card() as u64 > self.eval_set(a)
    }

    /// Exact answer to the cylinder question, when the family has one.
    pub fn cylinder_oracle(&self, s: &FinSet, k: u64) -> Option<Cylinder> {
        match self {
            SetFunction::Const(c) => Some(if s.card() as u64 > *c {
                Cylinder::AllBig
            } else {
                Cylinder::RefutedBy(canon_code(s))
            }),
            SetFunction::ParityMin => {
                let has_odd = min_of_parity(s, true).is_some();
                let has_even = min_of_parity(s, false).is_some();
                if has_odd && has_even {
                    // minima are fixed; growing A_l only helps
                    return Some(if self.is_big(s) {
                        Cylinder::AllBig
                    } else {
                        Cylinder::RefutedBy(canon_code(s))
                    });
                }
                // add one element q of a missing parity, far enough out that
                // F ≥ q + 2 exceeds |S| + 1
                let want_odd = !has_odd;
                let mut q = k.max(s.card() as u64 + 2) + 1;
                if (q % 2 == 1) != want_odd {
                    q += 1;
                }
                let mut t = s.clone();
                t.insert(q);
                debug_assert!(!self.is_big(&t));
                Some(Cylinder::RefutedBy(canon_code(&t)))
            }
            SetFunction::Coloring(f) => {
                let mut colors = s.iter().map(|x| f.eval(x));
                let constant = match colors.next() {
                    Some(c0) => colors.all(|c| c == c0),
                    None => true,
                };
                Some(if constant {
                    Cylinder::RefutedBy(canon_code(s))
                } else {
                    Cylinder::AllBig
                })
            }
            SetFunction::Custom { .. } => None,
        }
    }

    /// Whether some `T ⊆ rest` makes `prefix ∪ T` big. `rest` must be sorted
    /// and lie above `prefix`.
    pub fn has_big_extension(&self, prefix: &FinSet, rest: &[u64]) -> bool {
        match self {
            SetFunction::Const(c) => (prefix.card() + rest.len()) as u64 > *c,
            SetFunction::Coloring(f) => {
                let mut colors = prefix.iter().chain(rest.iter().copied()).map(|x| f.eval(x));
                match colors.next() {
                    Some(c0) => colors.any(|c| c != c0),
                    None => false,
                }
            }
            SetFunction::ParityMin => {
                // enumerate the possible minima; the largest set with given
                // minima has the same F as any smaller one
                let options = |odd: bool| -> Vec<Option<u64>> {
                    match min_of_parity(prefix, odd) {
                        Some(m) => vec![Some(m)],
                        None => std::iter::once(None)
                            .chain(
                                rest.iter()
                                    .filter(|&&x| (x % 2 == 1) == odd)
                                    .map(|&x| Some(x)),
                            )
                            .collect(),
                    }
                };
                let odd_options = options(true);
                let even_options = options(false);
                for &mo in &odd_options {
                    for &me in &even_options {
                        let extra = rest
                            .iter()
                            .filter(|&&x| {
                                let bound = if x % 2 == 1 { mo } else { me };
                                bound.is_some_and(|b| x >= b)
                            })
                            .count();
                        if (prefix.card() + extra) as u64 > parity_value(mo, me) {
                            return true;
                        }
                    }
                }
                false
            }
            SetFunction::Custom { .. } => {
                if rest.len() > 16 {
                    return true;
                }
                (0u32..1 << rest.len()).any(|mask| {
                    let mut t = prefix.clone();
                    for (b, &x) in rest.iter().enumerate() {
                        if mask >> b & 1 == 1 {
                            t.insert(x);
                        }
                    }
                    self.is_big(&t)
                })
            }
        }
    }
}

impl std::str::FromStr for SetFunction {
    type Err = SetFnError;

    /// `const:<c>`, `parity` or `coloring:<prefix;period>:<n>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| SetFnError::Spec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["parity"] => Ok(SetFunction::ParityMin),
            ["const", c] => c
                .trim()
                .parse()
                .map(SetFunction::Const)
                .map_err(|_| bad("constant must be a natural")),
            ["coloring", ev, n] => {
                let n: u64 = n
                    .trim()
                    .parse()
                    .map_err(|_| bad("color bound must be a natural"))?;
                let f: EvPeriodic = ev.parse()?;
                Ok(SetFunction::Coloring(f.with_bound(n)?))
            }
            _ => Err(bad(
                "expected const:<c>, parity or coloring:<prefix;period>:<n>",
            )),
        }
    }
}

/// Like [`SetFunction::cylinder_oracle`], falling back to a refutation
/// search over `T ⊆ (k, k + budget]` for custom functions.
pub fn cylinder_bigness(f: &SetFunction, s: &FinSet, k: u64, budget: u64) -> Cylinder {
    if let Some(answer) = f.cylinder_oracle(s, k) {
        return answer;
    }
    let budget = budget.min(20);
    for mask in 0u64..1 << budget {
        let mut t = s.clone();
        for b in 0..budget {
            if mask >> b & 1 == 1 {
                t.insert(k + 1 + b);
            }
        }
        if !f.is_big(&t) {
            return Cylinder::RefutedBy(canon_code(&t));
        }
    }
    Cylinder::Unknown
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum StabilityVerdict {
    Stable {
        index: u64,
        value: u64,
    },
    /// `F(l_i) ≠ F(l_j)` with `i < j`.
    Violated {
        i: u64,
        j: u64,
        value_i: u64,
        value_j: u64,
    },
    Inconclusive {
        depth: u64,
    },
}

impl StabilityVerdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, StabilityVerdict::Stable { .. })
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, StabilityVerdict::Violated { .. })
    }
}

/// Reads `F(l_0), ..., F(l_depth)`. Stable when the last change happens in
/// the first half of the window; Violated when it happens in the second
/// half after at least one earlier change.
fn classify(values: &[u64]) -> StabilityVerdict {
    let depth = values.len() as u64 - 1;
    let changes: Vec<u64> = (1..values.len())
        .filter(|&j| values[j] != values[j - 1])
        .map(|j| j as u64)
        .collect();
    match changes.last() {
        None => StabilityVerdict::Stable {
            index: 0,
            value: values[0],
        },
        Some(&j) if j <= depth / 2 => StabilityVerdict::Stable {
            index: j,
            value: values[j as usize],
        },
        Some(&j) if changes.len() >= 2 => StabilityVerdict::Violated {
            i: j - 1,
            j,
            value_i: values[j as usize - 1],
            value_j: values[j as usize],
        },
        Some(_) => StabilityVerdict::Inconclusive { depth },
    }
}

fn probe(f: &SetFunction, seq: &CodeSequence, depth: u64) -> StabilityVerdict {
    let values: Vec<u64> = (0..=depth).map(|m| f.eval(&seq.at(m))).collect();
    classify(&values)
}

/// Probes asymptotic stability along a nested sequence.
pub fn probe_as(
    f: &SetFunction,
    chain: &CodeSequence,
    depth: u64,
) -> Result<StabilityVerdict, SetFnError> {
    if !chain.is_nested() {
        return Err(SetFnError::NotNested(chain.label().to_string()));
    }
    Ok(probe(f, chain, depth))
}

/// Probes stability along a weakly convergent sequence.
pub fn probe_asnis(
    f: &SetFunction,
    seq: &CodeSequence,
    depth: u64,
) -> Result<StabilityVerdict, SetFnError> {
    if seq.limit().is_none() {
        return Err(SetFnError::NotConvergent(seq.label().to_string()));
    }
    Ok(probe(f, seq, depth))
}

/// `A_{l_m} = (evens ∩ [2m]) ∪ {2m + 1}`; converges weakly to the evens
/// while the parity-minimum function takes the value `2m + 3`.
pub fn asnis_witness_parity() -> CodeSequence {
    CodeSequence::converging("(E ∩ [2m]) ∪ {2m+1}", InfiniteSet::evens(), |m| {
        let mut s: Vec<u64> = (0..=m).map(|i| 2 * i).collect();
        s.push(2 * m + 1);
        SeqCode::from_seq(s)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "value")]
pub enum LimitValue {
    Value(u64),
    Unstable,
}

/// Stable tail value of `F` along the canonical chain of `A`.
pub fn limit_value(f: &SetFunction, a: &InfiniteSet, depth: u64) -> LimitValue {
    match probe(f, &CodeSequence::canonical(a), depth) {
        StabilityVerdict::Stable { value, .. } => LimitValue::Value(value),
        _ => LimitValue::Unstable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum StabilityPoint {
    Point { c: u64, d: u64 },
    NotFoundUpTo { budget: u64 },
}

/// Least `d ≤ budget` such that every `l` with `A_l ∩ [d] = A ∩ [d]` and
/// elements `≤ d + budget` has `F(l) = F(A ∩ [d])`.
pub fn stability_point(f: &SetFunction, a: &InfiniteSet, budget: u64) -> StabilityPoint {
    let width = budget.min(20);
    for d in 0..=budget {
        let base = a.up_to(d);
        let c = f.eval_set(&base);
        let stable = (0u64..1 << width).all(|mask| {
            let mut t = base.clone();
            for b in 0..width {
                if mask >> b & 1 == 1 {
                    t.insert(d + 1 + b);
                }
            }
            f.eval_set(&t) == c
        });
        if stable {
            return StabilityPoint::Point { c, d };
        }
    }
    StabilityPoint::NotFoundUpTo { budget }
}
