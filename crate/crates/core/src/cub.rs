//! Uniform bounds over the fan `[n]^ℕ`.
//!
//! A [`SecurePrefix`] answers, for a finite prefix `σ`, whether every `f`
//! extending `σ` already has a witness `x` (and which). [`fan_bound`]
//! searches the tree of unsecured prefixes; when it dies out below the
//! depth budget, the largest witness seen is a uniform bound. Associates,
//! the budgeted Π⁰₁ search and the no-continuity demonstration live here
//! too.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::codec::SeqCode;
use crate::fipp::{fipp3_class, least_witness};
use crate::setfn::SetFunction;
use crate::sigma00::{eval, modulus, Env, Formula, Sigma00Error, ZeroExtended};
use crate::streams::EvPeriodic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CubError {
    #[error("prefix {prefix:?} is secured with {expected}, but its extension {extension:?} answers {found:?}")]
    NeighborhoodViolation {
        prefix: Vec<u64>,
        extension: Vec<u64>,
        expected: u64,
        found: Security,
    },
    #[error(
        "bigness of the color classes of {prefix:?} holds at k = {held} but fails at k = {failed}"
    )]
    MonotonicityViolation {
        prefix: Vec<u64>,
        held: u64,
        failed: u64,
    },
    #[error(transparent)]
    Formula(#[from] Sigma00Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "x")]
pub enum Security {
    Secured(u64),
    Unsecured { oracle_unknown: bool },
}

impl Security {
    pub const UNSECURED: Security = Security::Unsecured {
        oracle_unknown: false,
    };

    pub fn witness(self) -> Option<u64> {
        match self {
            Security::Secured(x) => Some(x),
            Security::Unsecured { .. } => None,
        }
    }
}

/// A monotone security predicate on prefixes over `[n]`.
///
/// `Secured(x)` on `σ` must persist, with the same `x`, on every extension.
pub trait SecurePrefix: Sync {
    /// `n`, the largest value a prefix entry can take.
    fn branching(&self) -> u64;

    fn query(&self, sigma: &[u64]) -> Result<Security, CubError>;
}

/// Wraps a closure.
pub struct FnSecure<F> {
    n: u64,
    f: F,
}

impl<F: Fn(&[u64]) -> Security + Sync> FnSecure<F> {
    pub fn new(n: u64, f: F) -> Self {
        FnSecure { n, f }
    }
}

impl<F: Fn(&[u64]) -> Security + Sync> SecurePrefix for FnSecure<F> {
    fn branching(&self) -> u64 {
        self.n
    }

    fn query(&self, sigma: &[u64]) -> Result<Security, CubError> {
        Ok((self.f)(sigma))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum FanResult {
    /// Every `f` is secured by a prefix of length `≤ depth`, with a witness
    /// `≤ z`.
    AllSecured {
        z: u64,
        depth: u64,
    },
    BudgetExceeded {
        path: Vec<u64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Telemetry {
    pub nodes_visited: u64,
    /// Secured nodes, each cutting off a subtree.
    pub prunes: u64,
    pub oracle_unknown: u64,
    pub neighborhood_checks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FanReport {
    pub result: FanResult,
    pub telemetry: Telemetry,
}

struct Search<'p, P: ?Sized> {
    pred: &'p P,
    budget: u64,
    z: u64,
    depth: u64,
    stats: Telemetry,
}

impl<P: SecurePrefix + ?Sized> Search<'_, P> {
    /// Returns the first unsecured path at the budget, if any.
    fn visit(&mut self, sigma: &mut Vec<u64>) -> Result<Option<Vec<u64>>, CubError> {
        self.stats.nodes_visited += 1;
        let n = self.pred.branching();
        match self.pred.query(sigma)? {
            Security::Secured(x) => {
                self.stats.prunes += 1;
                self.z = self.z.max(x);
                self.depth = self.depth.max(sigma.len() as u64);
                for a in 0..=n {
                    sigma.push(a);
                    let child = self.pred.query(sigma);
                    self.stats.neighborhood_checks += 1;
                    let extension = sigma.clone();
                    sigma.pop();
                    let found = child?;
                    if found != Security::Secured(x) {
                        return Err(CubError::NeighborhoodViolation {
                            prefix: sigma.clone(),
                            extension,
                            expected: x,
                            found,
                        });
                    }
                }
                Ok(None)
            }
            Security::Unsecured { oracle_unknown } => {
                if oracle_unknown {
                    self.stats.oracle_unknown += 1;
                }
                if sigma.len() as u64 >= self.budget {
                    return Ok(Some(sigma.clone()));
                }
                for a in 0..=n {
                    sigma.push(a);
                    let r = self.visit(sigma);
                    sigma.pop();
                    if let Some(path) = r? {
                        return Ok(Some(path));
                    }
                }
                Ok(None)
            }
        }
    }
}

/// Explores unsecured prefixes in lexicographic order up to length
/// `depth_budget`.
pub fn fan_bound<P: SecurePrefix + ?Sized>(
    pred: &P,
    depth_budget: u64,
) -> Result<FanReport, CubError> {
    let mut search = Search {
        pred,
        budget: depth_budget,
        z: 0,
        depth: 0,
        stats: Telemetry::default(),
    };
    let result = match search.visit(&mut Vec::new())? {
        Some(path) => FanResult::BudgetExceeded { path },
        None => FanResult::AllSecured {
            z: search.z,
            depth: search.depth,
        },
    };
    Ok(FanReport {
        result,
        telemetry: search.stats,
    })
}

/// Secured at the least `k` such that the prefix, read as a coloring,
/// has a monochromatic `A ⊆ [k]` with `|A| > F(A)`.
#[derive(Debug, Clone)]
pub struct Fipp2Secure {
    n: u64,
    f: SetFunction,
}

impl Fipp2Secure {
    pub fn new(n: u64, f: SetFunction) -> Self {
        Fipp2Secure { n, f }
    }
}

impl SecurePrefix for Fipp2Secure {
    fn branching(&self) -> u64 {
        self.n
    }

    fn query(&self, sigma: &[u64]) -> Result<Security, CubError> {
        if least_witness(sigma, &self.f).is_none() {
            return Ok(Security::UNSECURED);
        }
        let k = (1..=sigma.len())
            .find(|&len| least_witness(&sigma[..len], &self.f).is_some())
            .expect("the full prefix has a witness");
        Ok(Security::Secured(k as u64 - 1))
    }
}

/// Secured at the least `k` such that some color class `S` of `σ` on
/// `[k]` has `|A_l| > F(l)` for every `l` with `A_l ∩ [k] = S`.
#[derive(Debug, Clone)]
pub struct Fipp3Secure {
    n: u64,
    f: SetFunction,
    budget: u64,
}

impl Fipp3Secure {
    pub fn new(n: u64, f: SetFunction, budget: u64) -> Self {
        Fipp3Secure { n, f, budget }
    }
}

impl SecurePrefix for Fipp3Secure {
    fn branching(&self) -> u64 {
        self.n
    }

    fn query(&self, sigma: &[u64]) -> Result<Security, CubError> {
        let mut held = None;
        for len in 1..=sigma.len() {
            let k = len as u64 - 1;
            match fipp3_class(&sigma[..len], self.n, &self.f, self.budget) {
                Ok(_) => {
                    held.get_or_insert(k);
                }
                Err(verdicts) => {
                    if let Some(h) = held {
                        return Err(CubError::MonotonicityViolation {
                            prefix: sigma.to_vec(),
                            held: h,
                            failed: k,
                        });
                    }
                    let unknown = verdicts
                        .iter()
                        .any(|(_, v)| *v == crate::setfn::Cylinder::Unknown);
                    if unknown {
                        return Ok(Security::Unsecured {
                            oracle_unknown: true,
                        });
                    }
                }
            }
        }
        Ok(held.map_or(Security::UNSECURED, Security::Secured))
    }
}

/// Secured at the least `x ≤ x_max` with `modulus(φ, x) ≤ |σ|` and
/// `φ(σ⌢o, x)`. Since the modulus grows with `x`, every smaller candidate
/// has already been read off `σ`, so the answer persists on extensions.
#[derive(Debug, Clone)]
pub struct FormulaSecure {
    phi: Formula,
    var: String,
    n: u64,
    x_max: u64,
}

impl FormulaSecure {
    pub fn new(phi: Formula, var: &str, n: u64, x_max: u64) -> Self {
        FormulaSecure {
            phi,
            var: var.to_string(),
            n,
            x_max,
        }
    }
}

impl SecurePrefix for FormulaSecure {
    fn branching(&self) -> u64 {
        self.n
    }

    fn query(&self, sigma: &[u64]) -> Result<Security, CubError> {
        for x in 0..=self.x_max {
            if modulus(&self.phi, x)? > sigma.len() as u64 {
                break;
            }
            let env: Env = [(self.var.clone(), x)].into_iter().collect();
            if eval(&self.phi, &env, &ZeroExtended(sigma))? {
                return Ok(Security::Secured(x));
            }
        }
        Ok(Security::UNSECURED)
    }
}

type AssocFn = Arc<dyn Fn(&[u64]) -> u64 + Send + Sync>;

/// A function on prefix codes over `[n]`; a positive value `v` on a prefix
/// of `β` reads as `φ(β) = v - 1`.
#[derive(Clone)]
pub struct Associate {
    n: u64,
    alpha: AssocFn,
}

impl std::fmt::Debug for Associate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Associate")
            .field("n", &self.n)
            .finish_non_exhaustive()
    }
}

impl Associate {
    pub fn new(n: u64, alpha: impl Fn(&[u64]) -> u64 + Send + Sync + 'static) -> Self {
        Associate {
            n,
            alpha: Arc::new(alpha),
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn at(&self, sigma: &[u64]) -> u64 {
        (self.alpha)(sigma)
    }

    pub fn at_code(&self, l: &SeqCode) -> u64 {
        self.at(l.as_slice())
    }
}

/// `α'(σ) = α(τ)` for the shortest `τ ⊆ σ` with `α(τ) > 0`, else `0`.
pub fn neighborhood_normalize(alpha: &Associate) -> Associate {
    let inner = alpha.alpha.clone();
    Associate::new(alpha.n, move |sigma| {
        (0..=sigma.len())
            .map(|m| inner(&sigma[..m]))
            .find(|&v| v > 0)
            .unwrap_or(0)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "value")]
pub enum AssocValue {
    Value(u64),
    NoWitnessUpTo(u64),
}

/// `α(f̄m) - 1` at the least `m ≤ budget` with `α(f̄m) > 0`.
pub fn eval_associate(alpha: &Associate, f: &EvPeriodic, budget: u64) -> AssocValue {
    let values = f.take(budget);
    (0..=budget as usize)
        .map(|m| alpha.at(&values[..m]))
        .find(|&v| v > 0)
        .map_or(AssocValue::NoWitnessUpTo(budget), |v| {
            AssocValue::Value(v - 1)
        })
}

/// `α(σ) = x + 1` when `σ` is secured with `x`, else `0`. A query error
/// also reads as `0`.
pub fn associate_of<P: SecurePrefix + Send + 'static>(pred: P) -> Associate {
    let n = pred.branching();
    Associate::new(n, move |sigma| match pred.query(sigma) {
        Ok(Security::Secured(x)) => x + 1,
        _ => 0,
    })
}

/// Decidable tests `A(prefix, x, w)` for `∀w A(f, x, w)`.
pub trait Pi01Family: Sync {
    fn test(&self, prefix: &[u64], x: u64, w: u64) -> bool;

    /// Prefix length that decides every test with `x ≤ x_max`, `w ≤ w_max`.
    fn modulus(&self, x_max: u64, w_max: u64) -> u64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pi01Budgets {
    pub x_max: u64,
    pub w_max: u64,
    pub depth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Pi01Result {
    /// Every prefix has some `x ≤ z` passing every `w ≤ w_max`. Only as
    /// good as the budgets: larger `w_max` may break it.
    Found {
        z: u64,
        budget_relative: bool,
    },
    /// For each `x ≤ x_max`, the first `w` failing on `path`.
    Refuted {
        path: Vec<u64>,
        failures: Vec<(u64, u64)>,
    },
    Unknown {
        reason: String,
    },
}

/// Runs the tests over every `[n]`-prefix of the family's modulus length.
pub fn pi01_bound_search<F: Pi01Family + ?Sized>(
    family: &F,
    n: u64,
    budgets: Pi01Budgets,
) -> Pi01Result {
    let len = family.modulus(budgets.x_max, budgets.w_max);
    if budgets.depth < len {
        return Pi01Result::Unknown {
            reason: format!("depth {} is below the modulus {len}", budgets.depth),
        };
    }
    if (n + 1).checked_pow(len as u32).is_none_or(|c| c > 1 << 24) {
        return Pi01Result::Unknown {
            reason: format!("{}^{len} prefixes exceed the search limit", n + 1),
        };
    }
    let passes = |p: &[u64], x: u64| (0..=budgets.w_max).all(|w| family.test(p, x, w));
    let mut prefix = vec![0u64; len as usize];
    let mut z = 0;
    loop {
        match (0..=budgets.x_max).find(|&x| passes(&prefix, x)) {
            Some(x) => z = z.max(x),
            None => {
                let failures = (0..=budgets.x_max)
                    .map(|x| {
                        let w = (0..=budgets.w_max)
                            .find(|&w| !family.test(&prefix, x, w))
                            .expect("x fails some w");
                        (x, w)
                    })
                    .collect();
                return Pi01Result::Refuted {
                    path: prefix,
                    failures,
                };
            }
        }
        if !crate::sigma00::odometer(&mut prefix, n) {
            return Pi01Result::Found {
                z,
                budget_relative: true,
            };
        }
    }
}

/// Tests from a closure, with a declared modulus.
pub struct FnFamily<F, M> {
    test: F,
    modulus: M,
}

impl<F, M> FnFamily<F, M>
where
    F: Fn(&[u64], u64, u64) -> bool + Sync,
    M: Fn(u64, u64) -> u64 + Sync,
{
    pub fn new(test: F, modulus: M) -> Self {
        FnFamily { test, modulus }
    }
}

impl<F, M> Pi01Family for FnFamily<F, M>
where
    F: Fn(&[u64], u64, u64) -> bool + Sync,
    M: Fn(u64, u64) -> u64 + Sync,
{
    fn test(&self, prefix: &[u64], x: u64, w: u64) -> bool {
        (self.test)(prefix, x, w)
    }

    fn modulus(&self, x_max: u64, w_max: u64) -> u64 {
        (self.modulus)(x_max, w_max)
    }
}

/// `∀y (f(y) = 0 → f(x) = 0)`: tested at `w` as `f(w) = 0 → f(x) = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoContinuity;

impl Pi01Family for NoContinuity {
    fn test(&self, prefix: &[u64], x: u64, w: u64) -> bool {
        let at = |i: u64| prefix.get(i as usize).copied().unwrap_or(0);
        at(w) != 0 || at(x) == 0
    }

    fn modulus(&self, x_max: u64, w_max: u64) -> u64 {
        x_max.max(w_max) + 1
    }
}

/// `f` with `f(x) = 1` for `x ≤ z`, `f(z + 1) = 0`, then `1` forever.
pub fn nocont_demo(z: u64) -> EvPeriodic {
    let mut prefix = vec![1; z as usize + 1];
    prefix.push(0);
    EvPeriodic::new(prefix, vec![1], 1).expect("binary")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NocontCheck {
    pub z: u64,
    /// Least `y` with `f(y) = 0`.
    pub zero_at: Option<u64>,
    /// `∃y f(y) = 0` and no `x ≤ z` has `f(x) = 0`.
    pub refutes: bool,
}

/// Checks whether `f` refutes the bound `z` for the no-continuity
/// statement.
pub fn verify_nocont(f: &EvPeriodic, z: u64) -> NocontCheck {
    let horizon = (f.prefix().len() + f.period().len()) as u64;
    let zero_at = (0..horizon).find(|&y| f.eval(y) == 0);
    NocontCheck {
        z,
        zero_at,
        refutes: zero_at.is_some_and(|y| y > z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fipp::{fipp2_threshold, Strategy, Threshold};
    use crate::setfn::{const_f, parity_min_f};
    use crate::sigma00::parse;
    use proptest::prelude::*;

    fn leaves(n: u64, d: u64) -> impl Iterator<Item = Vec<u64>> {
        (0..(n + 1).pow(d as u32)).map(move |idx| {
            let mut v = vec![0; d as usize];
            let mut r = idx;
            for s in v.iter_mut().rev() {
                *s = r % (n + 1);
                r /= n + 1;
            }
            v
        })
    }

    fn first_one_pred() -> FnSecure<impl Fn(&[u64]) -> Security + Sync> {
        FnSecure::new(1, |s: &[u64]| {
            if let Some(i) = s.iter().take(3).position(|&v| v == 1) {
                Security::Secured(i as u64)
            } else if s.len() >= 3 {
                Security::Secured(3)
            } else {
                Security::UNSECURED
            }
        })
    }

    #[test]
    fn fan_examples() {
        let top = FnSecure::new(1, |_: &[u64]| Security::Secured(0));
        assert_eq!(
            fan_bound(&top, 5).unwrap().result,
            FanResult::AllSecured { z: 0, depth: 0 }
        );
        let report = fan_bound(&first_one_pred(), 5).unwrap();
        assert_eq!(report.result, FanResult::AllSecured { z: 3, depth: 3 });
        assert_eq!(report.telemetry.prunes, 4);
        // the budget cuts the all-zero path first
        assert_eq!(
            fan_bound(&first_one_pred(), 2).unwrap().result,
            FanResult::BudgetExceeded { path: vec![0, 0] }
        );
    }

    #[test]
    fn fan_detects_bad_predicates() {
        // the witness depends on the prefix length
        let bad = FnSecure::new(1, |s: &[u64]| Security::Secured(s.len() as u64));
        assert!(matches!(
            fan_bound(&bad, 3),
            Err(CubError::NeighborhoodViolation { expected: 0, .. })
        ));
    }

    #[test]
    fn fipp2_adapter() {
        let a0 = Fipp2Secure::new(1, const_f(0));
        assert_eq!(a0.query(&[0]).unwrap(), Security::Secured(0));
        let a1 = Fipp2Secure::new(1, const_f(1));
        assert_eq!(a1.query(&[0, 1]).unwrap(), Security::UNSECURED);
        assert_eq!(a1.query(&[0, 1, 0]).unwrap(), Security::Secured(2));
        // z is the threshold; the securing prefixes have length threshold + 1
        assert_eq!(
            fan_bound(&a1, 10).unwrap().result,
            FanResult::AllSecured { z: 2, depth: 3 }
        );
        assert_eq!(
            fipp2_threshold(1, &const_f(1), 10, Strategy::Enumerate).unwrap(),
            Threshold::Least(2)
        );
        assert_eq!(associate_of(a1).at(&[0, 1, 0]), 3);
    }

    #[test]
    fn fipp3_adapter() {
        let a0 = Fipp3Secure::new(1, const_f(0), 4);
        assert_eq!(a0.query(&[0]).unwrap(), Security::Secured(0));
        let a1 = Fipp3Secure::new(1, const_f(1), 4);
        assert_eq!(a1.query(&[0, 1]).unwrap(), Security::UNSECURED);
        // the counterexample coloring of [2] has no big class
        let ap = Fipp3Secure::new(1, parity_min_f(), 4);
        assert_eq!(ap.query(&[1, 1, 0]).unwrap(), Security::UNSECURED);
        assert!(matches!(
            fan_bound(&ap, 6).unwrap().result,
            FanResult::BudgetExceeded { .. }
        ));
        let unknown = Fipp3Secure::new(1, SetFunction::custom("zero", |_| 0), 3);
        assert_eq!(
            unknown.query(&[0]).unwrap(),
            Security::Unsecured {
                oracle_unknown: true
            }
        );
        let report = fan_bound(&unknown, 2).unwrap();
        assert!(report.telemetry.oracle_unknown > 0);
        assert_eq!(
            fan_bound(&Fipp3Secure::new(1, const_f(1), 4), 10)
                .unwrap()
                .result,
            FanResult::AllSecured { z: 2, depth: 3 }
        );
    }

    #[test]
    fn formula_adapter() {
        // x is a position holding 1
        let phi = parse("pair(x,1) in f").unwrap();
        let p = FormulaSecure::new(phi, "x", 1, 5);
        assert_eq!(p.query(&[0, 1]).unwrap(), Security::UNSECURED);
        // modulus(φ, 1) = pair(1,1) + 1 = 5
        assert_eq!(p.query(&[0, 1, 0, 0, 0]).unwrap(), Security::Secured(1));
        let tot = FormulaSecure::new(parse("pair(x,0) in f | pair(x,1) in f").unwrap(), "x", 1, 3);
        assert_eq!(
            fan_bound(&tot, 4).unwrap().result,
            FanResult::AllSecured { z: 0, depth: 2 }
        );
    }

    #[test]
    fn associate_examples() {
        let one = Associate::new(1, |_| 1);
        assert_eq!(
            eval_associate(&one, &EvPeriodic::zeros(), 5),
            AssocValue::Value(0)
        );
        let zero = Associate::new(1, |_| 0);
        assert_eq!(
            eval_associate(&zero, &EvPeriodic::zeros(), 5),
            AssocValue::NoWitnessUpTo(5)
        );
        let exact = Associate::new(1, |s| u64::from(s == [1]) * 4);
        let norm = neighborhood_normalize(&exact);
        assert_eq!(norm.at(&[1, 0]), 4);
        assert_eq!(norm.at(&[0, 1]), 0);
        let root = neighborhood_normalize(&Associate::new(1, |s| if s.is_empty() { 5 } else { 0 }));
        assert!([vec![], vec![0], vec![1, 1, 0]]
            .iter()
            .all(|s| root.at(s) == 5));
        let always = associate_of(FnSecure::new(1, |_: &[u64]| Security::Secured(0)));
        assert!(leaves(1, 3).all(|s| always.at(&s) == 1));
        let never = associate_of(FnSecure::new(1, |_: &[u64]| Security::UNSECURED));
        assert!(leaves(1, 3).all(|s| never.at(&s) == 0));
        let a = associate_of(first_one_pred());
        let f = EvPeriodic::new(vec![0, 0], vec![1], 1).unwrap();
        assert_eq!(eval_associate(&a, &f, 10), AssocValue::Value(2));
        assert_eq!(
            eval_associate(&a, &EvPeriodic::zeros(), 10),
            AssocValue::Value(3)
        );
    }

    #[test]
    fn pi01_examples() {
        let truth = FnFamily::new(|_: &[u64], _, _| true, |_, _| 0);
        let b = Pi01Budgets {
            x_max: 3,
            w_max: 3,
            depth: 4,
        };
        assert_eq!(
            pi01_bound_search(&truth, 1, b),
            Pi01Result::Found {
                z: 0,
                budget_relative: true
            }
        );
        let taut = FnFamily::new(
            |p: &[u64], x, _| p[x as usize] != 0 || p[x as usize] == 0,
            |x, _| x + 1,
        );
        assert!(matches!(
            pi01_bound_search(&taut, 1, b),
            Pi01Result::Found { z: 0, .. }
        ));
        let never = FnFamily::new(|_: &[u64], _, w| w < 2, |_, _| 0);
        match pi01_bound_search(&never, 1, b) {
            Pi01Result::Refuted { path, failures } => {
                assert!(path.is_empty());
                assert_eq!(failures, vec![(0, 2), (1, 2), (2, 2), (3, 2)]);
            }
            other => panic!("{other:?}"),
        }
        let shallow = Pi01Budgets { depth: 2, ..b };
        assert!(matches!(
            pi01_bound_search(&NoContinuity, 1, shallow),
            Pi01Result::Unknown { .. }
        ));
    }

    #[test]
    fn no_uniform_bound() {
        let mut last = None;
        for b in 0..=10 {
            let budgets = Pi01Budgets {
                x_max: b,
                w_max: b,
                depth: b + 1,
            };
            let z = match pi01_bound_search(&NoContinuity, 1, budgets) {
                Pi01Result::Found { z, budget_relative } => {
                    assert!(budget_relative);
                    z
                }
                other => panic!("{other:?}"),
            };
            assert_eq!(z, b);
            if let Some(prev) = last {
                assert!(z > prev);
            }
            last = Some(z);
            // the bound found at this budget fails one step further out
            let f = nocont_demo(z);
            assert!(verify_nocont(&f, z).refutes);
        }
    }

    #[test]
    fn nocont_examples() {
        let f = nocont_demo(0);
        assert_eq!((f.prefix(), f.period()), (&[1, 0][..], &[1][..]));
        let f = nocont_demo(3);
        assert_eq!(f.take(6), vec![1, 1, 1, 1, 0, 1]);
        let check = verify_nocont(&nocont_demo(100), 100);
        assert_eq!(check.zero_at, Some(101));
        assert!(check.refutes);
        assert!(!verify_nocont(&nocont_demo(3), 4).refutes);
        assert!(!verify_nocont(&EvPeriodic::constant(1), 4).refutes);
    }

    fn arb_table() -> impl proptest::strategy::Strategy<Value = Vec<u64>> {
        // α on all prefixes of length ≤ 4 over [1], indexed by (len, value)
        proptest::collection::vec(prop_oneof![3 => Just(0u64), 1 => 1u64..5], 31)
    }

    fn table_index(s: &[u64]) -> usize {
        let mut idx = (1usize << s.len()) - 1;
        for (i, &b) in s.iter().enumerate() {
            idx += (b as usize) << (s.len() - 1 - i);
        }
        idx
    }

    proptest! {
        #[test]
        fn normalized_is_neighborhood(table in arb_table(), sigma in proptest::collection::vec(0u64..=1, 0..5), ext in proptest::collection::vec(0u64..=1, 0..4)) {
            let alpha = Associate::new(1, move |s: &[u64]| table.get(table_index(s)).copied().unwrap_or(0));
            let norm = neighborhood_normalize(&alpha);
            let v = norm.at(&sigma);
            let mut tau = sigma.clone();
            tau.extend(ext);
            if v > 0 {
                prop_assert_eq!(norm.at(&tau), v);
            }
            // agreement on first-securing prefixes
            if alpha.at(&sigma) > 0 && (0..sigma.len()).all(|m| alpha.at(&sigma[..m]) == 0) {
                prop_assert_eq!(v, alpha.at(&sigma));
            }
        }

        #[test]
        fn associate_matches_least_witness(prefix in proptest::collection::vec(0u64..=1, 0..5), period in proptest::collection::vec(0u64..=1, 1..4)) {
            let f = EvPeriodic::new(prefix, period, 1).unwrap();
            let a = associate_of(first_one_pred());
            let expect = (0..3).find(|&i| f.eval(i) == 1).unwrap_or(3);
            prop_assert_eq!(eval_associate(&a, &f, 10), AssocValue::Value(expect));
        }

        #[test]
        fn fan_is_sound(c in 0u64..3, n in 1u64..3) {
            let pred = Fipp2Secure::new(n, const_f(c));
            if let FanResult::AllSecured { z, depth } = fan_bound(&pred, 8).unwrap().result {
                for leaf in leaves(n, depth) {
                    let w = pred.query(&leaf).unwrap().witness();
                    prop_assert!(w.is_some_and(|x| x <= z));
                }
                // prefix-determined witnesses: leaves agreeing on `depth`
                // values share the witness with any extension
                for leaf in leaves(n, depth).take(5) {
                    let mut longer = leaf.clone();
                    longer.push(n);
                    prop_assert_eq!(pred.query(&leaf).unwrap(), pred.query(&longer).unwrap());
                }
            }
        }
    }
}
