//! Bounded formulas with one set parameter `f`.
//!
//! Terms are built from naturals, variables, `+`, `*` and `pair(s, t)`;
//! formulas from the atoms `t in f`, `s = t`, `s <= t`, `s < t`, the
//! connectives `! & | -> <->` and bounded quantifiers
//! `forall i<t. φ` / `exists i<t. φ`.
//!
//! The atom `t in f` holds when `unpair(t) = (i, j)` and `f(i) = j`, so a
//! function `f : ℕ → [n]` is read as its graph under Cantor pairing.
//!
//! Besides evaluation this module computes moduli of continuity
//! ([`modulus`]), and two prefix-based normal forms: the bar predicate
//! `A(f) ⟺ ∀m C(f̄m)` ([`compile_bar`]) and the decision `B(m)` with
//! `∀f A(f) ⟺ ∀m B(m)` ([`compile_closed`]).

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::codec::{pair_u64, unpair_u64, SeqCode};
use crate::streams::EvPeriodic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Sigma00Error {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unbound variable {0:?}")]
    UnboundVariable(String),
    #[error("unknown set parameter {name:?} at byte {pos}; only `f` is available")]
    UnknownSet { name: String, pos: usize },
    #[error("no value for free variable {0:?}")]
    MissingVariable(String),
    #[error("arithmetic overflow while evaluating a term")]
    Overflow,
}

type Result<T> = std::result::Result<T, Sigma00Error>;

/// Variable assignment for free variables.
pub type Env = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Num(u64),
    Var(String),
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Num(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Add(a, b) | Term::Mul(a, b) | Term::Pair(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    /// `self[var := by]`.
    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => by.clone(),
            Term::Num(_) | Term::Var(_) => self.clone(),
            Term::Add(a, b) => Term::add(a.substitute(var, by), b.substitute(var, by)),
            Term::Mul(a, b) => Term::mul(a.substitute(var, by), b.substitute(var, by)),
            Term::Pair(a, b) => Term::pair(a.substitute(var, by), b.substitute(var, by)),
        }
    }

    fn eval_with(&self, lookup: &dyn Fn(&str) -> Option<u64>) -> Result<u64> {
        match self {
            Term::Num(c) => Ok(*c),
            Term::Var(v) => lookup(v).ok_or_else(|| Sigma00Error::MissingVariable(v.clone())),
            Term::Add(a, b) => a
                .eval_with(lookup)?
                .checked_add(b.eval_with(lookup)?)
                .ok_or(Sigma00Error::Overflow),
            Term::Mul(a, b) => a
                .eval_with(lookup)?
                .checked_mul(b.eval_with(lookup)?)
                .ok_or(Sigma00Error::Overflow),
            Term::Pair(a, b) => {
                pair_u64(a.eval_with(lookup)?, b.eval_with(lookup)?).ok_or(Sigma00Error::Overflow)
            }
        }
    }

    pub fn eval(&self, env: &Env) -> Result<u64> {
        self.eval_with(&|v| env.get(v).copied())
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Add(..) => 1,
            Term::Mul(..) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // left-associative binary operators: parenthesize a right operand of
        // equal precedence and any operand of lower precedence
        let operand = |f: &mut fmt::Formatter<'_>, t: &Term, min: u8| {
            if t.precedence() < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        };
        match self {
            Term::Num(c) => write!(f, "{c}"),
            Term::Var(v) => write!(f, "{v}"),
            Term::Add(a, b) => {
                operand(f, a, 1)?;
                write!(f, " + ")?;
                operand(f, b, 2)
            }
            Term::Mul(a, b) => {
                operand(f, a, 2)?;
                write!(f, " * ")?;
                operand(f, b, 3)
            }
            Term::Pair(a, b) => write!(f, "pair({a}, {b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    And,
    Or,
    Implies,
    Iff,
}

impl Connective {
    fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Connective::And => a && b,
            Connective::Or => a || b,
            Connective::Implies => !a || b,
            Connective::Iff => a == b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "|",
            Connective::Implies => "->",
            Connective::Iff => "<->",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Eq,
    Le,
    Lt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `t in f`.
    Member(Term),
    Compare(Comparison, Term, Term),
    Not(Box<Formula>),
    Binary(Connective, Box<Formula>, Box<Formula>),
    /// `Q var < bound. body`.
    Bounded {
        quantifier: Quantifier,
        var: String,
        bound: Term,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn member(t: Term) -> Formula {
        Formula::Member(t)
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn binary(c: Connective, a: Formula, b: Formula) -> Formula {
        Formula::Binary(c, Box::new(a), Box::new(b))
    }

    pub fn bounded(q: Quantifier, var: &str, bound: Term, body: Formula) -> Formula {
        Formula::Bounded {
            quantifier: q,
            var: var.to_string(),
            bound,
            body: Box::new(body),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let add_term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            let mut vs = BTreeSet::new();
            t.vars(&mut vs);
            out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
        };
        match self {
            Formula::Member(t) => add_term(t, bound, out),
            Formula::Compare(_, a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::Binary(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Bounded {
                var,
                bound: limit,
                body,
                ..
            } => {
                add_term(limit, bound, out);
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Whether `f` occurs at all.
    pub fn mentions_f(&self) -> bool {
        match self {
            Formula::Member(_) => true,
            Formula::Compare(..) => false,
            Formula::Not(a) => a.mentions_f(),
            Formula::Binary(_, a, b) => a.mentions_f() || b.mentions_f(),
            Formula::Bounded { body, .. } => body.mentions_f(),
        }
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Formula::Member(_) | Formula::Compare(..))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Member(t) => write!(f, "{t} in f"),
            Formula::Compare(op, a, b) => {
                let sym = match op {
                    Comparison::Eq => "=",
                    Comparison::Le => "<=",
                    Comparison::Lt => "<",
                };
                write!(f, "{a} {sym} {b}")
            }
            Formula::Not(a) if a.is_atomic() => write!(f, "!({a})"),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::Binary(c, a, b) => write!(f, "({a} {} {b})", c.symbol()),
            Formula::Bounded {
                quantifier,
                var,
                bound,
                body,
            } => {
                let q = match quantifier {
                    Quantifier::Forall => "forall",
                    Quantifier::Exists => "exists",
                };
                write!(f, "({q} {var}<{bound}. {body})")
            }
        }
    }
}

/// Read access to the set parameter, as a function `i ↦ f(i)`.
/// `None` means `f(i)` is undefined, which makes `t in f` false.
pub trait SetParam {
    fn value(&self, i: u64) -> Option<u64>;
}

impl SetParam for EvPeriodic {
    fn value(&self, i: u64) -> Option<u64> {
        Some(self.eval(i))
    }
}

/// A finite sequence `a`, undefined past its length.
#[derive(Debug, Clone, Copy)]
pub struct Prefix<'a>(pub &'a [u64]);

impl SetParam for Prefix<'_> {
    fn value(&self, i: u64) -> Option<u64> {
        self.0.get(i as usize).copied()
    }
}

/// `a⌢o`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroExtended<'a>(pub &'a [u64]);

impl SetParam for ZeroExtended<'_> {
    fn value(&self, i: u64) -> Option<u64> {
        Some(self.0.get(i as usize).copied().unwrap_or(0))
    }
}

/// `i ↦ min(n, (m⌢o)(i))`.
#[derive(Debug, Clone, Copy)]
pub struct Clamped<'a> {
    pub seq: &'a [u64],
    pub n: u64,
}

impl SetParam for Clamped<'_> {
    fn value(&self, i: u64) -> Option<u64> {
        Some(self.seq.get(i as usize).map_or(0, |&v| v.min(self.n)))
    }
}

struct Scope<'e> {
    env: &'e Env,
    stack: Vec<(String, u64)>,
}

impl Scope<'_> {
    fn lookup(&self, v: &str) -> Option<u64> {
        self.stack
            .iter()
            .rev()
            .find(|(name, _)| name == v)
            .map(|&(_, x)| x)
            .or_else(|| self.env.get(v).copied())
    }

    fn term(&self, t: &Term) -> Result<u64> {
        t.eval_with(&|v| self.lookup(v))
    }
}

/// Truth value of `phi` under `env` with `f` as the set parameter.
pub fn eval(phi: &Formula, env: &Env, f: &dyn SetParam) -> Result<bool> {
    let mut scope = Scope {
        env,
        stack: Vec::new(),
    };
    eval_in(phi, &mut scope, f)
}

fn eval_in(phi: &Formula, scope: &mut Scope<'_>, f: &dyn SetParam) -> Result<bool> {
    match phi {
        Formula::Member(t) => {
            let (i, j) = unpair_u64(scope.term(t)?);
            Ok(f.value(i) == Some(j))
        }
        Formula::Compare(op, a, b) => {
            let (x, y) = (scope.term(a)?, scope.term(b)?);
            Ok(match op {
                Comparison::Eq => x == y,
                Comparison::Le => x <= y,
                Comparison::Lt => x < y,
            })
        }
        Formula::Not(a) => Ok(!eval_in(a, scope, f)?),
        Formula::Binary(c, a, b) => {
            let x = eval_in(a, scope, f)?;
            let y = eval_in(b, scope, f)?;
            Ok(c.apply(x, y))
        }
        Formula::Bounded {
            quantifier,
            var,
            bound,
            body,
        } => {
            let limit = scope.term(bound)?;
            let want = matches!(quantifier, Quantifier::Exists);
            let mut result = !want;
            for i in 0..limit {
                scope.stack.push((var.clone(), i));
                let v = eval_in(body, scope, f);
                scope.stack.pop();
                if v? == want {
                    result = want;
                    break;
                }
            }
            Ok(result)
        }
    }
}

/// A `w` with `t ≤ w` whenever every variable is `≤ z`, following the
/// structure of `t` (`w₁ + w₂`, `w₁ · w₂`, `pair(w₁, w₂)`).
pub fn term_bound(t: &Term, z: u64) -> Result<u64> {
    t.eval_with(&|_| Some(z))
}

/// A prefix length `y` such that any `f`, `g` agreeing on the first `y`
/// values give `phi` the same truth value for all free variables `≤ z`.
/// Sound, not minimal.
pub fn modulus(phi: &Formula, z: u64) -> Result<u64> {
    match phi {
        Formula::Member(t) => term_bound(t, z)?
            .checked_add(1)
            .ok_or(Sigma00Error::Overflow),
        Formula::Compare(..) => Ok(0),
        Formula::Not(a) => modulus(a, z),
        Formula::Binary(_, a, b) => Ok(modulus(a, z)?.max(modulus(b, z)?)),
        Formula::Bounded { bound, body, .. } => modulus(body, z.max(term_bound(bound, z)?)),
    }
}

/// Threshold term `t` with `m ≥ t → (A(f) ↔ A'(f̄m))`, where `A'` reads
/// `f` from the prefix.
pub fn threshold(phi: &Formula) -> Term {
    match phi {
        Formula::Member(q) => Term::add(q.clone(), Term::Num(1)),
        Formula::Compare(..) => Term::Num(0),
        Formula::Not(a) => threshold(a),
        Formula::Binary(_, a, b) => simplify_sum(threshold(a), threshold(b)),
        Formula::Bounded {
            var, bound, body, ..
        } => threshold(body).substitute(var, bound),
    }
}

fn simplify_sum(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Num(0), t) | (t, Term::Num(0)) => t,
        (a, b) => Term::add(a, b),
    }
}

/// Decidable `C` on prefixes with `A(f) ⟺ ∀m C(f̄m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarPredicate {
    formula: Formula,
    threshold: Term,
}

impl BarPredicate {
    pub fn threshold_term(&self) -> &Term {
        &self.threshold
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// `C(a) :≡ lh a ≥ t → A'(a)`.
    pub fn decide(&self, a: &SeqCode, env: &Env) -> Result<bool> {
        let t = self.threshold.eval(env)?;
        if (a.len() as u64) < t {
            return Ok(true);
        }
        eval(&self.formula, env, &Prefix(a.as_slice()))
    }

    /// Prefix length past which `C(f̄m)` no longer changes and up to which
    /// checking `∀m` suffices: `max(threshold, modulus(φ, max env))`.
    pub fn certified_bound(&self, env: &Env) -> Result<u64> {
        let z = env.values().copied().max().unwrap_or(0);
        Ok(self.threshold.eval(env)?.max(modulus(&self.formula, z)?))
    }

    /// `∀m ≤ certified_bound C(f̄m)`.
    pub fn holds_along(&self, f: &EvPeriodic, env: &Env) -> Result<bool> {
        let bound = self.certified_bound(env)?;
        let values = f.take(bound);
        for m in 0..=bound as usize {
            if !self.decide(&SeqCode::from_seq(&values[..m]), env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn compile_bar(phi: &Formula) -> BarPredicate {
    BarPredicate {
        formula: phi.clone(),
        threshold: threshold(phi),
    }
}

/// `B(m)`: `phi` evaluated at `i ↦ min(n, (m⌢o)(i))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedDecision {
    formula: Formula,
    n: u64,
}

impl ClosedDecision {
    pub fn decide(&self, m: &SeqCode) -> Result<bool> {
        eval(
            &self.formula,
            &Env::new(),
            &Clamped {
                seq: m.as_slice(),
                n: self.n,
            },
        )
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `∀m B(m)`, decided by running `B` on every `[n]`-sequence of length
    /// `modulus(φ, 0)`: each `B(m)` equals `B` at such a sequence.
    pub fn holds_for_all(&self) -> Result<bool> {
        let len = modulus(&self.formula, 0)? as usize;
        let mut seq = vec![0u64; len];
        loop {
            if !self.decide(&SeqCode::from_seq(seq.clone()))? {
                return Ok(false);
            }
            if !odometer(&mut seq, self.n) {
                return Ok(true);
            }
        }
    }
}

pub fn compile_closed(phi: &Formula, n: u64) -> ClosedDecision {
    ClosedDecision {
        formula: phi.clone(),
        n,
    }
}

/// Advances `digits` to the next word over `[n]`; `false` after the last.
pub(crate) fn odometer(digits: &mut [u64], n: u64) -> bool {
    for d in digits.iter_mut().rev() {
        if *d < n {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

// ---------------------------------------------------------------------------
// parser

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Plus,
    Star,
    Eq,
    Le,
    Lt,
    Iff,
    Implies,
    Or,
    And,
    Not,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse().map_err(|_| Sigma00Error::Syntax {
                pos: start,
                message: "numeral too large".into(),
            })?;
            out.push((Tok::Num(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
            {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let rest = &text[i..];
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("<=") {
            (Tok::Le, 2)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else {
            let t = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'+' => Tok::Plus,
                b'*' => Tok::Star,
                b'=' => Tok::Eq,
                b'<' => Tok::Lt,
                b'|' => Tok::Or,
                b'&' => Tok::And,
                b'!' => Tok::Not,
                _ => {
                    return Err(Sigma00Error::Syntax {
                        pos: start,
                        message: format!("unexpected character {:?}", rest.chars().next().unwrap()),
                    })
                }
            };
            (t, 1)
        };
        out.push((tok, start));
        i += len;
    }
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["forall", "exists", "in", "pair", "f"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(_, p)| p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Sigma00Error::Syntax {
            pos: self.offset(),
            message: message.into(),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula> {
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return self.quantified();
        }
        self.iff()
    }

    fn quantified(&mut self) -> Result<Formula> {
        let quantifier = if self.is_keyword("forall") {
            Quantifier::Forall
        } else {
            Quantifier::Exists
        };
        self.pos += 1;
        let var = self.variable()?;
        self.expect(&Tok::Lt, "`<` after the quantified variable")?;
        let bound = self.term()?;
        self.expect(&Tok::Dot, "`.` after the quantifier bound")?;
        let body = self.formula()?;
        Ok(Formula::bounded(quantifier, &var, bound, body))
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut left = self.implication()?;
        while self.eat(&Tok::Iff) {
            let right = self.implication()?;
            left = Formula::binary(Connective::Iff, left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let right = self.implication()?;
            return Ok(Formula::binary(Connective::Implies, left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut left = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let right = self.conjunction()?;
            left = Formula::binary(Connective::Or, left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut left = self.negation()?;
        while self.eat(&Tok::And) {
            let right = self.negation()?;
            left = Formula::binary(Connective::And, left, right);
        }
        Ok(left)
    }

    fn negation(&mut self) -> Result<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.negation()?));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return self.quantified();
        }
        if self.peek() == Some(&Tok::LParen) {
            // either a parenthesized formula or an atom whose left term
            // starts with a parenthesis
            let save = self.pos;
            self.pos += 1;
            if let Ok(inner) = self.formula() {
                if self.eat(&Tok::RParen) && !self.at_relation() {
                    return Ok(inner);
                }
            }
            self.pos = save;
        }
        self.atom()
    }

    fn at_relation(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Eq | Tok::Le | Tok::Lt | Tok::Plus | Tok::Star)
        ) || self.is_keyword("in")
    }

    fn atom(&mut self) -> Result<Formula> {
        let left = self.term()?;
        if self.is_keyword("in") {
            self.pos += 1;
            let at = self.offset();
            return match self.peek() {
                Some(Tok::Ident(s)) if s == "f" => {
                    self.pos += 1;
                    Ok(Formula::Member(left))
                }
                Some(Tok::Ident(s)) => Err(Sigma00Error::UnknownSet {
                    name: s.clone(),
                    pos: at,
                }),
                _ => self.error("expected `f` after `in`"),
            };
        }
        let op = match self.peek() {
            Some(Tok::Eq) => Comparison::Eq,
            Some(Tok::Le) => Comparison::Le,
            Some(Tok::Lt) => Comparison::Lt,
            _ => return self.error("expected `in f`, `=`, `<=` or `<`"),
        };
        self.pos += 1;
        let right = self.term()?;
        Ok(Formula::Compare(op, left, right))
    }

    fn term(&mut self) -> Result<Term> {
        let mut left = self.product()?;
        while self.eat(&Tok::Plus) {
            let right = self.product()?;
            left = Term::add(left, right);
        }
        Ok(left)
    }

    fn product(&mut self) -> Result<Term> {
        let mut left = self.factor()?;
        while self.eat(&Tok::Star) {
            let right = self.factor()?;
            left = Term::mul(left, right);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Term::Num(n))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            Some(Tok::Ident(s)) if s == "pair" => {
                self.pos += 1;
                self.expect(&Tok::LParen, "`(` after `pair`")?;
                let a = self.term()?;
                self.expect(&Tok::Comma, "`,` in `pair`")?;
                let b = self.term()?;
                self.expect(&Tok::RParen, "`)` closing `pair`")?;
                Ok(Term::pair(a, b))
            }
            Some(Tok::Ident(_)) => Ok(Term::Var(self.variable()?)),
            _ => self.error("expected a term"),
        }
    }

    fn variable(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.pos += 1;
                Ok(s)
            }
            Some(Tok::Ident(s)) => self.error(format!("`{s}` is reserved")),
            _ => self.error("expected a variable"),
        }
    }
}

/// Parses a formula; variables not bound by a quantifier are free.
pub fn parse(text: &str) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let phi = p.formula()?;
    if p.pos != p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(phi)
}

/// Parses a formula whose free variables must all be listed in `free`.
pub fn parse_with_free(text: &str, free: &[&str]) -> Result<Formula> {
    let phi = parse(text)?;
    if let Some(v) = phi
        .free_vars()
        .into_iter()
        .find(|v| !free.contains(&v.as_str()))
    {
        return Err(Sigma00Error::UnboundVariable(v));
    }
    Ok(phi)
}
