//! The matching relation and the brute-force oracle every automaton is
//! checked against.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::ParseError;
use crate::term::{Head, Term, Var};

/// A pattern with its label. The pattern always starts with a function symbol.
#[derive(Clone, PartialEq, Eq)]
pub struct IndexedPattern {
    label: Arc<str>,
    term: Term,
}

impl IndexedPattern {
    pub fn new(label: &str, term: Term) -> Result<Self, ParseError> {
        if term.symbol().is_none() {
            return Err(ParseError::VariablePattern(term.to_string()));
        }
        Ok(IndexedPattern {
            label: label.into(),
            term,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn term(&self) -> &Term {
        &self.term
    }
}

impl fmt::Debug for IndexedPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label, self.term)
    }
}

/// A substitution witness for a successful match.
pub type Substitution = BTreeMap<Var, Term>;

/// Applies a substitution; unbound variables stay in place.
pub fn apply(sigma: &Substitution, t: &Term) -> Term {
    match t.head() {
        Head::Var(v) => sigma.get(v).cloned().unwrap_or_else(|| t.clone()),
        Head::Neq => t.clone(),
        Head::Fun(f) => {
            if t.is_ground() {
                return t.clone();
            }
            let args = t.args().iter().map(|a| apply(sigma, a)).collect();
            Term::app(f, args).expect("arity preserved")
        }
    }
}

/// Returns σ with `pattern^σ = t`, or `None`.
pub fn matches(pattern: &Term, t: &Term) -> Option<Substitution> {
    fn go(p: &Term, t: &Term, sigma: &mut Substitution) -> bool {
        match p.head() {
            Head::Var(v) => match sigma.get(v) {
                Some(bound) => bound == t,
                None => {
                    sigma.insert(v.clone(), t.clone());
                    true
                }
            },
            Head::Neq => false,
            Head::Fun(f) => {
                t.symbol() == Some(f) && p.args().iter().zip(t.args()).all(|(a, b)| go(a, b, sigma))
            }
        }
    }
    let mut sigma = Substitution::new();
    go(pattern, t, &mut sigma).then_some(sigma)
}

/// Indices (into `patterns`) of every pattern matching `t`.
pub fn match_naive(patterns: &[IndexedPattern], t: &Term) -> BTreeSet<usize> {
    patterns
        .iter()
        .enumerate()
        .filter(|(_, p)| matches(p.term(), t).is_some())
        .map(|(i, _)| i)
        .collect()
}

/// Equality where any two variables are identified.
pub fn equal_modulo_vars(t: &Term, u: &Term) -> bool {
    match (t.head(), u.head()) {
        (Head::Var(_), Head::Var(_)) => true,
        (Head::Fun(f), Head::Fun(g)) => {
            f == g
                && t.args()
                    .iter()
                    .zip(u.args())
                    .all(|(a, b)| equal_modulo_vars(a, b))
        }
        (Head::Neq, Head::Neq) => true,
        _ => false,
    }
}

/// Whether some term is an instance of both the pattern and the prefix.
///
/// Variables on either side are wildcards; a neq marker in the prefix clashes
/// with any function symbol of the pattern at that position.
pub fn unifies_with_prefix(pattern: &Term, prefix: &Term) -> bool {
    match (pattern.head(), prefix.head()) {
        (Head::Var(_), _) | (_, Head::Var(_)) => true,
        (_, Head::Neq) | (Head::Neq, _) => false,
        (Head::Fun(f), Head::Fun(g)) => {
            f == g
                && pattern
                    .args()
                    .iter()
                    .zip(prefix.args())
                    .all(|(a, b)| unifies_with_prefix(a, b))
        }
    }
}
