//! Linearization of non-linear patterns into a position-annotated pattern
//! plus a consistency partition over its variable positions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::TermError;
use crate::matching::IndexedPattern;
use crate::position::{Position, PositionPair};
use crate::term::{Head, Term, Var};

/// Disjoint classes of positions whose subterms must all be equal.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ConsistencyPartition {
    classes: Vec<BTreeSet<Position>>,
}

impl ConsistencyPartition {
    /// Classes are sorted by their least position. Panics on overlapping or
    /// empty classes.
    pub fn new(classes: Vec<BTreeSet<Position>>) -> Self {
        let mut seen = BTreeSet::new();
        for c in &classes {
            assert!(!c.is_empty(), "consistency classes are non-empty");
            for p in c {
                assert!(seen.insert(p.clone()), "position {p} occurs in two classes");
            }
        }
        let mut classes = classes;
        classes.sort();
        ConsistencyPartition { classes }
    }

    /// Test convenience: `from_strs(&[&["1", "2"], &["3"]])`.
    pub fn from_strs(classes: &[&[&str]]) -> Self {
        ConsistencyPartition::new(
            classes
                .iter()
                .map(|c| c.iter().map(|s| crate::position::pos(s)).collect())
                .collect(),
        )
    }

    pub fn classes(&self) -> &[BTreeSet<Position>] {
        &self.classes
    }

    /// Every pair `{p, q}` with p and q in a common class.
    pub fn pairs(&self) -> BTreeSet<PositionPair> {
        let mut out = BTreeSet::new();
        for c in &self.classes {
            let v: Vec<&Position> = c.iter().collect();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    out.insert(PositionPair::new(v[i].clone(), v[j].clone()).unwrap());
                }
            }
        }
        out
    }

    /// Whether the pair is contained in one class (`{p,q} ⊆∈ P`).
    pub fn relates(&self, pair: &PositionPair) -> bool {
        self.classes
            .iter()
            .any(|c| c.contains(pair.first()) && c.contains(pair.second()))
    }

    pub fn positions(&self) -> impl Iterator<Item = &Position> {
        self.classes.iter().flatten()
    }

    /// True when no class has two or more positions.
    pub fn is_trivial(&self) -> bool {
        self.classes.iter().all(|c| c.len() < 2)
    }
}

impl fmt::Display for ConsistencyPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, c) in self.classes.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str("{")?;
            for (j, p) in c.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
            f.write_str("}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ConsistencyPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A pattern after renaming: linear, position-annotated, with the partition
/// recording which positions held the same variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RenamedPattern {
    pub index: usize,
    pub label: String,
    pub linear: Term,
    pub partition: ConsistencyPartition,
}

/// Replaces every variable at position p by `□_p`.
pub fn annotate(t: &Term) -> Term {
    fn go(t: &Term, p: &Position) -> Term {
        match t.head() {
            Head::Var(_) => Term::hole(p.clone()),
            Head::Neq => t.clone(),
            Head::Fun(f) => {
                if t.is_ground() {
                    return t.clone();
                }
                let args = t
                    .args()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| go(a, &p.child(k as u32 + 1)))
                    .collect();
                Term::app(f, args).expect("arity preserved")
            }
        }
    }
    go(t, &Position::root())
}

/// Renames a single term: annotated linear term plus its partition.
pub fn rename_term(t: &Term) -> (Term, ConsistencyPartition) {
    let mut by_var: BTreeMap<Var, BTreeSet<Position>> = BTreeMap::new();
    for (p, v) in t.variables() {
        by_var.entry(v).or_default().insert(p);
    }
    (
        annotate(t),
        ConsistencyPartition::new(by_var.into_values().collect()),
    )
}

/// Renames the `index`-th pattern of a family.
pub fn rename(index: usize, p: &IndexedPattern) -> RenamedPattern {
    let (linear, partition) = rename_term(p.term());
    RenamedPattern {
        index,
        label: p.label().to_string(),
        linear,
        partition,
    }
}

pub fn rename_all(patterns: &[IndexedPattern]) -> Vec<RenamedPattern> {
    patterns
        .iter()
        .enumerate()
        .map(|(i, p)| rename(i, p))
        .collect()
}

/// Checks every class pairwise equal, comparing each member with the first
/// member of its class. `comparisons` is incremented once per comparison.
pub fn is_consistent_counted(
    t: &Term,
    partition: &ConsistencyPartition,
    comparisons: &mut usize,
) -> Result<bool, TermError> {
    for class in partition.classes() {
        let mut it = class.iter();
        let Some(first) = it.next() else { continue };
        let anchor = t
            .at(first)
            .ok_or_else(|| TermError::UndefinedPosition(first.clone()))?;
        for p in it {
            let other = t
                .at(p)
                .ok_or_else(|| TermError::UndefinedPosition(p.clone()))?;
            *comparisons += 1;
            if anchor != other {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn is_consistent_naive(t: &Term, partition: &ConsistencyPartition) -> Result<bool, TermError> {
    let mut n = 0;
    is_consistent_counted(t, partition, &mut n)
}
