//! Consistency automata: decide which consistency partitions a term
//! satisfies by comparing subterms pairwise.

use std::collections::{BTreeSet, HashSet};

use crate::anpma::Redundancy;
use crate::apma::construct_apma;
use crate::automaton::{Automaton, EvalTrace, Kind, StateId, StateKind, Step};
use crate::error::{BuildError, EvalError, TermError};
use crate::knowledge::{Knowledge, Reasoning};
use crate::matching::IndexedPattern;
use crate::position::{Position, PositionPair};
use crate::rename::{is_consistent_naive, rename_all, ConsistencyPartition, RenamedPattern};
use crate::strategy::{choose_checked, Choice, ChoiceCtx, LeftToRight, Strategy};
use crate::term::Term;

struct CaBuilder<'a> {
    parts: Vec<RenamedPattern>,
    strategy: &'a dyn Strategy,
    states: Vec<Option<StateKind>>,
}

impl CaBuilder<'_> {
    fn fresh(&mut self) -> StateId {
        self.states.push(None);
        StateId(self.states.len() - 1)
    }

    fn surviving(&self, unequal: &BTreeSet<PositionPair>) -> Vec<usize> {
        (0..self.parts.len())
            .filter(|&i| !unequal.iter().any(|p| self.parts[i].partition.relates(p)))
            .collect()
    }

    fn build(
        &mut self,
        s: StateId,
        equal: BTreeSet<PositionPair>,
        unequal: BTreeSet<PositionPair>,
    ) -> Result<(), BuildError> {
        let live = self.surviving(&unequal);
        let work_c: BTreeSet<PositionPair> = live
            .iter()
            .flat_map(|&i| self.parts[i].partition.pairs())
            .filter(|p| !equal.contains(p))
            .collect();
        if work_c.is_empty() {
            self.states[s.0] = Some(StateKind::Final {
                labels: live.into_iter().collect(),
            });
            return Ok(());
        }
        let work_f = BTreeSet::new();
        let live_refs: Vec<&RenamedPattern> = live.iter().map(|&i| &self.parts[i]).collect();
        let prefix = Term::hole(Position::root());
        let split = |pair: &PositionPair| {
            let mut ne = unequal.clone();
            ne.insert(pair.clone());
            (live.len(), self.surviving(&ne).len())
        };
        let ctx = ChoiceCtx {
            work_f: &work_f,
            work_c: &work_c,
            live: &live_refs,
            prefix: &prefix,
            split: &split,
        };
        let Choice::Pair(pair) = choose_checked(self.strategy, &ctx)? else {
            unreachable!("no positions are offered")
        };
        let eq = self.fresh();
        let mut e2 = equal.clone();
        e2.insert(pair.clone());
        self.build(eq, e2, unequal.clone())?;
        let ne = self.fresh();
        let mut n2 = unequal;
        n2.insert(pair.clone());
        self.build(ne, equal, n2)?;
        self.states[s.0] = Some(StateKind::Cons { pair, eq, ne });
        Ok(())
    }
}

/// Builds a CA over labelled partitions. Final labels index into
/// `partitions`.
pub fn construct_ca(
    partitions: &[(String, ConsistencyPartition)],
    strategy: &dyn Strategy,
) -> Result<Automaton, BuildError> {
    let parts = partitions
        .iter()
        .enumerate()
        .map(|(index, (label, partition))| RenamedPattern {
            index,
            label: label.clone(),
            linear: Term::hole(Position::root()),
            partition: partition.clone(),
        })
        .collect();
    let mut b = CaBuilder {
        parts,
        strategy,
        states: Vec::new(),
    };
    let root = b.fresh();
    b.build(root, BTreeSet::new(), BTreeSet::new())?;
    let states = b.states.into_iter().map(|s| s.expect("filled")).collect();
    let labels = partitions.iter().map(|(l, _)| l.clone()).collect();
    Ok(Automaton::new(Kind::Ca, labels, states, root))
}

pub fn eval_ca(m: &Automaton, t: &Term) -> Result<EvalTrace, EvalError> {
    m.eval(t)
}

/// Detects forced comparisons from transitivity of the outcomes on the path
/// and from subterm inequality.
pub fn detect_redundant(m: &Automaton, s: StateId) -> Redundancy {
    let StateKind::Cons { pair, .. } = m.state(s) else {
        return Redundancy::NotDetected;
    };
    let Some(path) = m.path(s) else {
        return Redundancy::NotDetected;
    };
    let mut k = Knowledge::new(Reasoning::Basic);
    for (p, step) in path {
        if let StateKind::Cons { pair, .. } = m.state(p) {
            match step {
                Step::Yes => k.add_equal(pair),
                Step::No => k.add_unequal(pair),
                _ => {}
            }
        }
    }
    if k.known_equal(pair) {
        Redundancy::CheckEq
    } else if k.known_unequal(pair) {
        Redundancy::CheckNeq
    } else {
        Redundancy::NotDetected
    }
}

/// Points the incoming edge of `s` (or the root) at `to`.
pub(crate) fn splice(m: &mut Automaton, s: StateId, to: StateId) {
    let parents = m.parents();
    match &parents[s.0] {
        None => m.set_root(to),
        Some((p, _)) => match m.state_mut(*p) {
            StateKind::Match { edges, .. } => {
                for (_, t) in edges.iter_mut() {
                    if *t == s {
                        *t = to;
                    }
                }
            }
            StateKind::Cons { eq, ne, .. } => {
                if *eq == s {
                    *eq = to;
                }
                if *ne == s {
                    *ne = to;
                }
            }
            StateKind::Final { .. } => unreachable!("finals have no successors"),
        },
    }
}

/// Splices out detected redundant comparisons until none remain, then
/// renumbers the surviving states in their original order.
pub fn remove_redundant(m: &Automaton) -> Automaton {
    let mut m = m.clone();
    loop {
        let hit = m.reachable().into_iter().find_map(|s| {
            let StateKind::Cons { eq, ne, .. } = m.state(s) else {
                return None;
            };
            match detect_redundant(&m, s) {
                Redundancy::CheckEq => Some((s, *eq)),
                Redundancy::CheckNeq => Some((s, *ne)),
                _ => None,
            }
        });
        match hit {
            Some((s, to)) => splice(&mut m, s, to),
            None => return m.compact(),
        }
    }
}

/// Linear matching on the renamed patterns, then a consistency filter.
pub fn match_two_phase(
    patterns: &[IndexedPattern],
    t: &Term,
) -> Result<BTreeSet<usize>, TermError> {
    let renamed = rename_all(patterns);
    let linear: Vec<IndexedPattern> = renamed
        .iter()
        .map(|r| IndexedPattern::new(&r.label, r.linear.clone()).expect("head unchanged"))
        .collect();
    let m = construct_apma(&linear, &LeftToRight, true).expect("renamed patterns are linear");
    let candidates = m.eval(t).map(|tr| tr.result).unwrap_or_default();
    let mut out = BTreeSet::new();
    for i in candidates {
        if is_consistent_naive(t, &renamed[i].partition)? {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Positions compared in any consistency state.
pub fn compared_pairs(m: &Automaton) -> HashSet<PositionPair> {
    m.state_ids()
        .filter_map(|s| match m.state(s) {
            StateKind::Cons { pair, .. } => Some(pair.clone()),
            _ => None,
        })
        .collect()
}
