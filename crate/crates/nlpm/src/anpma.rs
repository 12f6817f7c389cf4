//! Construction of automata that interleave symbol inspections with
//! consistency comparisons. The same engine builds APMAs, since a linear
//! pattern set never produces comparison work.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::automaton::{Automaton, Edge, Kind, StateId, StateKind, Step};
use crate::error::BuildError;
use crate::knowledge::{Knowledge, Reasoning};
use crate::matching::{unifies_with_prefix, IndexedPattern};
use crate::position::{Position, PositionPair};
use crate::rename::{rename_all, RenamedPattern};
use crate::strategy::{choose_checked, Choice, ChoiceCtx, Strategy, TwoPhase};
use crate::term::{Head, Symbol, Term};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Pruning {
    /// The construction exactly as stated: every fringe position is work,
    /// patterns are discarded only on prefix clash or a failed comparison.
    None,
    /// Skips positions where no live pattern has a symbol, and reasons with
    /// transitivity, symbol clashes and subterm inequality.
    Basic,
    /// Basic plus congruence and neq-edge exclusions; also skips
    /// inspections whose outcome is already forced.
    Aggressive,
}

impl Pruning {
    pub const ALL: [Pruning; 3] = [Pruning::None, Pruning::Basic, Pruning::Aggressive];

    fn reasoning(self) -> Option<Reasoning> {
        match self {
            Pruning::None => None,
            Pruning::Basic => Some(Reasoning::Basic),
            Pruning::Aggressive => Some(Reasoning::Aggressive),
        }
    }
}

impl fmt::Display for Pruning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pruning::None => "none",
            Pruning::Basic => "basic",
            Pruning::Aggressive => "aggressive",
        })
    }
}

impl FromStr for Pruning {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Pruning::None),
            "basic" => Ok(Pruning::Basic),
            "aggressive" => Ok(Pruning::Aggressive),
            other => Err(format!("unknown pruning level `{other}`")),
        }
    }
}

/// A node of a prefix under construction.
#[derive(Clone, Debug)]
enum Node {
    Sym(Symbol),
    /// A neq edge was taken; the set holds the symbols it excludes.
    Neq(BTreeSet<Symbol>),
    Hole,
}

/// Everything known at a state: the prefix and the comparison outcomes.
#[derive(Clone, Debug)]
struct Situation {
    prefix: BTreeMap<Position, Node>,
    equal: BTreeSet<PositionPair>,
    unequal: BTreeSet<PositionPair>,
}

impl Situation {
    fn root() -> Self {
        Situation {
            prefix: BTreeMap::from([(Position::root(), Node::Hole)]),
            equal: BTreeSet::new(),
            unequal: BTreeSet::new(),
        }
    }

    fn with_symbol(&self, p: &Position, f: &Symbol) -> Self {
        let mut next = self.clone();
        next.prefix.insert(p.clone(), Node::Sym(f.clone()));
        for i in 1..=f.arity() as u32 {
            next.prefix.insert(p.child(i), Node::Hole);
        }
        next
    }

    fn with_neq(&self, p: &Position, excluded: BTreeSet<Symbol>) -> Self {
        let mut next = self.clone();
        next.prefix.insert(p.clone(), Node::Neq(excluded));
        next
    }

    fn with_equal(&self, pair: &PositionPair) -> Self {
        let mut next = self.clone();
        next.equal.insert(pair.clone());
        next
    }

    fn with_unequal(&self, pair: &PositionPair) -> Self {
        let mut next = self.clone();
        next.unequal.insert(pair.clone());
        next
    }

    fn fringe(&self) -> impl Iterator<Item = &Position> {
        self.prefix
            .iter()
            .filter(|(_, n)| matches!(n, Node::Hole))
            .map(|(p, _)| p)
    }

    fn prefix_term(&self) -> Term {
        fn go(s: &Situation, p: &Position) -> Term {
            match &s.prefix[p] {
                Node::Hole => Term::hole(p.clone()),
                Node::Neq(_) => Term::neq(),
                Node::Sym(f) => {
                    let args = (1..=f.arity() as u32).map(|i| go(s, &p.child(i))).collect();
                    Term::app(f, args).expect("arity respected")
                }
            }
        }
        go(self, &Position::root())
    }

    fn knowledge(&self, mode: Reasoning) -> Knowledge {
        let mut k = Knowledge::new(mode);
        for (p, n) in &self.prefix {
            match n {
                Node::Sym(f) => k.set_symbol(p, f),
                Node::Neq(ex) => k.exclude(p, ex),
                Node::Hole => {}
            }
        }
        for pair in &self.equal {
            k.add_equal(pair);
        }
        for pair in &self.unequal {
            k.add_unequal(pair);
        }
        k
    }

    /// Replays the edges leading to `s` in a built automaton.
    fn along_path(m: &Automaton, s: StateId) -> Option<Situation> {
        let mut sit = Situation::root();
        for (p, step) in m.path(s)? {
            match (m.state(p), step) {
                (StateKind::Match { pos, .. }, Step::Sym(f)) => sit = sit.with_symbol(pos, &f),
                (StateKind::Match { pos, edges }, Step::Neq) => {
                    let ex = edges
                        .iter()
                        .filter_map(|(e, _)| match e {
                            Edge::Sym(f) => Some(f.clone()),
                            Edge::Neq => None,
                        })
                        .collect();
                    sit = sit.with_neq(pos, ex);
                }
                (StateKind::Cons { pair, .. }, Step::Yes) => sit = sit.with_equal(pair),
                (StateKind::Cons { pair, .. }, Step::No) => sit = sit.with_unequal(pair),
                _ => return None,
            }
        }
        Some(sit)
    }
}

fn has_symbol_at(l: &RenamedPattern, p: &Position) -> bool {
    matches!(l.linear.at(p).map(Term::head), Some(Head::Fun(_)))
}

/// Whether `l` has a variable at `p` or at some position above it.
fn variable_at_or_above(l: &RenamedPattern, p: &Position) -> bool {
    p.prefixes()
        .chain(std::iter::once(p.clone()))
        .any(|q| l.linear.at(&q).is_some_and(Term::is_var))
}

pub(crate) struct Engine<'a> {
    kind: Kind,
    pats: &'a [RenamedPattern],
    labels: Vec<String>,
    strategy: &'a dyn Strategy,
    pruning: Pruning,
    skip_variable_positions: bool,
    states: Vec<Option<StateKind>>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(
        kind: Kind,
        pats: &'a [RenamedPattern],
        labels: Vec<String>,
        strategy: &'a dyn Strategy,
        pruning: Pruning,
        skip_variable_positions: bool,
    ) -> Self {
        Engine {
            kind,
            pats,
            labels,
            strategy,
            pruning,
            skip_variable_positions,
            states: Vec::new(),
        }
    }

    pub(crate) fn run(mut self) -> Result<Automaton, BuildError> {
        let root = self.fresh();
        let all: Vec<usize> = (0..self.pats.len()).collect();
        self.build(root, Situation::root(), &all)?;
        let states = self
            .states
            .into_iter()
            .map(|s| s.expect("every allocated state is filled"))
            .collect();
        Ok(Automaton::new(self.kind, self.labels, states, root))
    }

    fn fresh(&mut self) -> StateId {
        self.states.push(None);
        StateId(self.states.len() - 1)
    }

    fn live(&self, sit: &Situation, candidates: &[usize]) -> Vec<usize> {
        let prefix = sit.prefix_term();
        let base = self.pruning.reasoning().map(|mode| sit.knowledge(mode));
        candidates
            .iter()
            .copied()
            .filter(|&i| {
                let l = &self.pats[i];
                if !unifies_with_prefix(&l.linear, &prefix) {
                    return false;
                }
                if sit.unequal.iter().any(|pair| l.partition.relates(pair)) {
                    return false;
                }
                match &base {
                    None => true,
                    Some(k) => feasible(k, l),
                }
            })
            .collect()
    }

    fn work_f(
        &self,
        sit: &Situation,
        live: &[&RenamedPattern],
        k: &mut Option<Knowledge>,
    ) -> BTreeSet<Position> {
        let mut work: BTreeSet<Position> = sit.fringe().cloned().collect();
        if self.skip_variable_positions {
            work.retain(|p| live.iter().any(|l| has_symbol_at(l, p)));
        }
        if self.pruning == Pruning::Aggressive {
            let k = k.as_mut().expect("knowledge exists when pruning");
            work.retain(|p| {
                let known = k.symbol_at(p).is_some();
                let needed_below = live.iter().any(|l| l.linear.at(&p.child(1)).is_some());
                !known || needed_below
            });
        }
        work
    }

    fn work_c(
        &self,
        sit: &Situation,
        live: &[&RenamedPattern],
        k: &mut Option<Knowledge>,
    ) -> BTreeSet<PositionPair> {
        let mut work = BTreeSet::new();
        for l in live {
            for pair in l.partition.pairs() {
                if sit.prefix.contains_key(pair.first())
                    && sit.prefix.contains_key(pair.second())
                    && !sit.equal.contains(&pair)
                {
                    work.insert(pair);
                }
            }
        }
        if let Some(k) = k.as_mut() {
            work.retain(|pair| !k.known_equal(pair));
        }
        work
    }

    fn finish(&mut self, s: StateId, live: &[usize]) {
        let labels = live.iter().map(|&i| self.pats[i].index).collect();
        self.states[s.0] = Some(StateKind::Final { labels });
    }

    fn build(
        &mut self,
        s: StateId,
        sit: Situation,
        candidates: &[usize],
    ) -> Result<(), BuildError> {
        let live = self.live(&sit, candidates);
        if live.is_empty() {
            self.finish(s, &live);
            return Ok(());
        }
        let live_refs: Vec<&RenamedPattern> = live.iter().map(|&i| &self.pats[i]).collect();
        let mut k = self.pruning.reasoning().map(|mode| sit.knowledge(mode));
        let work_f = self.work_f(&sit, &live_refs, &mut k);
        let work_c = self.work_c(&sit, &live_refs, &mut k);
        if work_f.is_empty() && work_c.is_empty() {
            self.finish(s, &live);
            return Ok(());
        }

        let prefix = sit.prefix_term();
        let split = |pair: &PositionPair| {
            (
                self.live(&sit.with_equal(pair), &live).len(),
                self.live(&sit.with_unequal(pair), &live).len(),
            )
        };
        let ctx = ChoiceCtx {
            work_f: &work_f,
            work_c: &work_c,
            live: &live_refs,
            prefix: &prefix,
            split: &split,
        };
        let choice = choose_checked(self.strategy, &ctx)?;

        match choice {
            Choice::Pos(pos) => {
                let mut symbols: BTreeSet<Symbol> = live_refs
                    .iter()
                    .filter_map(|l| l.linear.at(&pos).and_then(Term::symbol).cloned())
                    .collect();
                let mut neq = live_refs.iter().any(|l| variable_at_or_above(l, &pos));
                if let (Pruning::Aggressive, Some(k)) = (self.pruning, &k) {
                    symbols.retain(|f| {
                        let mut probe = k.clone();
                        probe.set_symbol(&pos, f);
                        probe.is_satisfiable()
                    });
                    if neq {
                        let mut probe = k.clone();
                        probe.exclude(&pos, &symbols);
                        neq = probe.is_satisfiable();
                    }
                }
                let mut edges = Vec::new();
                for f in &symbols {
                    let child = self.fresh();
                    edges.push((Edge::Sym(f.clone()), child));
                    self.build(child, sit.with_symbol(&pos, f), &live)?;
                }
                if neq {
                    let child = self.fresh();
                    edges.push((Edge::Neq, child));
                    self.build(child, sit.with_neq(&pos, symbols.clone()), &live)?;
                }
                self.states[s.0] = Some(StateKind::Match { pos, edges });
            }
            Choice::Pair(pair) => {
                let eq = self.fresh();
                self.build(eq, sit.with_equal(&pair), &live)?;
                let ne = self.fresh();
                self.build(ne, sit.with_unequal(&pair), &live)?;
                self.states[s.0] = Some(StateKind::Cons { pair, eq, ne });
            }
        }
        Ok(())
    }
}

/// Whether some term satisfies the knowledge and matches the pattern.
fn feasible(k: &Knowledge, l: &RenamedPattern) -> bool {
    let mut probe = k.clone();
    for (p, t) in l.linear.positions() {
        if let Some(f) = t.symbol() {
            probe.set_symbol(&p, f);
        }
    }
    for class in l.partition.classes() {
        let mut it = class.iter();
        if let Some(first) = it.next() {
            for q in it {
                probe.add_equal(&PositionPair::new(first.clone(), q.clone()).expect("distinct"));
            }
        }
    }
    probe.is_satisfiable()
}

pub fn construct_anpma(
    patterns: &[IndexedPattern],
    strategy: &dyn Strategy,
    pruning: Pruning,
) -> Result<Automaton, BuildError> {
    let renamed = rename_all(patterns);
    let labels = patterns.iter().map(|p| p.label().to_string()).collect();
    Engine::new(
        Kind::Anpma,
        &renamed,
        labels,
        strategy,
        pruning,
        pruning != Pruning::None,
    )
    .run()
}

/// Linear matching first, comparisons only once nothing is left to inspect.
///
/// The linear phase skips positions where no remaining pattern has a symbol,
/// as a non-redundant APMA would; the comparison phase reasons about nothing
/// but the outcomes of earlier comparisons, as a plain CA would.
pub fn two_phase_baseline(patterns: &[IndexedPattern]) -> Result<Automaton, BuildError> {
    let renamed = rename_all(patterns);
    let labels = patterns.iter().map(|p| p.label().to_string()).collect();
    Engine::new(
        Kind::Anpma,
        &renamed,
        labels,
        &TwoPhase,
        Pruning::None,
        true,
    )
    .run()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Redundancy {
    /// Every term reaching the state leaves through this edge.
    Forced(Edge),
    CheckEq,
    CheckNeq,
    /// Every evaluation from here yields no match.
    Dead,
    NotDetected,
}

/// Sound but incomplete redundancy detection for one non-final state.
pub fn detect_redundant_anpma(m: &Automaton, s: StateId) -> Redundancy {
    let Some(sit) = Situation::along_path(m, s) else {
        return Redundancy::NotDetected;
    };
    let mut k = sit.knowledge(Reasoning::Aggressive);
    match m.state(s) {
        StateKind::Final { .. } => return Redundancy::NotDetected,
        StateKind::Cons { pair, .. } => {
            if k.known_equal(pair) {
                return Redundancy::CheckEq;
            }
            if k.known_unequal(pair) {
                return Redundancy::CheckNeq;
            }
        }
        StateKind::Match { pos, edges } => {
            let has_neq = edges.iter().any(|(e, _)| *e == Edge::Neq);
            let symbols: BTreeSet<&Symbol> = edges
                .iter()
                .filter_map(|(e, _)| match e {
                    Edge::Sym(f) => Some(f),
                    Edge::Neq => None,
                })
                .collect();
            if let Some(f) = k.symbol_at(pos) {
                if symbols.contains(&f) {
                    return Redundancy::Forced(Edge::Sym(f));
                }
                if has_neq {
                    return Redundancy::Forced(Edge::Neq);
                }
            }
            if has_neq && symbols.is_empty() {
                return Redundancy::Forced(Edge::Neq);
            }
            if has_neq {
                let ex = k.excluded_at(pos);
                if symbols.iter().all(|f| ex.contains(*f)) {
                    return Redundancy::Forced(Edge::Neq);
                }
            }
        }
    }
    if is_dead(m, s) {
        Redundancy::Dead
    } else {
        Redundancy::NotDetected
    }
}

fn is_dead(m: &Automaton, s: StateId) -> bool {
    match m.state(s) {
        StateKind::Final { labels } => labels.is_empty(),
        _ => m.successors(s).into_iter().all(|(_, t)| is_dead(m, t)),
    }
}
