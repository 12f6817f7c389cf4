//! The shared tree-shaped automaton representation used by APMAs, CAs and
//! ANPMAs, with evaluation, prefix reconstruction, metrics and structural
//! well-formedness checks.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::EvalError;
use crate::position::{Position, PositionPair};
use crate::term::{Symbol, Term};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Label of an outgoing match-state edge.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Edge {
    Sym(Symbol),
    Neq,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edge::Sym(s) => write!(f, "{s}"),
            Edge::Neq => f.write_str("<>"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StateKind {
    /// Inspects the head symbol at a position. Symbol edges come first in
    /// declaration order, the neq edge (if any) last.
    Match {
        pos: Position,
        edges: Vec<(Edge, StateId)>,
    },
    /// Compares two subterms.
    Cons {
        pair: PositionPair,
        eq: StateId,
        ne: StateId,
    },
    /// Indices into [`Automaton::labels`].
    Final { labels: BTreeSet<usize> },
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Apma,
    Ca,
    Anpma,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Apma => "apma",
            Kind::Ca => "ca",
            Kind::Anpma => "anpma",
        })
    }
}

/// Label of any edge, used when walking paths.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Step {
    Sym(Symbol),
    Neq,
    Yes,
    No,
}

/// What happened in one evaluation step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Action {
    Symbol(Symbol),
    Neq,
    CheckEq,
    CheckNeq,
    /// No transition for the observed symbol and no neq edge.
    Missing,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Symbol(s) => write!(f, "{s}"),
            Action::Neq => f.write_str("<>"),
            Action::CheckEq => f.write_str("Y"),
            Action::CheckNeq => f.write_str("N"),
            Action::Missing => f.write_str("stop"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EvalTrace {
    pub steps: Vec<(StateId, Action)>,
    pub result: BTreeSet<usize>,
}

impl EvalTrace {
    /// Evaluation depth: the number of non-final states visited.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn comparisons(&self) -> usize {
        self.steps
            .iter()
            .filter(|(_, a)| matches!(a, Action::CheckEq | Action::CheckNeq))
            .count()
    }

    pub fn inspections(&self) -> usize {
        self.len() - self.comparisons()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Automaton {
    kind: Kind,
    labels: Vec<String>,
    states: Vec<StateKind>,
    root: StateId,
}

impl Automaton {
    pub fn new(kind: Kind, labels: Vec<String>, states: Vec<StateKind>, root: StateId) -> Self {
        Automaton {
            kind,
            labels,
            states,
            root,
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Pattern (or partition) labels; final states refer to these by index.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn root(&self) -> StateId {
        self.root
    }

    pub fn state(&self, s: StateId) -> &StateKind {
        &self.states[s.0]
    }

    /// Raw access, used by fault-injection tests.
    pub fn state_mut(&mut self, s: StateId) -> &mut StateKind {
        &mut self.states[s.0]
    }

    pub(crate) fn set_root(&mut self, s: StateId) {
        self.root = s;
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len()).map(StateId)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn label_names(&self, set: &BTreeSet<usize>) -> Vec<&str> {
        set.iter().map(|&i| self.labels[i].as_str()).collect()
    }

    pub fn successors(&self, s: StateId) -> Vec<(Step, StateId)> {
        match self.state(s) {
            StateKind::Match { edges, .. } => edges
                .iter()
                .map(|(e, t)| {
                    let step = match e {
                        Edge::Sym(f) => Step::Sym(f.clone()),
                        Edge::Neq => Step::Neq,
                    };
                    (step, *t)
                })
                .collect(),
            StateKind::Cons { eq, ne, .. } => vec![(Step::Yes, *eq), (Step::No, *ne)],
            StateKind::Final { .. } => Vec::new(),
        }
    }

    /// Incoming edge of every reachable state, `None` for the root and for
    /// unreachable states.
    pub fn parents(&self) -> Vec<Option<(StateId, Step)>> {
        let mut parents = vec![None; self.states.len()];
        for s in self.reachable() {
            for (step, t) in self.successors(s) {
                parents[t.0] = Some((s, step));
            }
        }
        parents
    }

    /// The edges from the root to `s`, or `None` if `s` is unreachable.
    pub fn path(&self, s: StateId) -> Option<Vec<(StateId, Step)>> {
        let parents = self.parents();
        let mut out = Vec::new();
        let mut cur = s;
        let mut guard = 0;
        while cur != self.root {
            let (p, step) = parents[cur.0].clone()?;
            out.push((p, step));
            cur = p;
            guard += 1;
            if guard > self.states.len() {
                return None;
            }
        }
        out.reverse();
        Some(out)
    }

    /// States reachable from the root, in depth-first preorder.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.states.len()];
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s.0], true) {
                continue;
            }
            out.push(s);
            for (_, t) in self.successors(s).into_iter().rev() {
                stack.push(t);
            }
        }
        out
    }

    /// Evaluates the automaton on a ground term.
    pub fn eval(&self, t: &Term) -> Result<EvalTrace, EvalError> {
        if !t.is_ground() {
            return Err(EvalError::NotGround);
        }
        let mut steps = Vec::new();
        let mut cur = self.root;
        loop {
            match self.state(cur) {
                StateKind::Final { labels } => {
                    return Ok(EvalTrace {
                        steps,
                        result: labels.clone(),
                    })
                }
                StateKind::Match { pos, edges } => {
                    let sub = t
                        .at(pos)
                        .ok_or_else(|| EvalError::UndefinedPosition(pos.clone()))?;
                    let f = sub.symbol().expect("ground terms have symbols everywhere");
                    let by_sym = edges
                        .iter()
                        .find(|(e, _)| matches!(e, Edge::Sym(g) if g == f));
                    let next = by_sym
                        .map(|(_, n)| (Action::Symbol(f.clone()), *n))
                        .or_else(|| {
                            edges
                                .iter()
                                .find(|(e, _)| *e == Edge::Neq)
                                .map(|(_, n)| (Action::Neq, *n))
                        });
                    match next {
                        Some((a, n)) => {
                            steps.push((cur, a));
                            cur = n;
                        }
                        None => {
                            steps.push((cur, Action::Missing));
                            return Ok(EvalTrace {
                                steps,
                                result: BTreeSet::new(),
                            });
                        }
                    }
                }
                StateKind::Cons { pair, eq, ne } => {
                    let l = t
                        .at(pair.first())
                        .ok_or_else(|| EvalError::UndefinedPosition(pair.first().clone()))?;
                    let r = t
                        .at(pair.second())
                        .ok_or_else(|| EvalError::UndefinedPosition(pair.second().clone()))?;
                    if l == r {
                        steps.push((cur, Action::CheckEq));
                        cur = *eq;
                    } else {
                        steps.push((cur, Action::CheckNeq));
                        cur = *ne;
                    }
                }
            }
        }
    }

    /// The prefix of a state: what the symbol edges on its path reveal.
    /// `None` when the state is unreachable.
    pub fn prefix(&self, s: StateId) -> Option<Term> {
        let mut pref = Term::hole(Position::root());
        for (p, step) in self.path(s)? {
            let StateKind::Match { pos, .. } = self.state(p) else {
                continue;
            };
            let sub = match step {
                Step::Sym(f) => {
                    let args = (1..=f.arity() as u32)
                        .map(|i| Term::hole(pos.child(i)))
                        .collect();
                    Term::app(&f, args).expect("arity respected")
                }
                Step::Neq => Term::neq(),
                _ => continue,
            };
            pref = pref.replace_at(pos, sub).ok()?;
        }
        Some(pref)
    }

    /// Number of final states.
    pub fn breadth(&self) -> usize {
        self.states
            .iter()
            .filter(|s| matches!(s, StateKind::Final { .. }))
            .count()
    }

    pub fn count_match_states(&self) -> usize {
        self.states
            .iter()
            .filter(|s| matches!(s, StateKind::Match { .. }))
            .count()
    }

    pub fn count_cons_states(&self) -> usize {
        self.states
            .iter()
            .filter(|s| matches!(s, StateKind::Cons { .. }))
            .count()
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn max_depth(&self) -> usize {
        let mut best = 0;
        let mut stack = vec![(self.root, 0usize)];
        let mut seen = HashSet::new();
        while let Some((s, d)) = stack.pop() {
            if !seen.insert(s) {
                continue;
            }
            best = best.max(d);
            for (_, t) in self.successors(s) {
                stack.push((t, d + 1));
            }
        }
        best
    }

    /// Drops unreachable states and renumbers the rest, keeping their
    /// relative order.
    pub fn compact(&self) -> Automaton {
        let mut keep: Vec<StateId> = self.reachable();
        keep.sort();
        let mut map = vec![usize::MAX; self.states.len()];
        for (new, old) in keep.iter().enumerate() {
            map[old.0] = new;
        }
        let remap = |s: &StateId| StateId(map[s.0]);
        let states = keep
            .iter()
            .map(|old| match self.state(*old) {
                StateKind::Match { pos, edges } => StateKind::Match {
                    pos: pos.clone(),
                    edges: edges.iter().map(|(e, t)| (e.clone(), remap(t))).collect(),
                },
                StateKind::Cons { pair, eq, ne } => StateKind::Cons {
                    pair: pair.clone(),
                    eq: remap(eq),
                    ne: remap(ne),
                },
                StateKind::Final { labels } => StateKind::Final {
                    labels: labels.clone(),
                },
            })
            .collect();
        Automaton {
            kind: self.kind,
            labels: self.labels.clone(),
            states,
            root: remap(&self.root),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Violation {
    Unreachable(StateId),
    SharedTarget(StateId),
    RootHasParent,
    RootNotEpsilon(Position),
    NotTopDown(StateId),
    NotCanonical(StateId),
    RepeatedPair(StateId),
    DuplicateEdge(StateId),
    WrongStateKind(StateId),
    BadFinalLabel(StateId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unreachable(s) => write!(f, "state {s} is unreachable"),
            Violation::SharedTarget(s) => write!(f, "state {s} has more than one incoming edge"),
            Violation::RootHasParent => f.write_str("an edge targets the root"),
            Violation::RootNotEpsilon(p) => write!(f, "root inspects {p} instead of e"),
            Violation::NotTopDown(s) => write!(f, "state {s} is not top-down"),
            Violation::NotCanonical(s) => {
                write!(
                    f,
                    "state {s} repeats a position already inspected on its path"
                )
            }
            Violation::RepeatedPair(s) => {
                write!(f, "state {s} repeats a comparison already made on its path")
            }
            Violation::DuplicateEdge(s) => write!(f, "state {s} has two edges with the same label"),
            Violation::WrongStateKind(s) => {
                write!(f, "state {s} has a kind not allowed in this automaton")
            }
            Violation::BadFinalLabel(s) => write!(f, "state {s} has an unknown final label"),
        }
    }
}

/// Structural checks: tree shape, reachability, root at `e`, top-down and
/// canonical match states, no comparison repeated on a path.
pub fn check_well_formed(m: &Automaton) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut incoming = vec![0usize; m.len()];
    for s in m.state_ids() {
        let succ = m.successors(s);
        if let StateKind::Match { edges, .. } = m.state(s) {
            let distinct: HashSet<&Edge> = edges.iter().map(|(e, _)| e).collect();
            if distinct.len() != edges.len() {
                out.push(Violation::DuplicateEdge(s));
            }
        }
        for (_, t) in succ {
            incoming[t.0] += 1;
        }
        let misplaced = matches!(
            (m.kind(), m.state(s)),
            (Kind::Apma, StateKind::Cons { .. }) | (Kind::Ca, StateKind::Match { .. })
        );
        if misplaced {
            out.push(Violation::WrongStateKind(s));
        }
        if let StateKind::Final { labels } = m.state(s) {
            if labels.iter().any(|&i| i >= m.labels().len()) {
                out.push(Violation::BadFinalLabel(s));
            }
        }
    }
    if incoming[m.root().0] > 0 {
        out.push(Violation::RootHasParent);
    }
    for s in m.state_ids() {
        if s != m.root() && incoming[s.0] > 1 {
            out.push(Violation::SharedTarget(s));
        }
    }
    if m.kind() != Kind::Ca {
        if let StateKind::Match { pos, .. } = m.state(m.root()) {
            if !pos.is_root() {
                out.push(Violation::RootNotEpsilon(pos.clone()));
            }
        }
    }

    // Walk every root-to-leaf path carrying the visible positions, the
    // inspected positions and the compared pairs.
    let mut reached = vec![false; m.len()];
    let mut visible = BTreeSet::from([Position::root()]);
    let mut inspected = BTreeSet::new();
    let mut compared = BTreeSet::new();
    walk(
        m,
        m.root(),
        &mut visible,
        &mut inspected,
        &mut compared,
        &mut reached,
        &mut out,
    );
    for s in m.state_ids() {
        if !reached[s.0] {
            out.push(Violation::Unreachable(s));
        }
    }
    out
}

fn walk(
    m: &Automaton,
    s: StateId,
    visible: &mut BTreeSet<Position>,
    inspected: &mut BTreeSet<Position>,
    compared: &mut BTreeSet<PositionPair>,
    reached: &mut [bool],
    out: &mut Vec<Violation>,
) {
    if std::mem::replace(&mut reached[s.0], true) {
        return;
    }
    match m.state(s) {
        StateKind::Final { .. } => {}
        StateKind::Match { pos, edges } => {
            if !visible.contains(pos) {
                out.push(Violation::NotTopDown(s));
            }
            let fresh = inspected.insert(pos.clone());
            if !fresh {
                out.push(Violation::NotCanonical(s));
            }
            for (e, t) in edges {
                let mut added = Vec::new();
                if let Edge::Sym(f) = e {
                    for i in 1..=f.arity() as u32 {
                        let c = pos.child(i);
                        if visible.insert(c.clone()) {
                            added.push(c);
                        }
                    }
                }
                walk(m, *t, visible, inspected, compared, reached, out);
                for c in added {
                    visible.remove(&c);
                }
            }
            if fresh {
                inspected.remove(pos);
            }
        }
        StateKind::Cons { pair, eq, ne } => {
            if m.kind() != Kind::Ca
                && !(visible.contains(pair.first()) && visible.contains(pair.second()))
            {
                out.push(Violation::NotTopDown(s));
            }
            let fresh = compared.insert(pair.clone());
            if !fresh {
                out.push(Violation::RepeatedPair(s));
            }
            walk(m, *eq, visible, inspected, compared, reached, out);
            walk(m, *ne, visible, inspected, compared, reached, out);
            if fresh {
                compared.remove(pair);
            }
        }
    }
}
