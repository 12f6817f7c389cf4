//! What is known about an input term at some automaton state: which
//! positions hold equal subterms, which hold different ones, and which head
//! symbols are known or excluded.
//!
//! Conflicts are derived from symbol clashes, from an unequal pair ending up
//! in one class, and from subterm inequality (a term never equals one of its
//! strict subterms, so no class may be strictly below itself).

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::position::{Position, PositionPair};
use crate::term::Symbol;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Reasoning {
    /// Transitivity of equality, symbol clashes and subterm inequality.
    Basic,
    /// Adds congruence in both directions and excluded-symbol sets from
    /// neq edges.
    Aggressive,
}

/// Upper bound on tracked positions; saturation stops growing past it.
/// Stopping early only loses knowledge, it never makes conclusions unsound.
const MAX_TRACKED: usize = 4096;

#[derive(Clone, Debug)]
pub struct Knowledge {
    mode: Reasoning,
    ids: HashMap<Position, usize>,
    positions: Vec<Position>,
    parent: Vec<usize>,
    symbol: Vec<Option<Symbol>>,
    excluded: Vec<BTreeSet<Symbol>>,
    unequal: Vec<(usize, usize)>,
    clash: bool,
    saturated: bool,
}

impl Knowledge {
    pub fn new(mode: Reasoning) -> Self {
        Knowledge {
            mode,
            ids: HashMap::new(),
            positions: Vec::new(),
            parent: Vec::new(),
            symbol: Vec::new(),
            excluded: Vec::new(),
            unequal: Vec::new(),
            clash: false,
            saturated: true,
        }
    }

    pub fn mode(&self) -> Reasoning {
        self.mode
    }

    fn node(&mut self, p: &Position) -> usize {
        if let Some(&i) = self.ids.get(p) {
            return i;
        }
        let i = self.positions.len();
        self.ids.insert(p.clone(), i);
        self.positions.push(p.clone());
        self.parent.push(i);
        self.symbol.push(None);
        self.excluded.push(BTreeSet::new());
        self.saturated = false;
        i
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn find_ro(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        let moved = self.symbol[gone].take();
        match (&self.symbol[keep], moved) {
            (Some(f), Some(g)) if *f != g => self.clash = true,
            (None, Some(g)) => self.symbol[keep] = Some(g),
            _ => {}
        }
        let ex = std::mem::take(&mut self.excluded[gone]);
        self.excluded[keep].extend(ex);
        self.check_excluded(keep);
        self.saturated = false;
        true
    }

    fn check_excluded(&mut self, root: usize) {
        if let Some(f) = &self.symbol[root] {
            if self.excluded[root].contains(f) {
                self.clash = true;
            }
        }
    }

    /// Records that the head symbol at `p` is `f`.
    pub fn set_symbol(&mut self, p: &Position, f: &Symbol) {
        let i = self.node(p);
        let r = self.find(i);
        match &self.symbol[r] {
            Some(g) if g != f => self.clash = true,
            Some(_) => {}
            None => {
                self.symbol[r] = Some(f.clone());
                self.saturated = false;
            }
        }
        self.check_excluded(r);
    }

    /// Records that the head symbol at `p` is none of `symbols`. Ignored in
    /// basic mode.
    pub fn exclude(&mut self, p: &Position, symbols: &BTreeSet<Symbol>) {
        if self.mode == Reasoning::Basic || symbols.is_empty() {
            return;
        }
        let i = self.node(p);
        let r = self.find(i);
        self.excluded[r].extend(symbols.iter().cloned());
        self.check_excluded(r);
        self.saturated = false;
    }

    pub fn add_equal(&mut self, pair: &PositionPair) {
        let a = self.node(pair.first());
        let b = self.node(pair.second());
        self.union(a, b);
    }

    pub fn add_unequal(&mut self, pair: &PositionPair) {
        let a = self.node(pair.first());
        let b = self.node(pair.second());
        self.unequal.push((a, b));
    }

    /// The known head symbol at `p`, if any.
    pub fn symbol_at(&mut self, p: &Position) -> Option<Symbol> {
        self.saturate();
        let i = *self.ids.get(p)?;
        let r = self.find(i);
        self.symbol[r].clone()
    }

    /// Symbols known not to be the head at `p`.
    pub fn excluded_at(&mut self, p: &Position) -> BTreeSet<Symbol> {
        self.saturate();
        match self.ids.get(p) {
            Some(&i) => {
                let r = self.find(i);
                self.excluded[r].clone()
            }
            None => BTreeSet::new(),
        }
    }

    /// Applies congruence until nothing changes (aggressive mode only).
    fn saturate(&mut self) {
        if self.saturated {
            return;
        }
        self.saturated = true;
        if self.mode == Reasoning::Basic {
            return;
        }
        loop {
            if self.clash || self.has_cycle() || self.positions.len() > MAX_TRACKED {
                return;
            }
            let mut changed = false;

            // Downward: equal terms with a known head have equal children.
            let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for i in 0..self.positions.len() {
                let r = self.find(i);
                members.entry(r).or_default().push(i);
            }
            for (r, ms) in &members {
                let Some(f) = self.symbol[*r].clone() else {
                    continue;
                };
                if ms.len() < 2 {
                    continue;
                }
                let first = self.positions[ms[0]].clone();
                for &m in &ms[1..] {
                    let other = self.positions[m].clone();
                    for k in 1..=f.arity() as u32 {
                        let a = self.node(&first.child(k));
                        let b = self.node(&other.child(k));
                        changed |= self.union(a, b);
                    }
                }
            }

            // Upward: same head and pairwise equal children means equal.
            let mut seen: HashMap<(Symbol, Vec<usize>), usize> = HashMap::new();
            let roots: Vec<(usize, Symbol, Position)> = members
                .iter()
                .filter_map(|(r, ms)| {
                    self.symbol[*r]
                        .clone()
                        .map(|f| (*r, f, self.positions[ms[0]].clone()))
                })
                .collect();
            for (r, f, p) in roots {
                let kids: Vec<usize> = (1..=f.arity() as u32)
                    .map(|k| {
                        let i = self.node(&p.child(k));
                        self.find(i)
                    })
                    .collect();
                let r = self.find(r);
                match seen.get(&(f.clone(), kids.clone())) {
                    Some(&other) => changed |= self.union(other, r),
                    None => {
                        seen.insert((f, kids), r);
                    }
                }
            }

            if !changed {
                return;
            }
        }
    }

    /// Whether some class is (transitively) a strict subterm of itself.
    fn has_cycle(&self) -> bool {
        let n = self.positions.len();
        let mut edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (i, p) in self.positions.iter().enumerate() {
            let ri = self.find_ro(i);
            for (j, q) in self.positions.iter().enumerate() {
                if p.is_strict_prefix_of(q) {
                    let rj = self.find_ro(j);
                    if ri == rj {
                        return true;
                    }
                    edges[ri].insert(rj);
                }
            }
        }
        // Iterative three-colour DFS.
        let mut colour = vec![0u8; n];
        for start in 0..n {
            if colour[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, edges[start].iter().copied().collect::<Vec<_>>())];
            colour[start] = 1;
            while let Some((v, todo)) = stack.last_mut() {
                match todo.pop() {
                    Some(w) => match colour[w] {
                        1 => return true,
                        0 => {
                            colour[w] = 1;
                            let next = edges[w].iter().copied().collect();
                            stack.push((w, next));
                        }
                        _ => {}
                    },
                    None => {
                        colour[*v] = 2;
                        stack.pop();
                    }
                }
            }
        }
        false
    }

    /// False when no term can satisfy everything recorded.
    pub fn is_satisfiable(&mut self) -> bool {
        self.saturate();
        if self.clash {
            return false;
        }
        let pairs = self.unequal.clone();
        for (a, b) in pairs {
            if self.find(a) == self.find(b) {
                return false;
            }
        }
        !self.has_cycle()
    }

    pub fn known_equal(&mut self, pair: &PositionPair) -> bool {
        self.saturate();
        match (self.ids.get(pair.first()), self.ids.get(pair.second())) {
            (Some(&a), Some(&b)) => self.find(a) == self.find(b),
            _ => false,
        }
    }

    /// Whether assuming equality of the pair contradicts what is known.
    pub fn known_unequal(&self, pair: &PositionPair) -> bool {
        let mut probe = self.clone();
        probe.add_equal(pair);
        !probe.is_satisfiable()
    }
}
