//! Ranked alphabets and maximally shared first-order terms.
//!
//! Every [`Term`] is created through one process-wide intern table, so two
//! terms are structurally equal exactly when their ids are equal and equality
//! is a single integer comparison.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{ParseError, TermError};
use crate::position::Position;

/// A function symbol with a fixed arity.
///
/// Equality and hashing use name and arity; `order` only records the
/// declaration order within the signature that created the symbol.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

struct SymbolData {
    name: Box<str>,
    arity: usize,
    order: u32,
}

impl Symbol {
    /// A symbol outside any signature. Its declaration order is `u32::MAX`.
    pub fn new(name: &str, arity: usize) -> Symbol {
        Symbol::with_order(name, arity, u32::MAX)
    }

    fn with_order(name: &str, arity: usize, order: u32) -> Symbol {
        assert!(!name.is_empty(), "symbol names are non-empty");
        Symbol(Arc::new(SymbolData {
            name: name.into(),
            arity,
            order,
        }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn arity(&self) -> usize {
        self.0.arity
    }

    pub fn order(&self) -> u32 {
        self.0.order
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.arity == other.0.arity && self.0.name == other.0.name)
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
        self.0.arity.hash(state);
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.order, &self.0.name, self.0.arity).cmp(&(
            other.0.order,
            &other.0.name,
            other.0.arity,
        ))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.name, self.0.arity)
    }
}

/// A ranked alphabet. Identifiers that are not declared here are variables.
#[derive(Clone, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a signature from `(name, arity)` pairs in declaration order.
    pub fn from_decls(decls: &[(&str, usize)]) -> Result<Self, ParseError> {
        let mut sig = Signature::new();
        for &(name, arity) in decls {
            sig.declare(name, arity)?;
        }
        Ok(sig)
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> Result<Symbol, ParseError> {
        if name.is_empty() {
            return Err(ParseError::BadDeclaration(name.to_string()));
        }
        if self.by_name.contains_key(name) {
            return Err(ParseError::DuplicateSymbol(name.to_string()));
        }
        let sym = Symbol::with_order(name, arity, self.symbols.len() as u32);
        self.symbols.push(sym.clone());
        self.by_name.insert(name.to_string(), sym.clone());
        Ok(sym)
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.by_name.get(name)
    }

    /// The symbol by name, panicking if it is not declared. Test convenience.
    pub fn sym(&self, name: &str) -> Symbol {
        self.get(name)
            .unwrap_or_else(|| panic!("symbol `{name}` not declared"))
            .clone()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_variable_name(&self, name: &str) -> bool {
        !self.by_name.contains_key(name)
    }

    /// Interns an uninterned tree. In strict mode every identifier must be a
    /// declared symbol; otherwise undeclared leaves become variables.
    pub fn intern(&self, shape: &Shape, strict: bool) -> Result<Term, TermError> {
        match self.get(&shape.name) {
            Some(sym) => {
                let args = shape
                    .args
                    .iter()
                    .map(|a| self.intern(a, strict))
                    .collect::<Result<Vec<_>, _>>()?;
                Term::app(sym, args)
            }
            None if strict || !shape.args.is_empty() => {
                Err(TermError::UnknownSymbol(shape.name.clone()))
            }
            None => Ok(Term::var(&shape.name)),
        }
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.symbols.iter()).finish()
    }
}

/// An uninterned term tree, the input to [`Signature::intern`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub name: String,
    pub args: Vec<Shape>,
}

impl Shape {
    pub fn leaf(name: &str) -> Shape {
        Shape {
            name: name.to_string(),
            args: Vec::new(),
        }
    }

    pub fn node(name: &str, args: Vec<Shape>) -> Shape {
        Shape {
            name: name.to_string(),
            args,
        }
    }
}

/// Variables: named ones from user input, and position variables `□_p` that
/// only the library creates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Named(Arc<str>),
    Hole(Position),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Named(n) => f.write_str(n),
            Var::Hole(p) => write!(f, "?{p}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Head {
    Fun(Symbol),
    Var(Var),
    /// The "none of the expected symbols" marker; only occurs in prefixes.
    Neq,
}

/// A hash-consed term. Cloning is a reference-count increment.
#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    id: u64,
    head: Head,
    args: Box<[Term]>,
    ground: bool,
    depth: u32,
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Fun(Box<str>, usize, Box<[u64]>),
    Var(Var),
    Neq,
}

struct Table {
    map: HashMap<Key, Term>,
    next: u64,
}

fn table() -> &'static Mutex<Table> {
    static TABLE: OnceLock<Mutex<Table>> = OnceLock::new();
    TABLE.get_or_init(|| {
        Mutex::new(Table {
            map: HashMap::new(),
            next: 0,
        })
    })
}

fn intern_node(key: Key, head: Head, args: Vec<Term>) -> Term {
    let mut table = table().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(t) = table.map.get(&key) {
        return t.clone();
    }
    let ground = match &head {
        Head::Var(_) => false,
        _ => args.iter().all(|a| a.is_ground()),
    };
    let depth = args.iter().map(|a| a.depth() + 1).max().unwrap_or(0);
    let id = table.next;
    table.next += 1;
    let t = Term(Arc::new(Node {
        id,
        head,
        args: args.into_boxed_slice(),
        ground,
        depth,
    }));
    table.map.insert(key, t.clone());
    t
}

impl Term {
    pub fn app(sym: &Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        if args.len() != sym.arity() {
            return Err(TermError::ArityMismatch {
                symbol: sym.name().to_string(),
                expected: sym.arity(),
                found: args.len(),
            });
        }
        let ids: Box<[u64]> = args.iter().map(|a| a.id()).collect();
        let key = Key::Fun(sym.name().into(), sym.arity(), ids);
        Ok(intern_node(key, Head::Fun(sym.clone()), args))
    }

    pub fn constant(sym: &Symbol) -> Result<Term, TermError> {
        Term::app(sym, Vec::new())
    }

    pub fn var(name: &str) -> Term {
        let v = Var::Named(name.into());
        intern_node(Key::Var(v.clone()), Head::Var(v), Vec::new())
    }

    /// The position variable `□_p`.
    pub fn hole(p: Position) -> Term {
        let v = Var::Hole(p);
        intern_node(Key::Var(v.clone()), Head::Var(v), Vec::new())
    }

    pub(crate) fn neq() -> Term {
        intern_node(Key::Neq, Head::Neq, Vec::new())
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn head(&self) -> &Head {
        &self.0.head
    }

    pub fn args(&self) -> &[Term] {
        &self.0.args
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        match &self.0.head {
            Head::Fun(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Var> {
        match &self.0.head {
            Head::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.0.head, Head::Var(_))
    }

    pub fn is_neq(&self) -> bool {
        matches!(self.0.head, Head::Neq)
    }

    /// No variables anywhere. A prefix containing the neq marker but no
    /// variables counts as ground.
    pub fn is_ground(&self) -> bool {
        self.0.ground
    }

    /// Length of the longest position.
    pub fn depth(&self) -> u32 {
        self.0.depth
    }

    /// `t[p]`, or `None` where the position does not exist.
    pub fn at(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in p.path() {
            t = t.args().get(i as usize - 1)?;
        }
        Some(t)
    }

    /// `t[p/u]`
    pub fn replace_at(&self, p: &Position, u: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[u32], u: Term, full: &Position) -> Result<Term, TermError> {
            let Some((&i, rest)) = path.split_first() else {
                return Ok(u);
            };
            let idx = i as usize - 1;
            if idx >= t.args().len() {
                return Err(TermError::UndefinedPosition(full.clone()));
            }
            let mut args = t.args().to_vec();
            args[idx] = go(&args[idx], rest, u, full)?;
            match t.head() {
                Head::Fun(f) => Term::app(f, args),
                _ => unreachable!("only applications have children"),
            }
        }
        go(self, p.path(), u, p)
    }

    /// Positions holding variables.
    pub fn fringe(&self) -> BTreeSet<Position> {
        self.positions()
            .into_iter()
            .filter(|(_, t)| t.is_var())
            .map(|(p, _)| p)
            .collect()
    }

    /// Every position of the term with its subterm, in preorder.
    pub fn positions(&self) -> Vec<(Position, Term)> {
        let mut out = Vec::new();
        let mut stack = vec![(Position::root(), self.clone())];
        while let Some((p, t)) = stack.pop() {
            for (k, a) in t.args().iter().enumerate().rev() {
                stack.push((p.child(k as u32 + 1), a.clone()));
            }
            out.push((p, t));
        }
        out
    }

    /// Every variable occurrence in preorder.
    pub fn variables(&self) -> Vec<(Position, Var)> {
        self.positions()
            .into_iter()
            .filter_map(|(p, t)| t.as_var().map(|v| (p, v.clone())))
            .collect()
    }

    pub fn is_linear(&self) -> bool {
        let vars = self.variables();
        let distinct: BTreeSet<&Var> = vars.iter().map(|(_, v)| v).collect();
        distinct.len() == vars.len()
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.head() {
            Head::Var(v) => write!(f, "{v}"),
            Head::Neq => f.write_str("<>"),
            Head::Fun(s) => {
                f.write_str(s.name())?;
                if !self.args().is_empty() {
                    f.write_str("(")?;
                    for (k, a) in self.args().iter().enumerate() {
                        if k > 0 {
                            f.write_str(", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::position::pos;

    fn sig() -> Signature {
        Signature::from_decls(&[("f", 2), ("g", 1), ("a", 0), ("b", 0), ("c", 0)]).unwrap()
    }

    fn t(sig: &Signature, name: &str, args: Vec<Term>) -> Term {
        Term::app(&sig.sym(name), args).unwrap()
    }

    #[test]
    fn interning_is_idempotent() {
        let s = sig();
        let a = t(&s, "a", vec![]);
        let x = t(&s, "f", vec![a.clone(), a.clone()]);
        let y = t(&s, "f", vec![a.clone(), a]);
        assert_eq!(x.id(), y.id());
        assert_ne!(t(&s, "a", vec![]).id(), t(&s, "b", vec![]).id());
    }

    #[test]
    fn arity_is_checked() {
        let s = sig();
        let a = t(&s, "a", vec![]);
        assert!(matches!(
            Term::app(&s.sym("f"), vec![a]),
            Err(TermError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn strict_intern_rejects_unknown_leaves() {
        let s = sig();
        let shape = Shape::node("f", vec![Shape::leaf("a"), Shape::leaf("x")]);
        assert!(s.intern(&shape, false).is_ok());
        assert_eq!(
            s.intern(&shape, true),
            Err(TermError::UnknownSymbol("x".into()))
        );
        let bad = Shape::node("h", vec![Shape::leaf("a")]);
        assert!(s.intern(&bad, false).is_err());
    }

    #[test]
    fn subterms_and_replacement() {
        let s = sig();
        let a = t(&s, "a", vec![]);
        let b = t(&s, "b", vec![]);
        let gb = t(&s, "g", vec![b.clone()]);
        let term = t(&s, "f", vec![a.clone(), gb]);
        assert_eq!(term.at(&pos("e")), Some(&term));
        assert_eq!(term.at(&pos("2.1")), Some(&b));
        assert_eq!(term.at(&pos("3")), None);
        assert_eq!(term.at(&pos("1.1")), None);

        let c = t(&s, "c", vec![]);
        assert_eq!(term.replace_at(&pos("e"), c.clone()).unwrap(), c);
        let fab = t(&s, "f", vec![a.clone(), b.clone()]);
        assert_eq!(
            fab.replace_at(&pos("2"), c.clone()).unwrap(),
            t(&s, "f", vec![a.clone(), c.clone()])
        );
        let ga = t(&s, "g", vec![a]);
        assert!(ga.replace_at(&pos("1.1"), b).is_err());
    }

    #[test]
    fn fringe_of_annotated_term() {
        let s = sig();
        let term = t(
            &s,
            "f",
            vec![
                Term::hole(pos("1")),
                t(&s, "g", vec![Term::hole(pos("2.1"))]),
            ],
        );
        assert_eq!(term.fringe(), [pos("1"), pos("2.1")].into_iter().collect());
        let fab = t(&s, "f", vec![t(&s, "a", vec![]), t(&s, "b", vec![])]);
        assert!(fab.fringe().is_empty());
        let hole = Term::hole(pos("e"));
        assert_eq!(hole.fringe(), [pos("e")].into_iter().collect());
    }

    #[test]
    fn linearity() {
        let s = sig();
        let x = Term::var("x");
        assert!(!t(&s, "f", vec![x.clone(), x.clone()]).is_linear());
        assert!(t(&s, "f", vec![x, Term::var("y")]).is_linear());
    }

    #[test]
    fn display() {
        let s = sig();
        let term = t(
            &s,
            "f",
            vec![t(&s, "a", vec![]), t(&s, "g", vec![Term::var("x")])],
        );
        assert_eq!(term.to_string(), "f(a, g(x))");
        assert_eq!(Term::hole(pos("1.2")).to_string(), "?1.2");
        assert_eq!(Term::neq().to_string(), "<>");
    }
}
