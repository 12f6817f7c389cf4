//! Adaptive pattern matching automata for linear pattern sets.

use crate::anpma::{Engine, Pruning};
use crate::automaton::{Automaton, EvalTrace, Kind};
use crate::error::{BuildError, EvalError};
use crate::matching::IndexedPattern;
use crate::rename::rename_all;
use crate::strategy::Strategy;
use crate::term::Term;

/// Builds an APMA. With `nonredundant`, positions at which no remaining
/// pattern has a function symbol are never inspected, so no state is dead or
/// forced.
pub fn construct_apma(
    patterns: &[IndexedPattern],
    strategy: &dyn Strategy,
    nonredundant: bool,
) -> Result<Automaton, BuildError> {
    if let Some(p) = patterns.iter().find(|p| !p.term().is_linear()) {
        return Err(BuildError::NonLinear(p.label().to_string()));
    }
    let renamed = rename_all(patterns);
    let labels = patterns.iter().map(|p| p.label().to_string()).collect();
    Engine::new(
        Kind::Apma,
        &renamed,
        labels,
        strategy,
        Pruning::None,
        nonredundant,
    )
    .run()
}

pub fn eval_apma(m: &Automaton, t: &Term) -> Result<EvalTrace, EvalError> {
    m.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{check_well_formed, StateKind};
    use crate::strategy::{LeftToRight, Scripted};
    use crate::term::Signature;

    fn ternary() -> (Signature, Vec<IndexedPattern>) {
        let sig = Signature::from_decls(&[("f", 3), ("a", 0), ("b", 0), ("c", 0)]).unwrap();
        let c = |n: &str| Term::constant(&sig.sym(n)).unwrap();
        let f = |x: Term, y: Term, z: Term| Term::app(&sig.sym("f"), vec![x, y, z]).unwrap();
        let x = Term::var("x");
        let pats = vec![
            IndexedPattern::new("l1", f(c("a"), c("b"), x.clone())).unwrap(),
            IndexedPattern::new("l2", f(c("c"), c("b"), x)).unwrap(),
            IndexedPattern::new("l3", f(c("c"), c("b"), c("c"))).unwrap(),
        ];
        (sig, pats)
    }

    #[test]
    fn ternary_state_counts() {
        let (_, pats) = ternary();
        let m = construct_apma(&pats, &Scripted::parse("e 2 1 3 3").unwrap(), false).unwrap();
        assert_eq!(m.len(), 8);
        assert!(check_well_formed(&m).is_empty());
        let m = construct_apma(&pats, &Scripted::parse("e 1 2 3 3").unwrap(), false).unwrap();
        assert_eq!(m.len(), 9);
    }

    #[test]
    fn nonredundant_skips_variable_positions() {
        let (_, pats) = ternary();
        let m = construct_apma(&pats, &Scripted::parse("e 2 1 3").unwrap(), true).unwrap();
        // The neq-only state under `a` disappears.
        assert_eq!(m.len(), 7);
        for s in m.state_ids() {
            if let StateKind::Match { edges, .. } = m.state(s) {
                assert!(edges.len() > 1 || !matches!(edges[0].0, crate::automaton::Edge::Neq));
            }
        }
    }

    #[test]
    fn nonlinear_patterns_are_rejected() {
        let sig = Signature::from_decls(&[("f", 2)]).unwrap();
        let x = Term::var("x");
        let p = IndexedPattern::new("bad", Term::app(&sig.sym("f"), vec![x.clone(), x]).unwrap())
            .unwrap();
        assert_eq!(
            construct_apma(&[p], &LeftToRight, false),
            Err(BuildError::NonLinear("bad".into()))
        );
    }

    #[test]
    fn empty_pattern_set_gives_one_final() {
        let m = construct_apma(&[], &LeftToRight, false).unwrap();
        assert_eq!(m.len(), 1);
        let sig = Signature::from_decls(&[("a", 0)]).unwrap();
        let t = Term::constant(&sig.sym("a")).unwrap();
        assert!(eval_apma(&m, &t).unwrap().result.is_empty());
    }
}
