//! Pointwise comparison of evaluation depth between two automata built for
//! the same patterns.

use crate::automaton::Automaton;
use crate::error::CompareError;
use crate::term::Term;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    /// The first automaton is never slower and sometimes faster.
    FirstDominates,
    SecondDominates,
    Equal,
    Incomparable,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub verdict: Verdict,
    /// A term on which the first automaton takes fewer steps.
    pub first_faster: Option<Term>,
    /// A term on which the second automaton takes fewer steps.
    pub second_faster: Option<Term>,
    pub terms: usize,
}

pub fn compare_efficiency(
    first: &Automaton,
    second: &Automaton,
    universe: &[Term],
) -> Result<Comparison, CompareError> {
    let mut first_faster = None;
    let mut second_faster = None;
    for t in universe {
        let a = first.eval(t)?;
        let b = second.eval(t)?;
        if a.result != b.result {
            return Err(CompareError::Disagree {
                term: t.to_string(),
                left: a.result.into_iter().collect(),
                right: b.result.into_iter().collect(),
            });
        }
        if a.len() < b.len() && first_faster.is_none() {
            first_faster = Some(t.clone());
        }
        if b.len() < a.len() && second_faster.is_none() {
            second_faster = Some(t.clone());
        }
    }
    let verdict = match (&first_faster, &second_faster) {
        (None, None) => Verdict::Equal,
        (Some(_), None) => Verdict::FirstDominates,
        (None, Some(_)) => Verdict::SecondDominates,
        (Some(_), Some(_)) => Verdict::Incomparable,
    };
    Ok(Comparison {
        verdict,
        first_faster,
        second_faster,
        terms: universe.len(),
    })
}
